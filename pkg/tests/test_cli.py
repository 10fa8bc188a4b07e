"""CLI: exit codes, config layering, artifact emission."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from joininfer.cli import EXIT_CODES, _build_config, main
from joininfer.errors import ConfigError


@pytest.fixture()
def runner():
    return CliRunner()


class TestConfigLayering:
    def test_defaults(self):
        config = _build_config(None)
        assert config.tau == 0.4 and config.x == 0.95 and config.sample_size == 10**6

    def test_file_overrides_defaults(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"tau": 0.5, "seed": 9}), encoding="utf-8")
        config = _build_config(str(p))
        assert config.tau == 0.5 and config.seed == 9

    def test_flag_overrides_file(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"tau": 0.5}), encoding="utf-8")
        config = _build_config(str(p), tau=0.6)
        assert config.tau == 0.6

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"turbo": True}), encoding="utf-8")
        with pytest.raises(ConfigError):
            _build_config(str(p))

    def test_invalid_value_rejected(self):
        with pytest.raises(ConfigError):
            _build_config(None, tau=2.0)


class TestExitCodes:
    def test_bad_config_exit_code(self, runner, tpch_dir, tmp_path):
        result = runner.invoke(
            main,
            [
                "infer", "--manifest", str(tpch_dir["manifest"]),
                "--tau", "2.0", "--output-dir", str(tmp_path),
            ],
        )
        assert result.exit_code == EXIT_CODES[ConfigError]
        err_lines = [l for l in result.stderr.splitlines() if l]
        assert len(err_lines) == 1
        assert err_lines[0].startswith("error: ConfigError:")

    def test_missing_manifest_exit_code(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["infer", "--manifest", str(tmp_path / "ghost.json"),
             "--output-dir", str(tmp_path)],
        )
        from joininfer.errors import ManifestError

        assert result.exit_code == EXIT_CODES[ManifestError]


class TestInfer:
    def test_writes_document_and_echoes_path(self, runner, tpch_dir, tmp_path):
        result = runner.invoke(
            main,
            ["infer", "--manifest", str(tpch_dir["manifest"]),
             "--output-dir", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        out_path = result.output.strip()
        assert out_path.endswith("join_graph.json")
        doc = json.loads((tmp_path / "join_graph.json").read_text())
        assert doc["database"] and doc["inds"]

    def test_deterministic_byte_identical(self, runner, tpch_dir, tmp_path):
        texts = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            result = runner.invoke(
                main,
                ["infer", "--manifest", str(tpch_dir["manifest"]),
                 "--seed", "7", "--output-dir", str(out)],
            )
            assert result.exit_code == 0, result.output
            texts.append((out / "join_graph.json").read_bytes())
        assert texts[0] == texts[1]


class TestEval:
    def test_perfect_pk_metrics_on_benchmark(self, runner, tpch_dir, tmp_path):
        result = runner.invoke(
            main,
            ["eval", "--manifest", str(tpch_dir["manifest"]),
             "--truth", str(tpch_dir["truth"]),
             "--output-dir", str(tmp_path),
             "--output-format", "structured"],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["primary_keys"]["recall"] == 1.0
        assert report["primary_keys"]["accuracy"] == 1.0
        csv_text = (tmp_path / "metrics.csv").read_text()
        assert "pk_recall,1.0" in csv_text


class TestProfile:
    def test_structured_output(self, runner, tpch_dir):
        result = runner.invoke(
            main,
            ["profile", "--manifest", str(tpch_dir["manifest"]),
             "--output-format", "structured"],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["columns"]["region.r_regionkey"]["distinct"] == 5
