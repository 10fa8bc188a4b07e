"""Shared fixtures: the generated benchmark dataset and one pipeline run."""

from __future__ import annotations

import pytest

from joininfer.catalog import load_manifest
from joininfer.datagen import generate_tpch_style
from joininfer.pipeline import RunConfig, run_inference


@pytest.fixture(scope="session")
def tpch_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("tpch")
    manifest_path, truth_path = generate_tpch_style(out, scale=0.01, seed=42)
    return {"dir": out, "manifest": manifest_path, "truth": truth_path}


@pytest.fixture(scope="session")
def tpch_manifest(tpch_dir):
    return load_manifest(tpch_dir["manifest"])


@pytest.fixture(scope="session")
def tpch_config(tpch_dir):
    return RunConfig(
        manifest_path=str(tpch_dir["manifest"]),
        output_dir=str(tpch_dir["dir"] / "out"),
    )


@pytest.fixture(scope="session")
def tpch_result(tpch_manifest, tpch_config):
    return run_inference(tpch_manifest, tpch_config)
