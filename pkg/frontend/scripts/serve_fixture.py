"""Start a review service seeded with the benchmark graph, for UI tests.

Generates the 8-table benchmark dataset, runs inference once, writes the
graph document, then serves the HTTP API on the requested port.
"""

from __future__ import annotations

import argparse
import tempfile
from pathlib import Path

from joininfer.datagen import generate_tpch_style
from joininfer.pipeline import RunConfig, run_from_config, write_document
from joininfer.service import serve


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, required=True)
    parser.add_argument("--dir", default=None, help="work dir (default: temp)")
    args = parser.parse_args()

    work = Path(args.dir or tempfile.mkdtemp(prefix="review-ui-fixture-"))
    manifest, _truth = generate_tpch_style(work / "data", scale=0.01, seed=42)
    out = work / "out"
    config = RunConfig(manifest_path=str(manifest), output_dir=str(out))
    result = run_from_config(config)
    graph_path = write_document(result.document, out / "join_graph.json")
    serve(manifest, config, out / "feedback.ndjson", graph_path, port=args.port)


if __name__ == "__main__":
    main()
