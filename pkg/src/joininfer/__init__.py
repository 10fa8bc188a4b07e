"""Join inference for tabular datasets.

Profiles columns, detects likely primary keys, discovers and scores
inclusion dependencies, adjudicates them semantically, mines SQL query
history for join evidence, and generates left-join trees — all behind a
deterministic, seedable pipeline with an HTTP review service on top.
"""

from .catalog import SchemaManifest, TypeTag, load_manifest
from .ind import InclusionDependency
from .pipeline import FeedbackState, RunConfig, run_inference
from .pk import PrimaryKeyDecision

__version__ = "0.1.0"

__all__ = [
    "FeedbackState",
    "InclusionDependency",
    "PrimaryKeyDecision",
    "RunConfig",
    "SchemaManifest",
    "TypeTag",
    "load_manifest",
    "run_inference",
    "__version__",
]
