"""Model operators, the experiment catalogue and report serialisation."""

from .experiments import CATALOG, list_experiments, run_experiment, validate_config
from .models import MODEL_KINDS, ModelSpec, build_model, translation_grid
from .report import ExperimentReport, emit_report, read_report, to_csv, to_json

__all__ = [
    "CATALOG",
    "list_experiments",
    "run_experiment",
    "validate_config",
    "MODEL_KINDS",
    "ModelSpec",
    "build_model",
    "translation_grid",
    "ExperimentReport",
    "emit_report",
    "read_report",
    "to_csv",
    "to_json",
]
