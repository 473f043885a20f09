"""Linear penetration-loss models and the TR 38.901 comparison catalog."""

from .penetration_models import (
    LinearLossModel,
    ModelComparison,
    ModelEvaluation,
    ModelSource,
    catalog,
    compare,
    compare_catalog,
    difference_at,
    evaluate,
    lookup,
    reference_for,
)

__all__ = [
    "LinearLossModel",
    "ModelComparison",
    "ModelEvaluation",
    "ModelSource",
    "catalog",
    "compare",
    "compare_catalog",
    "difference_at",
    "evaluate",
    "lookup",
    "reference_for",
]
