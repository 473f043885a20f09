"""Linear fitting and report metrics."""

from .model_fitting import FitResult, fit_linear, fit_report
from .metrics import ReportMetrics, MetricsCalculator

__all__ = [
    "FitResult",
    "fit_linear",
    "fit_report",
    "ReportMetrics",
    "MetricsCalculator",
]
