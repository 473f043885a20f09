"""
Evaluation Metrics

Summary metrics and tables for a processed measurement: fitted line,
fit quality, and agreement with the reference TR 38.901 model.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from tabulate import tabulate

from ..models.penetration_models import CatalogComparison, LinearLossModel, ModelComparison
from .model_fitting import FitResult

logger = logging.getLogger(__name__)


@dataclass
class ReportMetrics:
    """Everything the report table shows for one material."""
    material_name: str
    slope_k: float
    intercept_b: float
    residual_rms: float
    r_squared: Optional[float]
    points: int
    reference_name: Optional[str] = None
    rmse: Optional[float] = None
    min_difference: Optional[float] = None
    max_difference: Optional[float] = None
    turning_points: int = 0

    @property
    def is_linear_trend(self) -> bool:
        return self.turning_points == 0

    def to_dict(self) -> dict:
        return {
            "material_name": self.material_name,
            "slope_k": self.slope_k,
            "intercept_b": self.intercept_b,
            "residual_rms_db": self.residual_rms,
            "r_squared": self.r_squared,
            "points": self.points,
            "reference": self.reference_name,
            "rmse_db": self.rmse,
            "min_diff_db": self.min_difference,
            "max_diff_db": self.max_difference,
            "turning_points": self.turning_points,
        }


class MetricsCalculator:
    """Builds report metrics and formats them as tables."""

    def calculate(self, fit: FitResult, comparison: Optional[ModelComparison] = None) -> ReportMetrics:
        metrics = ReportMetrics(
            material_name=fit.series.material_name,
            slope_k=fit.model.slope_k,
            intercept_b=fit.model.intercept_b,
            residual_rms=fit.residual_rms,
            r_squared=fit.r_squared,
            points=len(fit.series),
            turning_points=len(fit.series.turning_points()),
        )
        if comparison is not None:
            metrics.reference_name = comparison.b_name
            metrics.rmse = comparison.rmse
            metrics.min_difference = comparison.min_difference
            metrics.max_difference = comparison.max_difference
        if metrics.turning_points:
            logger.info(
                f"{metrics.material_name}: {metrics.turning_points} turning point(s), "
                f"trend is not linear in frequency"
            )
        return metrics

    def format_summary_markdown(self, metrics: ReportMetrics) -> str:
        """Catalog-style row (name, k, b) plus RMSE against the reference."""
        header = ["Material", "k (dB/GHz)", "b (dB)", "Residual RMS (dB)", "Reference", "RMSE (dB)"]
        row = [
            metrics.material_name,
            f"{metrics.slope_k:.2f}",
            f"{metrics.intercept_b:.2f}",
            f"{metrics.residual_rms:.2f}",
            metrics.reference_name or "-",
            f"{metrics.rmse:.2f}" if metrics.rmse is not None else "-",
        ]
        lines = [
            f"# Penetration loss: {metrics.material_name}",
            "",
            tabulate([row], headers=header, tablefmt="github", disable_numparse=True),
            "",
        ]
        if metrics.min_difference is not None:
            lines.append(
                f"Difference vs reference: {metrics.min_difference:.2f} to {metrics.max_difference:.2f} dB "
                f"over {metrics.points} centers."
            )
        if not metrics.is_linear_trend:
            lines.append(f"Loss curve has {metrics.turning_points} turning point(s).")
        return "\n".join(lines) + "\n"

    def format_metrics_table(self, metrics: ReportMetrics) -> str:
        """Console table of a single report."""
        rows = [
            ["Material", metrics.material_name],
            ["Centers", metrics.points],
            ["k (dB/GHz)", f"{metrics.slope_k:.2f}"],
            ["b (dB)", f"{metrics.intercept_b:.2f}"],
            ["Residual RMS (dB)", f"{metrics.residual_rms:.2f}"],
            ["R²", "-" if metrics.r_squared is None else f"{metrics.r_squared:.3f}"],
        ]
        if metrics.rmse is not None:
            rows.append([f"RMSE vs {metrics.reference_name} (dB)", f"{metrics.rmse:.2f}"])
        return tabulate(rows, tablefmt="simple", disable_numparse=True)


def format_catalog(models: Sequence[LinearLossModel], tablefmt: str = "github") -> str:
    """Catalog rows: name, k, b, valid range, source."""
    rows = [
        [m.name, f"{m.slope_k:.2f}", f"{m.intercept_b:.2f}",
         f"{m.valid_range[0]:g}-{m.valid_range[1]:g}", m.source.value]
        for m in models
    ]
    return tabulate(
        rows,
        headers=["Model", "k (dB/GHz)", "b (dB)", "Range (GHz)", "Source"],
        tablefmt=tablefmt,
        disable_numparse=True,
    )


def format_catalog_comparison(comparisons: Sequence[CatalogComparison], tablefmt: str = "github") -> str:
    """Difference distribution and RMSE of each fitted entry against its reference."""
    rows = []
    for c in comparisons:
        d = c.to_dict()
        rows.append([
            d["name"], d["reference"],
            f"{d['min_diff_db']:.2f}", f"{d['median_diff_db']:.2f}", f"{d['max_diff_db']:.2f}",
            f"{d['rmse_db']:.2f}",
        ])
    return tabulate(
        rows,
        headers=["Model", "Reference", "Min diff (dB)", "Median diff (dB)", "Max diff (dB)", "RMSE (dB)"],
        tablefmt=tablefmt,
        disable_numparse=True,
    )
