"""
Model Fitting

Ordinary least-squares fit of PL = k*f + b to a penetration-loss series.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..data_structures.measurements import MaterialCategory, PenetrationLossSeries
from ..models.penetration_models import LinearLossModel, ModelComparison, ModelSource, compare
from ..utils.errors import FitError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitResult:
    """Fitted model plus residuals (observed - fitted) at the series frequencies."""
    model: LinearLossModel
    series: PenetrationLossSeries
    residuals: np.ndarray
    residual_rms: float
    r_squared: Optional[float]  # None when the series has zero variance

    @property
    def frequencies(self) -> np.ndarray:
        return self.series.frequencies

    @property
    def sum_squared_residuals(self) -> float:
        return float(np.sum(self.residuals ** 2))

    def to_dict(self) -> dict:
        return {
            **self.model.to_dict(),
            "residual_rms_db": self.residual_rms,
            "r_squared": self.r_squared,
            "points": len(self.series),
        }


def _solve(frequencies: np.ndarray, losses: np.ndarray) -> tuple[float, float]:
    # centered normal equations; identical to the raw ones, better conditioned
    f_mean = frequencies.mean()
    y_mean = losses.mean()
    df = frequencies - f_mean
    k = float(np.dot(df, losses - y_mean) / np.dot(df, df))
    b = float(y_mean - k * f_mean)
    return k, b


def fit_linear(
    series: PenetrationLossSeries,
    name: Optional[str] = None,
    category: MaterialCategory = MaterialCategory.OTHER,
) -> FitResult:
    """Least-squares (k, b) over the series; valid range is the series span."""
    if len(series) < 2:
        raise FitError(f"series {series.material_name!r} has {len(series)} point(s); need at least 2")
    freqs = series.frequencies
    losses = series.losses
    if np.ptp(freqs) == 0:
        raise FitError(f"series {series.material_name!r}: all frequencies identical")

    k, b = _solve(freqs, losses)
    model = LinearLossModel(
        name=name or series.material_name,
        slope_k=k,
        intercept_b=b,
        valid_range=(float(freqs.min()), float(freqs.max())),
        source=ModelSource.FITTED,
        category=category,
    )
    residuals = losses - model.predict(freqs)
    residual_rms = float(np.sqrt(np.mean(residuals ** 2)))

    total = float(np.sum((losses - losses.mean()) ** 2))
    r_squared = None if total == 0 else max(0.0, min(1.0, 1 - float(np.sum(residuals ** 2)) / total))

    logger.info(f"Fitted {model.name}: k={k:.4f} dB/GHz, b={b:.4f} dB, residual RMS {residual_rms:.3f} dB")
    return FitResult(model, series, residuals, residual_rms, r_squared)


def fit_report(
    result: FitResult,
    reference: LinearLossModel,
    grid: Optional[Sequence[float]] = None,
) -> ModelComparison:
    """Fitted line against ``reference`` on the fitted series' grid."""
    if not reference.in_range(float(result.frequencies.min())) or not reference.in_range(
        float(result.frequencies.max())
    ):
        logger.warning(f"{reference.name}: fitted grid extends beyond its valid range")
    return compare(result.model, reference, result.frequencies if grid is None else grid)


def parameter_spread(results: Sequence[FitResult]) -> dict:
    """Mean and standard deviation of (k, b) over repeated fits."""
    if not results:
        raise FitError("no fit results to summarize")
    ks = np.array([r.model.slope_k for r in results])
    bs = np.array([r.model.intercept_b for r in results])
    return {
        "trials": len(results),
        "k_mean": float(ks.mean()),
        "k_std": float(ks.std()),
        "b_mean": float(bs.mean()),
        "b_std": float(bs.std()),
    }
