"""
Linear penetration-loss models, the built-in model catalog, and the
difference/RMSE comparison between models and measured series.
"""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from ..data_structures.measurements import BandPlan, MaterialCategory, PenetrationLossSeries
from ..utils.errors import CatalogLookupError, ComparisonError, ModelError

logger = logging.getLogger(__name__)

FITTED_RANGE_GHZ = (4.5, 15.5)
TR38901_RANGE_GHZ = (0.5, 100.0)


class ModelSource(Enum):
    """Where a model's parameters come from."""
    FITTED = "fitted"
    TR38901 = "tr38901"


@dataclass(frozen=True)
class LinearLossModel:
    """Penetration loss PL(f) = k*f + b, f in GHz, PL in dB."""
    name: str
    slope_k: float  # dB/GHz
    intercept_b: float  # dB
    valid_range: tuple[float, float] = FITTED_RANGE_GHZ
    source: ModelSource = ModelSource.FITTED
    category: MaterialCategory = MaterialCategory.OTHER

    def __post_init__(self):
        lo, hi = (float(v) for v in self.valid_range)
        if not lo < hi:
            raise ModelError(f"model {self.name!r}: valid range [{lo}, {hi}] is empty")
        if not (math.isfinite(self.slope_k) and math.isfinite(self.intercept_b)):
            raise ModelError(f"model {self.name!r}: parameters must be finite")
        object.__setattr__(self, "valid_range", (lo, hi))

    @property
    def is_standard(self) -> bool:
        return self.source is ModelSource.TR38901

    def predict(self, frequencies) -> np.ndarray:
        """Vectorized k*f + b without range checks."""
        return self.slope_k * np.asarray(frequencies, dtype=float) + self.intercept_b

    def in_range(self, frequency_ghz: float) -> bool:
        lo, hi = self.valid_range
        return lo - 1e-9 <= frequency_ghz <= hi + 1e-9

    def rounded(self, decimals: int = 2) -> "LinearLossModel":
        """Copy with parameters rounded to the catalog's printed precision."""
        return LinearLossModel(
            name=self.name,
            slope_k=round(self.slope_k, decimals),
            intercept_b=round(self.intercept_b, decimals),
            valid_range=self.valid_range,
            source=self.source,
            category=self.category,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "slope_db_per_ghz": self.slope_k,
            "intercept_db": self.intercept_b,
            "valid_range_ghz": list(self.valid_range),
            "source": self.source.value,
            "category": self.category.value,
        }


class ModelEvaluation(NamedTuple):
    """Model value at one frequency, flagged when outside the valid range."""
    value_db: float
    in_range: bool

    def __float__(self) -> float:
        return self.value_db


def evaluate(model: LinearLossModel, frequency_ghz: float) -> ModelEvaluation:
    """Evaluate PL = k*f + b; out-of-range frequencies are flagged, not rejected."""
    value = model.slope_k * frequency_ghz + model.intercept_b
    in_range = model.in_range(frequency_ghz)
    if not in_range:
        logger.warning(
            f"{model.name}: {frequency_ghz:g} GHz outside valid range "
            f"{model.valid_range[0]:g}-{model.valid_range[1]:g} GHz"
        )
    return ModelEvaluation(float(value), in_range)


def _fitted(name: str, k: float, b: float, category: MaterialCategory) -> LinearLossModel:
    return LinearLossModel(name, k, b, FITTED_RANGE_GHZ, ModelSource.FITTED, category)


def _standard(name: str, k: float, b: float, category: MaterialCategory) -> LinearLossModel:
    return LinearLossModel(name, k, b, TR38901_RANGE_GHZ, ModelSource.TR38901, category)


_CATALOG: tuple[LinearLossModel, ...] = (
    _fitted("Wooden Board 1", 0.23, 1.75, MaterialCategory.WOOD),
    _fitted("Wooden Board 2", 0.23, 1.52, MaterialCategory.WOOD),
    _fitted("Wooden Board 3", 0.07, 3.55, MaterialCategory.WOOD),
    _standard("TR 38.901 Wood Model", 0.12, 4.85, MaterialCategory.WOOD),
    _fitted("Double-Layer Glass", 0.30, 2.30, MaterialCategory.GLASS),
    _fitted("Frost Glass", -0.06, 3.94, MaterialCategory.GLASS),
    _standard("TR 38.901 Glass Model", 0.20, 2.0, MaterialCategory.GLASS),
    _fitted("Foam Board 1", -0.01, 1.84, MaterialCategory.FOAM),
    _fitted("Foam Board 2", -0.05, 1.97, MaterialCategory.FOAM),
    _fitted("Foam Board 3", -0.01, 1.44, MaterialCategory.FOAM),
    _fitted("Concrete Slab", 0.95, 9.83, MaterialCategory.CONCRETE),
    _standard("TR 38.901 Concrete Model", 4.00, 5.00, MaterialCategory.CONCRETE),
)

# alternative spellings -> canonical normalized name
_ALIASES = {
    "frosted glass": "frost glass",
    "double layer glass": "double-layer glass",
    "concrete": "concrete slab",
    "tr wood": "tr 38.901 wood model",
    "tr glass": "tr 38.901 glass model",
    "tr concrete": "tr 38.901 concrete model",
}


def _normalize(name: str) -> str:
    key = re.sub(r"[\s_]+", " ", name.strip().lower())
    key = re.sub(r"^wood(en)?[ -]board[ -]?(\d)$", r"wooden board \2", key)
    key = re.sub(r"^foam[ -]board[ -]?(\d)$", r"foam board \1", key)
    return _ALIASES.get(key, key)


def catalog() -> list[LinearLossModel]:
    """All fitted and TR 38.901 rows of the comparison table, in table order."""
    return list(_CATALOG)


def lookup(name: str) -> LinearLossModel:
    key = _normalize(name)
    for model in _CATALOG:
        if _normalize(model.name) == key:
            return model
    names = ", ".join(m.name for m in _CATALOG)
    raise CatalogLookupError(f"unknown catalog model {name!r}; available: {names}")


def reference_for(model: LinearLossModel) -> Optional[LinearLossModel]:
    """TR 38.901 model of the same material category, if the standard has one."""
    for candidate in _CATALOG:
        if candidate.is_standard and candidate.category is model.category:
            return candidate
    return None


@dataclass(frozen=True)
class ModelComparison:
    """Per-frequency differences e_i = a(f_i) - b(f_i) and their RMSE."""
    grid: np.ndarray
    differences: np.ndarray
    rmse: float
    a_name: str = ""
    b_name: str = ""

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        diffs = np.array(self.differences, dtype=float)
        if grid.shape != diffs.shape:
            raise ComparisonError(f"grid ({len(grid)}) and differences ({len(diffs)}) differ in length")
        grid.flags.writeable = False
        diffs.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "differences", diffs)

    @property
    def min_difference(self) -> float:
        return float(self.differences.min())

    @property
    def max_difference(self) -> float:
        return float(self.differences.max())

    @property
    def median_difference(self) -> float:
        return float(np.median(self.differences))

    @property
    def mean_difference(self) -> float:
        return float(self.differences.mean())

    def to_summary(self) -> dict:
        return {
            "rmse_db": self.rmse,
            "min_diff_db": self.min_difference,
            "max_diff_db": self.max_difference,
            "mean_diff_db": self.mean_difference,
        }


Comparable = Union[LinearLossModel, PenetrationLossSeries]


def _values_on(subject: Comparable, grid: np.ndarray) -> np.ndarray:
    if isinstance(subject, LinearLossModel):
        return subject.predict(grid)
    freqs = subject.frequencies
    values = np.empty(len(grid))
    for i, f in enumerate(grid):
        matches = np.flatnonzero(np.abs(freqs - f) <= 1e-6)
        if len(matches) == 0:
            raise ComparisonError(f"series {subject.material_name!r} has no point at {f:g} GHz")
        values[i] = subject.losses[matches[0]]
    return values


def _name_of(subject: Comparable) -> str:
    return subject.name if isinstance(subject, LinearLossModel) else subject.material_name


def compare(
    a: Comparable,
    b: Comparable,
    grid: Optional[Sequence[float]] = None,
) -> ModelComparison:
    """Difference and RMSE between ``a`` and ``b`` on ``grid``.

    The grid defaults to the frequencies of whichever argument is a series,
    else to the default measurement centers.
    """
    if grid is None:
        if isinstance(a, PenetrationLossSeries):
            grid = a.frequencies
        elif isinstance(b, PenetrationLossSeries):
            grid = b.frequencies
        else:
            grid = BandPlan.default().centers
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ComparisonError("comparison grid is empty")

    differences = _values_on(a, grid) - _values_on(b, grid)
    rmse = float(np.sqrt(np.mean(differences ** 2)))
    return ModelComparison(grid, differences, rmse, _name_of(a), _name_of(b))


def difference_at(a: LinearLossModel, b: LinearLossModel, frequency_ghz: float) -> float:
    """Standard minus fitted at one frequency (b - a when neither or both are standard)."""
    if a.is_standard and not b.is_standard:
        standard, fitted = a, b
    else:
        standard, fitted = b, a
    return float(standard.predict(frequency_ghz) - fitted.predict(frequency_ghz))


@dataclass(frozen=True)
class CatalogComparison:
    """One fitted catalog entry against its TR 38.901 counterpart."""
    fitted: LinearLossModel
    reference: LinearLossModel
    comparison: ModelComparison

    def to_dict(self) -> dict:
        return {
            "name": self.fitted.name,
            "reference": self.reference.name,
            "slope_k": self.fitted.slope_k,
            "intercept_b": self.fitted.intercept_b,
            "min_diff_db": self.comparison.min_difference,
            "median_diff_db": self.comparison.median_difference,
            "max_diff_db": self.comparison.max_difference,
            "rmse_db": self.comparison.rmse,
        }


def compare_catalog(grid: Optional[Sequence[float]] = None) -> list[CatalogComparison]:
    """Compare every fitted catalog model with the standard model of its category."""
    results = []
    for model in _CATALOG:
        if model.is_standard:
            continue
        reference = reference_for(model)
        if reference is None:
            logger.debug(f"{model.name}: no TR 38.901 counterpart, skipped")
            continue
        results.append(CatalogComparison(model, reference, compare(model, reference, grid)))
    return results
