"""
On-disk formats: sweep segment CSVs, measurement manifests, loss series,
model documents and comparison/residual exports.

Every reader validates completely before returning; malformed input raises
one of the errors in ``errors`` naming the offending row or field.
"""

import json
import logging
from pathlib import Path
from typing import Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError

from ..data_structures.measurements import (
    AntennaBand,
    BandPlan,
    MaterialCategory,
    MeasurementGeometry,
    MeasurementManifest,
    PenetrationLossSeries,
    Scenario,
    SegmentRef,
    SweepSegment,
)
from ..models.penetration_models import LinearLossModel, ModelComparison, ModelSource
from .errors import (
    ConfigError,
    GridPlanMismatchError,
    ManifestError,
    MissingSegmentError,
    ModelError,
    NonUniformGridError,
    PointCountError,
    SeriesError,
    SweepFormatError,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SEGMENT_COLUMNS = ("freq_hz", "s21_re", "s21_im")
SERIES_COLUMNS = ("center_freq_ghz", "pl_db")
DIFF_COLUMNS = ("freq_ghz", "diff_db")
RESIDUAL_COLUMNS = ("freq_ghz", "residual_db")

# Full-precision float format for files that must round-trip exactly
FULL_PRECISION = "%.17g"
SERIES_PRECISION = "%.6f"


def _read_numeric_csv(path: PathLike, columns: Sequence[str]) -> np.ndarray:
    """Read a headed CSV of finite decimal numbers into an (rows, columns) array."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise SweepFormatError("file is empty", path=str(path))
    except pd.errors.ParserError as e:
        raise SweepFormatError(f"malformed row: {e}", path=str(path))
    except UnicodeDecodeError as e:
        raise SweepFormatError(f"not UTF-8 text ({e.reason} at byte {e.start})", path=str(path))

    header = tuple(c.strip() for c in frame.columns)
    if header != tuple(columns):
        raise SweepFormatError(
            f"header {','.join(header)!r} does not match expected {','.join(columns)!r}",
            path=str(path),
        )

    values = frame.apply(lambda col: pd.to_numeric(col, errors="coerce")).to_numpy(dtype=float)
    bad_rows = np.flatnonzero(~np.isfinite(values).all(axis=1))
    if len(bad_rows):
        i = int(bad_rows[0])
        raw = ",".join("" if pd.isna(v) else str(v) for v in frame.iloc[i])
        # +2: one-based line numbers and the header line
        raise SweepFormatError(f"malformed row {raw!r}", path=str(path), row=i + 2)
    return values


def _write_csv(path: PathLike, columns: Sequence[str], data: np.ndarray, float_format: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(np.asarray(data, dtype=float), columns=list(columns))
    frame.to_csv(path, index=False, float_format=float_format, lineterminator="\n")


def check_segment_grid(
    frequencies_hz: np.ndarray,
    plan: BandPlan,
    path: Optional[str] = None,
) -> float:
    """Validate an ascending frequency grid against the plan; return its center in GHz."""
    n = len(frequencies_hz)
    if n != plan.points_per_segment:
        raise PointCountError(n, plan.points_per_segment, path=path)

    steps = np.diff(frequencies_hz)
    step = float(np.mean(steps))
    if step <= 0 or not np.allclose(steps, step, rtol=1e-6, atol=0):
        worst = int(np.argmax(np.abs(steps - step)))
        raise NonUniformGridError(
            f"non-uniform frequency grid between samples {worst + 1} and {worst + 2} "
            f"(step {steps[worst]:.6g} Hz, mean {step:.6g} Hz)",
            path=path,
        )

    bandwidth_hz = plan.segment_bandwidth * 1e9
    if abs(n * step - bandwidth_hz) > step * (1 + 1e-6):
        raise GridPlanMismatchError(
            f"grid covers {n * step / 1e9:.6g} GHz, plan bandwidth is {plan.segment_bandwidth:g} GHz",
            path=path,
        )

    midpoint_ghz = (frequencies_hz[0] + frequencies_hz[-1]) / 2 / 1e9
    index, distance = plan.nearest_center(midpoint_ghz)
    if distance * 1e9 > step * (1 + 1e-6):
        raise GridPlanMismatchError(
            f"grid midpoint {midpoint_ghz:.6g} GHz matches no plan center "
            f"(nearest {plan.center_frequencies[index]:g} GHz)",
            path=path,
        )
    return plan.center_frequencies[index]


def read_sweep_segment(
    path: PathLike,
    plan: BandPlan,
    repeat_index: int = 0,
    scenario: Optional[Scenario] = None,
) -> SweepSegment:
    """Read and validate one ``freq_hz,s21_re,s21_im`` sweep segment."""
    values = _read_numeric_csv(path, SEGMENT_COLUMNS)
    order = np.argsort(values[:, 0], kind="stable")
    values = values[order]
    center = check_segment_grid(values[:, 0], plan, path=str(path))
    return SweepSegment(
        center_frequency=center,
        frequency_grid=values[:, 0],
        s21=values[:, 1] + 1j * values[:, 2],
        repeat_index=repeat_index,
        scenario=scenario,
    )


def write_sweep_segment(segment: SweepSegment, path: PathLike):
    data = np.column_stack([segment.frequency_grid, segment.s21.real, segment.s21.imag])
    _write_csv(path, SEGMENT_COLUMNS, data, FULL_PRECISION)


# ----- manifest documents -----

class PlanDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    centers_ghz: list[float]
    bandwidth_ghz: float
    points: int

    def to_plan(self) -> BandPlan:
        return BandPlan(tuple(self.centers_ghz), self.bandwidth_ghz, self.points)


class SegmentDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    center_ghz: float
    repeat: int
    scenario: Scenario
    path: str


class AntennaBandDocument(BaseModel):
    low_ghz: float
    high_ghz: float
    gain_dbi: float = 15.0


class GeometryDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    antenna_to_material_m: float = 2.4
    antenna_height_m: float = 0.6
    antenna_bands: Optional[list[AntennaBandDocument]] = None

    def to_geometry(self) -> MeasurementGeometry:
        if self.antenna_bands is None:
            return MeasurementGeometry(self.antenna_to_material_m, self.antenna_height_m)
        bands = tuple(AntennaBand(b.low_ghz, b.high_ghz, b.gain_dbi) for b in self.antenna_bands)
        return MeasurementGeometry(self.antenna_to_material_m, self.antenna_height_m, bands)


class ManifestDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    material_name: str
    category: MaterialCategory
    thickness_cm: float
    width_cm: float
    height_cm: float
    repeats: int
    plan: PlanDocument
    segments: list[SegmentDocument]
    geometry: Optional[GeometryDocument] = None


class ModelDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    slope_db_per_ghz: float
    intercept_db: float
    valid_range_ghz: tuple[float, float]
    source: Literal["fitted", "tr38901"]
    category: MaterialCategory = MaterialCategory.OTHER

    def to_model(self) -> LinearLossModel:
        return LinearLossModel(
            name=self.name,
            slope_k=self.slope_db_per_ghz,
            intercept_b=self.intercept_db,
            valid_range=self.valid_range_ghz,
            source=ModelSource(self.source),
            category=self.category,
        )


def describe_validation_error(error: ValidationError) -> tuple[str, str]:
    """First pydantic error as (dotted field path, message)."""
    first = error.errors()[0]
    field_path = ".".join(str(p) for p in first["loc"])
    if first["type"] == "missing":
        return field_path, "missing field"
    if first["type"] == "enum":
        return field_path, f"unknown value {first.get('input')!r} ({first['msg']})"
    return field_path, first["msg"]


def _load_json(path: Path, error_type=ManifestError) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise error_type(f"{path}: invalid JSON ({e})")
    except UnicodeDecodeError as e:
        raise error_type(f"{path}: not UTF-8 text ({e.reason} at byte {e.start})")


def read_manifest(path: PathLike) -> MeasurementManifest:
    """Read a manifest; segment paths resolve relative to its directory."""
    path = Path(path)
    raw = _load_json(path)
    try:
        document = ManifestDocument.model_validate(raw)
    except ValidationError as e:
        field_path, message = describe_validation_error(e)
        if field_path == "category":
            message = f"unknown category {raw.get('category')!r}"
        raise ManifestError(message, field=field_path)

    try:
        plan = document.plan.to_plan()
    except ConfigError as e:
        raise ManifestError(str(e), field="plan")

    base_dir = path.parent
    refs = []
    for seg in document.segments:
        seg_path = Path(seg.path)
        if not seg_path.is_absolute():
            seg_path = base_dir / seg_path
        if not seg_path.is_file():
            raise MissingSegmentError(str(seg_path))
        refs.append(SegmentRef(seg.center_ghz, seg.repeat, seg.scenario, seg_path))

    manifest = MeasurementManifest(
        material_name=document.material_name,
        material_category=document.category,
        thickness_cm=document.thickness_cm,
        width_cm=document.width_cm,
        height_cm=document.height_cm,
        repeats=document.repeats,
        plan=plan,
        segments=tuple(refs),
        geometry=document.geometry.to_geometry() if document.geometry else None,
        base_dir=base_dir,
    )

    for center in plan.center_frequencies:
        for scenario in Scenario:
            count = len(manifest.segments_for(center, scenario))
            if count != manifest.repeats:
                logger.warning(
                    f"{manifest.material_name}: {count} {scenario.value} segment(s) at "
                    f"{center:g} GHz, manifest declares {manifest.repeats} repeats"
                )
    logger.debug(f"Manifest {path}: {len(refs)} segments over {len(plan.center_frequencies)} centers")
    return manifest


def write_manifest(manifest: MeasurementManifest, path: PathLike):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(manifest.to_dict(), f, indent=2)
        f.write("\n")


# ----- loss series -----

def read_loss_series(path: PathLike, material_name: Optional[str] = None) -> PenetrationLossSeries:
    path = Path(path)
    values = _read_numeric_csv(path, SERIES_COLUMNS)
    order = np.argsort(values[:, 0], kind="stable")
    return PenetrationLossSeries.from_arrays(
        material_name or path.stem, values[order, 0], values[order, 1]
    )


def write_loss_series(series: PenetrationLossSeries, path: PathLike):
    """Write ``center_freq_ghz,pl_db`` with six decimals."""
    if len(series) == 0:
        raise SeriesError("series has no points")
    data = np.column_stack([series.frequencies, series.losses])
    _write_csv(path, SERIES_COLUMNS, data, SERIES_PRECISION)


# ----- model documents and exports -----

def read_model(path: PathLike) -> LinearLossModel:
    path = Path(path)
    raw = _load_json(path, ModelError)
    try:
        return ModelDocument.model_validate(raw).to_model()
    except ValidationError as e:
        field_path, message = describe_validation_error(e)
        raise ModelError(f"{path}: {field_path}: {message}")


def write_model(model: LinearLossModel, path: PathLike):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(model.to_dict(), f, indent=2)
        f.write("\n")


def write_residuals(frequencies: np.ndarray, residuals: np.ndarray, path: PathLike):
    _write_csv(path, RESIDUAL_COLUMNS, np.column_stack([frequencies, residuals]), FULL_PRECISION)


def write_comparison(comparison: ModelComparison, csv_path: PathLike, summary_path: PathLike):
    """Per-frequency differences as CSV plus the RMSE/min/max summary as JSON."""
    _write_csv(
        csv_path,
        DIFF_COLUMNS,
        np.column_stack([comparison.grid, comparison.differences]),
        FULL_PRECISION,
    )
    summary = {"a": comparison.a_name, "b": comparison.b_name, **comparison.to_summary()}
    summary_path = Path(summary_path)
    summary_path.parent.mkdir(parents=True, exist_ok=True)
    with open(summary_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(summary, f, indent=2)
        f.write("\n")
