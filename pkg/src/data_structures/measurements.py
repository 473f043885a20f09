"""
Data structures for sweep measurements, manifests and penetration-loss series.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.constants import speed_of_light

from ..utils.errors import ConfigError, ManifestError, SeriesError

# repeat_index of a segment produced by averaging several repeats
AGGREGATE_REPEAT = -1


class MaterialCategory(Enum):
    """Material families measured by the platform."""
    WOOD = "wood"
    GLASS = "glass"
    FOAM = "foam"
    CONCRETE = "concrete"
    OTHER = "other"


class Scenario(Enum):
    """Measurement scenario: unobstructed or with the specimen in the path."""
    LOS = "LOS"
    NLOS = "NLOS"


@dataclass(frozen=True)
class BandPlan:
    """Center frequencies (GHz) and per-segment sampling of a stepped sweep.

    Each segment covers ``segment_bandwidth`` GHz with ``points_per_segment``
    samples spaced ``segment_bandwidth / points_per_segment`` apart, starting at
    ``center - bandwidth / 2``.
    """
    center_frequencies: tuple[float, ...] = tuple(4.5 + i for i in range(12))
    segment_bandwidth: float = 1.0
    points_per_segment: int = 256

    def __post_init__(self):
        centers = tuple(float(c) for c in self.center_frequencies)
        object.__setattr__(self, "center_frequencies", centers)
        if not centers:
            raise ConfigError("band plan has no center frequencies")
        if self.segment_bandwidth <= 0:
            raise ConfigError(f"segment bandwidth must be positive, got {self.segment_bandwidth}")
        if self.points_per_segment < 2:
            raise ConfigError(f"points per segment must be >= 2, got {self.points_per_segment}")
        if len(centers) > 1:
            steps = np.diff(centers)
            if np.any(steps <= 0):
                raise ConfigError("band plan centers must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-9):
                raise ConfigError("band plan centers must be uniformly spaced")

    @classmethod
    def default(cls) -> "BandPlan":
        return cls()

    @classmethod
    def from_range(
        cls,
        lo: float,
        step: float,
        hi: float,
        segment_bandwidth: float = 1.0,
        points_per_segment: int = 256,
    ) -> "BandPlan":
        """Build a plan from an inclusive ``lo:step:hi`` range in GHz."""
        if step <= 0:
            raise ConfigError(f"grid step must be positive, got {step}")
        if hi < lo:
            raise ConfigError(f"grid upper bound {hi} is below lower bound {lo}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        centers = tuple(round(lo + i * step, 12) for i in range(count))
        return cls(centers, segment_bandwidth, points_per_segment)

    @property
    def frequency_step_hz(self) -> float:
        return self.segment_bandwidth * 1e9 / self.points_per_segment

    @property
    def centers(self) -> np.ndarray:
        return np.asarray(self.center_frequencies, dtype=float)

    def segment_frequencies(self, center_ghz: float) -> np.ndarray:
        """Absolute frequency grid (Hz) of the segment centered at ``center_ghz``."""
        start = center_ghz * 1e9 - self.segment_bandwidth * 1e9 / 2
        return start + np.arange(self.points_per_segment) * self.frequency_step_hz

    def nearest_center(self, frequency_ghz: float) -> tuple[int, float]:
        """Plan center closest to ``frequency_ghz`` and its distance in GHz."""
        distances = np.abs(self.centers - frequency_ghz)
        i = int(np.argmin(distances))
        return i, float(distances[i])

    def to_dict(self) -> dict:
        return {
            "centers_ghz": list(self.center_frequencies),
            "bandwidth_ghz": self.segment_bandwidth,
            "points": self.points_per_segment,
        }


@dataclass(frozen=True)
class SweepSegment:
    """One band segment of a frequency sweep: complex S21 over a uniform grid."""
    center_frequency: float  # GHz
    frequency_grid: np.ndarray  # Hz, ascending
    s21: np.ndarray  # linear, complex
    repeat_index: int = 0
    scenario: Optional[Scenario] = None

    def __post_init__(self):
        grid = np.array(self.frequency_grid, dtype=float)
        samples = np.array(self.s21, dtype=complex)
        if grid.shape != samples.shape or grid.ndim != 1:
            raise ValueError(
                f"frequency grid {grid.shape} and samples {samples.shape} must be 1-D and equal length"
            )
        grid.flags.writeable = False
        samples.flags.writeable = False
        object.__setattr__(self, "frequency_grid", grid)
        object.__setattr__(self, "s21", samples)

    @property
    def points(self) -> int:
        return len(self.s21)

    @property
    def frequency_step_hz(self) -> float:
        return float((self.frequency_grid[-1] - self.frequency_grid[0]) / (self.points - 1))

    @property
    def is_aggregate(self) -> bool:
        return self.repeat_index == AGGREGATE_REPEAT

    def with_samples(self, s21: np.ndarray, repeat_index: Optional[int] = None) -> "SweepSegment":
        return SweepSegment(
            center_frequency=self.center_frequency,
            frequency_grid=self.frequency_grid,
            s21=s21,
            repeat_index=self.repeat_index if repeat_index is None else repeat_index,
            scenario=self.scenario,
        )


@dataclass(frozen=True)
class Specimen:
    """A measured specimen: category and outer dimensions in cm."""
    name: str
    category: MaterialCategory
    width_cm: float
    height_cm: float
    thickness_cm: float
    description: str = ""


SPECIMENS: tuple[Specimen, ...] = (
    Specimen("Wooden Board 1", MaterialCategory.WOOD, 130, 130, 1.0, "pressed wooden board"),
    Specimen("Wooden Board 2", MaterialCategory.WOOD, 130, 130, 1.4, "pressed wooden board"),
    Specimen("Wooden Board 3", MaterialCategory.WOOD, 130, 130, 1.0, "solid wooden board"),
    Specimen("Double-Layer Glass", MaterialCategory.GLASS, 120, 120, 0.8, "ordinary double-layer glass"),
    Specimen("Frost Glass", MaterialCategory.GLASS, 120, 120, 0.8, "frost glass"),
    Specimen("Foam Board 1", MaterialCategory.FOAM, 130, 130, 0.6, "EVA foam board"),
    Specimen("Foam Board 2", MaterialCategory.FOAM, 130, 130, 0.8, "EVA foam board"),
    Specimen("Foam Board 3", MaterialCategory.FOAM, 130, 130, 1.0, "EVA foam board"),
    Specimen("Concrete Slab", MaterialCategory.CONCRETE, 80, 80, 4.0, "concrete"),
)


def find_specimen(name: str) -> Specimen:
    key = name.strip().lower()
    for specimen in SPECIMENS:
        if specimen.name.lower() == key:
            return specimen
    raise KeyError(name)


@dataclass(frozen=True)
class AntennaBand:
    """Operating band of one horn antenna pair."""
    low_ghz: float
    high_ghz: float
    gain_dbi: float = 15.0


@dataclass(frozen=True)
class MeasurementGeometry:
    """Antenna placement around the specimen."""
    antenna_to_material_m: float = 2.4
    antenna_height_m: float = 0.6
    antenna_bands: tuple[AntennaBand, ...] = (
        AntennaBand(4.90, 7.05),
        AntennaBand(7.05, 10.0),
        AntennaBand(10.0, 15.0),
    )

    @property
    def path_length_m(self) -> float:
        return 2 * self.antenna_to_material_m

    @property
    def expected_los_delay_ns(self) -> float:
        """Direct-path delay between the two antennas."""
        return self.path_length_m / speed_of_light * 1e9

    def to_dict(self) -> dict:
        return {
            "antenna_to_material_m": self.antenna_to_material_m,
            "antenna_height_m": self.antenna_height_m,
            "antenna_bands": [
                {"low_ghz": b.low_ghz, "high_ghz": b.high_ghz, "gain_dbi": b.gain_dbi}
                for b in self.antenna_bands
            ],
        }


@dataclass(frozen=True)
class SegmentRef:
    """Reference from a manifest to one sweep file."""
    center_ghz: float
    repeat: int
    scenario: Scenario
    path: Path

    def to_dict(self, base_dir: Optional[Path] = None) -> dict:
        path = self.path
        if base_dir is not None:
            try:
                path = self.path.relative_to(base_dir)
            except ValueError:
                pass
        return {
            "center_ghz": self.center_ghz,
            "repeat": self.repeat,
            "scenario": self.scenario.value,
            "path": path.as_posix(),
        }


@dataclass(frozen=True)
class MeasurementManifest:
    """Material metadata plus the LOS/NLOS sweep files of one measurement."""
    material_name: str
    material_category: MaterialCategory
    thickness_cm: float
    width_cm: float
    height_cm: float
    repeats: int
    plan: BandPlan
    segments: tuple[SegmentRef, ...]
    geometry: Optional[MeasurementGeometry] = None
    base_dir: Path = field(default_factory=Path)

    def __post_init__(self):
        for name in ("thickness_cm", "width_cm", "height_cm"):
            value = getattr(self, name)
            if not value > 0:
                raise ManifestError(f"must be strictly positive, got {value}", field=name)
        if self.repeats < 1:
            raise ManifestError(f"must be >= 1, got {self.repeats}", field="repeats")
        object.__setattr__(self, "segments", tuple(self.segments))
        for scenario in Scenario:
            missing = self.missing_centers(scenario)
            if missing:
                listed = ", ".join(f"{c:g}" for c in missing)
                raise ManifestError(
                    f"no {scenario.value} segment for center(s) {listed} GHz", field="segments"
                )

    def segments_for(self, center_ghz: float, scenario: Scenario) -> list[SegmentRef]:
        """Segments of one center and scenario, ordered by repeat index."""
        refs = [
            s for s in self.segments
            if s.scenario is scenario and abs(s.center_ghz - center_ghz) <= 1e-6
        ]
        return sorted(refs, key=lambda s: (s.repeat, s.path.as_posix()))

    def missing_centers(self, scenario: Scenario) -> list[float]:
        return [
            c for c in self.plan.center_frequencies
            if not any(
                s.scenario is scenario and abs(s.center_ghz - c) <= 1e-6 for s in self.segments
            )
        ]

    def to_dict(self) -> dict:
        data = {
            "material_name": self.material_name,
            "category": self.material_category.value,
            "thickness_cm": self.thickness_cm,
            "width_cm": self.width_cm,
            "height_cm": self.height_cm,
            "repeats": self.repeats,
            "plan": self.plan.to_dict(),
            "segments": [s.to_dict(self.base_dir) for s in self.segments],
        }
        if self.geometry is not None:
            data["geometry"] = self.geometry.to_dict()
        return data


@dataclass(frozen=True)
class PenetrationLossSeries:
    """Penetration loss (dB) per center frequency (GHz)."""
    material_name: str
    points: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        points = tuple((float(f), float(pl)) for f, pl in self.points)
        object.__setattr__(self, "points", points)
        for f, pl in points:
            if not math.isfinite(f) or not math.isfinite(pl):
                raise SeriesError(f"non-finite point ({f}, {pl}) in series {self.material_name!r}")
        freqs = [f for f, _ in points]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise SeriesError(f"frequencies of series {self.material_name!r} must be strictly ascending")

    @classmethod
    def from_arrays(cls, material_name: str, frequencies, losses) -> "PenetrationLossSeries":
        return cls(material_name, tuple(zip(np.asarray(frequencies, float), np.asarray(losses, float))))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([f for f, _ in self.points], dtype=float)

    @property
    def losses(self) -> np.ndarray:
        return np.array([pl for _, pl in self.points], dtype=float)

    def turning_points(self) -> list[int]:
        """Indices of interior local extrema (sign changes of the finite difference)."""
        slopes = np.sign(np.diff(self.losses))
        slopes = slopes[slopes != 0]
        if len(slopes) < 2:
            return []
        nonzero = np.flatnonzero(np.diff(self.losses))
        changes = np.flatnonzero(slopes[1:] != slopes[:-1])
        return [int(nonzero[i + 1]) for i in changes]

    def is_monotonic(self) -> bool:
        return not self.turning_points()

    def to_dict(self) -> dict:
        return {
            "material_name": self.material_name,
            "points": [{"center_freq_ghz": f, "pl_db": pl} for f, pl in self.points],
        }
