"""
CIR Pipeline

Frequency sweep -> channel impulse response -> first-arrival tap ->
penetration loss as the LOS/NLOS level difference.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.signal import find_peaks
from scipy.signal.windows import hann

from ..data_structures.measurements import (
    AGGREGATE_REPEAT,
    BandPlan,
    MeasurementManifest,
    PenetrationLossSeries,
    Scenario,
    SweepSegment,
)
from ..utils.errors import (
    AveragingError,
    CenterProcessingError,
    ConfigError,
    GridPlanMismatchError,
    NoDetectableArrivalError,
    PenlossError,
)
from ..utils.sweep_io import read_sweep_segment

logger = logging.getLogger(__name__)


class WindowKind(Enum):
    """Spectral window applied before the inverse transform."""
    NONE = "none"
    HANN = "hann"


@dataclass(frozen=True)
class GateConfig:
    """Detection rule for the first arrival."""
    threshold_above_noise: float = 12.0  # dB
    noise_estimation_fraction: float = 0.25  # latest-delay share of taps
    search_window: tuple[float, float] = (5.0, 100.0)  # ns
    dynamic_range_db: float = 100.0  # below the strongest in-window tap

    def __post_init__(self):
        lo, hi = (float(v) for v in self.search_window)
        object.__setattr__(self, "search_window", (lo, hi))
        if not self.threshold_above_noise > 0:
            raise ConfigError(f"gate threshold must be > 0 dB, got {self.threshold_above_noise}")
        if not 0 < self.noise_estimation_fraction < 0.5:
            raise ConfigError(
                f"noise estimation fraction must be in (0, 0.5), got {self.noise_estimation_fraction}"
            )
        if not 0 <= lo < hi:
            raise ConfigError(f"search window ({lo}, {hi}) ns is invalid")
        if not self.dynamic_range_db > 0:
            raise ConfigError(f"dynamic range must be > 0 dB, got {self.dynamic_range_db}")

    def to_dict(self) -> dict:
        return {
            "threshold_above_noise_db": self.threshold_above_noise,
            "noise_estimation_fraction": self.noise_estimation_fraction,
            "search_window_ns": list(self.search_window),
            "dynamic_range_db": self.dynamic_range_db,
        }


@dataclass(frozen=True)
class ChannelImpulseResponse:
    """Delay-domain response of one segment; delays in ns."""
    delay_grid: np.ndarray
    taps: np.ndarray
    delay_resolution: float
    unambiguous_range: float
    center_frequency: Optional[float] = None
    window: WindowKind = WindowKind.NONE

    @classmethod
    def from_taps(
        cls,
        taps,
        delay_resolution: float = 1.0,
        center_frequency: Optional[float] = None,
    ) -> "ChannelImpulseResponse":
        taps = np.asarray(taps, dtype=complex)
        n = len(taps)
        return cls(
            delay_grid=np.arange(n) * delay_resolution,
            taps=taps,
            delay_resolution=delay_resolution,
            unambiguous_range=n * delay_resolution,
            center_frequency=center_frequency,
        )

    @property
    def power_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20 * np.log10(np.abs(self.taps))


@dataclass(frozen=True)
class FirstArrival:
    """Smallest-delay detected tap."""
    delay: float  # ns
    power_db: float
    tap_index: int
    noise_floor_db: float = -math.inf
    center_frequency: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "delay_ns": self.delay,
            "power_db": self.power_db,
            "tap_index": self.tap_index,
            "noise_floor_db": self.noise_floor_db,
            "center_ghz": self.center_frequency,
        }


def window_coefficients(kind: WindowKind, n: int) -> np.ndarray:
    if kind is WindowKind.HANN:
        return hann(n, sym=False)
    return np.ones(n)


def average_repeats(segments: Sequence[SweepSegment]) -> SweepSegment:
    """Coherent (complex) mean of repeat sweeps, summed in the given order."""
    if not segments:
        raise AveragingError("no segments to average")
    first = segments[0]
    for seg in segments[1:]:
        if abs(seg.center_frequency - first.center_frequency) > 1e-9:
            raise AveragingError(
                f"center {seg.center_frequency:g} GHz differs from {first.center_frequency:g} GHz"
            )
        if seg.scenario is not first.scenario:
            raise AveragingError(f"scenario {seg.scenario} differs from {first.scenario}")
        if seg.points != first.points or not np.allclose(
            seg.frequency_grid, first.frequency_grid, rtol=1e-12, atol=0
        ):
            raise AveragingError(f"frequency grid of repeat {seg.repeat_index} differs")

    mean = np.mean(np.vstack([seg.s21 for seg in segments]), axis=0)
    return first.with_samples(mean, repeat_index=AGGREGATE_REPEAT)


def to_cir(segment: SweepSegment, window: WindowKind = WindowKind.NONE) -> ChannelImpulseResponse:
    """Inverse DFT of the (windowed) sweep.

    A flat unit spectrum maps to a unit tap at delay 0; windowed spectra are
    divided by the window's coherent gain so on-bin path levels do not depend
    on the window.
    """
    n = segment.points
    coeffs = window_coefficients(window, n)
    taps = np.fft.ifft(segment.s21 * coeffs) / coeffs.mean()
    resolution = 1e9 / (n * segment.frequency_step_hz)
    return ChannelImpulseResponse(
        delay_grid=np.arange(n) * resolution,
        taps=taps,
        delay_resolution=resolution,
        unambiguous_range=n * resolution,
        center_frequency=segment.center_frequency,
        window=window,
    )


def cir_spectrum(cir: ChannelImpulseResponse) -> np.ndarray:
    """Forward transform of a CIR: the window-compensated spectrum it came from."""
    return np.fft.fft(cir.taps)


def estimate_noise_floor(cir: ChannelImpulseResponse, fraction: float) -> float:
    """Mean power (dB) of the latest-delay ``fraction`` of taps."""
    count = max(1, int(round(len(cir.taps) * fraction)))
    power = float(np.mean(np.abs(cir.taps[-count:]) ** 2))
    return 10 * math.log10(power) if power > 0 else -math.inf


def first_arrival(cir: ChannelImpulseResponse, gate: GateConfig = GateConfig()) -> FirstArrival:
    """Smallest-delay local maximum in the search window above noise + threshold.

    Only local maxima of |tap| are candidates, so a path is represented by its
    peak tap. An early tap that passes the gate but rises straight into a
    stronger neighbour (e.g. -6 dB at 15 ns before 0 dB at 16 ns) is part of
    that neighbour's peak and the arrival is reported at 16 ns.
    """
    if len(cir.taps) == 0:
        raise ValueError("empty CIR")
    lo, hi = gate.search_window
    if hi > cir.unambiguous_range + 1e-9:
        raise ConfigError(
            f"search window upper edge {hi:g} ns exceeds the unambiguous range "
            f"{cir.unambiguous_range:g} ns"
        )

    noise_db = estimate_noise_floor(cir, gate.noise_estimation_fraction)
    power_db = cir.power_db
    in_window = (cir.delay_grid >= lo - 1e-9) & (cir.delay_grid <= hi + 1e-9)
    if not in_window.any():
        raise NoDetectableArrivalError(noise_db, gate.threshold_above_noise)

    strongest = float(power_db[in_window].max())
    gate_db = max(noise_db + gate.threshold_above_noise, strongest - gate.dynamic_range_db)

    # pad so that taps at either edge can register as peaks
    peaks, _ = find_peaks(np.pad(np.abs(cir.taps), 1))
    peaks = peaks - 1
    candidates = [int(p) for p in peaks if in_window[p] and power_db[p] > gate_db]
    if not candidates:
        raise NoDetectableArrivalError(noise_db, gate.threshold_above_noise)

    index = min(candidates)
    return FirstArrival(
        delay=float(cir.delay_grid[index]),
        power_db=float(power_db[index]),
        tap_index=index,
        noise_floor_db=noise_db,
        center_frequency=cir.center_frequency,
    )


def penetration_loss(los: FirstArrival, nlos: FirstArrival) -> float:
    """PL = S_LOS - S_NLOS in dB."""
    if (
        los.center_frequency is not None
        and nlos.center_frequency is not None
        and abs(los.center_frequency - nlos.center_frequency) > 1e-9
    ):
        logger.warning(
            f"LOS ({los.center_frequency:g} GHz) and NLOS ({nlos.center_frequency:g} GHz) "
            f"arrivals come from different centers"
        )
    return los.power_db - nlos.power_db


@dataclass(frozen=True)
class CenterResult:
    """Per-center outcome with the arrivals it was derived from."""
    center_ghz: float
    los: FirstArrival
    nlos: FirstArrival
    loss_db: float

    def to_dict(self) -> dict:
        return {
            "center_ghz": self.center_ghz,
            "loss_db": self.loss_db,
            "los": self.los.to_dict(),
            "nlos": self.nlos.to_dict(),
        }


@dataclass(frozen=True)
class ProcessingResult:
    series: PenetrationLossSeries
    centers: tuple[CenterResult, ...]


def process_center(
    center_ghz: float,
    los_segments: Sequence[SweepSegment],
    nlos_segments: Sequence[SweepSegment],
    gate: GateConfig = GateConfig(),
    window: WindowKind = WindowKind.NONE,
) -> CenterResult:
    """Average, transform and detect both scenarios of one center."""
    try:
        los = first_arrival(to_cir(average_repeats(los_segments), window), gate)
        nlos = first_arrival(to_cir(average_repeats(nlos_segments), window), gate)
    except PenlossError as e:
        raise CenterProcessingError(center_ghz, e) from e
    loss = penetration_loss(los, nlos)
    logger.debug(
        f"{center_ghz:g} GHz: LOS {los.power_db:.2f} dB @ {los.delay:g} ns, "
        f"NLOS {nlos.power_db:.2f} dB @ {nlos.delay:g} ns, PL {loss:.2f} dB"
    )
    return CenterResult(center_ghz, los, nlos, loss)


def _assemble(material_name: str, results: Sequence[CenterResult]) -> ProcessingResult:
    series = PenetrationLossSeries(material_name, tuple((r.center_ghz, r.loss_db) for r in results))
    return ProcessingResult(series, tuple(results))


def _map_centers(fn, centers: Sequence[float], max_workers: int) -> list[CenterResult]:
    """Run ``fn`` per center; results come back in plan order."""
    if max_workers <= 1:
        return [fn(c) for c in centers]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(fn, centers))


def process_segments(
    material_name: str,
    plan: BandPlan,
    los_by_center: Mapping[float, Sequence[SweepSegment]],
    nlos_by_center: Mapping[float, Sequence[SweepSegment]],
    gate: GateConfig = GateConfig(),
    window: WindowKind = WindowKind.NONE,
    max_workers: int = 1,
) -> ProcessingResult:
    """Process in-memory segments keyed by plan center."""
    def run(center: float) -> CenterResult:
        return process_center(center, los_by_center[center], nlos_by_center[center], gate, window)

    return _assemble(material_name, _map_centers(run, plan.center_frequencies, max_workers))


def run_manifest(
    manifest: MeasurementManifest,
    gate: GateConfig = GateConfig(),
    window: WindowKind = WindowKind.NONE,
    max_workers: int = 1,
) -> ProcessingResult:
    """Read, average and process every center of a manifest."""
    def run(center: float) -> CenterResult:
        try:
            segments = {
                scenario: [
                    read_sweep_segment(ref.path, manifest.plan, ref.repeat, scenario)
                    for ref in manifest.segments_for(center, scenario)
                ]
                for scenario in Scenario
            }
            for seg in segments[Scenario.LOS] + segments[Scenario.NLOS]:
                if abs(seg.center_frequency - center) > 1e-6:
                    raise GridPlanMismatchError(
                        f"segment grid is centered at {seg.center_frequency:g} GHz, "
                        f"manifest lists it under {center:g} GHz"
                    )
        except PenlossError as e:
            raise CenterProcessingError(center, e) from e
        return process_center(center, segments[Scenario.LOS], segments[Scenario.NLOS], gate, window)

    logger.info(
        f"Processing {manifest.material_name}: {len(manifest.plan.center_frequencies)} centers, "
        f"window={window.value}"
    )
    return _assemble(manifest.material_name, _map_centers(run, manifest.plan.center_frequencies, max_workers))


def process_manifest(
    manifest: MeasurementManifest,
    gate: GateConfig = GateConfig(),
    window: WindowKind = WindowKind.NONE,
    max_workers: int = 1,
) -> PenetrationLossSeries:
    """One penetration-loss point per plan center."""
    return run_manifest(manifest, gate, window, max_workers).series
