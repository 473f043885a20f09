"""Sweep -> CIR -> first arrival -> penetration loss."""

import dataclasses
import math

import numpy as np
import pytest

from src.data_structures.measurements import AGGREGATE_REPEAT, BandPlan, Scenario, SweepSegment
from src.generators.synthesis import parse_synth_config, synthesize_manifest
from src.processing.cir_pipeline import (
    ChannelImpulseResponse,
    GateConfig,
    WindowKind,
    average_repeats,
    cir_spectrum,
    estimate_noise_floor,
    first_arrival,
    penetration_loss,
    process_center,
    process_manifest,
    process_segments,
    to_cir,
)
from src.utils.errors import (
    AveragingError,
    CenterProcessingError,
    ConfigError,
    NoDetectableArrivalError,
)

PLAN = BandPlan.default()
CENTER = 9.5
FREQS = PLAN.segment_frequencies(CENTER)


def _segment(paths, center=CENTER, repeat=0, scenario=Scenario.LOS):
    """Sum of (delay ns, amplitude) paths on the plan grid."""
    freqs = PLAN.segment_frequencies(center)
    s21 = np.zeros(len(freqs), dtype=complex)
    for delay, amplitude in paths:
        s21 += amplitude * np.exp(-2j * np.pi * freqs * delay * 1e-9)
    return SweepSegment(center, freqs, s21, repeat, scenario)


# ----- transform -----

def test_flat_spectrum_gives_unit_tap_at_zero():
    cir = to_cir(SweepSegment(CENTER, FREQS, np.ones(len(FREQS))))
    assert cir.taps[0] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(cir.taps[1:])) <= 1e-12


def test_delay_axis():
    cir = to_cir(_segment([(16, 1.0)]))
    assert cir.delay_resolution == pytest.approx(1.0)
    assert cir.unambiguous_range == pytest.approx(256.0)
    assert cir.delay_grid[16] == pytest.approx(16.0)


@pytest.mark.parametrize("delay", [5, 16, 37, 99])
def test_on_bin_delay_lands_on_its_tap(delay):
    cir = to_cir(_segment([(delay, 1.0)]))
    assert int(np.argmax(np.abs(cir.taps))) == delay
    assert abs(cir.taps[delay]) == pytest.approx(1.0, abs=1e-12)


def test_forward_inverse_round_trip():
    rng = np.random.default_rng(0)
    s21 = rng.standard_normal(len(FREQS)) + 1j * rng.standard_normal(len(FREQS))
    segment = SweepSegment(CENTER, FREQS, s21)
    recovered = cir_spectrum(to_cir(segment))
    assert np.max(np.abs(recovered - s21)) / np.max(np.abs(s21)) <= 1e-10


def test_hann_window_keeps_on_bin_level():
    plain = first_arrival(to_cir(_segment([(20, 0.5)])))
    windowed = first_arrival(to_cir(_segment([(20, 0.5)]), WindowKind.HANN))
    assert windowed.delay == plain.delay == 20.0
    assert windowed.power_db == pytest.approx(plain.power_db, abs=1e-9)


def test_from_taps():
    cir = ChannelImpulseResponse.from_taps([0, 0, 1, 0], delay_resolution=2.0)
    assert list(cir.delay_grid) == [0.0, 2.0, 4.0, 6.0]
    assert cir.unambiguous_range == 8.0


# ----- first arrival -----

def test_first_arrival_single_path():
    arrival = first_arrival(to_cir(_segment([(16, 0.25)])))
    assert arrival.delay == 16.0
    assert arrival.tap_index == 16
    assert arrival.power_db == pytest.approx(20 * math.log10(0.25), abs=1e-9)
    assert arrival.center_frequency == CENTER


def test_earliest_path_wins_even_when_weaker():
    arrival = first_arrival(to_cir(_segment([(20, 0.3), (30, 1.0)])))
    assert arrival.delay == 20.0
    assert arrival.power_db == pytest.approx(20 * math.log10(0.3), abs=1e-9)


def test_path_before_search_window_is_ignored():
    arrival = first_arrival(to_cir(_segment([(3, 1.0), (40, 0.5)])))
    assert arrival.delay == 40.0


def test_custom_search_window():
    gate = GateConfig(search_window=(25.0, 100.0))
    arrival = first_arrival(to_cir(_segment([(20, 1.0), (30, 0.5)])), gate)
    assert arrival.delay == 30.0


def test_delay_shift_moves_arrival():
    base = _segment([(16, 0.8), (45, 0.3)])
    shifted = base.with_samples(base.s21 * np.exp(-2j * np.pi * FREQS * 7e-9))
    assert first_arrival(to_cir(shifted)).delay == first_arrival(to_cir(base)).delay + 7.0


def test_noisy_arrival_is_found():
    rng = np.random.default_rng(12)
    segment = _segment([(16, 1.0)])
    noise = 0.05 * (rng.standard_normal(len(FREQS)) + 1j * rng.standard_normal(len(FREQS)))
    arrival = first_arrival(to_cir(segment.with_samples(segment.s21 + noise)))
    assert arrival.delay == 16.0
    assert arrival.power_db == pytest.approx(0.0, abs=0.1)
    assert arrival.noise_floor_db < -30.0


def test_no_detectable_arrival():
    with pytest.raises(NoDetectableArrivalError) as excinfo:
        first_arrival(to_cir(SweepSegment(CENTER, FREQS, np.zeros(len(FREQS)))))
    assert excinfo.value.threshold_db == 12.0


def test_search_window_beyond_unambiguous_range():
    with pytest.raises(ConfigError, match="unambiguous range"):
        first_arrival(to_cir(_segment([(16, 1.0)])), GateConfig(search_window=(5.0, 300.0)))


def test_noise_floor_uses_latest_taps():
    taps = np.zeros(100, dtype=complex)
    taps[-25:] = 0.1
    cir = ChannelImpulseResponse.from_taps(taps)
    assert estimate_noise_floor(cir, 0.25) == pytest.approx(-20.0, abs=1e-9)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"threshold_above_noise": 0.0},
        {"noise_estimation_fraction": 0.6},
        {"search_window": (50.0, 10.0)},
        {"dynamic_range_db": -1.0},
    ],
)
def test_gate_validation(kwargs):
    with pytest.raises(ConfigError):
        GateConfig(**kwargs)


# ----- averaging and loss -----

def test_average_repeats_is_complex_mean():
    a = _segment([(16, 1.0)], repeat=0)
    b = a.with_samples(-a.s21 * 0.5, repeat_index=1)
    mean = average_repeats([a, b])
    np.testing.assert_allclose(mean.s21, 0.25 * a.s21)
    assert mean.repeat_index == AGGREGATE_REPEAT
    assert mean.is_aggregate


def test_average_rejects_mixed_centers():
    with pytest.raises(AveragingError):
        average_repeats([_segment([(16, 1.0)]), _segment([(16, 1.0)], center=10.5)])


def test_average_rejects_mixed_scenarios():
    with pytest.raises(AveragingError):
        average_repeats([_segment([(16, 1.0)]), _segment([(16, 1.0)], scenario=Scenario.NLOS)])


def test_average_rejects_empty():
    with pytest.raises(AveragingError):
        average_repeats([])


def test_penetration_loss_is_level_difference():
    los = first_arrival(to_cir(_segment([(16, 1.0)])))
    nlos = first_arrival(to_cir(_segment([(16, 0.1)], scenario=Scenario.NLOS)))
    assert penetration_loss(los, nlos) == pytest.approx(20.0, abs=1e-9)


def test_process_center_wraps_failures():
    los = [_segment([(16, 1.0)])]
    nlos = [SweepSegment(CENTER, FREQS, np.zeros(len(FREQS)), scenario=Scenario.NLOS)]
    with pytest.raises(CenterProcessingError) as excinfo:
        process_center(CENTER, los, nlos)
    assert excinfo.value.center_ghz == CENTER
    assert isinstance(excinfo.value.cause, NoDetectableArrivalError)


def _flat_loss_inputs(loss_db):
    los, nlos = {}, {}
    for c in PLAN.center_frequencies:
        los[c] = [_segment([(16, 1.0)], center=c, repeat=r) for r in range(3)]
        nlos[c] = [
            _segment([(16, 10 ** (-loss_db / 20))], center=c, repeat=r, scenario=Scenario.NLOS)
            for r in range(3)
        ]
    return los, nlos


def test_process_segments_one_point_per_center():
    los, nlos = _flat_loss_inputs(6.0)
    result = process_segments("flat", PLAN, los, nlos)
    assert list(result.series.frequencies) == list(PLAN.center_frequencies)
    np.testing.assert_allclose(result.series.losses, 6.0, atol=1e-9)
    assert all(c.los.delay == 16.0 for c in result.centers)


def test_parallel_processing_matches_serial():
    los, nlos = _flat_loss_inputs(3.0)
    serial = process_segments("flat", PLAN, los, nlos, max_workers=1)
    parallel = process_segments("flat", PLAN, los, nlos, max_workers=4)
    assert serial.series == parallel.series


def test_two_paths_land_on_their_taps():
    cir = to_cir(_segment([(16, 1.0), (40, 0.3)]))
    assert abs(cir.taps[16]) == pytest.approx(1.0, abs=1e-12)
    assert abs(cir.taps[40]) == pytest.approx(0.3, abs=1e-12)
    others = np.delete(np.abs(cir.taps), [16, 40])
    assert others.max() <= 1e-12


def test_weak_early_tap_above_gate_is_first():
    taps = np.full(256, 1e-4, dtype=complex)  # -80 dB floor
    taps[12] = 10 ** (-50 / 20)
    taps[16] = 1.0
    arrival = first_arrival(ChannelImpulseResponse.from_taps(taps), GateConfig(threshold_above_noise=6.0))
    assert arrival.noise_floor_db == pytest.approx(-80.0, abs=1e-9)
    assert arrival.delay == 12.0
    assert arrival.power_db == pytest.approx(-50.0, abs=1e-9)


def test_rising_edge_tap_belongs_to_the_peak():
    taps = np.full(256, 1e-4, dtype=complex)
    taps[15] = 10 ** (-6 / 20)
    taps[16] = 1.0
    arrival = first_arrival(ChannelImpulseResponse.from_taps(taps), GateConfig(threshold_above_noise=6.0))
    assert arrival.delay == 16.0


def test_swapping_scenarios_negates_loss():
    los = first_arrival(to_cir(_segment([(16, 1.0)])))
    nlos = first_arrival(to_cir(_segment([(16, 0.37), (30, 0.2)], scenario=Scenario.NLOS)))
    assert penetration_loss(nlos, los) == -penetration_loss(los, nlos)
    assert penetration_loss(los, los) == 0.0


@pytest.mark.parametrize("gain", [0.5, 3.0, 0.2 * np.exp(1j)])
def test_common_gain_cancels(gain):
    los, nlos = _flat_loss_inputs(6.0)
    scaled_los = {c: [s.with_samples(s.s21 * gain) for s in segs] for c, segs in los.items()}
    scaled_nlos = {c: [s.with_samples(s.s21 * gain) for s in segs] for c, segs in nlos.items()}
    base = process_segments("flat", PLAN, los, nlos).series.losses
    scaled = process_segments("flat", PLAN, scaled_los, scaled_nlos).series.losses
    np.testing.assert_allclose(scaled, base, rtol=0, atol=1e-9)


@pytest.mark.parametrize("gain", [0.5, 3.0, 0.2 * np.exp(1j)])
def test_nlos_gain_shifts_loss(gain):
    los, nlos = _flat_loss_inputs(6.0)
    scaled_nlos = {c: [s.with_samples(s.s21 * gain) for s in segs] for c, segs in nlos.items()}
    losses = process_segments("flat", PLAN, los, scaled_nlos).series.losses
    np.testing.assert_allclose(losses, 6.0 - 20 * math.log10(abs(gain)), rtol=0, atol=1e-9)


def test_repeat_average_shrinks_noise():
    rng = np.random.default_rng(7)
    clean = _segment([(16, 1.0), (40, 0.3)]).s21
    sigma = 0.1
    residuals = []
    for _ in range(20):
        repeats = [
            SweepSegment(CENTER, FREQS, clean + sigma / math.sqrt(2) * (
                rng.standard_normal(len(FREQS)) + 1j * rng.standard_normal(len(FREQS))
            ), r)
            for r in range(10)
        ]
        residuals.append(average_repeats(repeats).s21 - clean)
    residuals = np.concatenate(residuals)
    rms = float(np.sqrt(np.mean(np.abs(residuals) ** 2)))
    assert rms == pytest.approx(sigma / math.sqrt(10), rel=0.05)


def test_manifest_repeat_order_does_not_matter(tmp_path):
    config = parse_synth_config({"model": "Concrete Slab", "snr_db": 30, "repeats": 4, "seed": 3})
    manifest = synthesize_manifest(config, tmp_path)
    last = manifest.repeats - 1
    shuffled = dataclasses.replace(
        manifest,
        segments=tuple(
            dataclasses.replace(ref, repeat=last - ref.repeat) for ref in reversed(manifest.segments)
        ),
    )
    base = process_manifest(manifest)
    permuted = process_manifest(shuffled)
    np.testing.assert_allclose(permuted.losses, base.losses, rtol=0, atol=1e-9)
