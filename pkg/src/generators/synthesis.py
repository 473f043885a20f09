"""
Synthetic Sweep Generation

Builds LOS/NLOS sweep segments from a slab stack or a target linear loss
model, optionally writing them out as a complete measurement manifest.
"""

import json
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..data_structures.measurements import (
    BandPlan,
    MaterialCategory,
    MeasurementGeometry,
    MeasurementManifest,
    Scenario,
    SegmentRef,
    SweepSegment,
    find_specimen,
)
from ..models.penetration_models import LinearLossModel, lookup
from ..utils.errors import ConfigError
from ..utils.sweep_io import (
    GeometryDocument,
    PlanDocument,
    describe_validation_error,
    write_manifest,
    write_sweep_segment,
)
from .slab_oracle import Layer, SlabStack, insertion_transmission, preset_layer

logger = logging.getLogger(__name__)

SCENARIO_CODES = {Scenario.LOS: 0, Scenario.NLOS: 1}
MANIFEST_NAME = "manifest.json"


class LayerDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rel_permittivity: float = Field(ge=1.0)
    loss_tangent: float = Field(default=0.0, ge=0.0)
    thickness_m: float = Field(ge=0.0)


class StackDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    layers: list[LayerDocument] = Field(min_length=1)
    coherent: bool = True

    def to_stack(self) -> SlabStack:
        return SlabStack(
            tuple(Layer(l.rel_permittivity, l.loss_tangent, l.thickness_m) for l in self.layers),
            self.coherent,
        )


class LineDocument(BaseModel):
    """Target line given by parameters instead of a catalog name."""
    model_config = ConfigDict(extra="forbid")

    slope_db_per_ghz: float
    intercept_db: float
    name: str = "target line"


class PathDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    delay_ns: float = Field(gt=0.0)
    amplitude: float = Field(gt=0.0, lt=1.0)


class SynthConfig(BaseModel):
    """Synthetic measurement description.

    Exactly one of ``stack``, ``preset`` or ``model`` selects the material
    response. ``snr_db`` of None means noise-free sweeps.
    """
    model_config = ConfigDict(extra="forbid")

    material_name: Optional[str] = None
    specimen: Optional[str] = None
    category: MaterialCategory = MaterialCategory.OTHER
    thickness_cm: Optional[float] = Field(default=None, gt=0.0)
    width_cm: float = Field(default=100.0, gt=0.0)
    height_cm: float = Field(default=100.0, gt=0.0)

    stack: Optional[StackDocument] = None
    preset: Optional[MaterialCategory] = None
    model: Optional[Union[str, LineDocument]] = None

    plan: Optional[PlanDocument] = None
    los_delay_ns: float = Field(default=16.0, ge=0.0)
    los_amplitude: float = Field(default=1.0, gt=0.0)
    extra_paths: list[PathDocument] = Field(default_factory=list)
    snr_db: Optional[float] = None
    repeats: int = Field(default=10, ge=1)
    seed: int = Field(default=42, ge=0)
    geometry: Optional[GeometryDocument] = None

    @model_validator(mode="after")
    def _one_response(self) -> "SynthConfig":
        chosen = [name for name in ("stack", "preset", "model") if getattr(self, name) is not None]
        if len(chosen) != 1:
            raise ValueError(f"exactly one of stack, preset, model is required (got {chosen or 'none'})")
        if self.specimen is not None:
            try:
                find_specimen(self.specimen)
            except KeyError:
                raise ValueError(f"unknown specimen {self.specimen!r}")
        return self

    def band_plan(self) -> BandPlan:
        return self.plan.to_plan() if self.plan is not None else BandPlan.default()


def load_synth_config(path: Union[str, Path], defaults: Optional[dict] = None) -> SynthConfig:
    """Read a synth config from JSON or YAML; ``defaults`` fill keys the file leaves out."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = yaml.safe_load(f) if path.suffix in (".yaml", ".yml") else json.load(f)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigError(f"{path}: cannot parse synth config ({e})")
        except UnicodeDecodeError as e:
            raise ConfigError(f"{path}: not UTF-8 text ({e.reason} at byte {e.start})")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: synth config must be a mapping")
    for key, value in (defaults or {}).items():
        raw.setdefault(key, value)
    return parse_synth_config(raw, source=str(path))


def parse_synth_config(raw: dict, source: str = "synth config") -> SynthConfig:
    try:
        config = SynthConfig.model_validate(raw)
    except ValidationError as e:
        field_path, message = describe_validation_error(e)
        raise ConfigError(f"{source}: {field_path or 'config'}: {message}")
    _check_delays(config, config.band_plan())
    target_model(config)
    return config


def _check_delays(config: SynthConfig, plan: BandPlan):
    unambiguous_ns = plan.points_per_segment / plan.segment_bandwidth
    for delay in [config.los_delay_ns] + [p.delay_ns for p in config.extra_paths]:
        if not delay < unambiguous_ns:
            raise ConfigError(
                f"path delay {delay:g} ns outside the unambiguous range {unambiguous_ns:g} ns"
            )


def _thickness_cm(config: SynthConfig) -> float:
    if config.thickness_cm is not None:
        return config.thickness_cm
    if config.specimen is not None:
        return find_specimen(config.specimen).thickness_cm
    if config.stack is not None:
        return config.stack.to_stack().total_thickness * 100
    return 1.0


def target_model(config: SynthConfig) -> Optional[LinearLossModel]:
    if config.model is None:
        return None
    if isinstance(config.model, str):
        return lookup(config.model)
    return LinearLossModel(config.model.name, config.model.slope_db_per_ghz, config.model.intercept_db)


def target_stack(config: SynthConfig) -> Optional[SlabStack]:
    if config.stack is not None:
        return config.stack.to_stack()
    if config.preset is not None:
        return SlabStack((preset_layer(config.preset, _thickness_cm(config) / 100),))
    return None


def material_response(config: SynthConfig, frequencies_hz: np.ndarray) -> np.ndarray:
    """Complex NLOS/LOS ratio at each frequency."""
    model = target_model(config)
    if model is not None:
        return 10 ** (-model.predict(frequencies_hz / 1e9) / 20) + 0j
    stack = target_stack(config)
    return np.array([insertion_transmission(stack, f) for f in frequencies_hz], dtype=complex)


def clean_los(config: SynthConfig, frequencies_hz: np.ndarray) -> np.ndarray:
    """Direct path plus configured extra paths, noise-free."""
    paths = [(config.los_delay_ns, config.los_amplitude)]
    paths += [(p.delay_ns, p.amplitude * config.los_amplitude) for p in config.extra_paths]
    sweep = np.zeros(len(frequencies_hz), dtype=complex)
    for delay_ns, amplitude in paths:
        sweep += amplitude * np.exp(-2j * np.pi * frequencies_hz * delay_ns * 1e-9)
    return sweep


def _rng(seed: int, center_index: int, repeat: int, scenario: Scenario) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed, center_index, repeat, SCENARIO_CODES[scenario]])
    )


def add_noise(sweep: np.ndarray, snr_db: Optional[float], reference_power: float, rng) -> np.ndarray:
    """Complex white Gaussian noise with variance reference_power / 10^(snr/10)."""
    if snr_db is None:
        return sweep.copy()
    variance = reference_power / 10 ** (snr_db / 10)
    noise = rng.standard_normal(len(sweep)) + 1j * rng.standard_normal(len(sweep))
    return sweep + np.sqrt(variance / 2) * noise


def synthesize_segments(
    config: SynthConfig,
) -> tuple[dict[float, list[SweepSegment]], dict[float, list[SweepSegment]]]:
    """LOS and NLOS repeats per plan center, in memory."""
    plan = config.band_plan()
    _check_delays(config, plan)
    los_by_center: dict[float, list[SweepSegment]] = {}
    nlos_by_center: dict[float, list[SweepSegment]] = {}

    for ci, center in enumerate(plan.center_frequencies):
        freqs = plan.segment_frequencies(center)
        los = clean_los(config, freqs)
        nlos = los * material_response(config, freqs)
        reference_power = float(np.mean(np.abs(los) ** 2))

        for scenario, clean, store in (
            (Scenario.LOS, los, los_by_center),
            (Scenario.NLOS, nlos, nlos_by_center),
        ):
            store[center] = [
                SweepSegment(
                    center_frequency=center,
                    frequency_grid=freqs,
                    s21=add_noise(clean, config.snr_db, reference_power, _rng(config.seed, ci, r, scenario)),
                    repeat_index=r,
                    scenario=scenario,
                )
                for r in range(config.repeats)
            ]
    return los_by_center, nlos_by_center


def segment_filename(center_ghz: float, repeat: int, scenario: Scenario) -> str:
    return f"{scenario.value.lower()}_{center_ghz:06.2f}ghz_r{repeat:02d}.csv"


def material_name_of(config: SynthConfig) -> str:
    if config.material_name:
        return config.material_name
    if config.specimen:
        return find_specimen(config.specimen).name
    model = target_model(config)
    return model.name if model is not None else "synthetic slab"


def synthesize_manifest(config: SynthConfig, out_dir: Union[str, Path]) -> MeasurementManifest:
    """Write every sweep under ``out_dir/sweeps`` plus ``out_dir/manifest.json``."""
    out_dir = Path(out_dir)
    plan = config.band_plan()
    los_by_center, nlos_by_center = synthesize_segments(config)

    category = config.category
    width, height = config.width_cm, config.height_cm
    if config.specimen is not None:
        specimen = find_specimen(config.specimen)
        category, width, height = specimen.category, specimen.width_cm, specimen.height_cm
    elif category is MaterialCategory.OTHER:
        if config.preset is not None:
            category = config.preset
        elif target_model(config) is not None:
            category = target_model(config).category

    refs = []
    for center in plan.center_frequencies:
        for segments in (los_by_center[center], nlos_by_center[center]):
            for segment in segments:
                path = out_dir / "sweeps" / segment_filename(center, segment.repeat_index, segment.scenario)
                write_sweep_segment(segment, path)
                refs.append(SegmentRef(center, segment.repeat_index, segment.scenario, path))

    manifest = MeasurementManifest(
        material_name=material_name_of(config),
        material_category=category,
        thickness_cm=_thickness_cm(config),
        width_cm=width,
        height_cm=height,
        repeats=config.repeats,
        plan=plan,
        segments=tuple(refs),
        geometry=config.geometry.to_geometry() if config.geometry else MeasurementGeometry(),
        base_dir=out_dir,
    )
    write_manifest(manifest, out_dir / MANIFEST_NAME)
    logger.info(f"Synthesized {manifest.material_name}: {len(refs)} sweep files in {out_dir}")
    return manifest


def synthesize_trial(config: SynthConfig, seed: int) -> SynthConfig:
    """Copy of ``config`` with another seed, for Monte-Carlo runs."""
    return config.model_copy(update={"seed": seed})
