"""
Configuration management for the penetration-loss toolkit.
"""

import os
from dataclasses import dataclass, field, fields
from typing import Optional

import yaml

from .errors import ConfigError


@dataclass
class PlanConfig:
    """Band plan for synth configs that give none: ``start_ghz`` to ``stop_ghz`` in ``step_ghz`` steps."""
    start_ghz: float = 4.5
    step_ghz: float = 1.0
    stop_ghz: float = 15.5
    bandwidth_ghz: float = 1.0
    points: int = 256


@dataclass
class GateSettings:
    """First-arrival detection settings."""
    threshold_db: float = 12.0
    noise_fraction: float = 0.25
    search_window_ns: list[float] = field(default_factory=lambda: [5.0, 100.0])
    dynamic_range_db: float = 100.0


@dataclass
class CIRConfig:
    """Delay-domain processing."""
    window: str = "none"  # none, hann
    max_workers: int = 1


@dataclass
class SynthDefaults:
    """Defaults applied to synth configs that leave them unset."""
    snr_db: Optional[float] = None
    repeats: int = 10
    los_delay_ns: float = 16.0


@dataclass
class ComparisonConfig:
    """Model comparison."""
    reference: Optional[str] = None  # catalog name; None picks the category's TR 38.901 model
    grid: Optional[str] = None  # "lo:step:hi" in GHz


@dataclass
class OutputConfig:
    """Output configuration."""
    save_pipeline_logs: bool = True


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str = "INFO"


@dataclass
class Config:
    """Main configuration class."""
    plan: PlanConfig = field(default_factory=PlanConfig)
    gate: GateSettings = field(default_factory=GateSettings)
    cir: CIRConfig = field(default_factory=CIRConfig)
    synth: SynthDefaults = field(default_factory=SynthDefaults)
    comparison: ComparisonConfig = field(default_factory=ComparisonConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    seed: int = 42

    def band_plan(self):
        from ..data_structures.measurements import BandPlan

        return BandPlan.from_range(
            self.plan.start_ghz,
            self.plan.step_ghz,
            self.plan.stop_ghz,
            self.plan.bandwidth_ghz,
            self.plan.points,
        )

    def gate_config(self):
        from ..processing.cir_pipeline import GateConfig

        return GateConfig(
            threshold_above_noise=self.gate.threshold_db,
            noise_estimation_fraction=self.gate.noise_fraction,
            search_window=tuple(self.gate.search_window_ns),
            dynamic_range_db=self.gate.dynamic_range_db,
        )

    def window_kind(self):
        from ..processing.cir_pipeline import WindowKind

        try:
            return WindowKind(self.cir.window)
        except ValueError:
            raise ConfigError(f"cir.window: unknown window {self.cir.window!r} (expected none or hann)")


_SECTIONS = {f.name: f.default_factory for f in fields(Config) if f.name != "seed"}

DEFAULT_CONFIG_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.dirname(__file__))),
    "configs",
    "default.yaml",
)


def _section(name: str, values) -> object:
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ConfigError(f"{name}: expected a mapping, got {type(values).__name__}")
    try:
        return _SECTIONS[name](**values)
    except TypeError as e:
        raise ConfigError(f"{name}: {e}")


def load_config(config_path: Optional[str] = None) -> Config:
    """Load configuration from a YAML file; unknown sections or keys are errors."""
    if config_path is None:
        config_path = DEFAULT_CONFIG_PATH

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            yaml_config = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{config_path}: invalid YAML ({e})")
    except UnicodeDecodeError as e:
        raise ConfigError(f"{config_path}: not UTF-8 text ({e.reason} at byte {e.start})")
    if not isinstance(yaml_config, dict):
        raise ConfigError(f"{config_path}: top level must be a mapping")

    unknown = set(yaml_config) - set(_SECTIONS) - {"seed"}
    if unknown:
        raise ConfigError(f"{config_path}: unknown section(s) {', '.join(sorted(unknown))}")

    sections = {name: _section(name, yaml_config.get(name)) for name in _SECTIONS}
    return Config(**sections, seed=int(yaml_config.get("seed", 42)))


def parse_grid(text: str) -> tuple[float, float, float]:
    """Parse ``lo:step:hi`` (GHz)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid {text!r} must look like lo:step:hi")
    try:
        lo, step, hi = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"grid {text!r} has non-numeric bounds")
    return lo, step, hi


def apply_args_to_config(config: Config, args) -> Config:
    """Override config values with command line arguments that were given."""
    if getattr(args, "gate_threshold_db", None) is not None:
        config.gate.threshold_db = args.gate_threshold_db
    if getattr(args, "window", None) is not None:
        config.cir.window = args.window
    if getattr(args, "workers", None) is not None:
        config.cir.max_workers = args.workers
    if getattr(args, "reference", None) is not None:
        config.comparison.reference = args.reference
    if getattr(args, "grid", None) is not None:
        config.comparison.grid = args.grid
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "log_level", None) is not None:
        config.logging.level = args.log_level
    return config
