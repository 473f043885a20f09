"""Slab transmission oracle and synthetic sweep generation."""

from .slab_oracle import (
    MATERIAL_PRESETS,
    Layer,
    SlabStack,
    double_glazing,
    insertion_transmission,
    loss_spectrum,
    material_loss_db,
    reflection,
    transmission,
)
from .synthesis import SynthConfig, load_synth_config, synthesize_manifest, synthesize_segments

__all__ = [
    "MATERIAL_PRESETS",
    "Layer",
    "SlabStack",
    "double_glazing",
    "insertion_transmission",
    "loss_spectrum",
    "material_loss_db",
    "reflection",
    "transmission",
    "SynthConfig",
    "load_synth_config",
    "synthesize_manifest",
    "synthesize_segments",
]
