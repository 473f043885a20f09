"""Sweep-to-CIR processing and penetration-loss extraction."""

from .cir_pipeline import (
    ChannelImpulseResponse,
    FirstArrival,
    GateConfig,
    WindowKind,
    average_repeats,
    first_arrival,
    penetration_loss,
    process_manifest,
    process_segments,
    run_manifest,
    to_cir,
)

__all__ = [
    "ChannelImpulseResponse",
    "FirstArrival",
    "GateConfig",
    "WindowKind",
    "average_repeats",
    "first_arrival",
    "penetration_loss",
    "process_manifest",
    "process_segments",
    "run_manifest",
    "to_cir",
]
