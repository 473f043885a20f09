"""Data structures for sweeps, manifests and penetration-loss series."""

from .measurements import (
    AGGREGATE_REPEAT,
    SPECIMENS,
    BandPlan,
    MaterialCategory,
    MeasurementGeometry,
    MeasurementManifest,
    PenetrationLossSeries,
    Scenario,
    SegmentRef,
    Specimen,
    SweepSegment,
    find_specimen,
)

__all__ = [
    "AGGREGATE_REPEAT",
    "SPECIMENS",
    "BandPlan",
    "MaterialCategory",
    "MeasurementGeometry",
    "MeasurementManifest",
    "PenetrationLossSeries",
    "Scenario",
    "SegmentRef",
    "Specimen",
    "SweepSegment",
    "find_specimen",
]
