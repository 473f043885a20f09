"""
Exception hierarchy for the penetration-loss toolkit.

Library code raises these; only the CLI turns them into exit codes.
"""

from typing import Optional


class PenlossError(Exception):
    """Base class for every error raised by the toolkit."""


class SweepFormatError(PenlossError):
    """A sweep or series CSV could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, row: Optional[int] = None):
        self.path = path
        self.row = row
        location = ""
        if path is not None:
            location = f"{path}"
            if row is not None:
                location += f" row {row}"
            location += ": "
        super().__init__(f"{location}{message}")


class PointCountError(SweepFormatError):
    """Sample count differs from the band plan."""

    def __init__(self, found: int, expected: int, path: Optional[str] = None):
        self.found = found
        self.expected = expected
        super().__init__(f"point count {found} ≠ {expected}", path=path)


class NonUniformGridError(SweepFormatError):
    """Frequency grid has duplicate or unevenly spaced points."""


class GridPlanMismatchError(SweepFormatError):
    """Frequency grid does not line up with any band-plan segment."""


class ManifestError(PenlossError):
    """A measurement manifest is invalid."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")


class MissingSegmentError(ManifestError):
    """A segment file referenced by a manifest does not exist."""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"segment file not found: {path}", field="segments")


class SeriesError(PenlossError):
    """A penetration-loss series is empty or malformed."""


class NoDetectableArrivalError(PenlossError):
    """No CIR tap exceeds the detection gate."""

    def __init__(self, noise_floor_db: float, threshold_db: float):
        self.noise_floor_db = noise_floor_db
        self.threshold_db = threshold_db
        super().__init__(
            f"no detectable arrival (noise floor {noise_floor_db:.2f} dB, "
            f"threshold {threshold_db:.2f} dB above noise)"
        )


class CenterProcessingError(PenlossError):
    """Processing failed for one center frequency of a manifest."""

    def __init__(self, center_ghz: float, cause: Exception):
        self.center_ghz = center_ghz
        self.cause = cause
        super().__init__(f"center {center_ghz:g} GHz: {cause}")


class FitError(PenlossError):
    """Linear fit is not defined for the given series."""


class ComparisonError(PenlossError):
    """A model comparison could not be formed."""


class CatalogLookupError(PenlossError):
    """Name does not match any catalog entry."""


class ConfigError(PenlossError):
    """Run or synthesis configuration is invalid."""


class StageError(PenlossError):
    """A report stage failed."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage} stage failed: {cause}")


class ModelError(PenlossError):
    """A linear loss model has invalid parameters."""


class AveragingError(PenlossError):
    """Repeat segments cannot be averaged together."""
