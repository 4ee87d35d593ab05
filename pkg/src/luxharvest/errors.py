"""Exception types shared across the package.

The two intermediate bases map onto the CLI exit codes: InputError is
reported as exit code 2, NumericalError as exit code 3 and StageError
as exit code 4.
"""


class LuxHarvestError(Exception):
    """Base class for every error raised by this package."""


class InputError(LuxHarvestError):
    """Invalid user-supplied data, file or configuration."""


class NumericalError(LuxHarvestError):
    """A numeric procedure failed or was asked for the impossible."""


class InvalidGrid(InputError):
    """Wavelength or evaluation grid is not strictly increasing or is malformed."""


class ShapeMismatch(InputError):
    """Array lengths or feature dimensions do not agree."""


class DegenerateSpectrum(NumericalError):
    """A spectrum with zero illuminance cannot be scaled to a positive target."""


class UnknownClass(InputError):
    """Light-source class name or member is not part of the taxonomy."""


class InvalidChannelValue(InputError):
    """Channel readings must be non-negative."""


class ConfigError(InputError):
    """Feature configuration is unknown or invalid for the chosen normalization."""


class InvalidFold(InputError):
    """Cross-validation fold count is out of range for the dataset."""


class DegenerateTraining(NumericalError):
    """Training data does not support fitting (e.g. fewer than two classes)."""


class NumericalFailure(NumericalError):
    """Linear algebra or fitting failed (singular or rank-deficient system)."""


class TaxonomyError(InputError):
    """Class labels do not belong to the expected taxonomy."""


class MissingCorrection(InputError):
    """No lux-correction entry exists for the requested class."""


class MissingReference(InputError):
    """No reference spectrum exists for the requested class."""


class OutOfRange(InputError):
    """Requested evaluation point lies outside the tabulated domain."""


class ConverterRangeExceeded(NumericalError):
    """Short-circuit current exceeds the tabulated dark J-V range."""


class CannotSize(NumericalError):
    """Area recommendation is impossible (no stored energy to scale from)."""


class InvalidTimeline(InputError):
    """Timeline timestamps are empty or not strictly increasing."""


class EmptyResult(LuxHarvestError):
    """A diagnostic quantity has no observations (non-fatal, reported as absent)."""


class ParseError(InputError):
    """A data file could not be parsed."""


class StageError(LuxHarvestError):
    """A pipeline stage failed; carries the stage tag for diagnostics."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
