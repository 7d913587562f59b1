"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, I/O and format
errors exit 2, numeric/domain errors exit 3.
"""


class TopofieldError(Exception):
    """Base class for all package errors."""


class InvalidShapeError(TopofieldError):
    """Grid height or width is not a positive integer."""


class InvalidFieldError(TopofieldError):
    """Field values are not all finite."""


class ShapeMismatchError(TopofieldError):
    """Two fields (or a field and a mask) do not share a shape."""


class DomainError(TopofieldError):
    """Values outside the mathematical domain of an operation."""


class EmptyMaskError(TopofieldError):
    """A validity mask selects no pixels."""


class FieldFormatError(TopofieldError):
    """A field or diagram file could not be decoded."""


class DivergenceError(TopofieldError):
    """The optimizer produced a non-finite value; carries the step index."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"non-finite objective at step {step}")
