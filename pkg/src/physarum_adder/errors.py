"""Exception types shared across the package."""


class AdderError(Exception):
    """Base class for all errors raised by physarum_adder."""


class InvalidArgument(AdderError, ValueError):
    pass


class InvalidGeometry(InvalidArgument):
    pass


class CapacityError(AdderError, ValueError):
    """More particles requested than there are habitable cells."""


class InsufficientData(AdderError, ValueError):
    pass


class CalibrationFailure(AdderError):
    """Per-bin mean frequencies are not strictly ordered, so bins cannot be thresholded."""

    def __init__(self, message, means=None):
        super().__init__(message)
        self.means = means


class FormatError(AdderError, ValueError):
    pass


class ParseError(FormatError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateFit(AdderError, ValueError):
    pass
