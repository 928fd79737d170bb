"""Exception hierarchy shared by every pipeline stage."""


class DepthSignError(Exception):
    """Base class. ``stage`` names the pipeline stage that failed, if any."""

    stage = None

    def __init__(self, message="", stage=None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage


# frame I/O and synthesis
class FrameError(DepthSignError, ValueError):
    pass


class BadMagic(FrameError):
    pass


class TruncatedFile(FrameError):
    pass


class DepthOutOfRange(FrameError):
    pass


class UnsupportedFormat(FrameError):
    pass


class InvalidSpec(FrameError):
    pass


# segmentation
class NoObject(DepthSignError):
    stage = "Hand Segmentation"


class TooFewPixels(DepthSignError):
    stage = "Hand Segmentation"


# contour / sampling
class RegionTooSmall(DepthSignError):
    stage = "Hand Contour Tracing"


class DegenerateShape(DepthSignError):
    stage = "Normalize Image (128 points)"


class AllBinsEmpty(DepthSignError):
    stage = "Normalize Image (128 points)"


# descriptors
class NotPowerOfTwo(DepthSignError, ValueError):
    stage = "Discrete Fourier Description"


class ZeroDC(DepthSignError):
    stage = "Discrete Fourier Description"


# classification and template files
class EmptyTemplateSet(DepthSignError):
    stage = "Gesture Classification"


class NoMatch(DepthSignError):
    """Best match is farther than the configured rejection distance."""

    stage = "Gesture Classification"


class TemplateError(DepthSignError, ValueError):
    pass


class ParseError(TemplateError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BadLabel(ParseError):
    pass


class BadCoefficientCount(ParseError):
    pass
