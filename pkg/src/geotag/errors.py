"""Exception types shared across the toolkit."""


class GeotagError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(GeotagError):
    """Malformed or truncated audio container."""


class UnsupportedFormatError(GeotagError):
    """Audio encoding the decoder does not handle (e.g. compressed WAV)."""


class InvalidInputError(GeotagError, ValueError):
    """Operation called with arguments violating its precondition."""


class InvalidStateError(GeotagError, RuntimeError):
    """Operation called before its required state exists (e.g. backward
    without forward, eval-mode batchnorm before any training pass)."""


class ManifestError(GeotagError, ValueError):
    """Dataset manifest failed validation. Carries the offending line."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class BuildError(GeotagError):
    """Model construction failed; ``layer_index`` is the offending layer."""

    def __init__(self, message, layer_index=None):
        if layer_index is not None:
            message = f"layer {layer_index}: {message}"
        super().__init__(message)
        self.layer_index = layer_index


class TrainingError(GeotagError, RuntimeError):
    """Numerical failure during training (non-finite loss or gradient)."""
