"""Exception and warning types shared across the pipeline."""

from __future__ import annotations


class BahnarOcrError(Exception):
    """Base class for all pipeline errors."""


class EmptyImageError(BahnarOcrError):
    """Raised when an operation receives an image with zero pixels."""


class DegenerateHistogramError(BahnarOcrError):
    """Raised when every pixel shares one intensity, so no threshold separates classes."""


class ElementTooSmallError(BahnarOcrError):
    """Raised when the image is too small to derive a usable line-extraction element."""


class NoContentError(BahnarOcrError):
    """Raised when automatic cropping finds no foreground pixels."""


class NotVerticalError(BahnarOcrError):
    """Raised when a skew estimate is requested from a non-vertical edge."""


class ParallelError(BahnarOcrError):
    """Raised when two segments are (numerically) parallel and cannot intersect."""


class InvalidClusterLengthError(BahnarOcrError):
    """Raised when a frequency query uses a cluster outside the 2-4 grapheme range."""


class ParseError(BahnarOcrError):
    """Raised when a lexicon file cannot be parsed; carries position diagnostics."""


class VersionError(BahnarOcrError):
    """Raised when a lexicon file declares an unsupported format version."""


class BackendUnavailableError(BahnarOcrError):
    """Raised when the external OCR engine binary cannot be found."""


class BackendFailureError(BahnarOcrError):
    """Raised when the external OCR engine exits with a nonzero status."""


class BackendTimeoutError(BahnarOcrError):
    """Raised when a single OCR region exceeds the configured time budget."""


class InputError(BahnarOcrError):
    """Raised when an input image file is unreadable or has an unsupported format."""


class ConfigError(BahnarOcrError):
    """Raised for invalid configuration before any page work starts."""


class EmptyGroundTruthError(BahnarOcrError):
    """Raised when an evaluation ground-truth file contains no tokens."""


class EmptyVocabularyWarning(UserWarning):
    """Emitted when lexicon construction ingests zero validated words."""
