"""Grayscale handling, cropping, Otsu binarization, and line-isolating morphology.

Images are thin wrappers over row-major numpy arrays. All operations are pure:
they never mutate their inputs and return fresh images, so values can be shared
freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from .errors import (
    DegenerateHistogramError,
    ElementTooSmallError,
    EmptyImageError,
    InputError,
    NoContentError,
)

INTENSITY_LEVELS = 256

Orientation = str  # "horizontal" | "vertical"


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale raster; ``data`` is uint8 with shape (height, width)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValueError(f"grayscale data must be 2-D, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() >= INTENSITY_LEVELS):
                raise ValueError("grayscale intensities must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def size(self) -> int:
        return self.data.size


@dataclass(frozen=True)
class BinaryImage:
    """Foreground/background raster; ``data`` is uint8 of {0, 1}, 1 = ink."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValueError(f"binary data must be 2-D, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            arr = arr.astype(np.uint8)
        if arr.size and arr.max() > 1:
            raise ValueError("binary image may only contain 0 and 1")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def size(self) -> int:
        return self.data.size


@dataclass(frozen=True)
class Histogram:
    """Intensity histogram: 256 counts plus their total."""

    counts: np.ndarray
    total: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.shape != (INTENSITY_LEVELS,):
            raise ValueError("histogram needs exactly 256 bins")
        if arr.min() < 0:
            raise ValueError("histogram counts must be non-negative")
        if int(arr.sum()) != self.total:
            raise ValueError("histogram counts must sum to total")
        object.__setattr__(self, "counts", arr)


@dataclass(frozen=True)
class OtsuResult:
    """Chosen threshold plus the between-class variance achieved there."""

    threshold: int
    between_class_variance: float


@dataclass(frozen=True)
class StructuringElement:
    """All-ones rectangular probe, anchored at (height // 2, width // 2)."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("structuring element dimensions must be >= 1")


def compute_histogram(img: GrayImage) -> Histogram:
    """Tally pixels per intensity level.

    Raises:
        EmptyImageError: the image has zero pixels.
    """
    if img.size == 0:
        raise EmptyImageError("cannot histogram an empty image")
    counts = np.bincount(img.data.ravel(), minlength=INTENSITY_LEVELS).astype(np.int64)
    return Histogram(counts=counts, total=int(img.size))


def otsu_threshold(hist: Histogram) -> OtsuResult:
    """Pick the threshold t maximizing the between-class variance.

    The background class holds intensities <= t, the foreground intensities
    > t. Candidates where either class is empty are skipped; ties resolve to
    the smallest t. The argmax is computed in exact integer arithmetic so it
    never depends on floating-point rounding:

        sigma_b^2(t) = (S_t * N - S * W_t)^2 / (N^2 * W_t * (N - W_t))

    with W_t / S_t the count / intensity mass at or below t and N / S the
    totals. This is the weighted-means variance expression with every
    division cleared.

    Raises:
        DegenerateHistogramError: all mass sits on a single intensity.
    """
    counts = hist.counts
    total = hist.total
    if total <= 0:
        raise EmptyImageError("histogram total must be positive")

    grand_sum = int(np.dot(np.arange(INTENSITY_LEVELS, dtype=np.int64), counts))

    best_t = -1
    best_num = 0  # (S_t*N - S*W_t)^2
    best_den = 1  # W_t * (N - W_t)
    w = 0
    s = 0
    for t in range(INTENSITY_LEVELS - 1):
        w += int(counts[t])
        s += t * int(counts[t])
        if w == 0 or w == total:
            continue
        num = (s * total - grand_sum * w) ** 2
        den = w * (total - w)
        # exact comparison of num/den vs best_num/best_den
        if best_t < 0 or num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den

    if best_t < 0:
        raise DegenerateHistogramError("all pixels share one intensity")

    variance = float(Fraction(best_num, best_den * total * total))
    return OtsuResult(threshold=best_t, between_class_variance=variance)


def binarize(img: GrayImage, threshold: int, ink_is_dark: bool = True) -> BinaryImage:
    """Label pixels as foreground (1) or background (0) at the given threshold.

    With ``ink_is_dark``, intensities <= threshold become foreground;
    otherwise the labeling is inverted.
    """
    if not 0 <= threshold <= INTENSITY_LEVELS - 2:
        raise ValueError(f"threshold must lie in [0, 254], got {threshold}")
    dark = img.data <= threshold
    fg = dark if ink_is_dark else ~dark
    return BinaryImage(fg.astype(np.uint8))


def _windows(img: BinaryImage, se: StructuringElement) -> np.ndarray:
    """Zero-padded sliding windows so out-of-bounds reads as background."""
    ah, aw = se.height // 2, se.width // 2
    padded = np.pad(
        img.data,
        ((ah, se.height - 1 - ah), (aw, se.width - 1 - aw)),
        mode="constant",
        constant_values=0,
    )
    return sliding_window_view(padded, (se.height, se.width))


def erode(img: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Morphological erosion; a pixel survives only when the whole probe
    window is in-bounds and covered by foreground."""
    if img.size == 0:
        return BinaryImage(img.data.copy())
    if se.height > img.height or se.width > img.width:
        return BinaryImage(np.zeros_like(img.data))
    out = _windows(img, se).min(axis=(2, 3))
    return BinaryImage(out)


def dilate(img: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Morphological dilation; a pixel lights up when the probe window covers
    any foreground pixel (out-of-bounds counts as background)."""
    if img.size == 0:
        return BinaryImage(img.data.copy())
    out = _windows(img, se).max(axis=(2, 3))
    return BinaryImage(out)


def line_element(img: BinaryImage, orientation: Orientation, kernel_divisor: int = 40) -> StructuringElement:
    """Derive the 1-pixel-thick probe used to isolate ruling lines.

    Length is ``dimension // kernel_divisor`` (width for horizontal lines,
    height for vertical), so only runs at least that long survive the opening.

    Raises:
        ElementTooSmallError: computed length < 2.
    """
    if orientation == "horizontal":
        length = img.width // kernel_divisor
    elif orientation == "vertical":
        length = img.height // kernel_divisor
    else:
        raise ValueError(f"orientation must be horizontal or vertical, got {orientation!r}")
    if length < 2:
        raise ElementTooSmallError(
            f"{orientation} element length {length} < 2; image too small for line extraction"
        )
    if orientation == "horizontal":
        return StructuringElement(width=length, height=1)
    return StructuringElement(width=1, height=length)


def extract_line_mask(img: BinaryImage, orientation: Orientation, kernel_divisor: int = 40) -> BinaryImage:
    """Opening (erode then dilate) with a long thin element, keeping only runs
    at least one element-length long along the requested axis."""
    se = line_element(img, orientation, kernel_divisor)
    return dilate(erode(img, se), se)


def auto_crop(
    img: GrayImage,
    margin: int = 8,
    manual: Optional[Tuple[int, int, int, int]] = None,
    ink_is_dark: bool = True,
) -> GrayImage:
    """Crop to the bounding box of the largest connected foreground component.

    The image is Otsu-binarized, the largest 8-connected component located,
    and its bounding box grown by ``margin`` pixels (clamped to the image).
    A ``manual`` rectangle (x0, y0, x1, y1), exclusive on the high edges,
    overrides detection entirely.

    Raises:
        NoContentError: binarization yields no foreground pixels.
    """
    if img.size == 0:
        raise EmptyImageError("cannot crop an empty image")
    if manual is not None:
        x0, y0, x1, y1 = manual
        if not (0 <= x0 < x1 <= img.width and 0 <= y0 < y1 <= img.height):
            raise ValueError(f"manual crop rectangle {manual} out of bounds")
        return GrayImage(img.data[y0:y1, x0:x1].copy())

    hist = compute_histogram(img)
    try:
        threshold = otsu_threshold(hist).threshold
    except DegenerateHistogramError:
        # Uniform image: dark side of mid-scale counts as all-foreground,
        # light side as empty (with ink_is_dark; inverted otherwise).
        level = int(img.data.flat[0])
        is_ink = level < 128 if ink_is_dark else level >= 128
        if is_ink:
            return GrayImage(img.data.copy())
        raise NoContentError("no foreground pixels found") from None

    fg = binarize(img, threshold, ink_is_dark=ink_is_dark).data
    if not fg.any():
        raise NoContentError("no foreground pixels found")

    labels, n = ndimage.label(fg, structure=np.ones((3, 3), dtype=np.uint8))
    if n == 0:
        raise NoContentError("no foreground pixels found")
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    largest = int(sizes.argmax())
    ys, xs = np.nonzero(labels == largest)
    y0 = max(int(ys.min()) - margin, 0)
    y1 = min(int(ys.max()) + margin + 1, img.height)
    x0 = max(int(xs.min()) - margin, 0)
    x1 = min(int(xs.max()) + margin + 1, img.width)
    return GrayImage(img.data[y0:y1, x0:x1].copy())


def to_grayscale(rgb: np.ndarray) -> GrayImage:
    """Integer BT.601 luma of a (H, W, 3) uint8 array, rounded to nearest."""
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) color data, got shape {rgb.shape}")
    r = rgb[:, :, 0].astype(np.int64)
    g = rgb[:, :, 1].astype(np.int64)
    b = rgb[:, :, 2].astype(np.int64)
    luma = (299 * r + 587 * g + 114 * b + 500) // 1000
    return GrayImage(luma.astype(np.uint8))


def load_image(path: Union[str, Path]) -> GrayImage:
    """Load a PNG or single-page TIFF as grayscale.

    8-bit grayscale is taken as-is; 24-bit color converts via integer luma.
    Anything else is rejected.

    Raises:
        InputError: unreadable file, unsupported format/mode, or multi-page TIFF.
    """
    from PIL import Image, UnidentifiedImageError

    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "TIFF"):
                raise InputError(f"{path}: unsupported format {im.format!r}; only PNG and TIFF are read")
            if getattr(im, "n_frames", 1) != 1:
                raise InputError(f"{path}: multi-page TIFF not supported")
            if im.mode == "L":
                return GrayImage(np.asarray(im, dtype=np.uint8))
            if im.mode == "RGB":
                return to_grayscale(np.asarray(im, dtype=np.uint8))
            raise InputError(f"{path}: unsupported mode {im.mode!r}; need 8-bit gray or 24-bit color")
    except FileNotFoundError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except UnidentifiedImageError as exc:
        raise InputError(f"{path}: not a readable image") from exc


def save_image(img: Union[GrayImage, BinaryImage], path: Union[str, Path]) -> None:
    """Write an image as PNG (binary images are scaled to 0/255)."""
    from PIL import Image

    data = img.data if isinstance(img, GrayImage) else img.data * np.uint8(255)
    Image.fromarray(data, mode="L").save(Path(path), format="PNG")
