"""Ruling-line geometry: segment detection, consolidation, skew, intersections.

Line detection is a deterministic Hough variant restricted to a small angle
band around the target axis; fragmented detections are merged by
``consolidate`` into continuous main edges. All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import NotVerticalError, ParallelError
from .imaging import BinaryImage, GrayImage

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("point coordinates must be finite")


@dataclass(frozen=True)
class LineSegment:
    """Directed segment between two distinct points.

    ``orientation`` records which axis the segment follows: a horizontal
    segment may not be steeper than 45 degrees, symmetrically for vertical.
    """

    p1: Point
    p2: Point
    orientation: str = "free"

    def __post_init__(self) -> None:
        if self.p1 == self.p2:
            raise ValueError("segment endpoints must differ")
        dx = abs(self.p1.x - self.p2.x)
        dy = abs(self.p1.y - self.p2.y)
        if self.orientation == HORIZONTAL and dy > dx:
            raise ValueError("horizontal segment steeper than 45 degrees")
        if self.orientation == VERTICAL and dx > dy:
            raise ValueError("vertical segment flatter than 45 degrees")

    def length(self) -> float:
        return math.hypot(self.p2.x - self.p1.x, self.p2.y - self.p1.y)


@dataclass(frozen=True)
class SkewAngle:
    """In-plane page skew in radians, measured from the y-axis."""

    theta: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta) or abs(self.theta) >= math.pi / 2:
            raise ValueError("skew angle must be finite and within (-pi/2, pi/2)")


@dataclass(frozen=True)
class HoughParams:
    """Knobs for axis-restricted segment detection.

    ``min_length`` should normally match the line-extraction element length
    used to build the mask.
    """

    rho_res: float = 1.0
    theta_res_deg: float = 1.0
    angle_tol_deg: float = 5.0
    votes: int = 50
    min_length: float = 50.0
    max_gap: float = 5.0


def _detect_rowwise(data: np.ndarray, params: HoughParams) -> List[Tuple[Point, Point]]:
    """Near-horizontal segment search on a foreground array.

    For each candidate angle the perpendicular offset of every foreground
    pixel is quantized into rho bins; bins with enough votes are walked along
    the line direction and split at gaps. Endpoints are the actual extreme
    pixels, so the returned segments keep the true (sub-bin) tilt.
    """
    ys, xs = np.nonzero(data)
    if xs.size == 0:
        return []
    xs = xs.astype(np.float64)
    ys = ys.astype(np.float64)

    found: List[Tuple[Point, Point]] = []
    n_steps = int(round(params.angle_tol_deg / params.theta_res_deg))
    for step in range(-n_steps, n_steps + 1):
        phi = math.radians(step * params.theta_res_deg)
        cos_p, sin_p = math.cos(phi), math.sin(phi)
        offs = ys * cos_p - xs * sin_p
        along = xs * cos_p + ys * sin_p
        bins = np.rint(offs / params.rho_res).astype(np.int64)

        order = np.lexsort((ys, xs, along, bins))
        sorted_bins = bins[order]
        sorted_along = along[order]
        boundaries = np.flatnonzero(np.diff(sorted_bins)) + 1
        starts = np.concatenate(([0], boundaries))
        ends = np.concatenate((boundaries, [sorted_bins.size]))
        for start, end in zip(starts, ends):
            if end - start < params.votes:
                continue
            run_breaks = np.flatnonzero(np.diff(sorted_along[start:end]) > params.max_gap) + 1
            run_starts = np.concatenate(([0], run_breaks)) + start
            run_ends = np.concatenate((run_breaks, [end - start])) + start
            for r0, r1 in zip(run_starts, run_ends):
                if r1 - r0 < params.votes:
                    continue
                extent = sorted_along[r1 - 1] - sorted_along[r0]
                if extent < params.min_length:
                    continue
                i0, i1 = order[r0], order[r1 - 1]
                p1 = Point(float(xs[i0]), float(ys[i0]))
                p2 = Point(float(xs[i1]), float(ys[i1]))
                if p1 != p2:
                    found.append((p1, p2))
    return found


def detect_segments(mask: BinaryImage, orientation: str, params: HoughParams) -> List[LineSegment]:
    """Find line segments near the given axis in a line mask.

    Every returned segment has at least ``params.votes`` supporting pixels and
    lies within ``params.angle_tol_deg`` of the axis. An empty list is a valid
    result. Output order is deterministic (by perpendicular offset, then
    axial start).
    """
    if orientation == HORIZONTAL:
        pairs = _detect_rowwise(mask.data, params)
        segs = [LineSegment(p1, p2, HORIZONTAL) for p1, p2 in pairs]
    elif orientation == VERTICAL:
        pairs = _detect_rowwise(mask.data.T, params)
        segs = [
            LineSegment(Point(p1.y, p1.x), Point(p2.y, p2.x), VERTICAL) for p1, p2 in pairs
        ]
    else:
        raise ValueError(f"orientation must be horizontal or vertical, got {orientation!r}")
    return sorted(segs, key=lambda s: (_offset(s, orientation), _axial(s, orientation)[0]))


def _offset(seg: LineSegment, orientation: str) -> float:
    if orientation == HORIZONTAL:
        return (seg.p1.y + seg.p2.y) / 2.0
    return (seg.p1.x + seg.p2.x) / 2.0


def _axial(seg: LineSegment, orientation: str) -> Tuple[float, float]:
    if orientation == HORIZONTAL:
        a, b = seg.p1.x, seg.p2.x
    else:
        a, b = seg.p1.y, seg.p2.y
    return (a, b) if a <= b else (b, a)


def consolidate(
    segments: Sequence[LineSegment],
    orientation: str,
    gap_tol: float = 20.0,
    offset_tol: float = 3.0,
) -> List[LineSegment]:
    """Merge fragmented collinear detections into continuous main edges.

    Segments whose perpendicular offsets differ by at most ``offset_tol`` and
    whose axial extents come within ``gap_tol`` of touching are grouped
    transitively. Each group collapses to one axis-aligned segment spanning
    the group's full axial extent at its mean offset; output is sorted by
    offset.
    """
    segs = list(segments)
    for seg in segs:
        if seg.orientation != orientation:
            raise ValueError(f"segment orientation {seg.orientation!r} != {orientation!r}")
    if not segs:
        return []

    offsets = [_offset(s, orientation) for s in segs]
    spans = [_axial(s, orientation) for s in segs]

    parent = list(range(len(segs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if abs(offsets[i] - offsets[j]) > offset_tol:
                continue
            gap = max(spans[j][0] - spans[i][1], spans[i][0] - spans[j][1], 0.0)
            if gap <= gap_tol:
                union(i, j)

    groups: dict = {}
    for i in range(len(segs)):
        groups.setdefault(find(i), []).append(i)

    merged = []
    for members in groups.values():
        lo = min(spans[i][0] for i in members)
        hi = max(spans[i][1] for i in members)
        mean_off = sum(offsets[i] for i in members) / len(members)
        if orientation == HORIZONTAL:
            merged.append(LineSegment(Point(lo, mean_off), Point(hi, mean_off), HORIZONTAL))
        else:
            merged.append(LineSegment(Point(mean_off, lo), Point(mean_off, hi), VERTICAL))
    merged.sort(key=lambda s: (_offset(s, orientation), _axial(s, orientation)[0]))
    return merged


def skew_angle(edge: LineSegment) -> SkewAngle:
    """Angle between a vertical table edge and the y-axis.

    theta = arctan((x1 - x2) / (y1 - y2)) over the segment's endpoints; the
    value is independent of endpoint order.

    Raises:
        NotVerticalError: the edge is not vertical or has equal y endpoints.
    """
    if edge.orientation != VERTICAL:
        raise NotVerticalError(f"skew needs a vertical edge, got {edge.orientation!r}")
    dy = edge.p1.y - edge.p2.y
    if dy == 0:
        raise NotVerticalError("edge endpoints share the same y coordinate")
    return SkewAngle(math.atan((edge.p1.x - edge.p2.x) / dy))


ImageT = Union[GrayImage, BinaryImage]


def rotate(img: ImageT, angle: float, fill: int = 0) -> ImageT:
    """Rotate about the image center, keeping the canvas size.

    Grayscale uses bilinear interpolation, binary nearest-neighbor; pixels
    pulling from outside the source take ``fill``. A page rendered with
    ``rotate(img, theta)`` measures skew theta, and ``rotate(img, -theta)``
    removes it.
    """
    if abs(angle) >= math.pi / 4:
        raise ValueError("rotation limited to |angle| < pi/4")
    if angle == 0.0:
        return type(img)(img.data.copy())
    data = img.data
    h, w = data.shape
    if data.size == 0:
        return type(img)(data.copy())
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    dx = xx - cx
    dy = yy - cy
    ca, sa = math.cos(angle), math.sin(angle)
    sx = ca * dx - sa * dy + cx
    sy = sa * dx + ca * dy + cy
    valid = (sx >= 0) & (sx <= w - 1) & (sy >= 0) & (sy <= h - 1)

    if isinstance(img, BinaryImage):
        rx = np.clip(np.rint(sx).astype(np.int64), 0, w - 1)
        ry = np.clip(np.rint(sy).astype(np.int64), 0, h - 1)
        out = np.where(valid, data[ry, rx], np.uint8(fill))
        return BinaryImage(out.astype(np.uint8))

    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = sx - x0
    fy = sy - y0
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)
    src = data.astype(np.float64)
    top = (1 - fx) * src[y0c, x0c] + fx * src[y0c, x1c]
    bot = (1 - fx) * src[y1c, x0c] + fx * src[y1c, x1c]
    blended = np.rint((1 - fy) * top + fy * bot)
    out = np.where(valid, blended, float(fill))
    return GrayImage(np.clip(out, 0, 255).astype(np.uint8))


def intersect(a: LineSegment, b: LineSegment, parallel_eps: float = 1e-9) -> Point:
    """Intersection of the infinite lines through two segments.

    Uses the parametric form: with direction vectors n_a, n_b, the normal
    u_a of line a, and n_p the vector from b's origin to a's origin, the
    meeting point is ((u_a . n_p) / (u_a . n_b)) n_b + b1. The point may lie
    beyond either segment's extent, which lets broken edges still meet.

    ``parallel_eps`` is relative to the product of the direction magnitudes.

    Raises:
        ParallelError: |u_a . n_b| falls within the parallel tolerance.
    """
    nax, nay = a.p2.x - a.p1.x, a.p2.y - a.p1.y
    uax, uay = -nay, nax
    nbx, nby = b.p2.x - b.p1.x, b.p2.y - b.p1.y
    npx, npy = a.p1.x - b.p1.x, a.p1.y - b.p1.y
    denom = uax * nbx + uay * nby
    scale = math.hypot(nax, nay) * math.hypot(nbx, nby)
    if abs(denom) <= parallel_eps * scale:
        raise ParallelError("segments are parallel within tolerance")
    s = (uax * npx + uay * npy) / denom
    return Point(s * nbx + b.p1.x, s * nby + b.p1.y)


def longest(segments: Sequence[LineSegment]) -> LineSegment:
    """The longest segment; ties resolve to the earliest in the sequence."""
    if not segments:
        raise ValueError("no segments given")
    best = segments[0]
    for seg in segments[1:]:
        if seg.length() > best.length():
            best = seg
    return best
