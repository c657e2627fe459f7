"""Snapped intersection grids, point-spreading cell detection, page regions."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

from .errors import ParallelError
from .geometry import LineSegment, Point, intersect
from .imaging import BinaryImage, GrayImage


@dataclass(frozen=True)
class GridPoints:
    """Snapped intersection points; no two remain within ``snap_tol`` on both axes."""

    points: Tuple[Point, ...]
    snap_tol: float


@dataclass(frozen=True)
class Cell:
    """Axis-aligned table cell whose four corners exist in the parent grid."""

    top_left: Point
    bottom_right: Point
    row_index: Optional[int] = None
    col_index: Optional[int] = None

    def __post_init__(self) -> None:
        if not (self.top_left.x < self.bottom_right.x and self.top_left.y < self.bottom_right.y):
            raise ValueError("cell corners must satisfy x0 < x1 and y0 < y1")

    def bbox(self) -> Tuple[float, float, float, float]:
        return (self.top_left.x, self.top_left.y, self.bottom_right.x, self.bottom_right.y)


@dataclass(frozen=True)
class RegionBand:
    """Half-open horizontal band of page rows [y_start, y_stop)."""

    y_start: int
    y_stop: int

    @property
    def height(self) -> int:
        return self.y_stop - self.y_start


@dataclass(frozen=True)
class PageRegions:
    """Disjoint bands covering the page height: above / table / below."""

    above: Optional[RegionBand]
    table: Optional[RegionBand]
    below: Optional[RegionBand]
    cells: Tuple[Cell, ...]


def snap_points(points: Sequence[Point], snap_tol: float) -> GridPoints:
    """Merge points lying within ``snap_tol`` of each other on both axes
    (Chebyshev distance) into their centroid, transitively, until stable."""
    pts = sorted(points, key=lambda p: (p.y, p.x))
    while True:
        n = len(pts)
        parent = list(range(n))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        merged_any = False
        for i in range(n):
            for j in range(i + 1, n):
                if abs(pts[i].x - pts[j].x) <= snap_tol and abs(pts[i].y - pts[j].y) <= snap_tol:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[rj] = ri
                        merged_any = True
        if not merged_any:
            return GridPoints(points=tuple(pts), snap_tol=snap_tol)

        clusters: dict = {}
        for i in range(n):
            clusters.setdefault(find(i), []).append(pts[i])
        pts = sorted(
            (
                Point(sum(p.x for p in c) / len(c), sum(p.y for p in c) / len(c))
                for c in clusters.values()
            ),
            key=lambda p: (p.y, p.x),
        )


def build_grid(
    h_edges: Sequence[LineSegment],
    v_edges: Sequence[LineSegment],
    snap_tol: float,
    page_size: Optional[Tuple[int, int]] = None,
) -> GridPoints:
    """All pairwise horizontal x vertical intersections, snapped.

    Intersections are taken on the infinite lines, so an edge broken in the
    middle still meets every crossing edge. With ``page_size`` = (width,
    height), points farther than ``snap_tol`` outside the page are discarded
    before snapping.
    """
    raw: List[Point] = []
    for h in h_edges:
        for v in v_edges:
            try:
                raw.append(intersect(h, v))
            except ParallelError:
                continue
    if page_size is not None:
        w, hgt = page_size
        raw = [
            p
            for p in raw
            if -snap_tol <= p.x <= w - 1 + snap_tol and -snap_tol <= p.y <= hgt - 1 + snap_tol
        ]
    return snap_points(raw, snap_tol)


def detect_cells(grid: GridPoints) -> List[Cell]:
    """Point-spreading cell search over a snapped grid.

    From each point (x0, y0), take the nearest point strictly to the right in
    the same row as (x1, y0) and the nearest strictly below in the same
    column as (x0, y1) ("same" meaning within ``snap_tol``). If the diagonal
    (x1, y1) also exists in the grid, the four points bound a cell. Cells
    come back ordered top-to-bottom, left-to-right.
    """
    pts = grid.points
    tol = grid.snap_tol
    cells: List[Cell] = []
    for p in pts:
        right = [q for q in pts if q.x > p.x and abs(q.y - p.y) <= tol]
        if not right:
            continue
        q = min(right, key=lambda r: (r.x, abs(r.y - p.y)))
        below = [r for r in pts if r.y > p.y and abs(r.x - p.x) <= tol]
        if not below:
            continue
        r = min(below, key=lambda s: (s.y, abs(s.x - p.x)))
        x1, y1 = q.x, r.y
        if any(abs(d.x - x1) <= tol and abs(d.y - y1) <= tol for d in pts):
            cells.append(Cell(top_left=p, bottom_right=Point(x1, y1)))
    unique = {(c.top_left, c.bottom_right): c for c in cells}
    return sorted(unique.values(), key=lambda c: (c.top_left.y, c.top_left.x))


def split_regions(img: Union[GrayImage, BinaryImage], cells: Sequence[Cell]) -> PageRegions:
    """Split the page height into above / table band / below.

    The table band spans [min y0, max y1] over the cells; rows strictly
    before it form ``above`` and rows strictly after form ``below``. The
    three bands partition the page height exactly. With no cells the whole
    page is one non-table region in ``above``.
    """
    height = img.height
    if not cells:
        above = RegionBand(0, height) if height > 0 else None
        return PageRegions(above=above, table=None, below=None, cells=())

    top = min(c.top_left.y for c in cells)
    bottom = max(c.bottom_right.y for c in cells)
    band_start = max(int(math.ceil(top)), 0)
    band_stop = min(int(math.floor(bottom)) + 1, height)
    band_start = min(band_start, band_stop)

    above = RegionBand(0, band_start) if band_start > 0 else None
    table = RegionBand(band_start, band_stop) if band_stop > band_start else None
    below = RegionBand(band_stop, height) if band_stop < height else None
    return PageRegions(above=above, table=table, below=below, cells=tuple(cells))


def assign_row_col(cells: Sequence[Cell], snap_tol: float) -> List[Cell]:
    """Attach dense 0-based row/column indices.

    Rows group cells whose y0 agree within ``snap_tol`` (greedily, anchored
    at the first cell of each row); columns order by x0 inside a row. Output
    is row-major.
    """
    if not cells:
        return []
    ordered = sorted(cells, key=lambda c: (c.top_left.y, c.top_left.x))
    rows: List[List[Cell]] = []
    anchor = None
    for cell in ordered:
        if anchor is None or cell.top_left.y - anchor > snap_tol:
            rows.append([cell])
            anchor = cell.top_left.y
        else:
            rows[-1].append(cell)
    out: List[Cell] = []
    for ri, row in enumerate(rows):
        row.sort(key=lambda c: c.top_left.x)
        for ci, cell in enumerate(row):
            out.append(replace(cell, row_index=ri, col_index=ci))
    return out
