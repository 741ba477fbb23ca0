"""Jordan domains, dyadic cell classification, boundary covers and x-slices.

A domain is described by a vectorised point classifier plus a bounding
rectangle.  Cells are classified by their *open* interior: a cell is
``FULL_INSIDE`` when its interior lies in the interior of the domain,
``FULL_OUTSIDE`` when its interior misses the domain's interior, and
``BOUNDARY`` otherwise.  Grids are built as quadtrees in which only boundary
cells are subdivided, so inner/outer areas are monotone under refinement by
construction.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import CoverNotAchievable, LevelTooDeep, UnknownDomainName

MAX_LEVEL = 24
MAX_CELLS = 2**22

Interval = tuple[float, float]


class Membership(IntEnum):
    OUTSIDE = 0
    INSIDE = 1
    UNKNOWN = 2


class CellTag(IntEnum):
    FULL_OUTSIDE = 0
    FULL_INSIDE = 1
    BOUNDARY = 2


@dataclass(frozen=True)
class BoundingRect:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def height(self) -> float:
        return self.y_hi - self.y_lo

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, x: float, y: float) -> bool:
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi

    def covers(self, other: "BoundingRect") -> bool:
        return (self.x_lo <= other.x_lo and other.x_hi <= self.x_hi
                and self.y_lo <= other.y_lo and other.y_hi <= self.y_hi)

    def transposed(self) -> "BoundingRect":
        return BoundingRect(self.y_lo, self.y_hi, self.x_lo, self.x_hi)


PointClassifier = Callable[[np.ndarray, np.ndarray], np.ndarray]
CellTest = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _probe_points(x0, y0, x1, y1):
    """Corners, edge midpoints and center of each cell, shape (n, 9)."""
    xm = 0.5 * (x0 + x1)
    ym = 0.5 * (y0 + y1)
    xs = np.stack([x0, xm, x1, x0, xm, x1, x0, xm, x1], axis=1)
    ys = np.stack([y0, y0, y0, ym, ym, ym, y1, y1, y1], axis=1)
    return xs, ys


@dataclass(frozen=True, eq=False)
class JordanDomain:
    """Membership classifier for a planar Jordan domain.

    ``classifier`` maps coordinate arrays to ``Membership`` codes.  The
    optional ``cell_test`` classifies whole cells exactly and is preferred
    over the 9-probe fallback when present.
    """

    name: str
    bounds: BoundingRect
    classifier: PointClassifier
    cell_test: CellTest | None = None

    def classify(self, x: float, y: float) -> Membership:
        code = self.classifier(np.array([x], dtype=float), np.array([y], dtype=float))
        return Membership(int(code[0]))

    def classify_cells(self, x0, y0, x1, y1) -> np.ndarray:
        x0, y0, x1, y1 = (np.asarray(a, dtype=float) for a in (x0, y0, x1, y1))
        if self.cell_test is not None:
            return np.asarray(self.cell_test(x0, y0, x1, y1), dtype=np.int8)
        xs, ys = _probe_points(x0, y0, x1, y1)
        codes = np.asarray(self.classifier(xs.ravel(), ys.ravel())).reshape(xs.shape)
        inside = np.all(codes == Membership.INSIDE, axis=1)
        outside = np.all(codes == Membership.OUTSIDE, axis=1)
        tags = np.full(len(x0), CellTag.BOUNDARY, dtype=np.int8)
        tags[inside] = CellTag.FULL_INSIDE
        tags[outside] = CellTag.FULL_OUTSIDE
        return tags

    def transposed(self) -> "JordanDomain":
        """The mirror image under (x, y) -> (y, x)."""
        cls = self.classifier
        test = self.cell_test
        return JordanDomain(
            name=f"{self.name}^T",
            bounds=self.bounds.transposed(),
            classifier=lambda x, y: cls(y, x),
            cell_test=None if test is None else (lambda x0, y0, x1, y1: test(y0, x0, y1, x1)),
        )


@dataclass(frozen=True)
class Cell:
    rect: BoundingRect
    level: int
    tag: CellTag


def _subdivide(x0, y0, x1, y1):
    xm = 0.5 * (x0 + x1)
    ym = 0.5 * (y0 + y1)
    return (np.concatenate([x0, xm, x0, xm]), np.concatenate([y0, y0, ym, ym]),
            np.concatenate([xm, x1, xm, x1]), np.concatenate([ym, ym, y1, y1]))


class _Quadtree:
    """Level-by-level refinement of boundary cells."""

    def __init__(self, domain: JordanDomain, keep_leaves: bool = True):
        self.domain = domain
        self.keep_leaves = keep_leaves
        self.level = -1
        self.inner_area = 0.0
        self._leaves: list[tuple[int, np.ndarray, np.ndarray]] = []
        b = domain.bounds
        self.frontier = tuple(np.array([v]) for v in (b.x_lo, b.y_lo, b.x_hi, b.y_hi))
        self._classify(self.frontier)

    def cell_area(self, level: int) -> float:
        return self.domain.bounds.area / 4.0**level

    def _classify(self, cells):
        self.level += 1
        tags = self.domain.classify_cells(*cells)
        n_in = int(np.count_nonzero(tags == CellTag.FULL_INSIDE))
        self.inner_area += n_in * self.cell_area(self.level)
        if self.keep_leaves:
            leaf = tags != CellTag.BOUNDARY
            self._leaves.append((self.level, np.stack([c[leaf] for c in cells], axis=1), tags[leaf]))
        mask = tags == CellTag.BOUNDARY
        self.frontier = tuple(c[mask] for c in cells)

    def step(self) -> None:
        self._classify(_subdivide(*self.frontier))

    @property
    def n_frontier(self) -> int:
        return len(self.frontier[0])

    @property
    def boundary_area(self) -> float:
        return self.n_frontier * self.cell_area(self.level)

    def leaves(self):
        return self._leaves


@dataclass(frozen=True, eq=False)
class CellGrid:
    """Quadtree classification of a domain down to ``level``.

    ``rects`` has columns ``x_lo, y_lo, x_hi, y_hi``; FULL_INSIDE and
    FULL_OUTSIDE leaves may sit at coarser levels than ``level`` while every
    BOUNDARY cell is at ``level``.
    """

    domain: JordanDomain
    level: int
    rects: np.ndarray
    levels: np.ndarray
    tags: np.ndarray
    inner_area: float
    outer_area: float

    @property
    def boundary_area(self) -> float:
        return self.outer_area - self.inner_area

    def select(self, tag: CellTag) -> np.ndarray:
        return self.rects[self.tags == tag]

    def cells(self) -> Iterator[Cell]:
        for (x0, y0, x1, y1), lev, tag in zip(self.rects, self.levels, self.tags):
            yield Cell(BoundingRect(float(x0), float(x1), float(y0), float(y1)), int(lev), CellTag(int(tag)))

    def __len__(self) -> int:
        return len(self.tags)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "x_lo", "y_lo", "x_hi", "y_hi", "tag"])
        for (x0, y0, x1, y1), lev, tag in zip(self.rects.tolist(), self.levels.tolist(), self.tags.tolist()):
            w.writerow([lev, repr(x0), repr(y0), repr(x1), repr(y1), CellTag(tag).name])
        return buf.getvalue()


def _check_level(level: int, max_level: int) -> None:
    if level < 0:
        raise ValueError("level must be nonnegative")
    if level > max_level:
        raise LevelTooDeep(f"level {level} exceeds max_level {max_level}")


def classify_grid(domain: JordanDomain, level: int, *, max_level: int = MAX_LEVEL) -> CellGrid:
    _check_level(level, max_level)
    tree = _Quadtree(domain)
    while tree.level < level:
        tree.step()
    parts = tree.leaves()
    rects = [p[1] for p in parts] + [np.stack(tree.frontier, axis=1)]
    levels = [np.full(len(p[1]), p[0], dtype=np.int32) for p in parts]
    levels.append(np.full(tree.n_frontier, tree.level, dtype=np.int32))
    tags = [p[2] for p in parts] + [np.full(tree.n_frontier, CellTag.BOUNDARY, dtype=np.int8)]
    return CellGrid(
        domain=domain,
        level=level,
        rects=np.concatenate(rects).reshape(-1, 4),
        levels=np.concatenate(levels),
        tags=np.concatenate(tags),
        inner_area=tree.inner_area,
        outer_area=tree.inner_area + tree.boundary_area,
    )


def jordan_measure_bounds(domain: JordanDomain, level: int, *, max_level: int = MAX_LEVEL) -> tuple[float, float]:
    _check_level(level, max_level)
    tree = _Quadtree(domain, keep_leaves=False)
    while tree.level < level:
        tree.step()
    return tree.inner_area, tree.inner_area + tree.boundary_area


@dataclass(frozen=True, eq=False)
class EpsCover:
    """Finite family of equal-size closed grid cells of total area below ``eps_target``.

    ``squares`` has columns ``x_lo, y_lo, x_hi, y_hi``.  ``kind`` is
    ``"boundary"`` for covers of a domain boundary and ``"discontinuity"``
    for covers of a field's discontinuity set.
    """

    squares: np.ndarray
    total_area: float
    eps_target: float
    level: int
    kind: str = "boundary"

    def __len__(self) -> int:
        return len(self.squares)

    def contains_points(self, x, y) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.zeros(x.shape, dtype=bool)
        s = self.squares
        # chunked to bound the (points x squares) temporary
        step = max(1, 2**22 // max(len(s), 1))
        for i in range(0, len(x), step):
            xi = x[i:i + step, None]
            yi = y[i:i + step, None]
            hit = (s[:, 0] <= xi) & (xi <= s[:, 2]) & (s[:, 1] <= yi) & (yi <= s[:, 3])
            out[i:i + step] = hit.any(axis=1)
        return out

    def column(self, x: float) -> np.ndarray:
        s = self.squares
        return s[(s[:, 0] <= x) & (x <= s[:, 2])]


def build_eps_covers(domain: JordanDomain, eps_seq: Sequence[float], *,
                     max_level: int = MAX_LEVEL, max_cells: int = MAX_CELLS) -> list[EpsCover]:
    """Boundary covers for every ``eps`` in ``eps_seq`` from a single refinement pass."""
    eps_list = [float(e) for e in eps_seq]
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps must be positive")
    order = sorted(range(len(eps_list)), key=lambda i: -eps_list[i])
    out: list[EpsCover | None] = [None] * len(eps_list)
    tree = _Quadtree(domain, keep_leaves=False)
    for i in order:
        eps = eps_list[i]
        while tree.boundary_area >= eps:
            if tree.level >= max_level or 4 * tree.n_frontier > max_cells:
                raise CoverNotAchievable(
                    f"boundary area {tree.boundary_area:.6g} >= eps {eps:.6g} at level {tree.level} "
                    f"({tree.n_frontier} cells)", area=tree.boundary_area, level=tree.level)
            tree.step()
        out[i] = EpsCover(
            squares=np.stack(tree.frontier, axis=1).reshape(-1, 4),
            total_area=tree.boundary_area,
            eps_target=eps,
            level=tree.level,
        )
    return out  # type: ignore[return-value]


def build_eps_cover(domain: JordanDomain, eps: float, **kw) -> EpsCover:
    return build_eps_covers(domain, [eps], **kw)[0]


# ---------------------------------------------------------------------------
# interval unions

def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    out: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out]


def intersect_intervals(a: Sequence[Interval], b: Sequence[Interval]) -> list[Interval]:
    """Intersection of two sorted disjoint unions; degenerate pieces dropped."""
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def subtract_intervals(a: Sequence[Interval], holes: Sequence[Interval]) -> list[Interval]:
    """Closure of ``a`` minus the closed ``holes``."""
    holes = merge_intervals(holes)
    out = []
    for lo, hi in a:
        cur = lo
        for h0, h1 in holes:
            if h1 <= cur or h0 >= hi:
                continue
            if h0 > cur:
                out.append((cur, h0))
            cur = max(cur, h1)
            if cur >= hi:
                break
        if cur < hi:
            out.append((cur, hi))
    return out


def total_length(intervals: Iterable[Interval]) -> float:
    return math.fsum(hi - lo for lo, hi in intervals)


@dataclass(frozen=True)
class SliceSet:
    """Closed y-intervals of a vertical section at abscissa ``x``.

    ``unresolved`` is the y-length at ``x`` still covered by boundary cells
    (or removed cover squares) at the generating level.
    """

    x: float
    intervals: tuple[Interval, ...]
    eps: float
    unresolved: float = 0.0

    @property
    def total_length(self) -> float:
        return total_length(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def contains(self, y: float) -> bool:
        return any(lo <= y <= hi for lo, hi in self.intervals)


class _ColumnWalker:
    """Quadtree descent restricted to the cells meeting the line at ``x``.

    Produces the same leaves as ``classify_grid`` would in that column, so a
    slice never needs the full grid.  The slice is the set of ``y`` with
    ``(x, y)`` in the interior of the union of FULL_INSIDE leaves: when ``x``
    sits on a cell edge, the cells on both sides have to agree.
    """

    def __init__(self, domain: JordanDomain, x: float):
        self.domain = domain
        self.x = float(x)
        self.level = 0
        self.left: list[Interval] = []
        self.right: list[Interval] = []
        b = domain.bounds
        if not (b.x_lo <= x <= b.x_hi):
            self.frontier = tuple(np.empty(0) for _ in range(4))
            return
        self._absorb(tuple(np.array([v]) for v in (b.x_lo, b.y_lo, b.x_hi, b.y_hi)))

    def _absorb(self, cells):
        x0, y0, x1, y1 = cells
        keep = (x0 <= self.x) & (self.x <= x1)
        x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]
        tags = self.domain.classify_cells(x0, y0, x1, y1)
        ins = tags == CellTag.FULL_INSIDE
        for a, c, lo, hi in zip(x0[ins].tolist(), x1[ins].tolist(), y0[ins].tolist(), y1[ins].tolist()):
            if a < self.x:
                self.left.append((lo, hi))
            if self.x < c:
                self.right.append((lo, hi))
        bnd = tags == CellTag.BOUNDARY
        self.frontier = (x0[bnd], y0[bnd], x1[bnd], y1[bnd])

    def advance(self, level: int) -> None:
        while self.level < level:
            if len(self.frontier[0]) == 0:
                self.level = level
                return
            self._absorb(_subdivide(*self.frontier))
            self.level += 1

    def intervals(self) -> list[Interval]:
        return intersect_intervals(merge_intervals(self.left), merge_intervals(self.right))

    def unresolved(self) -> float:
        return total_length(merge_intervals(zip(self.frontier[1].tolist(), self.frontier[3].tolist())))

    def slice(self, cover: EpsCover) -> SliceSet:
        self.advance(cover.level)
        ivs = self.intervals()
        unresolved = self.unresolved()
        if cover.kind != "boundary" and len(cover):
            col = cover.column(self.x)
            if len(col):
                holes = merge_intervals(zip(col[:, 1].tolist(), col[:, 3].tolist()))
                before = total_length(ivs)
                ivs = subtract_intervals(ivs, holes)
                unresolved += before - total_length(ivs)
        return SliceSet(self.x, tuple(ivs), cover.eps_target, unresolved)


def slice(domain: JordanDomain, cover: EpsCover, x: float) -> SliceSet:  # noqa: A001
    """Section of the interior minus the cover at abscissa ``x``."""
    return _ColumnWalker(domain, x).slice(cover)


def slice_lengths(domain: JordanDomain, x: float, eps_seq: Sequence[float], **kw) -> list[float]:
    eps_seq = list(eps_seq)
    if any(b >= a for a, b in zip(eps_seq, eps_seq[1:])):
        raise ValueError("eps_seq must be strictly decreasing")
    walker = _ColumnWalker(domain, x)
    return [walker.slice(c).total_length for c in build_eps_covers(domain, eps_seq, **kw)]


def slice_limit_measure(domain: JordanDomain, x: float, eps_seq: Sequence[float], **kw) -> float:
    return slice_lengths(domain, x, eps_seq, **kw)[-1]


def interior_x_extent(domain: JordanDomain, level: int = 8) -> tuple[float, float]:
    """Outer estimate of the x-extent of the interior from non-outside cells."""
    tree = _Quadtree(domain)
    while tree.level < level and tree.n_frontier:
        tree.step()
    lo, hi = math.inf, -math.inf
    for _, rects, tags in tree.leaves():
        sel = rects[tags == CellTag.FULL_INSIDE]
        if len(sel):
            lo, hi = min(lo, sel[:, 0].min()), max(hi, sel[:, 2].max())
    if tree.n_frontier:
        lo, hi = min(lo, tree.frontier[0].min()), max(hi, tree.frontier[2].max())
    if lo > hi:
        return domain.bounds.x_lo, domain.bounds.x_lo
    return float(lo), float(hi)


# ---------------------------------------------------------------------------
# built-in domains

def rect_domain(x_lo: float, y_lo: float, x_hi: float, y_hi: float,
                bounds: BoundingRect | None = None) -> JordanDomain:
    r = BoundingRect(x_lo, x_hi, y_lo, y_hi)
    bounds = bounds or r

    def classifier(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.full(x.shape, Membership.UNKNOWN, dtype=np.int8)
        out[(x > x_lo) & (x < x_hi) & (y > y_lo) & (y < y_hi)] = Membership.INSIDE
        out[(x < x_lo) | (x > x_hi) | (y < y_lo) | (y > y_hi)] = Membership.OUTSIDE
        return out

    def cell_test(x0, y0, x1, y1):
        tags = np.full(x0.shape, CellTag.BOUNDARY, dtype=np.int8)
        tags[(x0 >= x_lo) & (x1 <= x_hi) & (y0 >= y_lo) & (y1 <= y_hi)] = CellTag.FULL_INSIDE
        tags[(x1 <= x_lo) | (x0 >= x_hi) | (y1 <= y_lo) | (y0 >= y_hi)] = CellTag.FULL_OUTSIDE
        return tags

    return JordanDomain(f"rect:{x_lo:g},{y_lo:g},{x_hi:g},{y_hi:g}", bounds, classifier, cell_test)


def _near_far_sq(x0, y0, x1, y1, cx, cy):
    dx = np.maximum(np.maximum(x0 - cx, cx - x1), 0.0)
    dy = np.maximum(np.maximum(y0 - cy, cy - y1), 0.0)
    fx = np.maximum(np.abs(x0 - cx), np.abs(x1 - cx))
    fy = np.maximum(np.abs(y0 - cy), np.abs(y1 - cy))
    return dx * dx + dy * dy, fx * fx + fy * fy


def annulus_domain(cx: float = 0.0, cy: float = 0.0, r_in: float = 0.5, r_out: float = 1.0,
                   *, band: float = 0.0, name: str | None = None) -> JordanDomain:
    """Disk when ``r_in == 0``; ``band`` widens the UNKNOWN zone around the circles."""
    if not (0.0 <= r_in < r_out):
        raise ValueError("need 0 <= r_in < r_out")

    def classifier(x, y):
        d = np.hypot(np.asarray(x, dtype=float) - cx, np.asarray(y, dtype=float) - cy)
        out = np.full(d.shape, Membership.OUTSIDE, dtype=np.int8)
        inside = d < r_out - band
        if r_in > 0:
            inside &= d > r_in + band
        out[inside] = Membership.INSIDE
        near = np.abs(d - r_out) <= band
        if r_in > 0:
            near |= np.abs(d - r_in) <= band
        out[near] = Membership.UNKNOWN
        return out

    def cell_test(x0, y0, x1, y1):
        near, far = _near_far_sq(x0, y0, x1, y1, cx, cy)
        tags = np.full(x0.shape, CellTag.BOUNDARY, dtype=np.int8)
        tags[(far <= r_out * r_out) & (near >= r_in * r_in)] = CellTag.FULL_INSIDE
        tags[(near >= r_out * r_out) | (far <= r_in * r_in)] = CellTag.FULL_OUTSIDE
        return tags

    bounds = BoundingRect(cx - r_out, cx + r_out, cy - r_out, cy + r_out)
    if name is None:
        name = f"disk:{cx:g},{cy:g},{r_out:g}" if r_in == 0 else f"annulus:{cx:g},{cy:g},{r_in:g},{r_out:g}"
    return JordanDomain(name, bounds, classifier, None if band else cell_test)


def disk_domain(cx: float = 0.0, cy: float = 0.0, r: float = 1.0, *, band: float = 0.0) -> JordanDomain:
    return annulus_domain(cx, cy, 0.0, r, band=band)


def _segment_crosses_open_cells(x0, y0, x1, y1, p, q) -> np.ndarray:
    """Does segment p-q meet the open interior of each cell?"""
    tlo = np.full(x0.shape, -np.inf)
    thi = np.full(x0.shape, np.inf)
    for start, d, lo, hi in ((p[0], q[0] - p[0], x0, x1), (p[1], q[1] - p[1], y0, y1)):
        if d == 0:
            tlo = np.where((lo < start) & (start < hi), tlo, np.inf)
        else:
            t1 = (lo - start) / d
            t2 = (hi - start) / d
            tlo = np.maximum(tlo, np.minimum(t1, t2))
            thi = np.minimum(thi, np.maximum(t1, t2))
    return (tlo < thi) & (tlo < 1.0) & (thi > 0.0)


def _points_in_polygon(x, y, verts) -> np.ndarray:
    inside = np.zeros(x.shape, dtype=bool)
    n = len(verts)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(n):
            (xi, yi), (xj, yj) = verts[i], verts[(i + 1) % n]
            crosses = ((yi > y) != (yj > y)) & (x < (xj - xi) * (y - yi) / (yj - yi) + xi)
            inside ^= crosses
    return inside


def _distance_to_polygon(x, y, verts) -> np.ndarray:
    best = np.full(x.shape, np.inf)
    n = len(verts)
    for i in range(n):
        (px, py), (qx, qy) = verts[i], verts[(i + 1) % n]
        dx, dy = qx - px, qy - py
        t = np.clip(((x - px) * dx + (y - py) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
        best = np.minimum(best, np.hypot(x - px - t * dx, y - py - t * dy))
    return best


def polygon_domain(vertices: Sequence[tuple[float, float]], *, bounds: BoundingRect | None = None,
                   band: float = 0.0, name: str | None = None) -> JordanDomain:
    """Simple polygon given by its vertices in order (either orientation)."""
    verts = [(float(a), float(b)) for a, b in vertices]
    if len(verts) < 3:
        raise ValueError("a polygon needs at least 3 vertices")
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    bounds = bounds or BoundingRect(min(xs), max(xs), min(ys), max(ys))
    edges = [(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts))]

    def classifier(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.where(_points_in_polygon(x, y, verts), Membership.INSIDE, Membership.OUTSIDE).astype(np.int8)
        out[_distance_to_polygon(x, y, verts) <= band] = Membership.UNKNOWN
        return out

    def cell_test(x0, y0, x1, y1):
        crossed = np.zeros(x0.shape, dtype=bool)
        for p, q in edges:
            crossed |= _segment_crosses_open_cells(x0, y0, x1, y1, p, q)
        center_in = _points_in_polygon(0.5 * (x0 + x1), 0.5 * (y0 + y1), verts)
        tags = np.where(center_in, CellTag.FULL_INSIDE, CellTag.FULL_OUTSIDE).astype(np.int8)
        tags[crossed] = CellTag.BOUNDARY
        return tags

    if name is None:
        name = "polygon:" + ",".join(f"{a:g},{b:g}" for a, b in verts)
    return JordanDomain(name, bounds, classifier, cell_test)


LSHAPE_VERTICES = ((0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, 2.0), (1.0, 1.0), (0.0, 1.0))


def lshape_domain() -> JordanDomain:
    """[0,2]x[0,1] together with the square [1,2]x[1,2]."""
    return polygon_domain(LSHAPE_VERTICES, bounds=BoundingRect(0.0, 2.0, 0.0, 2.0), name="lshape")


def _parse_numbers(args: str, spec: str) -> list[float]:
    try:
        return [float(t) for t in args.split(",") if t.strip()]
    except ValueError as exc:
        raise UnknownDomainName(f"bad numeric arguments in {spec!r}") from exc


def domain_from_spec(spec: str) -> JordanDomain:
    """Build a domain from ``name[:args]``.

    rect[:x0,y0,x1,y1]        default unit square
    disk[:cx,cy,r]            default unit disk
    annulus[:cx,cy,rin,rout]  default radii 0.5 and 1
    lshape                    [0,2]x[0,1] plus [1,2]x[1,2]
    polygon:x1,y1,x2,y2,...
    """
    name, _, args = spec.partition(":")
    nums = _parse_numbers(args, spec) if args else []
    try:
        if name == "rect":
            return rect_domain(*(nums or [0.0, 0.0, 1.0, 1.0]))
        if name == "disk":
            return disk_domain(*nums)
        if name == "annulus":
            return annulus_domain(*(nums or [0.0, 0.0, 0.5, 1.0]))
        if name == "lshape" and not nums:
            return lshape_domain()
        if name == "polygon" and len(nums) >= 6 and len(nums) % 2 == 0:
            return polygon_domain(list(zip(nums[::2], nums[1::2])))
    except (TypeError, ValueError) as exc:
        raise UnknownDomainName(f"invalid domain spec {spec!r}: {exc}") from exc
    raise UnknownDomainName(f"unknown domain spec {spec!r}")


BUILTIN_DOMAINS = ("rect", "disk", "annulus", "lshape", "polygon")
