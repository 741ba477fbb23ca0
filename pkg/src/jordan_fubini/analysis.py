"""Oscillation maps, discontinuity covers and the closed-null hypothesis check.

Oscillation comes from the field's cell bounds: exact for the built-in
fields, a 9-probe estimate (optionally with random extra probes) for user
fields.  Sampling can only under-estimate oscillation, so flagged sets are
sound for exact-bounds fields and heuristic otherwise.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CoverNotAchievable
from .fields import ScalarField2D
from .geometry import MAX_CELLS, MAX_LEVEL, BoundingRect, EpsCover, _check_level, _subdivide

DEFAULT_DELTA = 2.0**-6
EPS_LADDER = (0.1, 0.01, 0.001)


@dataclass(frozen=True, eq=False)
class OscillationMap:
    """Cells of ``rect`` at ``level`` whose oscillation is at least ``delta``.

    ``cells`` has columns ``x_lo, y_lo, x_hi, y_hi``.  Only flagged cells are
    ever subdivided, so an unflagged cell never hides flagged children when
    bounds are exact.
    """

    rect: BoundingRect
    level: int
    delta: float
    cells: np.ndarray
    osc: np.ndarray

    @property
    def flagged_area(self) -> float:
        return len(self.cells) * self.rect.area / 4.0**self.level

    def __len__(self) -> int:
        return len(self.cells)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_lo", "y_lo", "x_hi", "y_hi", "osc_estimate"])
        for (x0, y0, x1, y1), o in zip(self.cells.tolist(), self.osc.tolist()):
            w.writerow([repr(x0), repr(y0), repr(x1), repr(y1), repr(o)])
        return buf.getvalue()


class _FlagTree:
    """Level-by-level refinement of the cells flagged at ``delta``."""

    def __init__(self, field: ScalarField2D, rect: BoundingRect, delta: float, *,
                 rng: np.random.Generator | None = None, extra_probes: int = 0):
        if not delta > 0:
            raise ValueError("delta must be positive")
        self.field, self.rect, self.delta = field, rect, delta
        self.rng, self.extra_probes = rng, extra_probes
        self.level = -1
        self._flag(tuple(np.array([v]) for v in (rect.x_lo, rect.y_lo, rect.x_hi, rect.y_hi)))

    def _flag(self, cells):
        self.level += 1
        lo, hi = self.field.cell_bounds(*cells, rng=self.rng, extra_probes=self.extra_probes)
        osc = hi - lo
        keep = osc >= self.delta
        self.cells = tuple(c[keep] for c in cells)
        self.osc = osc[keep]

    def step(self) -> None:
        self._flag(_subdivide(*self.cells))

    @property
    def count(self) -> int:
        return len(self.osc)

    @property
    def area(self) -> float:
        return self.count * self.rect.area / 4.0**self.level

    def snapshot(self) -> np.ndarray:
        return np.stack(self.cells, axis=1).reshape(-1, 4)


def oscillation_map(field: ScalarField2D, rect: BoundingRect, level: int, delta: float, *,
                    max_level: int = MAX_LEVEL, max_cells: int = MAX_CELLS,
                    seed: int | None = None, extra_probes: int = 0) -> OscillationMap:
    """Flag cells of the dyadic grid of ``rect`` at ``level`` with oscillation ``>= delta``."""
    _check_level(level, max_level)
    rng = np.random.default_rng(seed) if extra_probes else None
    tree = _FlagTree(field, rect, delta, rng=rng, extra_probes=extra_probes)
    while tree.level < level:
        if 4 * tree.count > max_cells:
            raise CoverNotAchievable(
                f"{tree.count} flagged cells at level {tree.level} exceed the cell budget",
                area=tree.area, level=tree.level)
        tree.step()
    return OscillationMap(rect, level, delta, tree.snapshot(), tree.osc.copy())


def discontinuity_covers(field: ScalarField2D, rect: BoundingRect, eps_seq: Sequence[float], *,
                         delta: float = DEFAULT_DELTA, max_level: int = MAX_LEVEL,
                         max_cells: int = MAX_CELLS) -> list[EpsCover]:
    """Covers of the cells flagged at ``delta``, one per ``eps``, from one refinement pass.

    The default ``delta`` is the finest rung of the ladder ``2**-k, k = 1..6``;
    since flags only grow as ``delta`` shrinks, it equals the union of all rungs.
    """
    eps_list = [float(e) for e in eps_seq]
    if any(not e > 0 for e in eps_list):
        raise ValueError("eps must be positive")
    tree = _FlagTree(field, rect, delta)
    out: list[EpsCover | None] = [None] * len(eps_list)
    for i in sorted(range(len(eps_list)), key=lambda i: -eps_list[i]):
        eps = eps_list[i]
        while tree.area >= eps:
            if tree.level >= max_level or 4 * tree.count > max_cells:
                raise CoverNotAchievable(
                    f"flagged area {tree.area:.6g} >= eps {eps:.6g} at level {tree.level} "
                    f"({tree.count} cells)", area=tree.area, level=tree.level)
            tree.step()
        out[i] = EpsCover(tree.snapshot(), tree.area, eps, tree.level, kind="discontinuity")
    return out  # type: ignore[return-value]


def discontinuity_cover(field: ScalarField2D, rect: BoundingRect, eps: float, **kw) -> EpsCover:
    return discontinuity_covers(field, rect, [eps], **kw)[0]


@dataclass(frozen=True, eq=False)
class LineIntersections:
    x: float
    squares: np.ndarray
    intervals: tuple[tuple[float, float], ...]
    stability: float

    @property
    def count(self) -> int:
        return len(self.squares)


def vertical_line_intersections(cover: EpsCover, x: float) -> LineIntersections:
    """Squares of ``cover`` met by the line at ``x``, with their y-intervals.

    ``stability`` is the largest ``delta`` such that every line at ``x + u``
    with ``|u| < delta`` meets exactly the same squares (0 on a square edge).
    """
    s = cover.squares
    hit = s[(s[:, 0] <= x) & (x <= s[:, 2])]
    order = np.lexsort((hit[:, 3], hit[:, 1])) if len(hit) else np.empty(0, dtype=int)
    hit = hit[order]
    edges = np.concatenate([s[:, 0], s[:, 2]])
    stability = float(np.abs(edges - x).min()) if len(edges) else math.inf
    return LineIntersections(float(x), hit, tuple(zip(hit[:, 1].tolist(), hit[:, 3].tolist())), stability)


@dataclass(frozen=True)
class Applicability:
    applicable: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.applicable

    def __str__(self) -> str:
        return "Applicable" if self.applicable else f"NotApplicable({self.reason})"


def theorem5_applicability(field: ScalarField2D, rect: BoundingRect, *,
                           eps_ladder: Sequence[float] = EPS_LADDER, **kw) -> Applicability:
    """Whether a closed, null discontinuity set can be covered at every rung of ``eps_ladder``.

    Closedness cannot be read off point values; it is taken from the
    field's declaration.
    """
    if not field.closed_discontinuities:
        return Applicability(False, "discontinuity set not declared closed")
    try:
        discontinuity_covers(field, rect, eps_ladder, **kw)
    except CoverNotAchievable as exc:
        return Applicability(False, f"cover failure: {exc}")
    return Applicability(True)
