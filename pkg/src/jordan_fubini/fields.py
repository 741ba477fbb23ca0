"""Bounded scalar fields, fat Cantor sets and the L-shape counterexample field."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping

import numpy as np

from .errors import DepthTooLarge, UnknownFieldName
from .geometry import BoundingRect, JordanDomain, _probe_points, lshape_domain

MAX_CANTOR_DEPTH = 30
# beyond this depth the interval list is not materialised; queries descend instead
_MATERIALISE_DEPTH = 20
# stages used for the limit set; intervals are below 2**-60 of the base by then
_LIMIT_STAGES = 60


def _stage_split(lo, length, gap):
    """Children of retained intervals ``[lo, lo + length]`` after removing a centered gap."""
    child = 0.5 * (length - gap)
    return lo, lo + child + gap, child


def _cantor_meets(base_lo, base_hi, depth, s0, s1):
    """Does ``[s0, s1]`` meet the depth-``depth`` retained set (``None``: the limit set)?"""
    s0 = np.asarray(s0, dtype=float)
    s1 = np.asarray(s1, dtype=float)
    width = base_hi - base_lo
    lo = np.full(s0.shape, float(base_lo))
    length = np.full(s0.shape, float(width))
    result = np.zeros(s0.shape, dtype=bool)
    active = np.ones(s0.shape, dtype=bool)
    stages = _LIMIT_STAGES if depth is None else depth
    for n in range(1, stages + 2):
        hi = lo + length
        disjoint = (s1 < lo) | (s0 > hi)
        has_end = ((s0 <= lo) & (lo <= s1)) | ((s0 <= hi) & (hi <= s1))
        result |= active & has_end & ~disjoint
        active &= ~disjoint & ~has_end
        if n > stages or not active.any():
            break
        # query now lies strictly inside (lo, hi)
        left_lo, right_lo, child = _stage_split(lo, length, width * 4.0**-n)
        in_left = s0 <= left_lo + child
        in_right = s1 >= right_lo
        both = active & in_left & in_right
        result |= both
        active &= ~both & (in_left | in_right)
        lo = np.where(in_right & ~in_left, right_lo, lo)
        length = child
    # survivors of the limit descent sit inside an interval below float resolution
    return result | active


def _cantor_covers(base_lo, base_hi, depth, s0, s1):
    """Is ``[s0, s1]`` contained in a single depth-``depth`` retained interval?"""
    s0 = np.asarray(s0, dtype=float)
    s1 = np.asarray(s1, dtype=float)
    width = base_hi - base_lo
    lo = np.full(s0.shape, float(base_lo))
    length = np.full(s0.shape, float(width))
    ok = (s0 >= lo) & (s1 <= lo + length)
    for n in range(1, depth + 1):
        left_lo, right_lo, child = _stage_split(lo, length, width * 4.0**-n)
        in_left = (s0 >= left_lo) & (s1 <= left_lo + child)
        in_right = (s0 >= right_lo) & (s1 <= right_lo + child)
        ok &= in_left | in_right
        lo = np.where(in_right, right_lo, left_lo)
        length = child
    return ok


@dataclass(frozen=True)
class FatCantorSet:
    """Depth-``depth`` stage of the Smith-Volterra-Cantor construction on ``[lo, hi]``.

    Step ``n`` removes from each of the ``2**(n-1)`` surviving intervals a
    centered open interval of length ``(hi - lo) * 4**-n``.  The retained
    closed intervals over-approximate the limit set, which has measure
    ``(hi - lo) / 2``.
    """

    lo: float
    hi: float
    depth: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")
        if not 1 <= self.depth <= MAX_CANTOR_DEPTH:
            raise DepthTooLarge(f"depth must be in [1, {MAX_CANTOR_DEPTH}], got {self.depth}")

    @property
    def base_interval(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def measure(self) -> float:
        return fat_cantor_measure(self.lo, self.hi, self.depth)

    @cached_property
    def retained_intervals(self) -> np.ndarray:
        """Sorted ``(2**depth, 2)`` array of closed intervals."""
        width = self.hi - self.lo
        starts = np.array([self.lo])
        length = width
        for n in range(1, self.depth + 1):
            left, right, length = _stage_split(starts, length, width * 4.0**-n)
            starts = np.stack([left, right], axis=1).ravel()
        return np.stack([starts, starts + length], axis=1)

    def _materialised(self) -> bool:
        return self.depth <= _MATERIALISE_DEPTH or "retained_intervals" in self.__dict__

    def contains(self, y):
        """Membership in the retained intervals; vectorised over ``y``."""
        y = np.asarray(y, dtype=float)
        if not self._materialised():
            return _cantor_meets(self.lo, self.hi, self.depth, y, y)
        iv = self.retained_intervals
        idx = np.searchsorted(iv[:, 1], y, side="left")
        ok = idx < len(iv)
        out = np.zeros(y.shape, dtype=bool)
        out[ok] = iv[idx[ok], 0] <= y[ok]
        return out if out.ndim else bool(out)

    def meets(self, s0, s1) -> np.ndarray:
        s0 = np.asarray(s0, dtype=float)
        s1 = np.asarray(s1, dtype=float)
        if not self._materialised():
            return _cantor_meets(self.lo, self.hi, self.depth, s0, s1)
        iv = self.retained_intervals
        idx = np.searchsorted(iv[:, 1], s0, side="left")
        ok = idx < len(iv)
        out = np.zeros(np.broadcast(s0, s1).shape, dtype=bool)
        out[ok] = iv[idx[ok], 0] <= np.broadcast_to(s1, out.shape)[ok]
        return out

    def covers(self, s0, s1) -> np.ndarray:
        return _cantor_covers(self.lo, self.hi, self.depth, s0, s1)


def fat_cantor_measure(lo: float, hi: float, depth: int) -> float:
    """Closed form ``(hi - lo) * (1/2 + 2**-(depth + 1))``."""
    return (hi - lo) * (0.5 + 2.0 ** -(depth + 1))


def fat_cantor_build(lo: float, hi: float, depth: int) -> FatCantorSet:
    return FatCantorSet(float(lo), float(hi), int(depth))


def fat_cantor_contains(P: FatCantorSet, y: float) -> bool:
    return bool(P.contains(float(y)))


# ---------------------------------------------------------------------------

Bounds = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True, eq=False)
class ScalarField2D:
    """A bounded field ``func(x, y)`` with ``|func| <= bound_K`` on ``rect``.

    ``exact_bounds`` returns the inf and sup over closed cells
    ``[x0, x1] x [y0, y1]`` (degenerate widths allowed).  Without it, cell
    bounds are estimated from the 9 probe points.  ``closed_discontinuities``
    is declared metadata: it cannot be inferred from point queries.
    """

    name: str
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    bound_K: float
    rect: BoundingRect | None = None
    exact_bounds: Bounds | None = None
    closed_discontinuities: bool = False

    def __call__(self, x, y):
        out = self.func(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def cell_bounds(self, x0, y0, x1, y1, *, rng: np.random.Generator | None = None,
                    extra_probes: int = 0) -> tuple[np.ndarray, np.ndarray]:
        x0, y0, x1, y1 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x0, y0, x1, y1)))
        if self.exact_bounds is not None:
            return self.exact_bounds(x0, y0, x1, y1)
        xs, ys = _probe_points(x0.ravel(), y0.ravel(), x1.ravel(), y1.ravel())
        if extra_probes:
            rng = rng or np.random.default_rng(0)
            u = rng.random((xs.shape[0], extra_probes))
            v = rng.random((xs.shape[0], extra_probes))
            xs = np.concatenate([xs, x0.ravel()[:, None] + u * (x1 - x0).ravel()[:, None]], axis=1)
            ys = np.concatenate([ys, y0.ravel()[:, None] + v * (y1 - y0).ravel()[:, None]], axis=1)
        vals = np.asarray(self.func(xs, ys), dtype=float)
        return vals.min(axis=1).reshape(x0.shape), vals.max(axis=1).reshape(x0.shape)

    def segment_bounds(self, x, y0, y1):
        return self.cell_bounds(x, y0, x, y1)

    @property
    def has_exact_bounds(self) -> bool:
        return self.exact_bounds is not None

    def transposed(self) -> "ScalarField2D":
        f, eb = self.func, self.exact_bounds
        return ScalarField2D(
            name=f"{self.name}^T",
            func=lambda x, y: f(y, x),
            bound_K=self.bound_K,
            rect=None if self.rect is None else self.rect.transposed(),
            exact_bounds=None if eb is None else (lambda x0, y0, x1, y1: eb(y0, x0, y1, x1)),
            closed_discontinuities=self.closed_discontinuities,
        )


def _outward(lo, hi):
    """Pad float range bounds by a few ulps so rounding cannot shrink them."""
    pad = 8 * np.finfo(float).eps
    return lo - pad * (1 + np.abs(lo)), hi + pad * (1 + np.abs(hi))


def _square_range(a, b):
    lo = np.where((a <= 0) & (b >= 0), 0.0, np.minimum(a * a, b * b))
    return lo, np.maximum(a * a, b * b)


def _sin_range(a, b):
    """Exact range of ``sin`` over ``[a, b]``."""
    two_pi = 2 * math.pi
    lo = np.minimum(np.sin(a), np.sin(b))
    hi = np.maximum(np.sin(a), np.sin(b))
    k_max = np.ceil((a - math.pi / 2) / two_pi)
    k_min = np.ceil((a + math.pi / 2) / two_pi)
    hi = np.where(math.pi / 2 + two_pi * k_max <= b, 1.0, hi)
    lo = np.where(-math.pi / 2 + two_pi * k_min <= b, -1.0, lo)
    return lo, hi


def _product_range(a_lo, a_hi, b_lo, b_hi):
    p = np.stack([a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi])
    return p.min(axis=0), p.max(axis=0)


def _sup_abs(field: ScalarField2D, rect: BoundingRect) -> float:
    lo, hi = field.exact_bounds(*(np.array([v]) for v in (rect.x_lo, rect.y_lo, rect.x_hi, rect.y_hi)))
    return float(max(abs(lo[0]), abs(hi[0])))


def constant_field(value: float = 1.0, rect: BoundingRect | None = None, name: str = "one") -> ScalarField2D:
    return ScalarField2D(
        name=name,
        func=lambda x, y: np.full(np.broadcast(x, y).shape, float(value)),
        bound_K=max(abs(value), 1e-300),
        rect=rect,
        exact_bounds=lambda x0, y0, x1, y1: (np.full(x0.shape, float(value)), np.full(x0.shape, float(value))),
        closed_discontinuities=True,
    )


def poly_field(rect: BoundingRect | None = None) -> ScalarField2D:
    """``x**2 + y**2``; ``bound_K`` is its maximum over ``rect`` (default [-1,1]^2)."""
    rect = rect or BoundingRect(-1.0, 1.0, -1.0, 1.0)

    def bounds(x0, y0, x1, y1):
        xl, xh = _square_range(x0, x1)
        yl, yh = _square_range(y0, y1)
        return _outward(xl + yl, xh + yh)

    f = ScalarField2D("poly", lambda x, y: x * x + y * y, 1.0, rect, bounds, True)
    return ScalarField2D("poly", f.func, _sup_abs(f, rect), rect, bounds, True)


def smooth_field(rect: BoundingRect | None = None) -> ScalarField2D:
    """``sin(3x) cos(2y) + 1/2``, a smooth field with sign changes."""

    def bounds(x0, y0, x1, y1):
        s_lo, s_hi = _sin_range(3 * x0, 3 * x1)
        c_lo, c_hi = _sin_range(2 * y0 + math.pi / 2, 2 * y1 + math.pi / 2)
        lo, hi = _product_range(s_lo, s_hi, c_lo, c_hi)
        return _outward(lo + 0.5, hi + 0.5)

    return ScalarField2D("cont-generic", lambda x, y: np.sin(3 * x) * np.cos(2 * y) + 0.5,
                         1.5, rect, bounds, True)


def step_diagonal_field(rect: BoundingRect | None = None) -> ScalarField2D:
    """Indicator of ``y > x``: jump 1 across the diagonal."""

    def bounds(x0, y0, x1, y1):
        return (np.where(y0 <= x1, 0.0, 1.0), np.where(y1 > x0, 1.0, 0.0))

    return ScalarField2D("step-diag", lambda x, y: (y > x).astype(float),
                         1.0, rect or BoundingRect(0.0, 1.0, 0.0, 1.0), bounds, True)


def cantor_indicator_field() -> ScalarField2D:
    """Indicator of ``C x [0, 1]`` with ``C`` the limit fat Cantor set on [0, 1].

    Its discontinuity set is ``C x [0, 1]``: closed, of planar measure 1/2, so
    not coverable by squares of small total area.
    """

    def func(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        inside = (y >= 0) & (y <= 1)
        return (inside & _cantor_meets(0.0, 1.0, None, x, x)).astype(float)

    def bounds(x0, y0, x1, y1):
        y_meets = (y1 >= 0) & (y0 <= 1)
        # cells of one level share few distinct x-ranges
        keys, inv = np.unique(np.stack([x0.ravel(), x1.ravel()], axis=1), axis=0, return_inverse=True)
        inv = inv.reshape(x0.shape)
        meets = _cantor_meets(0.0, 1.0, None, keys[:, 0], keys[:, 1])[inv]
        sup = np.where(meets & y_meets, 1.0, 0.0)
        y_inside = (y0 >= 0) & (y1 <= 1)
        # a nondegenerate x-range always contains points outside the nowhere dense C
        inf = np.where((x1 == x0) & meets & y_inside, 1.0, 0.0)
        return inf, sup

    return ScalarField2D("cantor-indicator", func, 1.0, BoundingRect(0.0, 1.0, 0.0, 1.0), bounds, True)


@dataclass(frozen=True, eq=False)
class PaperExampleField(ScalarField2D):
    P: FatCantorSet | None = None


def paper_example_field(depth: int) -> tuple[ScalarField2D, JordanDomain]:
    """The L-shape counterexample field and its domain.

    On the segment ``x = 1, 1 <= y <= 2`` the field is -2 on the fat Cantor
    set ``P`` (depth-``depth`` stage on [1, 2]) and -1 off it; everywhere
    else, including outside the L-shape, it is 0.
    """
    P = fat_cantor_build(1.0, 2.0, depth)

    def func(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        on_line = (x == 1.0) & (y >= 1.0) & (y <= 2.0)
        out = np.zeros(x.shape)
        if on_line.any():
            out[on_line] = np.where(P.contains(y[on_line]), -2.0, -1.0)
        return out

    def bounds(x0, y0, x1, y1):
        hits = (x0 <= 1.0) & (1.0 <= x1) & (y0 <= 2.0) & (y1 >= 1.0)
        s0 = np.maximum(y0, 1.0)
        s1 = np.minimum(y1, 2.0)
        has_m2 = hits & P.meets(s0, np.maximum(s0, s1))
        has_m1 = hits & ~P.covers(s0, np.maximum(s0, s1))
        has_zero = ~hits | (x0 < x1) | (y0 < 1.0) | (y1 > 2.0)
        lo = np.where(has_m2, -2.0, np.where(has_m1, -1.0, 0.0))
        hi = np.where(has_zero, 0.0, np.where(has_m1, -1.0, -2.0))
        return lo, hi

    field = PaperExampleField(f"paper-example:{depth}", func, 2.0, BoundingRect(0.0, 2.0, 0.0, 2.0),
                              bounds, True, P=P)
    return field, lshape_domain()


FieldFactory = Callable[[BoundingRect | None], ScalarField2D]


def builtin_fields() -> Mapping[str, FieldFactory]:
    """Named factories taking an optional bounding rectangle.

    ``paper-example`` is parameterised by depth: use ``field_from_spec``.
    """
    return {
        "one": lambda rect=None: constant_field(1.0, rect),
        "poly": lambda rect=None: poly_field(rect),
        "cont-generic": lambda rect=None: smooth_field(rect),
        "step-diag": lambda rect=None: step_diagonal_field(rect),
        "cantor-indicator": lambda rect=None: cantor_indicator_field(),
        "paper-example": lambda rect=None: paper_example_field(6)[0],
    }


def field_from_spec(spec: str, rect: BoundingRect | None = None) -> ScalarField2D:
    name, _, arg = spec.partition(":")
    if name == "paper-example":
        try:
            depth = int(arg) if arg else 6
        except ValueError as exc:
            raise UnknownFieldName(f"bad depth in {spec!r}") from exc
        return paper_example_field(depth)[0]
    catalog = builtin_fields()
    if arg or name not in catalog:
        raise UnknownFieldName(f"unknown field {spec!r}")
    return catalog[name](rect)
