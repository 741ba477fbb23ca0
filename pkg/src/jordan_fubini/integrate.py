"""Double integrals by Darboux sums and iterated integrals with improper inner slices.

The inner integral at abscissa ``x`` is the limit, over a decreasing
sequence of cover parameters ``eps``, of the integral of ``f(x, .)`` over
the section of the domain's interior with the cover removed.  The outer
integral is a midpoint Riemann sum refined by doubling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .fields import ScalarField2D
from .geometry import (
    MAX_LEVEL,
    BoundingRect,
    CellTag,
    EpsCover,
    JordanDomain,
    SliceSet,
    _ColumnWalker,
    _subdivide,
    build_eps_covers,
    classify_grid,
    interior_x_extent,
    rect_domain,
)

DEFAULT_EPS_TERMS = 12
DEFAULT_MAX_SEGMENTS = 2**12
DEFAULT_MAX_N = 1024
DEFAULT_MAX_CELLS = 2**22
DEFAULT_INTEGRATE_LEVEL = 20
TRACE_POINTS = 33
_CHUNK = 2**18
_MAX_ROUNDS_1D = 64


class Status(str, Enum):
    CONVERGED = "Converged"
    MAX_DEPTH = "MaxDepth"
    NO_CONVERGENCE = "NoConvergence"
    EMPTY_SLICE = "EmptySlice"


@dataclass(frozen=True)
class DarbouxEstimate:
    """Darboux sums over FULL_INSIDE cells plus bounds for the boundary cells.

    ``boundary_lower``/``boundary_upper`` enclose the integral over the part
    of the domain inside boundary cells (per cell, between ``min(0, inf)``
    and ``max(0, sup)`` times the cell area); ``boundary_contribution_bound``
    is the cruder ``K * boundary_area``.
    """

    lower_sum: float
    upper_sum: float
    level: int
    boundary_contribution_bound: float
    boundary_lower: float = 0.0
    boundary_upper: float = 0.0
    inner_area: float = 0.0
    boundary_area: float = 0.0
    work: int = 0

    @property
    def gap(self) -> float:
        return self.upper_sum - self.lower_sum + 2.0 * self.boundary_contribution_bound

    @property
    def bracket(self) -> tuple[float, float]:
        return self.lower_sum + self.boundary_lower, self.upper_sum + self.boundary_upper

    @property
    def value(self) -> float:
        lo, hi = self.bracket
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class IntegralReport:
    value: float
    gap: float
    status: Status
    trace: tuple[tuple[float, float], ...] = ()
    details: dict = field(default_factory=dict, compare=False)

    @property
    def converged(self) -> bool:
        return self.status in (Status.CONVERGED, Status.EMPTY_SLICE)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "gap": self.gap,
            "status": self.status.value,
            "trace": [[k, v] for k, v in self.trace],
        }


@dataclass(frozen=True)
class FubiniReport:
    double_value: float
    iterated_value: float
    discrepancy: float
    eps_final: float
    bound_K: float
    predicted_bound: float
    double_gap: float
    iterated_gap: float
    per_x_slice_trace: tuple[tuple[float, float], ...]
    double_status: Status = Status.CONVERGED
    iterated_status: Status = Status.CONVERGED

    @property
    def invariant_holds(self) -> bool:
        return self.discrepancy <= self.predicted_bound + self.double_gap + self.iterated_gap

    def to_json(self) -> dict:
        return {
            "double": self.double_value,
            "iterated": self.iterated_value,
            "discrepancy": self.discrepancy,
            "predicted_bound": self.predicted_bound,
            "slices": [[x, h] for x, h in self.per_x_slice_trace],
            "double_gap": self.double_gap,
            "iterated_gap": self.iterated_gap,
            "eps_final": self.eps_final,
            "bound_K": self.bound_K,
            "double_status": self.double_status.value,
            "iterated_status": self.iterated_status.value,
            "invariant_holds": self.invariant_holds,
        }


def default_eps_seq(bounds: BoundingRect, eps0: float | None = None,
                    terms: int = DEFAULT_EPS_TERMS) -> list[float]:
    """``eps0 * 2**-n`` for ``n < terms``; ``eps0`` defaults to a tenth of the bounding area."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    eps0 = 0.1 * bounds.area if eps0 is None else float(eps0)
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    return [eps0 * 2.0**-n for n in range(terms)]


def _check_decreasing(eps_seq: Sequence[float]) -> list[float]:
    eps_seq = [float(e) for e in eps_seq]
    if not eps_seq or any(e <= 0 for e in eps_seq):
        raise ValueError("eps_seq must be a nonempty sequence of positive numbers")
    if any(b >= a for a, b in zip(eps_seq, eps_seq[1:])):
        raise ValueError("eps_seq must be strictly decreasing")
    return eps_seq


# ---------------------------------------------------------------------------
# double integral

def darboux_double(field: ScalarField2D, domain: JordanDomain, level: int, *,
                   max_level: int = MAX_LEVEL) -> DarbouxEstimate:
    """Darboux sums at resolution ``level``.

    Inside cells with positive oscillation are subdivided down to ``level``;
    cells whose bounds coincide are summed as they are.
    """
    if field.rect is not None and not field.rect.covers(domain.bounds):
        raise ValueError(f"field {field.name} is declared on {field.rect}, not covering {domain.bounds}")
    grid = classify_grid(domain, level, max_level=max_level)
    base = domain.bounds.area
    lows: list[float] = []
    highs: list[float] = []
    work = 0

    inside = grid.tags == CellTag.FULL_INSIDE
    rects, levels = grid.rects[inside], grid.levels[inside]
    stack = [(int(lv), rects[levels == lv]) for lv in sorted(set(levels.tolist()), reverse=True)]
    while stack:
        lv, r = stack.pop()
        if len(r) > _CHUNK:
            stack.extend((lv, r[i:i + _CHUNK]) for i in range(0, len(r), _CHUNK))
            continue
        lo, hi = field.cell_bounds(r[:, 0], r[:, 1], r[:, 2], r[:, 3])
        work += len(r)
        area = base / 4.0**lv
        done = (hi <= lo) | (lv >= level)
        lows.append(float(lo[done].sum()) * area)
        highs.append(float(hi[done].sum()) * area)
        if not done.all():
            kids = _subdivide(*(r[~done, j] for j in range(4)))
            stack.append((lv + 1, np.stack(kids, axis=1)))

    bnd = grid.select(CellTag.BOUNDARY)
    b_area_cell = base / 4.0**level
    if len(bnd):
        blo, bhi = field.cell_bounds(bnd[:, 0], bnd[:, 1], bnd[:, 2], bnd[:, 3])
        b_lower = float(np.minimum(blo, 0.0).sum()) * b_area_cell
        b_upper = float(np.maximum(bhi, 0.0).sum()) * b_area_cell
    else:
        b_lower = b_upper = 0.0
    return DarbouxEstimate(
        lower_sum=math.fsum(lows),
        upper_sum=math.fsum(highs),
        level=level,
        boundary_contribution_bound=field.bound_K * grid.boundary_area,
        boundary_lower=b_lower,
        boundary_upper=b_upper,
        inner_area=grid.inner_area,
        boundary_area=grid.boundary_area,
        work=work + len(bnd),
    )


def integrate_double(field: ScalarField2D, domain: JordanDomain, tol: float, *,
                     max_level: int = DEFAULT_INTEGRATE_LEVEL,
                     max_cells: int = DEFAULT_MAX_CELLS) -> IntegralReport:
    """Refine until ``upper - lower + 2 K * boundary_area <= tol``.

    Stops with ``MaxDepth`` at ``max_level`` or when the next level would
    evaluate more than ``max_cells`` cells.  The value is the midpoint of
    the per-cell bracket.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    trace = []
    status = Status.MAX_DEPTH
    est = None
    for level in range(max_level + 1):
        est = darboux_double(field, domain, level)
        trace.append((level, est.value))
        if est.gap <= tol:
            status = Status.CONVERGED
            break
        if 4 * est.work > max_cells:
            break
    assert est is not None
    return IntegralReport(est.value, est.gap, status, tuple(trace), {
        "level": est.level, "lower_sum": est.lower_sum, "upper_sum": est.upper_sum,
        "boundary_area": est.boundary_area, "bracket": est.bracket,
    })


# ---------------------------------------------------------------------------
# inner slice integrals

def _darboux_1d(field: ScalarField2D, xs: np.ndarray, interval_lists, tol: float,
                max_segments: int) -> tuple[np.ndarray, np.ndarray]:
    """Adaptive 1D Darboux sums of ``y -> f(x_i, y)`` over each interval union.

    Refines, per owner, the segments whose gap density exceeds the average
    allowed by ``tol`` until the owner's total gap is ``<= tol`` or it would
    exceed ``max_segments`` segments.
    """
    n = len(xs)
    own, y0, y1 = [], [], []
    for i, ivs in enumerate(interval_lists):
        for lo, hi in ivs:
            if hi > lo:
                own.append(i)
                y0.append(lo)
                y1.append(hi)
    lower = np.zeros(n)
    upper = np.zeros(n)
    if not own:
        return lower, upper
    own = np.array(own)
    y0 = np.array(y0, dtype=float)
    y1 = np.array(y1, dtype=float)
    total_len = np.bincount(own, y1 - y0, minlength=n)
    counts = np.bincount(own, minlength=n)
    for rnd in range(_MAX_ROUNDS_1D):
        lo, hi = field.segment_bounds(xs[own], y0, y1)
        ln = y1 - y0
        g = (hi - lo) * ln
        still_open = np.bincount(own, g, minlength=n) > tol
        refine = still_open[own] & (g * total_len[own] > tol * ln)
        over = counts + np.bincount(own[refine], minlength=n) > max_segments
        refine &= ~over[own]
        if rnd == _MAX_ROUNDS_1D - 1:
            refine[:] = False
        keep = ~refine
        lower += np.bincount(own[keep], lo[keep] * ln[keep], minlength=n)
        upper += np.bincount(own[keep], hi[keep] * ln[keep], minlength=n)
        if not refine.any():
            break
        counts += np.bincount(own[refine], minlength=n)
        mid = 0.5 * (y0[refine] + y1[refine])
        o = own[refine]
        own = np.concatenate([o, o])
        y0, y1 = np.concatenate([y0[refine], mid]), np.concatenate([mid, y1[refine]])
    return lower, upper


@dataclass
class _SliceBatch:
    value: np.ndarray
    darboux_gap: np.ndarray
    tail: np.ndarray
    stop: np.ndarray
    status: list
    traces: list
    slices: list


def _improper_batch(field: ScalarField2D, domain: JordanDomain, xs: np.ndarray,
                    covers: Sequence[EpsCover], tol: float, max_segments: int) -> _SliceBatch:
    """Inner improper integrals at every ``x`` in ``xs``.

    At each cover the slice integral is recomputed; an abscissa stops once
    successive values differ by at most ``tol`` and the Darboux gap plus
    ``K`` times the slice-length increment is at most ``tol``.
    """
    K = field.bound_K
    n = len(xs)
    b = domain.bounds
    walkers = [_ColumnWalker(domain, x) for x in xs]
    out = _SliceBatch(np.zeros(n), np.zeros(n), np.zeros(n), np.zeros(n, dtype=int),
                      [Status.NO_CONVERGENCE] * n, [[] for _ in range(n)], [None] * n)
    prev_v = np.full(n, np.nan)
    prev_len = np.full(n, np.nan)
    active = []
    for i, x in enumerate(xs):
        if b.x_lo <= x <= b.x_hi:
            active.append(i)
        else:
            out.status[i] = Status.EMPTY_SLICE
            out.slices[i] = SliceSet(float(x), (), covers[0].eps_target, 0.0)
    prev_ivs: list = [None] * n
    prev_sums = np.zeros((n, 2))
    for k, cover in enumerate(covers):
        if not active:
            break
        slices = [walkers[i].slice(cover) for i in active]
        # the domain frontier bounds what any later cover can still add
        frontier = [walkers[i].unresolved() if cover.kind == "boundary" else 0.0 for i in active]
        fresh = [j for j, i in enumerate(active) if slices[j].intervals != prev_ivs[i]]
        if fresh:
            lo, hi = _darboux_1d(field, xs[[active[j] for j in fresh]],
                                 [slices[j].intervals for j in fresh], tol / 2, max_segments)
            for m, j in enumerate(fresh):
                prev_sums[active[j]] = lo[m], hi[m]
        for j, i in enumerate(active):
            s = slices[j]
            prev_ivs[i] = s.intervals
            lower, upper = prev_sums[i]
            v = 0.5 * (lower + upper)
            length = s.total_length
            out.traces[i].append((cover.eps_target, v))
            out.value[i] = v
            out.darboux_gap[i] = upper - lower
            out.stop[i] = k
            out.slices[i] = s
            if k == 0:
                out.tail[i] = K * s.unresolved
            else:
                out.tail[i] = K * max(length - prev_len[i], frontier[j])
                # an empty slice over unresolved cells is not evidence of convergence
                resolved = length > 0 or s.unresolved == 0
                if (resolved and abs(v - prev_v[i]) <= tol
                        and out.darboux_gap[i] + out.tail[i] <= tol):
                    out.status[i] = Status.CONVERGED if length > 0 else Status.EMPTY_SLICE
            prev_v[i] = v
            prev_len[i] = length
        active = [i for i in active if out.status[i] is Status.NO_CONVERGENCE]
    return out


def inner_improper_integral(field: ScalarField2D, domain: JordanDomain, x: float,
                            eps_seq: Sequence[float] | None = None, tol: float = 1e-6, *,
                            covers: Sequence[EpsCover] | None = None,
                            max_segments: int = DEFAULT_MAX_SEGMENTS) -> IntegralReport:
    """``h(x)``: limit over the cover sequence of slice integrals of ``f(x, .)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if covers is None:
        eps_seq = _check_decreasing(eps_seq or default_eps_seq(domain.bounds))
        covers = build_eps_covers(domain, eps_seq)
    res = _improper_batch(field, domain, np.array([float(x)]), covers, tol, max_segments)
    s = res.slices[0]
    return IntegralReport(
        float(res.value[0]),
        float(res.darboux_gap[0] + res.tail[0]),
        res.status[0],
        tuple(res.traces[0]),
        {"darboux_gap": float(res.darboux_gap[0]), "tail": float(res.tail[0]),
         "eps": covers[int(res.stop[0])].eps_target, "intervals": s.intervals if s else ()},
    )


# ---------------------------------------------------------------------------
# iterated integral

def _iterated(field, domain, covers, tol, *, x_range=None, max_n=DEFAULT_MAX_N,
              max_segments=DEFAULT_MAX_SEGMENTS) -> IntegralReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = x_range or interior_x_extent(domain)
    if b <= a:
        return IntegralReport(0.0, 0.0, Status.EMPTY_SLICE, (), {"a": a, "b": b})
    inner_tol = tol / (4.0 * (b - a))
    trace = []
    prev = None
    outer_ok = False
    n = 2
    while True:
        dx = (b - a) / n
        xs = a + (np.arange(n) + 0.5) * dx
        res = _improper_batch(field, domain, xs, covers, inner_tol, max_segments)
        S = math.fsum(res.value.tolist()) * dx
        trace.append((n, S))
        if prev is not None and abs(S - prev) <= tol / 2:
            outer_ok = True
            break
        if n >= max_n:
            break
        prev = S
        n *= 2
    darboux = math.fsum(res.darboux_gap.tolist()) * dx
    # Riemann-sum tail: K * (slice-length deficit estimate) summed over the partition
    tail = math.fsum(res.tail.tolist()) * dx
    outer = abs(S - prev) if prev is not None else math.inf
    gap = darboux + tail + outer
    if outer_ok and gap <= tol:
        status = Status.CONVERGED
    elif outer_ok:
        status = Status.MAX_DEPTH
    else:
        status = Status.NO_CONVERGENCE
    used = sorted(set(res.stop.tolist()))
    return IntegralReport(S, gap, status, tuple(trace), {
        "a": a, "b": b, "n": n, "darboux_gap": darboux, "riemann_tail": tail, "outer_diff": outer,
        "cover_area": max(covers[k].total_area for k in used),
        "eps_final": covers[used[0]].eps_target,
        "inner_unconverged": sum(s is Status.NO_CONVERGENCE for s in res.status),
    })


def iterated_integral(field: ScalarField2D, domain: JordanDomain, tol: float, *,
                      eps_seq: Sequence[float] | None = None, max_n: int = DEFAULT_MAX_N,
                      max_segments: int = DEFAULT_MAX_SEGMENTS) -> IntegralReport:
    """Midpoint Riemann sums of ``h`` over the interior's x-extent, doubling until stable."""
    eps_seq = _check_decreasing(eps_seq or default_eps_seq(domain.bounds))
    covers = build_eps_covers(domain, eps_seq)
    return _iterated(field, domain, covers, tol, max_n=max_n, max_segments=max_segments)


def _slice_trace(field, domain, covers, a, b, tol, max_segments):
    xs = np.linspace(a, b, TRACE_POINTS)
    res = _improper_batch(field, domain, xs, covers, tol, max_segments)
    return tuple(zip(xs.tolist(), res.value.tolist()))


def _fubini(field, domain, covers, tol, *, x_range=None, max_level=DEFAULT_INTEGRATE_LEVEL,
            max_cells=DEFAULT_MAX_CELLS, max_n=DEFAULT_MAX_N,
            max_segments=DEFAULT_MAX_SEGMENTS) -> FubiniReport:
    double = integrate_double(field, domain, tol, max_level=max_level, max_cells=max_cells)
    it = _iterated(field, domain, covers, tol, x_range=x_range, max_n=max_n, max_segments=max_segments)
    a = it.details.get("a", domain.bounds.x_lo)
    b = it.details.get("b", domain.bounds.x_hi)
    inner_tol = tol / (4.0 * max(b - a, 1e-300))
    return FubiniReport(
        double_value=double.value,
        iterated_value=it.value,
        discrepancy=abs(double.value - it.value),
        eps_final=it.details.get("eps_final", covers[-1].eps_target),
        bound_K=field.bound_K,
        predicted_bound=field.bound_K * it.details.get("cover_area", 0.0),
        double_gap=double.gap,
        iterated_gap=it.gap,
        per_x_slice_trace=_slice_trace(field, domain, covers, a, b, inner_tol, max_segments),
        double_status=double.status,
        iterated_status=it.status,
    )


def fubini_check(field: ScalarField2D, domain: JordanDomain, tol: float, *,
                 eps_seq: Sequence[float] | None = None, **kw) -> FubiniReport:
    """Double integral against the iterated integral with boundary covers."""
    eps_seq = _check_decreasing(eps_seq or default_eps_seq(domain.bounds))
    return _fubini(field, domain, build_eps_covers(domain, eps_seq), tol, **kw)


def rectangle_fubini(field: ScalarField2D, rect: BoundingRect, tol: float, *,
                     eps_seq: Sequence[float] | None = None, **kw) -> FubiniReport:
    """Fubini check on a rectangle with covers of the field's discontinuity set.

    Raises ``CoverNotAchievable`` when the discontinuity set cannot be
    covered by cells of small total area.
    """
    from .analysis import discontinuity_covers

    eps_seq = _check_decreasing(eps_seq or default_eps_seq(rect))
    covers = discontinuity_covers(field, rect, eps_seq)
    domain = rect_domain(rect.x_lo, rect.y_lo, rect.x_hi, rect.y_hi)
    return _fubini(field, domain, covers, tol, x_range=(rect.x_lo, rect.x_hi), **kw)


def upper_lower_partial(field: ScalarField2D, x: float, y_lo: float, y_hi: float, level: int, *,
                        max_level: int = MAX_LEVEL) -> tuple[float, float]:
    """Lower and upper Darboux sums of ``y -> f(x, y)`` on ``2**level`` equal pieces."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    if level > max_level:
        from .errors import LevelTooDeep

        raise LevelTooDeep(f"level {level} exceeds max_level {max_level}")
    n = 2**level
    k = np.arange(n + 1)
    edges = y_lo + (y_hi - y_lo) * k / n
    lo, hi = field.segment_bounds(np.full(n, float(x)), edges[:-1], edges[1:])
    w = (y_hi - y_lo) / n
    return math.fsum(lo.tolist()) * w, math.fsum(hi.tolist()) * w
