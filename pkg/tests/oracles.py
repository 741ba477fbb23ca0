"""Independent reference computations used by the tests.

Pure Python with exact rationals where it matters; nothing here calls into
the package under test.
"""
from __future__ import annotations

import math
from fractions import Fraction


def disk_cell_areas(level: int, r: float = 1.0) -> tuple[float, float]:
    """Inner/outer areas of the unit-disk grid on [-r, r]^2, cell by cell.

    A closed cell lies in the closed disk iff its four corners do; its open
    interior misses the open disk iff its closest point is at distance >= r.
    """
    n = 2**level
    h = 2 * r / n
    inside = touching = 0
    for i in range(n):
        x0 = -r + i * h
        x1 = x0 + h
        cx = 0.0 if x0 <= 0 <= x1 else min(abs(x0), abs(x1))
        for j in range(n):
            y0 = -r + j * h
            y1 = y0 + h
            corners = [x * x + y * y for x in (x0, x1) for y in (y0, y1)]
            cy = 0.0 if y0 <= 0 <= y1 else min(abs(y0), abs(y1))
            if max(corners) <= r * r:
                inside += 1
            elif cx * cx + cy * cy < r * r:
                touching += 1
    a = h * h
    return inside * a, (inside + touching) * a


def cantor_intervals(lo, hi, depth: int) -> list[tuple[Fraction, Fraction]]:
    """Retained closed intervals, removing a centred gap of length (hi-lo)/4^n at stage n."""
    lo, hi = Fraction(lo), Fraction(hi)
    ivs = [(lo, hi)]
    for n in range(1, depth + 1):
        g = (hi - lo) / 4**n
        nxt = []
        for a, b in ivs:
            m = (a + b) / 2
            nxt += [(a, m - g / 2), (m + g / 2, b)]
        ivs = nxt
    return ivs


def cantor_member(ivs, y) -> bool:
    y = Fraction(y)
    return any(a <= y <= b for a, b in ivs)


def cantor_closed_form_measure(lo, hi, depth: int) -> float:
    """(hi - lo) minus the removed lengths 2^(n-1) (hi - lo) 4^-n, n = 1..depth."""
    L = Fraction(hi) - Fraction(lo)
    return float(L - sum(2 ** (n - 1) * L / 4**n for n in range(1, depth + 1)))


def lshape_line_envelope(depth: int, level: int) -> tuple[Fraction, Fraction]:
    """Lower/upper Darboux sums of y -> f(1, y) on [1, 2] over 2^level equal pieces.

    f(1, y) is -2 on P and -1 off it; brute force over the explicit list.
    """
    ivs = cantor_intervals(1, 2, depth)
    n = 2**level
    w = Fraction(1, n)
    lower = upper = Fraction(0)
    for k in range(n):
        a = 1 + k * w
        b = a + w
        meets = any(p <= b and q >= a for p, q in ivs)
        covered = any(p <= a and b <= q for p, q in ivs)
        lower += (-2 if meets else -1) * w
        upper += (-2 if covered else -1) * w
    return lower, upper


def chord(x: float, r: float = 1.0) -> float:
    return 2 * math.sqrt(max(r * r - x * x, 0.0))
