"""Lines from parameter sets: slices, rotation covers and area estimates.

A parameter ``(v, a)`` names the line ``t -> (a + t v, t)``.  A
:class:`ParamFamily` reads each grid cell as a square of parameters, by
default with ``a`` along the cell's column and ``v`` along its row.  With
that reading the horizontal slice at height ``t`` is literally the slope-``t``
projection of the cell set, which the tests use as an oracle.

Higher dimensions are never gridded.  The box lift takes parameters
``((v, x), (a, 0))`` with ``x`` in the unit cube; the power lift takes
``d-1`` independent copies of the planar family.  Slices come back as
:class:`~kakeya.grid.ProductUnion` objects.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .grid import CellSet, IntervalUnion, ProductUnion, as_fraction, interval_endpoints


@dataclass(frozen=True)
class LineParam:
    v: tuple
    a: tuple

    def __post_init__(self):
        v = tuple(as_fraction(x) for x in _as_tuple(self.v))
        a = tuple(as_fraction(x) for x in _as_tuple(self.a))
        if len(v) != len(a):
            raise ValueError("v and a must have the same length")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "a", a)

    @property
    def d(self) -> int:
        return len(self.v) + 1


def _as_tuple(x) -> tuple:
    return tuple(x) if isinstance(x, (tuple, list)) else (x,)


def line_point(p: LineParam, t) -> tuple:
    t = as_fraction(t)
    return tuple(a + t * v for a, v in zip(p.a, p.v)) + (t,)


def line_distance(p: LineParam, q: LineParam, norm: str = "max") -> Fraction:
    """``||a - b|| + ||v - w||`` under the max or l1 norm (both exact).

    In the plane both are the absolute value.
    """
    if p.d != q.d:
        raise ValueError(f"dimension mismatch: {p.d} vs {q.d}")
    da = [abs(x - y) for x, y in zip(p.a, q.a)]
    dv = [abs(x - y) for x, y in zip(p.v, q.v)]
    if norm == "max":
        return max(da) + max(dv)
    if norm == "l1":
        return sum(da, Fraction(0)) + sum(dv, Fraction(0))
    raise ValueError(f"unknown norm {norm!r}")


@dataclass(frozen=True)
class ParamFamily:
    """Planar parameter cells, optionally lifted to ``R^d``.

    ``lift`` is ``"none"`` (``d == 2``), ``"box"`` or ``"power"``.  ``swap``
    reads a cell's column as ``v`` and its row as ``a`` instead.
    """

    base: CellSet
    lift: str = "none"
    d: int = 2
    swap: bool = False

    def __post_init__(self):
        if self.lift not in ("none", "box", "power"):
            raise ValueError(f"unknown lift {self.lift!r}")
        if self.d < 2 or (self.lift == "none" and self.d != 2):
            raise ValueError("lift 'none' needs d == 2; lifts need d >= 2")

    def cell_box(self, index: int) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """``((v_lo, v_hi), (a_lo, a_hi))`` of one base cell."""
        side = 4**self.base.exponent
        c, r = int(self.base.cols[index]), int(self.base.rows[index])
        col = (Fraction(c, side), Fraction(c + 1, side))
        row = (Fraction(r, side), Fraction(r + 1, side))
        return (col, row) if self.swap else (row, col)

    def corner_params(self, index: int) -> list[LineParam]:
        (v0, v1), (a0, a1) = self.cell_box(index)
        return [LineParam(v, a) for v in (v0, v1) for a in (a0, a1)]


def _planar_slice(family: ParamFamily, t: Fraction) -> IntervalUnion:
    """Union over cells of ``{a + v t}``, from the four corner values."""
    cells = family.base
    if len(cells) == 0:
        return IntervalUnion()
    p, q = t.numerator, t.denominator
    v, a = _va_arrays(family, q + abs(p) + 1)
    # corner values in units of 1/(q * 4**S)
    corners = np.stack([q * (a + da) + p * (v + dv) for da in (0, 1) for dv in (0, 1)])
    return IntervalUnion.from_int_bounds(corners.min(axis=0), corners.max(axis=0), q * 4**cells.exponent)


def slice_at(family: ParamFamily, t) -> IntervalUnion | ProductUnion:
    """Points at height ``t`` of the lines named by the family."""
    t = as_fraction(t)
    planar = _planar_slice(family, t)
    if family.lift == "none":
        return planar
    if family.lift == "power":
        return ProductUnion((planar,) * (family.d - 1))
    # (a, 0) + t (v, x) with x in [0,1]^(d-2): the extra coordinates sweep [0, t]
    sweep = IntervalUnion.interval(min(t, 0), max(t, 0))
    return ProductUnion((planar,) + (sweep,) * (family.d - 2))


def slice_measure(family: ParamFamily, t) -> Fraction:
    return slice_at(family, t).measure


# -- rotations ----------------------------------------------------------------

# arctan(v) / pi for the slopes where it is rational
_EXACT_ATAN = {Fraction(0): Fraction(0), Fraction(1): Fraction(1, 4), Fraction(-1): Fraction(-1, 4)}
INFINITY = "inf"


def _atan_over_pi(v, prec: int = 128) -> tuple[Fraction, Fraction]:
    """Rational enclosure of ``arctan(v) / pi``; exact where possible."""
    if v == INFINITY:
        return Fraction(1, 2), Fraction(1, 2)
    v = as_fraction(v)
    if v in _EXACT_ATAN:
        return _EXACT_ATAN[v], _EXACT_ATAN[v]
    iv = mpmath.ctx_iv.MPIntervalContext()
    iv.prec = prec
    x = iv.atan2(iv.mpf(v.numerator), iv.mpf(v.denominator)) / iv.pi
    return interval_endpoints(x)


@dataclass(frozen=True)
class RotationCover:
    """Rotations by ``j/count`` half-turns, ``j = 0 .. count-1``.

    Angles are in units of ``pi``.  ``arc`` is a rational enclosure of the
    direction arc length; ``start`` encloses the direction angle of the
    steepest slope.
    """

    count: int
    arc: tuple
    start: tuple
    angles: tuple = field(default=())

    def arcs(self) -> list[tuple[Fraction, Fraction]]:
        """Inner enclosures ``[start_hi + j/count, start_hi + j/count + arc_lo]``.

        ``start_hi + arc_lo`` is the lower end of the enclosure of the arc's
        far end, so each listed arc sits inside the true rotated arc.
        """
        s_hi = self.start[1]
        return [(s_hi + a, s_hi + a + self.arc[0]) for a in self.angles]

    def certificate(self) -> dict:
        """Coverage and minimality inequalities, evaluated exactly."""
        lo, hi = self.arc
        return {
            "arc_lo": lo,
            "arc_hi": hi,
            "step": Fraction(1, self.count),
            "covers": lo >= Fraction(1, self.count),
            "minimal": self.count == 1 or (self.count - 1) * hi < 1,
        }

    def verify(self) -> bool:
        """Re-check that the rotated arcs cover the circle of directions mod ``pi``."""
        arcs = self.arcs()
        if any(b < a for a, b in arcs):
            return False
        # sweep around the circle of circumference 1 starting at the first arc
        first = arcs[0][0]
        reach = first
        for a, b in sorted(((a - first) % 1 + first, b - a) for a, b in arcs):
            if a > reach:
                return False
            reach = max(reach, a + b)
        return reach >= first + 1 and self.certificate()["minimal"]


def rotation_cover(v_lo, v_hi) -> RotationCover:
    """Fewest equal rotations of the direction arc of ``{(v, 1): v_lo <= v <= v_hi}``.

    ``v_hi`` may be ``"inf"`` for the vertical-to-horizontal quarter turn.
    Direction ``(v, 1)`` has angle ``pi/2 - arctan(v)``.
    """
    if v_lo == INFINITY:
        raise ValueError("lower slope must be finite")
    if v_hi != INFINITY and as_fraction(v_hi) <= as_fraction(v_lo):
        raise ValueError("slope interval is degenerate")
    lo0, hi0 = _atan_over_pi(v_lo)
    lo1, hi1 = _atan_over_pi(v_hi)
    arc = (lo1 - hi0, hi1 - lo0)
    count = math.ceil(1 / arc[0])
    if arc[0] != arc[1] and (count - 1) * arc[1] >= 1:
        # the enclosure is too loose to decide the ceiling; tighten it
        lo0, hi0 = _atan_over_pi(v_lo, 512)
        lo1, hi1 = _atan_over_pi(v_hi, 512)
        arc = (lo1 - hi0, hi1 - lo0)
        count = math.ceil(1 / arc[0])
    start = (Fraction(1, 2) - hi1, Fraction(1, 2) - lo1)
    angles = tuple(Fraction(j, count) for j in range(count))
    return RotationCover(count, arc, start, angles)


# -- area -----------------------------------------------------------------------


@dataclass(frozen=True)
class AreaReport:
    estimate: Fraction
    upper_bound: Fraction
    resolution: int


def _t_grid(resolution: int) -> list[Fraction]:
    if resolution < 1:
        raise ValueError("t-grid must have at least one point")
    return [Fraction(2 * i + 1, 2 * resolution) for i in range(resolution)]


def area_estimate(family: ParamFamily, resolution: int) -> Fraction:
    """Midpoint Riemann sum of slice measures over ``t`` in ``[0, 1]``."""
    grid = _t_grid(resolution)
    return sum((slice_measure(family, t) for t in grid), Fraction(0)) / resolution


def _va_arrays(family: ParamFamily, bound: int):
    cells = family.base
    v, a = (cells.cols, cells.rows) if family.swap else (cells.rows, cells.cols)
    if bound * 4**cells.exponent >= 1 << 62:
        v, a = v.astype(object), a.astype(object)
    return v, a


def _slab_cover(family: ParamFamily, k: int, resolution: int) -> IntervalUnion:
    """Cover of all points with ``t`` in ``[k/N, (k+1)/N]``, projected to x."""
    # each line of a cell stays between the extreme corner values over the bin
    v, a = _va_arrays(family, 2 * resolution + 2)
    corners = np.stack(
        [resolution * (a + da) + j * (v + dv) for j in (k, k + 1) for da in (0, 1) for dv in (0, 1)]
    )
    return IntervalUnion.from_int_bounds(
        corners.min(axis=0), corners.max(axis=0), resolution * 4**family.base.exponent
    )


def area_upper_bound(family: ParamFamily, resolution: int) -> Fraction:
    """Rigorous upper bound on the planar area from per-bin slab covers."""
    if resolution < 1:
        raise ValueError("t-grid must have at least one point")
    total = sum((_slab_cover(family, k, resolution).measure for k in range(resolution)), Fraction(0))
    return total / resolution


def area_report(family: ParamFamily, resolution: int) -> AreaReport:
    if family.lift != "none":
        raise ValueError("area reports are planar")
    return AreaReport(area_estimate(family, resolution), area_upper_bound(family, resolution), resolution)
