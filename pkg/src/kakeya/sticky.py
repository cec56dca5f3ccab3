"""The sticky plate construction over the digit-{0,3} Cantor set.

``C0`` is the set of numbers whose base-4 digits are all 0 or 3; its stage-k
cover is ``2**k`` closed intervals of length ``4**-k``.  Lines join the bottom
plate ``(1/2) C0^(d-1) x {0}`` to the top plate ``C0^(d-1) x {1}``.

At height ``lam`` such a line passes through ``(1-lam) a + lam b``, so the
slice is ``lam * (C0 + (t/2) C0)`` per coordinate with ``t = (1-lam)/lam``.
The factor ``1/2`` is the bottom plate's scaling; :func:`sticky_slice`
reports ``t`` and the coefficient actually used.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dimension import CubeCounts
from .grid import CellSet, IntervalUnion, ProductUnion, as_fraction, normalize


@dataclass(frozen=True)
class DigitSet1D:
    stage: int
    intervals: IntervalUnion

    def lefts(self) -> list[Fraction]:
        return [a for a, _ in self.intervals]


def c0_digits(k: int) -> np.ndarray:
    """Left endpoints of the stage-``k`` intervals, in units of ``4**-k``."""
    if k < 0:
        raise ValueError("stage must be >= 0")
    lefts = np.zeros(1, dtype=object)
    for _ in range(k):
        lefts = np.concatenate([4 * lefts, 4 * lefts + 3])
    return np.sort(lefts)


def c0_stage(k: int) -> DigitSet1D:
    lefts = c0_digits(k)
    return DigitSet1D(k, IntervalUnion.from_int_bounds(lefts, lefts + 1, 4**k))


def _intervals(x) -> IntervalUnion:
    return x.intervals if isinstance(x, DigitSet1D) else x


def minkowski_sum(a, b, t) -> IntervalUnion:
    """``{alpha + t*beta}`` over the two unions, from all interval pairs."""
    a, b = _intervals(a), _intervals(b)
    t = as_fraction(t)
    scaled = [(min(t * lo, t * hi), max(t * lo, t * hi)) for lo, hi in b]
    return normalize((p + q, r + s) for p, r in a for q, s in scaled)


def four_corner_cells(k: int) -> CellSet:
    """Stage-``k`` cells of ``C0 x C0`` on the ``4**-k`` grid."""
    lefts = c0_digits(k).astype(np.int64)
    cols, rows = np.meshgrid(lefts, lefts, indexing="ij")
    return CellSet.from_arrays(k, cols.ravel(), rows.ravel(), k)


@dataclass(frozen=True)
class PlatePair:
    bottom: ProductUnion
    top: ProductUnion


def plates(k: int, d: int = 2) -> PlatePair:
    if d < 2:
        raise ValueError("d must be >= 2")
    top = c0_stage(k).intervals
    bottom = top.scaled(Fraction(1, 2))
    return PlatePair(ProductUnion((bottom,) * (d - 1)), ProductUnion((top,) * (d - 1)))


@dataclass(frozen=True)
class StickySlice:
    lam: Fraction
    t: Fraction
    coefficient: Fraction
    factor: IntervalUnion
    d: int

    @property
    def product(self) -> ProductUnion:
        return ProductUnion((self.factor,) * (self.d - 1))

    @property
    def measure(self) -> Fraction:
        return self.factor.measure ** (self.d - 1)


def sticky_slice(lam, k: int, d: int = 2) -> StickySlice:
    """Slice of the plate family at height ``lam`` over stage-``k`` covers."""
    lam = as_fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("lambda must lie strictly between 0 and 1")
    if d < 2:
        raise ValueError("d must be >= 2")
    t = (1 - lam) / lam
    coefficient = t / 2
    c = c0_stage(k)
    factor = minkowski_sum(c, c, coefficient).scaled(lam)
    return StickySlice(lam, t, coefficient, factor, d)


def direction_set(k: int, d: int = 2) -> ProductUnion:
    """``top - bottom`` factorwise: ``C0 - (1/2) C0`` at stage ``k``."""
    c = c0_stage(k)
    return ProductUnion((minkowski_sum(c, c, Fraction(-1, 2)),) * (d - 1))


def direction_box_certified(k: int, d: int = 2) -> bool:
    full = IntervalUnion.interval(Fraction(-1, 2), 1)
    return all(f == full for f in direction_set(k, d).factors)


# -- parameter set ----------------------------------------------------------------


def product_map(v, a):
    return v + a, 2 * a


def swapped_map(v, a):
    return a - 2 * v, 2 * v


@dataclass(frozen=True)
class ProductCheck:
    passed: bool
    image: tuple
    witness: tuple | None = None


def sticky_param_product_check(k: int, d: int = 2, linear_map=product_map) -> ProductCheck:
    """Map the stage-``k`` parameter pieces and compare with ``C0 x C0``.

    A piece is ``{(c - a, a)}`` for ``c`` in one interval of ``C0`` and ``a``
    in one interval of ``(1/2) C0``, a parallelogram.  A linear map sends it
    to the image of its four corners; the check requires that image to be an
    axis-parallel box and the boxes to be exactly the product cells.  The
    planar check is repeated for each of the ``d-1`` coordinate pairs.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    c0 = c0_stage(k).intervals
    half = c0.scaled(Fraction(1, 2))
    target = {(x, y) for x in c0 for y in c0}
    boxes = set()
    for c_lo, c_hi in c0:
        for a_lo, a_hi in half:
            corners = [linear_map(c - a, a) for c in (c_lo, c_hi) for a in (a_lo, a_hi)]
            xs = sorted({x for x, _ in corners})
            ys = sorted({y for _, y in corners})
            box = ((xs[0], xs[-1]), (ys[0], ys[-1]))
            is_box = len(xs) == 2 and len(ys) == 2 and len(set(corners)) == 4
            if not is_box or box not in target:
                missing = next((p for p in corners if not _in_product(p, c0)), corners[0])
                return ProductCheck(False, (), missing)
            boxes.add(box)
    if boxes != target:
        return ProductCheck(False, (), min(target - boxes)[0])
    image = normalize(x for x, _ in boxes), normalize(y for _, y in boxes)
    return ProductCheck(True, image * (d - 1))


def _in_product(p, c0: IntervalUnion) -> bool:
    return c0.contains(p[0]) and c0.contains(p[1])


def c0_dimension_counts(k: int, d: int = 1) -> CubeCounts:
    """``N = 4`` and ``M = 2**d`` per stage: ``C0`` (``d = 1``) or its powers."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return CubeCounts.from_counts([(4, 2**d)], d=d, repeat=k)
