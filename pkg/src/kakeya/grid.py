"""Exact grid primitives: 4-adic cell sets and rational interval unions.

Cells live on the grid of side ``4**-S``; a cell ``(col, row)`` is the closed
square ``[col, col+1] x [row, row+1]`` scaled by ``4**-S``.  Coordinates are
held in int64 arrays, which is exact for ``S <= MAX_EXPONENT``.  Interval
endpoints are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

Rational = Fraction

# 4**31 == 2**62 keeps every coordinate (and col + row) inside int64.
MAX_EXPONENT = 31


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or 'p/q' string")
    return Fraction(value)


def int_str(value: int) -> str:
    """Decimal text of an int of any size (``str`` caps at 4300 digits)."""
    return str(Decimal(value))


_INT_RE = re.compile(r"[+-]?\d+")


def parse_int(text: str) -> int:
    text = text.strip()
    if not _INT_RE.fullmatch(text):
        raise ValueError(f"not an integer: {text!r}")
    return int(Decimal(text))


def interval_endpoints(x) -> tuple[Fraction, Fraction]:
    """Exact endpoints of an ``mpmath`` interval, read without rounding."""
    out = []
    for sign, man, exp, _ in x._mpi_:
        value = Fraction(int(man)) * Fraction(2) ** int(exp)
        out.append(-value if sign else value)
    return out[0], out[1]


def frac_str(value: Fraction) -> str:
    if value.denominator == 1:
        return int_str(value.numerator)
    return f"{int_str(value.numerator)}/{int_str(value.denominator)}"


def parse_fraction(text: str) -> Fraction:
    """Parse ``p/q`` or ``p``; anything else raises ``ValueError``."""
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        if not sep:
            return Fraction(parse_int(num))
        return Fraction(parse_int(num), parse_int(den))
    except (ArithmeticError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed fraction {text!r}") from exc


class Scale(NamedTuple):
    exponent: int
    stage: int = 0

    @property
    def side(self) -> Fraction:
        return Fraction(1, 4**self.exponent)


@dataclass(frozen=True, eq=False)
class CellSet:
    """Sorted, duplicate-free set of grid cells at one scale.

    Build through :meth:`from_pairs` or :meth:`from_arrays`; both sort by
    ``(col, row)`` and drop duplicates.
    """

    exponent: int
    cols: np.ndarray
    rows: np.ndarray
    stage: int = 0

    @classmethod
    def from_arrays(cls, exponent: int, cols, rows, stage: int = 0, *, validate: bool = True) -> "CellSet":
        if not 0 <= exponent <= MAX_EXPONENT:
            raise ValueError(f"scale exponent {exponent} outside [0, {MAX_EXPONENT}]")
        cols = np.asarray(cols, dtype=np.int64).ravel()
        rows = np.asarray(rows, dtype=np.int64).ravel()
        if cols.shape != rows.shape:
            raise ValueError("cols and rows must have equal length")
        if validate and cols.size:
            side = 4**exponent
            if cols.min() < 0 or rows.min() < 0 or cols.max() >= side or rows.max() >= side:
                raise ValueError(f"cell outside [0, 4^{exponent}) grid")
        order = np.lexsort((rows, cols))
        cols, rows = cols[order], rows[order]
        if cols.size > 1:
            keep = np.ones(cols.size, dtype=bool)
            keep[1:] = (cols[1:] != cols[:-1]) | (rows[1:] != rows[:-1])
            cols, rows = cols[keep], rows[keep]
        cols.setflags(write=False)
        rows.setflags(write=False)
        return cls(exponent, cols, rows, stage)

    @classmethod
    def from_pairs(cls, exponent: int, pairs: Iterable[Sequence[int]], stage: int = 0) -> "CellSet":
        pairs = list(pairs)
        if not pairs:
            return cls.from_arrays(exponent, [], [], stage)
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        return cls.from_arrays(exponent, arr[:, 0], arr[:, 1], stage)

    @classmethod
    def unit(cls) -> "CellSet":
        return cls.from_pairs(0, [(0, 0)])

    @property
    def scale(self) -> Scale:
        return Scale(self.exponent, self.stage)

    def __len__(self) -> int:
        return int(self.cols.size)

    def __iter__(self):
        return iter(zip(self.cols.tolist(), self.rows.tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CellSet):
            return NotImplemented
        return (
            self.exponent == other.exponent
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.rows, other.rows)
        )

    def __repr__(self) -> str:
        return f"CellSet(S={self.exponent}, cells={len(self)})"

    def pairs(self) -> list[tuple[int, int]]:
        return list(self)

    def transpose(self) -> "CellSet":
        """Reflect across ``y = x``."""
        return CellSet.from_arrays(self.exponent, self.rows, self.cols, self.stage, validate=False)

    def coarsen(self, exponent: int) -> "CellSet":
        """Distinct ancestors at a coarser exponent."""
        if exponent > self.exponent:
            raise ValueError("target exponent must not exceed the cell set's exponent")
        shift = 2 * (self.exponent - exponent)
        return CellSet.from_arrays(exponent, self.cols >> shift, self.rows >> shift, validate=False)

    def x_shadow(self) -> "IntervalUnion":
        denom = 4**self.exponent
        cols = np.unique(self.cols)
        return IntervalUnion.from_int_bounds(cols, cols + 1, denom)


def subdivide_cells(parent: CellSet, n: int) -> CellSet:
    """Every child of every parent cell, ``n`` levels (factor ``4**n``) finer."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = 4**n
    local = np.arange(k, dtype=np.int64)
    lc = np.repeat(local, k)
    lr = np.tile(local, k)
    cols = (parent.cols[:, None] * k + lc[None, :]).ravel()
    rows = (parent.rows[:, None] * k + lr[None, :]).ravel()
    return CellSet.from_arrays(parent.exponent + n, cols, rows, parent.stage + 1, validate=False)


def _merge_sorted(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge integer intervals sorted by ``lo``; touching intervals coalesce."""
    if lo.size == 0:
        return lo, hi
    run_hi = np.maximum.accumulate(hi)
    starts = np.ones(lo.size, dtype=bool)
    starts[1:] = lo[1:] > run_hi[:-1]
    idx = np.flatnonzero(starts)
    ends = np.append(idx[1:] - 1, lo.size - 1)
    return lo[idx], run_hi[ends]


@dataclass(frozen=True)
class IntervalUnion:
    """Disjoint, sorted closed intervals with rational endpoints.

    Touching intervals are merged, so ``[0, 1/2] u [1/2, 1]`` is stored as
    ``[0, 1]`` and equality of unions is literal tuple equality.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def from_int_bounds(cls, lo, hi, denom: int) -> "IntervalUnion":
        """Build from integer endpoint arrays in units of ``1/denom``."""
        lo = np.asarray(lo)
        hi = np.asarray(hi)
        keep = hi > lo
        lo, hi = lo[keep], hi[keep]
        order = np.argsort(lo, kind="stable")
        lo, hi = _merge_sorted(lo[order], hi[order])
        return cls(tuple((Fraction(int(a), denom), Fraction(int(b), denom)) for a, b in zip(lo.tolist(), hi.tolist())))

    @classmethod
    def interval(cls, lo, hi) -> "IntervalUnion":
        return normalize([(lo, hi)])

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def measure(self) -> Fraction:
        return union_measure(self)

    def scaled(self, factor) -> "IntervalUnion":
        factor = as_fraction(factor)
        return normalize([(factor * a, factor * b) for a, b in self.intervals])

    def shifted(self, offset) -> "IntervalUnion":
        offset = as_fraction(offset)
        return IntervalUnion(tuple((a + offset, b + offset) for a, b in self.intervals))

    def contains(self, x) -> bool:
        x = as_fraction(x)
        return any(a <= x <= b for a, b in self.intervals)

    def covers(self, other: "IntervalUnion") -> bool:
        """True if every interval of ``other`` sits inside one of ours."""
        return all(any(a <= c and d <= b for a, b in self.intervals) for c, d in other.intervals)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return normalize(list(self.intervals) + list(other.intervals))

    def to_pairs(self) -> list[tuple[str, str]]:
        return [(frac_str(a), frac_str(b)) for a, b in self.intervals]


def normalize(raw: Iterable[Sequence]) -> IntervalUnion:
    """Sort, coalesce overlapping or touching intervals, drop empty ones."""
    items = []
    for lo, hi in raw:
        lo, hi = as_fraction(lo), as_fraction(hi)
        if lo > hi:
            raise ValueError(f"interval [{lo}, {hi}] has lo > hi")
        if lo < hi:
            items.append((lo, hi))
    items.sort()
    merged: list[list[Fraction]] = []
    for lo, hi in items:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return IntervalUnion(tuple((a, b) for a, b in merged))


def union_measure(u: IntervalUnion) -> Fraction:
    return sum((b - a for a, b in u.intervals), Fraction(0))


@dataclass(frozen=True)
class ProductUnion:
    """Cartesian product of one-dimensional interval unions.

    Higher-dimensional slices and parameter sets are carried this way and
    never materialized as grids; the measure follows from Fubini.
    """

    factors: tuple[IntervalUnion, ...]

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def measure(self) -> Fraction:
        out = Fraction(1)
        for f in self.factors:
            out *= f.measure
        return out

    def contains(self, point: Sequence) -> bool:
        return len(point) == self.dim and all(f.contains(x) for f, x in zip(self.factors, point))
