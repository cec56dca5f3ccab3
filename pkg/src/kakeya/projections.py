"""Exact one-dimensional projections of cell sets.

``slope`` projections use ``pi_lambda(x, y) = x + lambda*y``.  The diagonal
projections are taken in ``x + y`` and ``x - y`` coordinates so that exact
coincidence is an integer test; the orthogonal length differs by the factor
``1/sqrt(2)`` and is only applied in :func:`reported_measure`.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .grid import CellSet, IntervalUnion, as_fraction, frac_str, parse_fraction

INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class ProjectionSpec:
    kind: str = "slope"
    slope: Fraction = Fraction(0)
    report_metric: str = "xy"

    def __post_init__(self):
        if self.kind not in ("slope", "diag_plus", "diag_minus"):
            raise ValueError(f"unknown projection kind {self.kind!r}")
        if self.report_metric not in ("xy", "orthogonal"):
            raise ValueError("report_metric must be 'xy' or 'orthogonal'")
        object.__setattr__(self, "slope", as_fraction(self.slope))

    @classmethod
    def of_slope(cls, slope) -> "ProjectionSpec":
        return cls("slope", as_fraction(slope))

    @classmethod
    def parse(cls, text: str) -> "ProjectionSpec":
        """``diag_plus``, ``diag_minus`` or ``slope:p/q``."""
        if text in ("diag_plus", "diag_minus"):
            return cls(text)
        if text.startswith("slope:"):
            return cls.of_slope(parse_fraction(text[6:]))
        raise ValueError(f"unknown projection {text!r}")

    @property
    def label(self) -> str:
        return f"slope:{self.slope}" if self.kind == "slope" else self.kind


DIAG_PLUS = ProjectionSpec("diag_plus")
DIAG_MINUS = ProjectionSpec("diag_minus")


def _as_ints(arr: np.ndarray, bound: int) -> np.ndarray:
    return arr if bound < INT64_SAFE else arr.astype(object)


def projection_bounds(cells: CellSet, spec: ProjectionSpec) -> tuple[np.ndarray, int, int]:
    """Left endpoints, common width and denominator of the per-cell images."""
    side = 4**cells.exponent
    if spec.kind == "diag_plus":
        return cells.cols + cells.rows, 2, side
    if spec.kind == "diag_minus":
        return cells.cols - cells.rows - 1, 2, side
    p, q = spec.slope.numerator, spec.slope.denominator
    bound = (q + abs(p)) * (side + 1)
    cols = _as_ints(cells.cols, bound)
    rows = _as_ints(cells.rows, bound)
    if p >= 0:
        lo = q * cols + p * rows
    else:
        lo = q * cols + p * (rows + 1)
    return lo, q + abs(p), q * side


def project(cells: CellSet, spec: ProjectionSpec) -> IntervalUnion:
    """Image of the closed cells under the projection, as an exact union."""
    if len(cells) == 0:
        return IntervalUnion()
    lo, width, denom = projection_bounds(cells, spec)
    lo = np.unique(lo)
    return IntervalUnion.from_int_bounds(lo, lo + width, denom)


def project_measure(cells: CellSet, spec: ProjectionSpec) -> Fraction:
    return project(cells, spec).measure


def reported_measure(measure: Fraction, spec: ProjectionSpec) -> float | Fraction:
    """Measure in ``spec.report_metric``; orthogonal lengths are floats."""
    if spec.report_metric == "xy":
        return measure
    if spec.kind == "slope":
        return float(measure) / math.hypot(1.0, float(spec.slope))
    return float(measure) / math.sqrt(2.0)


def exact_overlap_pairs(cells: CellSet | Iterable[Sequence[int]], limit: int | None = None):
    """Unordered cell pairs with equal ``col+row`` and with equal ``col-row``.

    Equal sums mean identical ``x+y`` images; equal differences identical
    ``x-y`` images.  ``limit`` caps each list.
    """
    pairs = cells.pairs() if isinstance(cells, CellSet) else [tuple(p) for p in cells]
    plus, minus = defaultdict(list), defaultdict(list)
    for c, r in pairs:
        plus[c + r].append((c, r))
        minus[c - r].append((c, r))

    def collect(groups):
        out = []
        for key in sorted(groups):
            members = groups[key]
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    out.append((members[i], members[j]))
                    if limit is not None and len(out) >= limit:
                        return out
        return out

    return collect(plus), collect(minus)


def diag_measure_bound(schedule, rounds: int) -> Fraction:
    """``prod (1 - 4**(-2 n_j))`` over the first ``rounds`` rounds.

    ``schedule`` is a :class:`~kakeya.schedule.Schedule`, a sequence of round
    sizes, or a single ``n`` repeated.  In ``x+y`` units the diagonal shadow is
    at most twice this value (the unit square's shadow has length 2); in
    orthogonal units at most ``sqrt(2)`` times it.
    """
    if isinstance(schedule, int):
        sizes: Sequence[int] = [schedule] * rounds
    elif hasattr(schedule, "rounds") and callable(schedule.rounds):
        sizes = schedule.rounds(rounds)
    else:
        sizes = list(schedule)[:rounds]
        if len(sizes) < rounds:
            raise ValueError("not enough rounds in schedule")
    out = Fraction(1)
    for n in sizes:
        out *= 1 - Fraction(1, 4 ** (2 * n))
    return out


def measure_profile(states: Sequence, spec: ProjectionSpec) -> list[Fraction]:
    """Exact projection measure at each stage of a nested chain."""
    out = []
    for state in states:
        cells = state.cells if hasattr(state, "cells") else state
        out.append(project(cells, spec).measure)
    return out


def format_profile(profile: Sequence[Fraction], start: int = 0) -> str:
    return "".join(f"{i} {frac_str(m)}\n" for i, m in enumerate(profile, start=start))
