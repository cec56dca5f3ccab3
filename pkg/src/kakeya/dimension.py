"""Finite-stage dimension bookkeeping for nested cube constructions.

A construction is described stage by stage by a subdivision factor ``N_k``
(each cube splits into ``N_k**d`` subcubes) and a running count ``M_k`` of
cubes kept *per parent*.  Only powers of two are admitted, so every log ratio
is a ratio of integer exponents and is returned as an exact Fraction.

The natural measure gives each stage-``k`` cube mass ``1/(M_1...M_k)``, so the
cube-level entropy is exactly ``log2(M_1...M_k)`` bits.  The ball-versus-cube
constant that appears when passing to metric entropy is not modelled; it
cancels in every ratio reported here.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .grid import CellSet, int_str


def _log2_exact(value: int, what: str) -> int:
    if value < 1 or value & (value - 1):
        raise ValueError(f"{what}={value} is not a power of two")
    return value.bit_length() - 1


@dataclass(frozen=True)
class CubeCounts:
    """Per-stage ``(log2 N_k, log2 M_k)`` exponents, run-length encoded.

    ``runs`` holds ``(period, repeat)`` items where ``period`` is a tuple of
    ``(eN, eM)`` stages laid down ``repeat`` times in order.  A Moran block is
    one run with a two-stage period, so a repeat count with thousands of
    digits costs nothing.
    """

    runs: tuple
    d: int = 2

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("ambient dimension must be >= 1")
        for period, rep in self.runs:
            if not period or rep < 1:
                raise ValueError("runs need a non-empty period and a positive repeat")
            for e_n, e_m in period:
                if e_n < 1:
                    raise ValueError("subdivision factor must be >= 2")
                if not 0 <= e_m <= self.d * e_n:
                    raise ValueError("cube count exceeds N**d")

    @classmethod
    def from_counts(cls, pairs: Iterable[Sequence[int]], d: int = 2, repeat: int = 1) -> "CubeCounts":
        """From literal ``(N_k, M_k)`` pairs, optionally repeated as a block."""
        period = tuple((_log2_exact(n, "N"), _log2_exact(m, "M")) for n, m in pairs)
        return cls(((period, repeat),), d)

    @classmethod
    def from_rounds(cls, rounds: Iterable, half_stage: int | None = None) -> "CubeCounts":
        """Stages of a Moran schedule.

        ``rounds`` holds ``(n, m)`` blocks (equal pairs, e.g. a
        :class:`~kakeya.schedule.Schedule`) or ``(n_odd, n_even, m)`` triples.
        A round contributes an odd stage (``N = 4**n_odd``, ``M = 2**(3 n_odd)``)
        and an even stage (``N = 4**n_even``, ``M = 2**n_even``).
        ``half_stage`` appends one further odd stage.
        """
        runs = []
        for item in rounds:
            if len(item) == 3:
                a, b, rep = item
            else:
                (a, rep), b = item, item[0]
            runs.append((((2 * a, 3 * a), (2 * b, b)), rep))
        if half_stage is not None:
            runs.append((((2 * half_stage, 3 * half_stage),), 1))
        return cls(tuple(runs), 2)

    @classmethod
    def from_state(cls, state) -> "CubeCounts":
        """Counts implied by a :class:`~kakeya.moran.StageState` history."""
        period = tuple((2 * n, 3 * n if kind == "odd" else n) for kind, n in state.history)
        return cls(((period, 1),) if period else (), 2)

    @property
    def stages(self) -> int:
        return sum(len(period) * rep for period, rep in self.runs)

    def exponent_sums(self, k: int) -> tuple[int, int]:
        """``(log2(N_1...N_k), log2(M_1...M_k))``."""
        if not 0 <= k <= self.stages:
            raise ValueError(f"k={k} outside 0..{self.stages}")
        s_n = s_m = 0
        left = k
        for period, rep in self.runs:
            full, part = divmod(min(left, len(period) * rep), len(period))
            s_n += full * sum(e for e, _ in period) + sum(e for e, _ in period[:part])
            s_m += full * sum(e for _, e in period) + sum(e for _, e in period[:part])
            left -= full * len(period) + part
            if not left:
                break
        return s_n, s_m

    def stage_pairs(self, limit: int = 1 << 16) -> list[tuple[int, int]]:
        """Expanded ``(N_k, M_k)`` pairs, at most ``limit`` of them."""
        out = []
        for period, rep in self.runs:
            for _ in range(min(rep, limit)):
                for e_n, e_m in period:
                    if len(out) >= limit:
                        return out
                    out.append((1 << e_n, 1 << e_m))
        return out


def packing_lower_ratio(counts: CubeCounts, k: int) -> Fraction:
    """``log2(M_1...M_k) / log2(N_1...N_k)``."""
    s_n, s_m = counts.exponent_sums(k)
    if s_n == 0:
        raise ValueError("k must be >= 1")
    return Fraction(s_m, s_n)


def hausdorff_upper_bound(counts: CubeCounts, k: int) -> Fraction:
    """``M_k * delta_k`` with ``delta_k = 1/(N_1...N_k)``; the bound is ``sqrt(2)`` times this."""
    s_n, s_m = counts.exponent_sums(k)
    return Fraction(2) ** (s_m - s_n)


def cube_entropy(counts: CubeCounts, k: int) -> Fraction:
    """Entropy in bits of the uniform natural measure on the stage-``k`` cubes."""
    return Fraction(counts.exponent_sums(k)[1])


def scale_bits(counts: CubeCounts, k: int) -> Fraction:
    """``-log2 r_k`` for the stage side ``r_k = 1/(N_1...N_k)``."""
    return Fraction(counts.exponent_sums(k)[0])


def box_count(cells: CellSet, exponent: int) -> int:
    """Number of distinct cells of side ``4**-exponent`` meeting the set."""
    if exponent > cells.exponent:
        raise ValueError("box exponent must not exceed the cell set's exponent")
    return len(cells.coarsen(exponent))


def product_box_count(first: CellSet, second: CellSet, exponent: int) -> int:
    """Box count of ``first x second`` in four dimensions, by enumeration."""
    a = first.coarsen(exponent)
    b = second.coarsen(exponent)
    ia, ib = np.meshgrid(np.arange(len(a)), np.arange(len(b)), indexing="ij")
    ia, ib = ia.ravel(), ib.ravel()
    boxes = np.stack([a.cols[ia], a.rows[ia], b.cols[ib], b.rows[ib]], axis=1)
    return int(len(np.unique(boxes, axis=0)))


def dimension_report(counts: CubeCounts, stages: Iterable[int] | None = None) -> list[dict]:
    """JSON-ready rows; numerators and denominators are decimal strings."""
    if stages is None:
        stages = range(1, min(counts.stages, 256) + 1)
    rows = []
    for k in stages:
        ratio = packing_lower_ratio(counts, k)
        bound = hausdorff_upper_bound(counts, k)
        rows.append(
            {
                "stage": k,
                "ratio_num": int_str(ratio.numerator),
                "ratio_den": int_str(ratio.denominator),
                "entropy_bits": int_str(int(cube_entropy(counts, k))),
                "hmeasure_bound_num": int_str(bound.numerator),
                "hmeasure_bound_den": int_str(bound.denominator),
            }
        )
    return rows


def format_report(counts: CubeCounts, stages: Iterable[int] | None = None) -> str:
    return json.dumps({"d": counts.d, "stages": dimension_report(counts, stages)}, indent=2) + "\n"
