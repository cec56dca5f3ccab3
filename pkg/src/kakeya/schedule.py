"""Parameter schedules ``(n_j, m_j)`` for the non-sticky construction.

Block ``j`` repeats the equal-pair round ``(n_j, n_j)`` exactly ``m_j`` times.
Two inequalities drive the synthesis:

* decay:  ``(1 - 4**(-2 n_j))**m_j < 2**-j``
* growth: ``sum_{i<=j} m_i * 4 n_i < epsilon * n_{j+1}``

Values grow doubly exponentially (``n_2 = 4401`` already forces ``m_2`` to have
thousands of digits), so everything is kept as Python integers and no grid is
ever built from a schedule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import mpmath

from .grid import as_fraction, int_str, interval_endpoints, parse_fraction, parse_int

DEFAULT_EPSILON = Fraction(1, 100)

# Exact powering is used while (q-1)**m stays below this many bits.
EXACT_POWER_BITS = 1 << 20
# Refuse n whose 4**(2n) would need more bits than this in interval arithmetic.
MAX_N_BITS = 1 << 22


class ScheduleTooLarge(ValueError):
    pass


class Block(NamedTuple):
    n: int
    m: int


def _decay_holds_exact(q: int, m: int, k: int) -> bool:
    # (1 - 1/q)**m < 2**-k  <=>  (q-1)**m * 2**k < q**m
    return (q - 1) ** m << k < q**m


def _ratio_interval(n: int, k: int, prec: int):
    """Enclosure of ``k ln 2 / -ln(1 - 4**-2n)`` at ``prec`` bits."""
    # a private context: the shared ``mpmath.iv`` precision is global state
    iv = mpmath.ctx_iv.MPIntervalContext()
    iv.prec = prec
    x = iv.mpf(1) / iv.mpf(4) ** (2 * n)
    ratio = k * iv.log(iv.mpf(2)) / (-iv.log(1 - x))
    return interval_endpoints(ratio)


def minimal_m(n: int, k: int) -> int:
    """Least ``m`` with ``(1 - 4**(-2n))**m < 2**-k``.

    Small cases are decided by exact integer powering around a float guess.
    Beyond that the threshold ``R = k ln2 / -ln(1 - 4**-2n)`` is enclosed with
    interval arithmetic until its floor is certain; the answer is
    ``floor(R) + 1`` because ``R`` is never an integer (that would need
    ``(4**2n - 1)**m * 2**k == 4**(2nm)``, impossible by parity).
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    if 4 * n > MAX_N_BITS:
        raise ScheduleTooLarge(
            f"n has {n.bit_length()} bits; 4^(2n) is beyond certified evaluation"
        )
    q = 4 ** (2 * n)
    if 4 * n <= 60:
        guess = int(k * math.log(2) / -math.log1p(-1 / q))
        if (guess + 2) * 4 * n <= EXACT_POWER_BITS:
            m = max(guess - 2, 0)
            while not _decay_holds_exact(q, m, k):
                m += 1
            while m > 0 and _decay_holds_exact(q, m - 1, k):
                m -= 1
            return m
    prec = 4 * n + k.bit_length() + 96
    while True:
        lo, hi = _ratio_interval(n, k, prec)
        f_lo, f_hi = math.floor(lo), math.floor(hi)
        if f_lo == f_hi:
            return f_lo + 1
        prec *= 2


def decay_holds(n: int, k: int, m: int) -> bool:
    """Certified test of ``(1 - 4**(-2n))**m < 2**-k``."""
    return m >= minimal_m(n, k)


def ratio_sums(blocks: Sequence[Block]) -> tuple[int, int]:
    """The two numerators of the growth condition: ``sum m(3n+n)`` and ``sum m(2n+2n)``."""
    first = sum(m * (3 * n + n) for n, m in blocks)
    second = sum(m * (2 * n + 2 * n) for n, m in blocks)
    return first, second


def minimal_next_n(blocks: Sequence[Block], epsilon=DEFAULT_EPSILON) -> int:
    """Least ``n'`` with both ratio sums ``< epsilon * n'``."""
    if not blocks:
        raise ValueError("need at least one completed block")
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    first, second = ratio_sums(blocks)
    # sum < eps*n'  <=>  n' > sum/eps  <=>  n' >= floor(sum/eps) + 1
    return max(math.floor(first / epsilon), math.floor(second / epsilon)) + 1


@dataclass(frozen=True)
class Schedule:
    blocks: tuple
    epsilon: Fraction = DEFAULT_EPSILON

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def total_rounds(self) -> int:
        return sum(b.m for b in self.blocks)

    def rounds(self, count: int) -> list[int]:
        """The first ``count`` round sizes, expanded (only for small counts)."""
        out: list[int] = []
        for n, m in self.blocks:
            take = min(m, count - len(out))
            out.extend([n] * take)
            if len(out) == count:
                break
        if len(out) < count:
            raise ValueError(f"schedule has only {self.total_rounds} rounds")
        return out

    def check(self) -> list[str]:
        """Re-verify the decay, minimality and growth conditions; returns problems."""
        problems = []
        for j, (n, m) in enumerate(self.blocks, start=1):
            least = minimal_m(n, j)
            if m < least:
                problems.append(f"block {j}: (1-4^-{2*n})^{m} >= 2^-{j}")
        for j in range(1, len(self.blocks)):
            first, second = ratio_sums(self.blocks[:j])
            n_next = self.blocks[j].n
            if not (first < self.epsilon * n_next and second < self.epsilon * n_next):
                problems.append(f"block {j + 1}: n={n_next} violates the growth ratio")
        return problems


def build_schedule(depth: int, epsilon=DEFAULT_EPSILON, *, extra_m: int = 0, extra_n: int = 0) -> Schedule:
    """Alternate ``minimal_next_n`` and ``minimal_m`` from ``n = 1``.

    ``extra_m``/``extra_n`` pad every choice; larger values stay valid.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    epsilon = as_fraction(epsilon)
    blocks: list[Block] = []
    n = 1
    for j in range(1, depth + 1):
        if j > 1:
            n = minimal_next_n(blocks, epsilon) + extra_n
        blocks.append(Block(n, minimal_m(n, j) + extra_m))
    return Schedule(tuple(blocks), epsilon)


def format_schedule(schedule: Schedule) -> str:
    eps = schedule.epsilon
    lines = [f"epsilon={int_str(eps.numerator)}/{int_str(eps.denominator)}"]
    lines += [f"n={int_str(n)} m={int_str(m)}" for n, m in schedule.blocks]
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> Schedule:
    epsilon = DEFAULT_EPSILON
    blocks = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("epsilon="):
            epsilon = parse_fraction(line.split("=", 1)[1])
            continue
        fields = dict(part.split("=", 1) for part in line.split())
        blocks.append(Block(parse_int(fields["n"]), parse_int(fields["m"])))
    return Schedule(tuple(blocks), epsilon)
