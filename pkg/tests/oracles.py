"""Independent reference computations shared by the unit and acceptance tests.

None of these call the code they check; they recompute from definitions with
plain loops, Decimal or floats.
"""
from decimal import Decimal, localcontext
from fractions import Fraction as F
from itertools import product
import math

from kakeya.grid import normalize


def iterate_m(n, k):
    """Oracle: step m until (1 - 4^-2n)^m < 2^-k, exactly."""
    base = 1 - F(1, 4 ** (2 * n))
    target = F(1, 2**k)
    value, m = F(1), 0
    while value >= target:
        value *= base
        m += 1
    return m


def series_m(n, k):
    """Oracle for huge n: Decimal series for k ln2 / -ln(1 - x), x = 4^-2n."""
    digits = int(2 * n * 0.60206) + 60
    with localcontext() as ctx:
        ctx.prec = digits
        x = Decimal(1) / (Decimal(4) ** (2 * n))
        denom = x + x * x / 2 + x * x * x / 3
        ratio = k * Decimal(2).ln() / denom
        floor = int(ratio)
        # the floor must be unambiguous at this precision
        assert Decimal(1) / 10**20 < ratio - floor < 1 - Decimal(1) / 10**20
    return floor + 1


def scan_next_n(blocks, eps):
    """Oracle: least n with sum < eps * n, by doubling then bisection."""
    first = sum(m * 4 * n for n, m in blocks)
    hi = 1
    while not first < eps * hi:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if first < eps * mid:
            hi = mid
        else:
            lo = mid
    return hi


def brute_project(cells, spec):
    """Oracle: per-cell image from the four corners, in Fractions."""
    side = F(1, 4**cells.exponent)
    pieces = []
    for c, r in cells:
        xs = [c * side, (c + 1) * side]
        ys = [r * side, (r + 1) * side]
        if spec.kind == "diag_plus":
            vals = [x + y for x in xs for y in ys]
        elif spec.kind == "diag_minus":
            vals = [x - y for x in xs for y in ys]
        else:
            vals = [x + spec.slope * y for x in xs for y in ys]
        pieces.append((min(vals), max(vals)))
    return normalize(pieces)


def digit_oracle(k):
    """Intervals [sum e_j 4^-j, + 4^-k] over all digit strings in {0,3}^k."""
    lefts = [sum(F(e, 4**j) for j, e in enumerate(digits, start=1)) for digits in product((0, 3), repeat=k)]
    return normalize((a, a + F(1, 4**k)) for a in lefts)


def plate_slice_oracle(lam, k):
    """Directly from the definition: (1 - lam) a + lam b, a in bottom, b in top."""
    top = digit_oracle(k)
    bottom = [(a / 2, b / 2) for a, b in top]
    return normalize(((1 - lam) * a0 + lam * b0, (1 - lam) * a1 + lam * b1) for a0, a1 in bottom for b0, b1 in top)


def independent_cover_check(cover, v_lo, v_hi):
    """Float angle arithmetic with a safety margin."""
    hi_angle = math.pi / 2 if v_hi == "inf" else math.atan(float(v_hi))
    arc = hi_angle - math.atan(float(v_lo))
    count = math.ceil(math.pi / arc - 1e-12)
    start = math.pi / 2 - hi_angle
    arcs = sorted(((start + k * math.pi / cover.count) % math.pi, arc) for k in range(cover.count))
    reach = arcs[0][0]
    for a, length in arcs:
        if a > reach + 1e-12:
            return False
        reach = max(reach, a + length)
    return count == cover.count and reach + 1e-12 >= arcs[0][0] + math.pi
