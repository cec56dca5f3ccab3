"""Acceptance criteria, one check per criterion.

Each check returns ``(passed, detail)``.  Under pytest every criterion appends
a ``[PASS]``/``[FAIL]`` line to the terminal summary; ``python
tests/test_acceptance.py`` prints the same lines and exits nonzero on failure.
"""
from fractions import Fraction as F
from pathlib import Path
import random
import sys
import tempfile

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kakeya.assembly import ParamFamily, area_estimate, rotation_cover, slice_at  # noqa: E402
from kakeya.cli import main  # noqa: E402
from kakeya.dimension import (  # noqa: E402
    CubeCounts,
    cube_entropy,
    hausdorff_upper_bound,
    packing_lower_ratio,
    scale_bits,
)
from kakeya.grid import CellSet, IntervalUnion  # noqa: E402
from kakeya.moran import StageState, build_state, make_round_pattern, pi0_cover, stage_chain, verify_conditions  # noqa: E402
from kakeya.projections import DIAG_MINUS, DIAG_PLUS, ProjectionSpec, measure_profile, project  # noqa: E402
from kakeya.schedule import Block, build_schedule, minimal_m, minimal_next_n, parse_schedule, format_schedule  # noqa: E402
from kakeya.sticky import (  # noqa: E402
    c0_stage,
    direction_box_certified,
    minkowski_sum,
    sticky_param_product_check,
    sticky_slice,
)
from oracles import digit_oracle, independent_cover_check, iterate_m, plate_slice_oracle, scan_next_n  # noqa: E402

GOLDENS = Path(__file__).parent / "goldens"
UNIT = IntervalUnion.interval(0, 1)


def _delete_mutation(state):
    i = len(state.cells) // 3
    cols = np.delete(state.cells.cols, i)
    rows = np.delete(state.cells.rows, i)
    report = verify_conditions(StageState(CellSet.from_arrays(state.exponent, cols, rows), state.history))
    cond = report["**"]
    return not cond.passed and cond.witness["global_column"] == int(state.cells.cols[i])


def _move_mutation(state, n):
    """Move one cell into an unchosen odd square of its own odd column."""
    e = state.exponent
    shift = 4**n  # fine units per odd square side
    cols, rows = state.cells.cols.copy(), state.cells.rows.copy()
    i = len(cols) // 2
    odd_col, odd_row = int(cols[i]) // shift, int(rows[i]) // shift
    parent_row = odd_row // 4**n
    taken = {int(r) // shift for c, r in zip(cols, rows) if int(c) // shift == odd_col}
    target = next(
        parent_row * 4**n + k for k in range(4**n) if parent_row * 4**n + k not in taken
    )
    rows[i] = target * shift + int(rows[i]) % shift
    report = verify_conditions(StageState(CellSet.from_arrays(e, cols, rows), state.history))
    cond = report["*"]
    return not cond.passed and cond.witness["global_column"] == odd_col


def criterion_1():
    cases = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]
    for n, rounds in cases:
        state = build_state([n] * rounds)
        if not verify_conditions(state).passed:
            return False, f"valid build n={n} r={rounds} rejected"
    for n, rounds in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)]:
        state = build_state([n] * rounds)
        if not _delete_mutation(state):
            return False, f"deleted cell not caught by (**) for n={n} r={rounds}"
        if not _move_mutation(state, n):
            return False, f"moved cell not caught by (*) for n={n} r={rounds}"
    return True, f"{len(cases)} valid builds pass; delete/move mutations fail (**)/(*) at the right column"


def criterion_2():
    builds = [s for n, r in [(1, 3), (2, 2)] for s in stage_chain(n, r)]
    builds += [build_state([1, 1], seed=s) for s in range(5)]
    builds.append(build_state([make_round_pattern(2, 1)] * 2))
    bad = [s for s in builds if pi0_cover(s) != UNIT]
    return not bad, f"pi0 cover is [0,1] on {len(builds)} stages"


def criterion_3():
    chain = stage_chain(1, 5)
    detail = []
    for spec in (DIAG_PLUS, DIAG_MINUS):
        prof = measure_profile(chain, spec)
        for r in range(1, 6):
            if not prof[r] <= F(15, 16) ** r:
                return False, f"{spec.label} stage {r}: {prof[r]} > (15/16)^{r}"
            if not prof[r] < prof[r - 1]:
                return False, f"{spec.label} not strictly decreasing at {r}"
        detail.append(f"{spec.label} r=5 {prof[5]}")
    if not (F(15, 16) ** 11 < F(1, 2) <= F(15, 16) ** 10 and minimal_m(1, 1) == 11):
        return False, "(15/16)^11 < 1/2 certificate failed"
    return True, "; ".join(detail) + "; (15/16)^11 < 1/2 <= (15/16)^10"


def criterion_4():
    got = (minimal_m(1, 1), minimal_m(1, 2), minimal_next_n([Block(1, 11)], F(1, 100)))
    want = (iterate_m(1, 1), iterate_m(1, 2), scan_next_n([(1, 11)], F(1, 100)))
    if got != (11, 22, 4401) or got != want:
        return False, f"got {got}, oracles {want}"
    sched = build_schedule(2)
    problems = sched.check() + parse_schedule(format_schedule(sched)).check()
    return not problems, f"11, 22, 4401 match oracles; schedule re-check problems: {problems or 'none'}"


def criterion_5():
    equal = CubeCounts.from_rounds([(1, 11), (2, 3)])
    for k in range(2, equal.stages + 1, 2):
        if packing_lower_ratio(equal, k) != 1 or hausdorff_upper_bound(equal, k) != 1:
            return False, f"equal-pair schedule stage {k} not 1"
    half = CubeCounts.from_rounds([(1, 11)], half_stage=4401)
    ratio = packing_lower_ratio(half, half.stages)
    if ratio != F(13247, 8846) or not ratio > 1:
        return False, f"half-stage ratio {ratio}"
    for counts in (equal, half):
        for k in range(1, counts.stages + 1):
            if cube_entropy(counts, k) / scale_bits(counts, k) != packing_lower_ratio(counts, k):
                return False, f"entropy/scale differs at stage {k}"
    return True, f"full rounds 1; half stage {ratio}; entropy/scale identity on all stages"


def criterion_6():
    rng = random.Random(20240601)
    for _ in range(100):
        rounds = rng.randint(0, 2)
        state = build_state([make_round_pattern(1, seed=rng.randrange(10**6))] * rounds)
        t = F(rng.randint(-60, 60), rng.randint(1, 30))
        if slice_at(ParamFamily(state.cells), t) != project(state.cells, ProjectionSpec.of_slope(t)):
            return False, f"mismatch at t={t}, rounds={rounds}"
    return True, "100 random (state, t) pairs agree exactly"


def criterion_7():
    full = IntervalUnion.interval(F(-1, 2), 1)
    for k in range(7):
        if c0_stage(k).intervals != digit_oracle(k):
            return False, f"c0 stage {k} differs from digit enumeration"
        if minkowski_sum(c0_stage(k), c0_stage(k), F(-1, 2)) != full:
            return False, f"C0 - C0/2 != [-1/2,1] at stage {k}"
    for k in range(4):
        if not sticky_param_product_check(k).passed:
            return False, f"parameter product check failed at k={k}"
    for d in (2, 3):
        if not all(direction_box_certified(k, d) for k in range(5)):
            return False, f"direction box failed for d={d}"
    if sticky_slice(F(2, 3), 1).factor != plate_slice_oracle(F(2, 3), 1):
        return False, "lambda=2/3 slice differs from the pairwise oracle"
    return True, "digits k<=6, -1/2 sums k<=6, product k<=3, box d=2,3, lambda=2/3 slice"


def criterion_8():
    cover = rotation_cover(0, 1)
    ok = cover.count == 4 and cover.verify() and independent_cover_check(cover, 0, 1)
    return ok, f"{cover.count} rotations, exact re-check {cover.verify()}, float re-check {independent_cover_check(cover, 0, 1)}"


def criterion_9():
    values = [area_estimate(ParamFamily(s.cells), 64) for s in stage_chain(1, 3)[1:]]
    ok = all(b < a for a, b in zip(values, values[1:]))
    return ok, "areas r=1,2,3: " + ", ".join(f"{float(v):.4f}" for v in values)


FIGURE_GOLDENS = {
    "stages_default.svg": ["--figure", "stages", "--rounds", "2"],
    "stages_drawn.svg": ["--figure", "stages", "--rounds", "2", "--source", "drawn"],
    "fan_nonsticky.svg": ["--figure", "fan-nonsticky", "--slice-t", "1/2"],
    "fan_sticky.svg": ["--figure", "fan-sticky", "--k", "2", "--slice-t", "1/2"],
}


def criterion_10():
    with tempfile.TemporaryDirectory() as tmp:
        for name, args in FIGURE_GOLDENS.items():
            out = Path(tmp) / name
            if main(["render", *args, "--out", str(out)]) != 0:
                return False, f"render failed for {name}"
            if out.read_bytes() != (GOLDENS / name).read_bytes():
                return False, f"{name} differs from its golden"
    return True, f"{len(FIGURE_GOLDENS)} figures byte-identical"


CRITERIA = [
    (1, "condition suite", criterion_1),
    (2, "unit vertical shadow", criterion_2),
    (3, "diagonal projection decay", criterion_3),
    (4, "schedule synthesis", criterion_4),
    (5, "dimension ratios", criterion_5),
    (6, "duality oracle", criterion_6),
    (7, "sticky suite", criterion_7),
    (8, "rotation cover", criterion_8),
    (9, "area monotonicity", criterion_9),
    (10, "figure regression", criterion_10),
]


def run_criterion(number, title, check):
    passed, detail = check()
    return passed, f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}: {detail}"


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, acceptance_log):
    passed, line = run_criterion(number, title, check)
    acceptance_log.append(line)
    print(line)
    assert passed, line


if __name__ == "__main__":
    failures = 0
    for number, title, check in CRITERIA:
        passed, line = run_criterion(number, title, check)
        print(line, flush=True)
        failures += not passed
    sys.exit(1 if failures else 0)
