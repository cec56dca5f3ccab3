"""Non-sticky Moran construction: round patterns, stage states, verification.

A *round* is an odd stage followed by an even stage.  In every parent square
the odd stage keeps ``2**(3*n_odd)`` of the ``4**n_odd x 4**n_odd`` subsquares,
exactly ``2**n_odd`` per column; the even stage keeps ``2**n_even`` children of
every odd square so that every fine column of the parent is hit, with at
least one pair of children on a common diagonal and one on a common
anti-diagonal.  The same composite pattern is reused in every parent.

Default layout ("staircase")
----------------------------
In coarse column ``j`` the odd squares are stacked at coarse rows
``b_j, b_j+1, ..., b_j+2**n_odd-1`` where ``b_j`` follows the coarse
anti-diagonal, clamped so the stack fits.  Odd square ``i`` of the column gets
the fine subcolumns ``i*2**n_even + s`` (mod ``4**n_even``) and local rows
``4**n_even - (i+1)*2**n_even + s`` (mod ``4**n_even``), for
``s = 0 .. 2**n_even-1``.  Children of one odd square therefore lie on a
diagonal, the pigeonhole assignment covers every fine subcolumn, and the
clamped anti-diagonal stacking keeps the diagonal shadows small.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .grid import CellSet, IntervalUnion


@dataclass(frozen=True)
class RoundPattern:
    """Offsets chosen inside one parent square during a round.

    ``odd_offsets`` live on the ``4**n_odd`` grid; ``composite`` on the
    ``4**(n_odd+n_even)`` grid.  ``even_offsets`` maps each odd offset to the
    local positions of its children on the ``4**n_even`` grid.
    """

    n_odd: int
    n_even: int
    odd_offsets: frozenset
    even_offsets: dict = field(hash=False, compare=False)
    composite: tuple

    @property
    def n(self) -> int:
        return self.n_odd

    @property
    def composite_exponent(self) -> int:
        return self.n_odd + self.n_even

    def composite_cells(self) -> CellSet:
        return CellSet.from_pairs(self.composite_exponent, self.composite)

    @classmethod
    def from_children(cls, n_odd: int, n_even: int, children: dict) -> "RoundPattern":
        g_even = 4**n_even
        composite = sorted(
            (oc * g_even + lc, orow * g_even + lr)
            for (oc, orow), kids in children.items()
            for lc, lr in kids
        )
        return cls(
            n_odd,
            n_even,
            frozenset(children),
            {k: frozenset(v) for k, v in children.items()},
            tuple(composite),
        )

    @classmethod
    def from_composite(cls, n_odd: int, n_even: int, composite: Iterable[Sequence[int]]) -> "RoundPattern":
        g_even = 4**n_even
        children: dict = {}
        for c, r in composite:
            children.setdefault((c // g_even, r // g_even), set()).add((c % g_even, r % g_even))
        return cls.from_children(n_odd, n_even, children)


def _check_n(n_odd: int, n_even: int) -> None:
    if n_odd < 1 or n_even < 1:
        raise ValueError("round sizes must be >= 1 (each stage needs N_k >= 2)")
    if n_odd < n_even:
        raise ValueError("the column pigeonhole needs n_odd >= n_even")


def _staircase(n_odd: int, n_even: int) -> dict:
    g_odd, h_odd = 4**n_odd, 2**n_odd
    g_even, h_even = 4**n_even, 2**n_even
    children = {}
    for j in range(g_odd):
        base = min(max(g_odd - 1 - j, 0), g_odd - h_odd)
        for i in range(h_odd):
            kids = set()
            for s in range(h_even):
                kids.add(((i * h_even + s) % g_even, (g_even - (i + 1) * h_even + s) % g_even))
            children[(j, base + i)] = kids
    return children


def _random_children(n_odd: int, n_even: int, rng: random.Random) -> dict:
    g_odd, h_odd = 4**n_odd, 2**n_odd
    g_even, h_even = 4**n_even, 2**n_even
    children = {}
    for j in range(g_odd):
        odd_rows = rng.sample(range(g_odd), h_odd)
        slots = [(i, s) for i in range(h_odd) for s in range(h_even)]
        rng.shuffle(slots)
        subcols = list(range(g_even))
        rng.shuffle(subcols)
        assigned = {i: [] for i in range(h_odd)}
        for k, (i, _) in enumerate(slots):
            col = subcols[k] if k < g_even else rng.randrange(g_even)
            assigned[i].append(col)
        for i, row in enumerate(odd_rows):
            kids: set = set()
            for col in assigned[i]:
                free = [r for r in range(g_even) if (col, r) not in kids]
                kids.add((col, rng.choice(free)))
            children[(j, row)] = kids
    return children


def make_round_pattern(n: int, n_even: int | None = None, *, seed: int | None = None, max_tries: int = 10_000) -> RoundPattern:
    """Pattern for one round; ``seed`` switches to a random valid pattern.

    The random generator draws uniformly structured choices and rejects draws
    that miss either exact-overlap pair.
    """
    n_even = n if n_even is None else n_even
    _check_n(n, n_even)
    if seed is None:
        return RoundPattern.from_children(n, n_even, _staircase(n, n_even))
    rng = random.Random(seed)
    for _ in range(max_tries):
        pattern = RoundPattern.from_children(n, n_even, _random_children(n, n_even, rng))
        sums = [c + r for c, r in pattern.composite]
        diffs = [c - r for c, r in pattern.composite]
        if len(set(sums)) < len(sums) and len(set(diffs)) < len(diffs):
            return pattern
    raise RuntimeError(f"no random pattern with both overlap pairs in {max_tries} draws")


@dataclass(frozen=True)
class StageState:
    """Cells of the current stage plus the ``(kind, n)`` record of each stage."""

    cells: CellSet
    history: tuple = ()

    @classmethod
    def initial(cls) -> "StageState":
        return cls(CellSet.unit(), ())

    @property
    def rounds(self) -> list[tuple[int, int]]:
        """``(n_odd, n_even)`` per completed round."""
        odd = [n for kind, n in self.history if kind == "odd"]
        even = [n for kind, n in self.history if kind == "even"]
        return list(zip(odd, even))

    @property
    def exponent(self) -> int:
        return self.cells.exponent

    def expected_count(self) -> int:
        return 2 ** sum(3 * a + b for a, b in self.rounds)


def apply_round(state: StageState, pattern: RoundPattern) -> StageState:
    """Replace every cell by the pattern's composite offsets."""
    k = 4**pattern.composite_exponent
    comp = np.array(pattern.composite, dtype=np.int64)
    cells = state.cells
    new_cols = (cells.cols[:, None] * k + comp[None, :, 0]).ravel()
    new_rows = (cells.rows[:, None] * k + comp[None, :, 1]).ravel()
    out = CellSet.from_arrays(
        cells.exponent + pattern.composite_exponent,
        new_cols,
        new_rows,
        cells.stage + 2,
        validate=False,
    )
    return StageState(out, state.history + (("odd", pattern.n_odd), ("even", pattern.n_even)))


def apply_odd_stage(cells: CellSet, pattern: RoundPattern) -> CellSet:
    """Cells after only the odd half of a round (for figures and half-stage counts)."""
    k = 4**pattern.n_odd
    odd = np.array(sorted(pattern.odd_offsets), dtype=np.int64)
    cols = (cells.cols[:, None] * k + odd[None, :, 0]).ravel()
    rows = (cells.rows[:, None] * k + odd[None, :, 1]).ravel()
    return CellSet.from_arrays(cells.exponent + pattern.n_odd, cols, rows, cells.stage + 1, validate=False)


def half_stage_cells(pattern: RoundPattern, stages: int) -> list[CellSet]:
    """Cell sets after stages ``1 .. stages``, alternating odd and even halves."""
    out = []
    state = StageState.initial()
    for k in range(1, stages + 1):
        if k % 2:
            out.append(apply_odd_stage(state.cells, pattern))
        else:
            state = apply_round(state, pattern)
            out.append(state.cells)
    return out


def build_state(rounds: Iterable, *, seed: int | None = None) -> StageState:
    """Apply one round per entry; entries are ``n``, ``(n_odd, n_even)`` or patterns."""
    state = StageState.initial()
    for item in rounds:
        if isinstance(item, RoundPattern):
            pattern = item
        elif isinstance(item, tuple):
            pattern = make_round_pattern(item[0], item[1], seed=seed)
        else:
            pattern = make_round_pattern(item, seed=seed)
        state = apply_round(state, pattern)
    return state


def stage_chain(n: int, rounds: int) -> list[StageState]:
    """States after 0, 1, ..., ``rounds`` rounds with the default pattern."""
    pattern = make_round_pattern(n)
    states = [StageState.initial()]
    for _ in range(rounds):
        states.append(apply_round(states[-1], pattern))
    return states


def pi0_cover(state: StageState | CellSet) -> IntervalUnion:
    cells = state.cells if isinstance(state, StageState) else state
    return cells.x_shadow()


# -- snapshots -----------------------------------------------------------------


def format_snapshot(state: StageState | CellSet) -> str:
    """``scale_exponent=S``, an optional ``rounds=`` line, then ``col row`` lines."""
    cells = state.cells if isinstance(state, StageState) else state
    lines = [f"scale_exponent={cells.exponent}"]
    if isinstance(state, StageState) and state.history:
        lines.append("rounds=" + ",".join(f"{a}:{b}" for a, b in state.rounds))
    lines += [f"{c} {r}" for c, r in cells]
    return "\n".join(lines) + "\n"


def parse_snapshot(text: str) -> StageState:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("scale_exponent="):
        raise ValueError("snapshot must start with scale_exponent=<S>")
    exponent = int(lines[0].split("=", 1)[1])
    history: tuple = ()
    body = lines[1:]
    if body and body[0].startswith("rounds="):
        spec = body.pop(0).split("=", 1)[1]
        for item in filter(None, spec.split(",")):
            a, _, b = item.partition(":")
            history += (("odd", int(a)), ("even", int(b)))
    pairs = [tuple(int(x) for x in ln.split()) for ln in body]
    if any(len(p) != 2 for p in pairs):
        raise ValueError("snapshot lines must be 'col row'")
    return StageState(CellSet.from_pairs(exponent, pairs, stage=len(history)), history)


# -- verification -----------------------------------------------------------

CONDITIONS = ("*", "**", "***", "M", "count")


@dataclass
class ConditionResult:
    name: str
    passed: bool = True
    round: int | None = None
    witness: dict | None = None
    detail: str = ""

    def fail(self, round_index: int, detail: str, **witness) -> None:
        if self.passed:
            self.passed = False
            self.round = round_index
            self.detail = detail
            self.witness = witness

    def as_dict(self) -> dict:
        return {
            "condition": self.name,
            "passed": self.passed,
            "round": self.round,
            "witness": self.witness,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    results: dict
    rounds: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def __getitem__(self, name: str) -> ConditionResult:
        return self.results[name]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rounds": [{"n_odd": a, "n_even": b} for a, b in self.rounds],
            "conditions": [self.results[name].as_dict() for name in CONDITIONS],
        }


def _ancestors(cells: CellSet, exponent: int) -> tuple[np.ndarray, np.ndarray]:
    shift = 2 * (cells.exponent - exponent)
    key = np.unique(((cells.cols >> shift) << (2 * exponent)) | (cells.rows >> shift))
    return key >> (2 * exponent), key & ((1 << (2 * exponent)) - 1)


def _group(parent_key: np.ndarray, local_key: np.ndarray, local_bits: int):
    """Sort by (parent, local) and return unique parents, starts, and sorted locals."""
    combined = np.sort((parent_key << local_bits) | local_key)
    parents = combined >> local_bits
    locals_ = combined & ((1 << local_bits) - 1)
    uniq, starts, counts = np.unique(parents, return_index=True, return_counts=True)
    return uniq, starts, counts, locals_


def _split_key(key: int, exponent: int) -> list[int]:
    return [int(key >> (2 * exponent)), int(key & ((1 << (2 * exponent)) - 1))]


def verify_conditions(state: StageState, pattern_history: Sequence | None = None) -> VerificationReport:
    """Check every round of ``state`` against the construction rules.

    ``pattern_history`` holds one ``RoundPattern`` or ``(n_odd, n_even)`` per
    round; it defaults to the state's own history.  Failures carry the first
    counterexample found (parent cell, column, offsets).
    """
    if pattern_history is None:
        pattern_history = state.rounds
    rounds = []
    patterns = []
    for item in pattern_history:
        if isinstance(item, RoundPattern):
            rounds.append((item.n_odd, item.n_even))
            patterns.append(item)
        else:
            rounds.append((int(item[0]), int(item[1])))
            patterns.append(None)

    results = {name: ConditionResult(name) for name in CONDITIONS}
    cells = state.cells
    total = sum(a + b for a, b in rounds)
    if total != cells.exponent:
        for name in CONDITIONS:
            results[name].fail(0, f"history sums to exponent {total}, cells are at {cells.exponent}")
        return VerificationReport(results, rounds)
    if len(cells) == 0:
        for name in CONDITIONS:
            results[name].fail(0, "empty cell set")
        return VerificationReport(results, rounds)

    s_parent = 0
    for index, ((n_odd, n_even), pattern) in enumerate(zip(rounds, patterns), start=1):
        s_odd = s_parent + n_odd
        s_round = s_odd + n_even
        n_round = n_odd + n_even
        coord_bits = 2 * n_round

        pc, pr = _ancestors(cells, s_parent)
        oc, orow = _ancestors(cells, s_odd)
        rc, rr = _ancestors(cells, s_round)

        # (*): distinct odd squares per odd-scale column of each parent
        o_parent = ((oc >> (2 * n_odd)) << (2 * s_parent)) | (orow >> (2 * n_odd))
        o_local = ((oc & (4**n_odd - 1)) << (2 * n_odd)) | (orow & (4**n_odd - 1))
        uniq, starts, counts, locs = _group(o_parent, o_local, 4 * n_odd)
        seg = np.repeat(np.arange(uniq.size, dtype=np.int64), counts)
        g_odd = 4**n_odd
        col_counts = np.bincount(seg * g_odd + (locs >> (2 * n_odd)), minlength=uniq.size * g_odd)
        want = 2**n_odd
        bad = np.flatnonzero(col_counts != want)
        if bad.size:
            p_idx, col = divmod(int(bad[0]), g_odd)
            p_key = int(uniq[p_idx])
            results["*"].fail(
                index,
                f"odd column holds {int(col_counts[bad[0]])} squares, expected {want}",
                parent=_split_key(p_key, s_parent),
                column=col,
                global_column=(p_key >> (2 * s_parent)) * g_odd + col,
                count=int(col_counts[bad[0]]),
            )

        # children per odd square
        c_parent = ((rc >> (2 * n_even)) << (2 * s_odd)) | (rr >> (2 * n_even))
        c_uniq, ccounts = np.unique(c_parent, return_counts=True)
        bad = np.flatnonzero(ccounts != 2**n_even)
        if bad.size:
            key = int(c_uniq[bad[0]])
            results["count"].fail(
                index,
                f"odd square has {int(ccounts[bad[0]])} children, expected {2**n_even}",
                odd_square=_split_key(key, s_odd),
                count=int(ccounts[bad[0]]),
            )

        # per-parent composite offsets
        r_parent = ((rc >> coord_bits) << (2 * s_parent)) | (rr >> coord_bits)
        mask = 4**n_round - 1
        r_local = ((rc & mask) << coord_bits) | (rr & mask)
        uniq, starts, counts, locs = _group(r_parent, r_local, 2 * coord_bits)
        lcol = locs >> coord_bits
        lrow = locs & mask

        # (**): every fine column of every parent hit
        n_cols = 4**n_round
        seg = np.repeat(np.arange(uniq.size, dtype=np.int64), counts)
        hit = np.bincount(seg * n_cols + lcol, minlength=uniq.size * n_cols)
        empty = np.flatnonzero(hit == 0)
        if empty.size:
            p_idx, col = divmod(int(empty[0]), n_cols)
            p_key = int(uniq[p_idx])
            results["**"].fail(
                index,
                "fine column of a parent contains no chosen square",
                parent=_split_key(p_key, s_parent),
                column=col,
                global_column=(p_key >> (2 * s_parent)) * n_cols + col,
            )

        # (***): both exact-overlap pairs in every parent
        for label, values in (("diag_plus", lcol + lrow), ("diag_minus", lcol - lrow + n_cols)):
            key = np.unique((seg << (coord_bits + 2)) | values, return_counts=True)
            has_pair = np.zeros(uniq.size, dtype=bool)
            has_pair[key[0][key[1] > 1] >> (coord_bits + 2)] = True
            if not has_pair.all():
                bad_parent = int(uniq[np.flatnonzero(~has_pair)[0]])
                results["***"].fail(
                    index,
                    f"no pair of squares with coinciding {label} projection",
                    parent=_split_key(bad_parent, s_parent),
                    projection=label,
                )
                break

        # (M): identical offsets in every parent
        reference = None
        if pattern is not None:
            reference = np.array(sorted((c << coord_bits) | r for c, r in pattern.composite), dtype=np.int64)
        else:
            reference = locs[starts[0]:starts[0] + counts[0]]
        if np.all(counts == reference.size):
            table = locs.reshape(uniq.size, reference.size)
            diff = np.flatnonzero(np.any(table != reference[None, :], axis=1))
            bad_idx = int(diff[0]) if diff.size else None
        else:
            bad_idx = int(np.flatnonzero(counts != reference.size)[0])
        if bad_idx is not None:
            row = locs[starts[bad_idx]:starts[bad_idx] + counts[bad_idx]]
            extra = np.setdiff1d(row, reference)
            missing = np.setdiff1d(reference, row)
            results["M"].fail(
                index,
                "parent pattern differs from the reference pattern",
                parent=_split_key(int(uniq[bad_idx]), s_parent),
                extra=[_split_key(int(x), n_round) for x in extra[:4]],
                missing=[_split_key(int(x), n_round) for x in missing[:4]],
            )

        s_parent = s_round

    return VerificationReport(results, rounds)


# -- reference fixture --------------------------------------------------------

# Squares transcribed from a reference drawing of one round, as (col, row) with
# row 0 at the bottom.  Left panel: odd stage on the 4x4 grid.  Right panel:
# the 16 squares of the second stage on the 16x16 grid.
DRAWN_ODD = (
    (0, 1), (0, 3), (1, 0), (1, 2), (2, 0), (2, 3), (3, 1), (3, 2),
)
DRAWN_COMPOSITE = (
    (0, 14), (1, 5), (2, 13), (3, 6), (4, 3), (5, 9), (6, 10), (7, 2),
    (8, 1), (9, 14), (10, 0), (11, 12), (12, 10), (13, 4), (14, 6), (15, 8),
)


def drawn_pattern() -> RoundPattern:
    return RoundPattern.from_composite(1, 1, DRAWN_COMPOSITE)
