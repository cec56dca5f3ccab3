from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from kakeya.grid import int_str

from oracles import iterate_m, scan_next_n, series_m
from kakeya.schedule import (
    Block,
    Schedule,
    ScheduleTooLarge,
    build_schedule,
    decay_holds,
    format_schedule,
    minimal_m,
    minimal_next_n,
    parse_schedule,
    ratio_sums,
)


@pytest.mark.parametrize("n,k,expected", [(1, 1, 11), (1, 2, 22), (2, 1, 178)])
def test_minimal_m_examples(n, k, expected):
    assert minimal_m(n, k) == expected == iterate_m(n, k)


def test_fifteen_sixteenths_bracket():
    assert (F(15, 16)) ** 10 > F(1, 2) > (F(15, 16)) ** 11


@pytest.mark.parametrize("n,k", [(1, 3), (1, 5), (2, 2), (3, 1), (3, 2)])
def test_minimal_m_matches_iteration(n, k):
    assert minimal_m(n, k) == iterate_m(n, k)


def test_minimal_m_six_two():
    # exact powering here means ~5e8-bit integers; the series oracle decides it
    assert minimal_m(6, 2) == series_m(6, 2) == 23258160


def test_minimal_m_huge_against_series():
    m = minimal_m(4401, 2)
    assert m == series_m(4401, 2)
    digits = int_str(m)
    assert len(digits) == 5300 and digits.startswith("29778246829915518134")


def test_minimal_m_large_n_interval_path_agrees_with_series():
    for n in (16, 40, 100):
        assert minimal_m(n, 1) == series_m(n, 1)


def test_minimal_m_rejects_bad_input():
    with pytest.raises(ValueError):
        minimal_m(0, 1)
    with pytest.raises(ValueError):
        minimal_m(1, 0)


@pytest.mark.parametrize("eps,expected", [(F(1, 100), 4401), (F(1, 2), 89), (F(8), 6)])
def test_minimal_next_n_examples(eps, expected):
    blocks = [Block(1, 11)]
    assert minimal_next_n(blocks, eps) == expected == scan_next_n(blocks, eps)


def test_minimal_next_n_needs_blocks():
    with pytest.raises(ValueError):
        minimal_next_n([], F(1, 2))


def test_build_schedule_examples():
    assert build_schedule(1).blocks == (Block(1, 11),)
    two = build_schedule(2)
    assert two.blocks[1] == Block(4401, minimal_m(4401, 2))
    assert two.check() == []
    assert build_schedule(2, F(8)).blocks == (Block(1, 11), Block(6, 23258160))


def test_depth_three_is_refused():
    with pytest.raises(ScheduleTooLarge):
        build_schedule(3)


def test_schedule_round_trip_and_check():
    sched = build_schedule(2, F(1, 2))
    text = format_schedule(sched)
    assert text.startswith("epsilon=1/2\nn=1 m=11\nn=89 m=")
    again = parse_schedule(text)
    assert again == sched
    assert again.check() == []


def test_check_flags_tampering():
    bad = Schedule((Block(1, 10), Block(5, 1)), F(8))
    problems = bad.check()
    assert any("block 1" in p for p in problems)
    assert any("growth" in p for p in problems)


def test_padded_schedule_stays_valid():
    sched = build_schedule(2, F(8), extra_m=3, extra_n=2)
    assert sched.blocks[0] == Block(1, 14)
    assert sched.check() == []


def test_rounds_expansion():
    sched = build_schedule(2, F(8))
    assert sched.rounds(13) == [1] * 11 + [6, 6]
    with pytest.raises(ValueError):
        Schedule((Block(1, 2),)).rounds(3)


@given(st.integers(1, 3), st.integers(1, 4))
def test_minimality_both_sides(n, k):
    m = minimal_m(n, k)
    assert decay_holds(n, k, m)
    assert not decay_holds(n, k, m - 1)
    base = 1 - F(1, 4 ** (2 * n))
    assert base**m < F(1, 2**k) <= base ** (m - 1)


@given(
    st.lists(st.tuples(st.integers(1, 50), st.integers(1, 50)), min_size=1, max_size=4),
    st.fractions(min_value=F(1, 200), max_value=10),
    st.fractions(min_value=F(1, 200), max_value=10),
)
def test_minimal_next_n_monotone(blocks, e1, e2):
    blocks = [Block(n, m) for n, m in blocks]
    lo, hi = sorted((e1, e2))
    # antitone in epsilon
    assert minimal_next_n(blocks, lo) >= minimal_next_n(blocks, hi)
    # monotone in the block sums
    grown = blocks + [Block(1, 1)]
    assert minimal_next_n(grown, lo) >= minimal_next_n(blocks, lo)
    assert minimal_next_n(blocks, lo) == scan_next_n(blocks, lo)
    first, second = ratio_sums(blocks)
    assert first == second
