from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from limlab.ordcomb import (
    CycleSeq,
    aligned_types,
    build_type_cycle,
    check_type_cycle,
    is_aligned_sets,
    is_aligned_type,
    parse_ordset,
    realize_type,
    swap_type,
    type_of,
    type_width,
    verify_type_cycle,
)
from oracles import naive_cycle_ok, naive_type


@pytest.mark.parametrize("u,v,expected", [
    ((1, 2), (2, 3), "021"),
    ((5,), (5,), "2"),
    ((0, 1), (2, 3), "0011"),
])
def test_type_of_examples(u, v, expected):
    assert type_of(u, v) == expected


def test_type_of_rejects_size_mismatch():
    with pytest.raises(ValueError, match="equal nonzero sizes"):
        type_of((0, 1), (2,))


@pytest.mark.parametrize("u,v,expected", [
    ((0, 2), (1, 2), True),
    ((0, 1), (1, 2), False),
    ((4,), (4,), True),
])
def test_aligned_sets_examples(u, v, expected):
    assert is_aligned_sets(u, v) is expected


@pytest.mark.parametrize("t,expected", [("2", True), ("021", False), ("001011", True), ("01", True)])
def test_aligned_type_examples(t, expected):
    assert is_aligned_type(t) is expected


@pytest.mark.parametrize("bad", ["", "0", "00122", "0a1"])
def test_malformed_types_rejected(bad):
    with pytest.raises(ValueError):
        type_width(bad)


def test_021_agrees_with_sets():
    assert is_aligned_type("021") == is_aligned_sets((1, 2), (2, 3))


def test_small_cycles_match_hand_constructions():
    assert build_type_cycle("2").sets == ((0,), (0,), (0,))
    assert build_type_cycle("01").sets == ((0,), (2,), (1,))


def test_verify_cycle_examples():
    assert verify_type_cycle("2", [(0,), (0,), (0,)])
    assert not verify_type_cycle("01", [(0,), (1,), (2,)])
    assert verify_type_cycle("01", [(0,), (2,), (1,)])


def test_check_reports_failing_pair():
    msg = check_type_cycle("01", [(0,), (1,), (2,)])
    assert "u_2, u_1" in msg


def test_cycle_seq_validation():
    with pytest.raises(ValueError):
        CycleSeq(((0,), (1,)))
    with pytest.raises(ValueError):
        CycleSeq(((0,), (1, 2), (3,)))


def test_non_aligned_rejected():
    with pytest.raises(ValueError, match="not aligned"):
        build_type_cycle("021")


def test_001011():
    c = build_type_cycle("001011")
    assert naive_cycle_ok("001011", c.sets)


def test_every_aligned_type_up_to_7_has_verified_cycle():
    count = 0
    for t in aligned_types(7):
        c = build_type_cycle(t)
        assert naive_cycle_ok(t, c.sets), t
        count += 1
    assert count == len(set(aligned_types(7)))


def test_aligned_types_enumeration_matches_filter():
    from itertools import product
    brute = set()
    for length in range(1, 6):
        for s in product("012", repeat=length):
            t = "".join(s)
            if t.count("0") != t.count("1"):
                continue
            zeros = ones = 0
            good = True
            for c in t:
                if c == "2" and zeros != ones:
                    good = False
                zeros += c == "0"
                ones += c == "1"
            if good:
                brute.add(t)
    assert set(aligned_types(5)) == brute


subsets = st.sets(st.integers(0, 12), min_size=1, max_size=5)


@given(subsets, subsets)
def test_type_of_matches_merge_walk(u, v):
    if len(u) != len(v):
        return
    assert type_of(u, v) == naive_type(u, v)


@given(subsets)
def test_swap_is_type_of_swapped_pair(u):
    v = tuple(sorted(x + 1 for x in u))
    assert type_of(v, u) == swap_type(type_of(u, v))


@settings(max_examples=200)
@given(st.text(alphabet="012", min_size=1, max_size=8))
def test_realize_type_roundtrip(t):
    try:
        type_width(t)
    except ValueError:
        return
    u, v = realize_type(t)
    assert type_of(u, v) == t
    assert is_aligned_sets(u, v) == is_aligned_type(t)


def test_alignment_equivalence_small_universe():
    universe = range(8)
    for k in range(1, 4):
        for u in combinations(universe, k):
            for v in combinations(universe, k):
                assert is_aligned_sets(u, v) == is_aligned_type(type_of(u, v))


def test_parse_ordset():
    assert parse_ordset("2, 0,5") == (0, 2, 5)
    assert parse_ordset("") == ()
    with pytest.raises(ValueError):
        parse_ordset("1,1")
