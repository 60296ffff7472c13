import random

import pytest
from hypothesis import given, strategies as st

from limlab.forcing import (
    EvConstFn,
    HechlerCond,
    IterCond,
    compatible,
    extends,
    iter_extends,
    iter_lower_bound,
    random_extension,
    random_hechler,
    random_lower_bound_premise,
)
from oracles import HORIZON, naive_extends, naive_iter_extends


def C(stem, tail, head=()):
    return HechlerCond(tuple(stem), EvConstFn(tuple(head), tail))


def test_extends_examples():
    assert extends(C([5, 7], 9), C([5], 3))
    assert not extends(C([5, 2], 9), C([5], 3))
    p = C([1, 4], 2, [0, 7])
    assert extends(p, p)


def test_compatible_examples():
    ok, w = compatible(C([3], 1, [4]), C([3], 5))
    assert ok and w.stem == (3,) and w.bound == EvConstFn((5,), 5)
    assert compatible(C([1], 0), C([2], 0)) == (False, None)
    ok, w = compatible(C([], 3), C([5], 0))
    assert ok and w == C([5], 3)
    assert not compatible(C([], 6), C([5], 0))[0]


def test_evconst_canonical_and_max():
    f = EvConstFn((1, 5, 2, 2), 2)
    assert f.head == (1, 5)
    g = EvConstFn((3,), 0)
    h = f.pmax(g)
    assert [h(i) for i in range(6)] == [3, 5, 2, 2, 2, 2]
    with pytest.raises(ValueError):
        EvConstFn((-1,), 0)


evfns = st.builds(EvConstFn, st.lists(st.integers(0, 6), max_size=4).map(tuple), st.integers(0, 6))
conds = st.builds(HechlerCond, st.lists(st.integers(0, 9), max_size=4).map(tuple), evfns)


@given(evfns, evfns)
def test_pmax_is_pointwise(f, g):
    h = f.pmax(g)
    assert all(h(i) == max(f(i), g(i)) for i in range(HORIZON))
    assert (h >= f) and (h >= g)


@given(conds, conds)
def test_extends_matches_window_oracle(q, p):
    assert extends(q, p) == naive_extends(q, p)


@given(conds, conds)
def test_same_stem_always_compatible(p, q):
    q = HechlerCond(p.stem, q.bound)
    ok, w = compatible(p, q)
    assert ok
    assert naive_extends(w, p) and naive_extends(w, q)


def test_reflexive_and_transitive():
    rng = random.Random(0)
    for _ in range(1000):
        p = random_hechler(rng)
        assert extends(p, p)
        q = random_extension(p, rng)
        r = random_extension(q, rng)
        assert naive_extends(q, p) and naive_extends(r, q)
        assert extends(r, p)
        # unrelated triples: transitivity must hold whenever both premises do
        a, b, c = random_hechler(rng), random_hechler(rng), random_hechler(rng)
        if extends(a, b) and extends(b, c):
            assert extends(a, c)


def test_iter_extends_coordinatewise():
    rng = random.Random(1)
    for _ in range(200):
        p = IterCond({a: random_hechler(rng) for a in rng.sample(range(8), 3)})
        q = IterCond({a: random_extension(c, rng) for a, c in p.coords})
        extra = IterCond(dict(q.coords) | {9: random_hechler(rng)})
        assert iter_extends(p, p) and iter_extends(q, p) and iter_extends(extra, q)
        assert iter_extends(extra, p)
        assert not iter_extends(p.restrict(p.dom[-1]), p)


def test_lower_bound_examples():
    p = IterCond({3: C([1], 2)})
    assert iter_lower_bound([p], IterCond()) == p
    p2 = IterCond({3: C([1], 4)})
    r = IterCond({0: C([], 0)})
    q = iter_lower_bound([p, p2], r)
    assert q[3] == C([1], 4)
    assert q.restrict(1) == r


def test_lower_bound_premise_violations():
    with pytest.raises(ValueError, match="different stems at coordinate 3"):
        iter_lower_bound([IterCond({3: C([1], 0)}), IterCond({3: C([2], 0)})], IterCond())
    with pytest.raises(ValueError, match="r does not extend"):
        iter_lower_bound([IterCond({0: C([1], 5)})], IterCond({0: C([1], 0)}))


def test_lower_bound_randomized():
    rng = random.Random(2)
    for _ in range(500):
        A, r = random_lower_bound_premise(rng)
        q = iter_lower_bound(A, r)
        assert all(naive_iter_extends(q, p) for p in A + [r])
        cut = max(r.dom) + 1 if r.dom else 0
        assert q.restrict(cut) == r
        assert set(q.dom) == set(r.dom).union(*(p.dom for p in A))


def test_json_roundtrip():
    q = IterCond({2: C([1, 5], 3, [0, 9]), 7: C([], 0)})
    assert IterCond.from_json(q.to_json()) == q
