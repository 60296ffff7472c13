import random
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from limlab.families import (
    Family,
    cech_d,
    coboundary,
    defect,
    domination_map,
    extend_from_cofinal,
    finsup_to_trivialization,
    gen_family,
    is_n_coherent,
    is_trivialization,
    random_family,
    random_registry,
    solve_finsup,
    sort_sign,
    total_fn,
    trivialization_to_finsup,
)
from limlab.grid import GridFn, eq_above, in_region, join, meet, region
from oracles import brute_trivializable, dense, naive_d


def const_family(registry, values):
    return Family(registry, 1, {(a,): GridFn.constant(registry[a], v) for a, v in enumerate(values)})


# -- grid ---------------------------------------------------------------------

@pytest.mark.parametrize("fns,expected", [
    ([(3, 1, 4)], (3, 1, 4)),
    ([(3, 1, 4), (2, 5, 0)], (2, 1, 0)),
    ([(1, 1), (1, 1), (0, 0)], (0, 0)),
])
def test_meet_examples(fns, expected):
    assert meet(fns) == expected


def test_meet_empty_rejected():
    with pytest.raises(ValueError):
        meet([])


def test_eq_above_examples():
    phi = GridFn((1, 1))
    psi = GridFn((1, 1), {(0, 0): 5})
    assert eq_above(psi, psi, 0)
    assert eq_above(phi, psi, 1)
    assert not eq_above(phi, psi, 0)


def test_gridfn_rejects_points_outside_domain():
    with pytest.raises(ValueError, match="outside"):
        GridFn((0, 2), {(0, 1): 1})


grid_fns = st.lists(st.integers(0, 2), min_size=3, max_size=3).flatmap(
    lambda b: st.dictionaries(st.sampled_from(list(region(b))), st.integers(-3, 3)).map(
        lambda d: GridFn(b, d)))


@given(grid_fns, grid_fns)
def test_gridfn_sum_restricts_to_common_domain(f, g):
    h = f + g
    assert h.bound == meet([f.bound, g.bound])
    for x in region(h.bound):
        assert h(x) == f(x) + g(x)
    assert (f - f).is_zero()


# -- defect and coboundary ----------------------------------------------------

def test_sort_sign():
    assert sort_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_sign((1, 0)) == (-1, (0, 1))
    assert sort_sign((1, 1))[0] == 0


def test_defect_sign_convention():
    reg = [(2, 2), (2, 2)]
    zero = const_family(reg, [0, 0])
    assert defect(zero, (0, 1)).is_zero()
    phi = const_family(reg, [1, 2])
    assert defect(phi, (0, 1)) == GridFn.constant((2, 2), 1)
    assert defect(phi, (1, 0)) == GridFn.constant((2, 2), -1)
    assert defect(phi, (0, 0)).is_zero()


def test_alternating_lookup():
    reg = [(1,), (1,)]
    phi = Family(reg, 2, {(1, 0): {(0, 0): 3}})
    assert phi((0, 1))((0, 0)) == -3
    assert phi((1, 0))((0, 0)) == 3


def test_constant_coboundary_table():
    reg = [(1, 1)] * 3
    a, b, c = 2, 5, 11
    d1 = cech_d(const_family(reg, [a, b, c]))
    assert d1((0, 1)) == GridFn.constant((1, 1), b - a)
    assert d1((0, 2)) == GridFn.constant((1, 1), c - a)
    assert d1((1, 2)) == GridFn.constant((1, 1), c - b)
    assert cech_d(d1).is_zero()


def test_exact_coboundary_has_zero_defects():
    rng = random.Random(1)
    for _ in range(10):
        reg = random_registry(5, 4, rng)
        phi = cech_d(random_family(reg, 1, rng))
        assert all(defect(phi, t).is_zero() for t in combinations(range(5), 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 2), st.randoms(use_true_random=False))
def test_d_matches_naive_coboundary(size, N, n, rnd):
    if n > size:
        return
    reg = [tuple(rnd.randint(0, 2) for _ in range(N)) for _ in range(size)]
    c = random_family(reg, n, rnd, spread=1)
    table = dense(c)
    assert dense(cech_d(c)) == {t: v for t, v in naive_d(reg, n, table).items()}


# -- coherence and trivializations --------------------------------------------

def test_coherence_examples():
    rng = random.Random(4)
    reg = random_registry(4, 5, rng, max_height=2)
    phi = gen_family("exact_trivial", 2, reg, 2, seed=3)
    assert all(is_n_coherent(phi, k) for k in range(6))
    # height 0 lies in every region, so (3, 0) meets the defect of (0, 1, 2)
    bumped = phi + Family(reg, 2, {(0, 1): {(3, 0): 1}}, 2)
    assert not is_n_coherent(bumped, 2)
    # arity 1: only phi_h nonzero, below kstar
    reg1 = [(1, 1, 1)] * 3
    fam1 = Family(reg1, 1, {(2,): {(0, 0): 4, (1, 1): -2}}, kstar=2)
    assert is_n_coherent(fam1)


def test_incoherent_generator_detected():
    rng = random.Random(5)
    for seed in range(20):
        reg = random_registry(4, 5, rng)
        for n in (1, 2):
            assert not is_n_coherent(gen_family("incoherent", n, reg, 2, seed))


def test_trivialization_examples():
    reg = [(1, 1, 1), (2, 0, 1)]
    zero = Family(reg, 1, {}, kstar=0)
    below = total_fn(reg, {(0, 0): 3})
    assert is_trivialization(zero, below, kstar=1)
    ones = GridFn.constant(join(reg), 1)
    assert not is_trivialization(zero, ones, kstar=0)


def test_precondition_rejected():
    reg = [(1, 1), (1, 1)]
    phi = Family(reg, 1, {(0,): {(1, 0): 1}}, kstar=1)
    with pytest.raises(ValueError, match="not 1-coherent"):
        solve_finsup(phi)


def test_exact_family_gives_zero_psi():
    rng = random.Random(9)
    for n in (1, 2):
        reg = random_registry(4, 4, rng)
        phi = gen_family("exact_trivial", n, reg, 2, seed=n)
        res = solve_finsup(phi)
        assert res.sat and res.psi.is_zero()
        assert trivialization_to_finsup(phi, finsup_to_trivialization(phi, res.psi)).is_zero()


def test_noise_is_recovered():
    rng = random.Random(11)
    for seed in range(15):
        n = 1 + seed % 2
        reg = random_registry(4, 5, rng)
        phi, T = gen_family("trivial_plus_noise", n, reg, 3, seed, with_witness=True)
        noise = phi - coboundary(T, reg, n, 3)
        assert trivialization_to_finsup(phi, T) == noise


def test_zero_psi_gives_zero_trivialization():
    reg = [(1, 1), (1, 2), (0, 1)]
    for n in (1, 2):
        zero = Family(reg, n, {}, kstar=1)
        T = finsup_to_trivialization(zero, zero)
        assert T.is_zero()


def test_arity_one_trivialization_independent_of_choice():
    rng = random.Random(12)
    for seed in range(10):
        reg = random_registry(4, 5, rng)
        phi = gen_family("trivial_plus_noise", 1, reg, 3, seed)
        psi = solve_finsup(phi).psi
        first = finsup_to_trivialization(phi, psi)
        last = finsup_to_trivialization(phi, psi, pick=lambda c: c[-1])
        rand = finsup_to_trivialization(phi, psi, pick=lambda c: rng.choice(c))
        assert first == last == rand


def test_roundtrip_generators():
    rng = random.Random(13)
    for seed in range(40):
        n = 1 + seed % 2
        reg = random_registry(rng.randint(2, 5), rng.randint(2, 6), rng)
        kstar = rng.randint(0, 3)
        phi = gen_family("trivial_plus_noise", n, reg, kstar, seed)
        res = solve_finsup(phi)
        assert res.sat
        assert res.psi.max_column() < kstar
        T = finsup_to_trivialization(phi, res.psi)
        assert is_trivialization(phi, T)
        T2 = finsup_to_trivialization(phi, trivialization_to_finsup(phi, T))
        assert is_trivialization(phi, T2)


def test_unsat_on_incoherent_without_check():
    rng = random.Random(14)
    for seed in range(10):
        reg = random_registry(4, 5, rng)
        res = solve_finsup(gen_family("incoherent", 2, reg, 2, seed), check=False)
        assert not res.sat
        assert res.certificate["point"][0] >= 2


def _single_column_family(n, cells, values, kstar):
    reg = [(0,) * cells[0]] * cells[1]
    tuples = list(combinations(range(cells[1]), n))
    entries = {}
    for k, t in enumerate(tuples):
        entries[t] = {(i, 0): values[k * cells[0] + i] for i in range(cells[0])}
    return Family(reg, n, entries, kstar)


def test_micro_grid_exhaustive_slice():
    # every family on |F| <= 3 height-0 functions, N <= 2, values in {-1,0,1}
    for n in (1, 2):
        for size in range(n, 4):
            for N in (1, 2):
                ntup = len(list(combinations(range(size), n)))
                for values in product((-1, 0, 1), repeat=ntup * N):
                    for kstar in range(N + 1):
                        phi = _single_column_family(n, (N, size), values, kstar)
                        sat = solve_finsup(phi, check=False).sat
                        assert sat == brute_trivializable(phi, kstar), (n, size, values, kstar)


def test_micro_grid_sample():
    rng = random.Random(15)
    for _ in range(400):
        n = rng.randint(1, 2)
        size = rng.randint(n, 3)
        N = rng.randint(1, 4)
        reg = [tuple(rng.randint(0, 1) for _ in range(N)) for _ in range(size)]
        kstar = rng.randint(0, N)
        phi = random_family(reg, n, rng, spread=1, kstar=kstar)
        assert solve_finsup(phi, check=False).sat == brute_trivializable(phi, kstar)


# -- cofinal extension --------------------------------------------------------

def test_identity_domination_returns_trivialization():
    rng = random.Random(16)
    reg = random_registry(4, 5, rng)
    phi = gen_family("trivial_plus_noise", 2, reg, 2, seed=1)
    ups = finsup_to_trivialization(phi, solve_finsup(phi).psi)
    psi, k = extend_from_cofinal(phi, range(4), ups, a={g: g for g in range(4)})
    assert k == 2
    assert psi == ups


def test_undominated_index_named():
    reg = [(1, 1), (2, 2)]
    with pytest.raises(ValueError, match="g_1"):
        domination_map(reg, [0], 0)


def dominated_instance(rng, n, kstar=2, N=6):
    big = [tuple(rng.randint(2, 3) for _ in range(N)) for _ in range(3)]
    small = [tuple(rng.randint(0, 3) if i < kstar else rng.randint(0, 1) for i in range(N))
             for _ in range(2)]
    reg = big + small
    return reg, (0, 1, 2)


def test_extension_passes_checker_n2_and_n3():
    rng = random.Random(17)
    for seed in range(20):
        n = 2 + seed % 2
        reg, F = dominated_instance(rng, n)
        phi = gen_family("trivial_plus_noise", n, reg, 2, seed)
        sub = phi.restrict(F)
        ups = finsup_to_trivialization(sub, solve_finsup(sub).psi)
        psi, k = extend_from_cofinal(phi, F, ups)
        assert is_trivialization(phi, psi, k)
        assert k == 2


def test_extension_matches_hand_formula_n2():
    rng = random.Random(18)
    for seed in range(10):
        reg, F = dominated_instance(rng, 2)
        phi = gen_family("trivial_plus_noise", 2, reg, 2, seed)
        sub = phi.restrict(F)
        ups = finsup_to_trivialization(sub, solve_finsup(sub).psi)
        a = domination_map(reg, F, 2)
        psi, k = extend_from_cofinal(phi, F, ups, a=a)
        for f in range(5):
            bound = reg[f]
            for x in region(bound):
                if in_region(reg[a[f]], x):
                    assert psi((f,))(x) == ups((a[f],))(x) - phi((f, a[f]))(x)
        for f, g in combinations(range(5), 2):
            for x in region(meet([reg[f], reg[g]])):
                if x[0] >= k:
                    assert psi((g,))(x) - psi((f,))(x) == phi((f, g))(x)
