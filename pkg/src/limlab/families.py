"""Finite-truncation model of n-coherent families of functions.

A :class:`Family` of arity ``n`` assigns to each strictly increasing
``n``-tuple of registry indices a :class:`~limlab.grid.GridFn` on
``I(g_a0 ^ ... ^ g_a(n-1))``.  Lookups at other tuples use the alternating
extension.  The mod-finite relation is rendered as agreement on all columns
``>= kstar``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .grid import GridFn, TruncFn, disagreements_above, in_region, join, leq, meet, region, truncfn
from .intsolve import solve


def sort_sign(t: Sequence[int]) -> tuple[int, tuple]:
    """Sort ``t`` and return ``(sign, sorted)``; sign is 0 on repeated entries."""
    t = list(t)
    sign = 1
    # insertion sort, counting swaps
    for i in range(1, len(t)):
        j = i
        while j > 0 and t[j - 1] > t[j]:
            t[j - 1], t[j] = t[j], t[j - 1]
            sign = -sign
            j -= 1
    if any(a == b for a, b in zip(t, t[1:])):
        return 0, tuple(t)
    return sign, tuple(t)


def face(t: Sequence, i: int) -> tuple:
    return tuple(t[:i]) + tuple(t[i + 1:])


class Family:
    """An alternating family of grid functions indexed by ``n``-tuples.

    ``indices`` is the active index set ``F`` (defaults to the whole
    registry); restricting a family to ``F`` keeps the registry numbering.
    """

    def __init__(self, registry: Sequence[Sequence[int]], n: int,
                 entries: Optional[Mapping] = None, kstar: int = 0,
                 indices: Optional[Iterable[int]] = None):
        self.registry = tuple(truncfn(f) for f in registry)
        if not self.registry:
            raise ValueError("registry must be nonempty")
        N = len(self.registry[0])
        if any(len(f) != N for f in self.registry):
            raise ValueError("registry functions must share one column count")
        if n < 1:
            raise ValueError(f"arity must be >= 1, got {n}")
        self.n = n
        self.kstar = kstar
        self.indices = tuple(sorted(set(range(len(self.registry)) if indices is None else indices)))
        for a in self.indices:
            if not 0 <= a < len(self.registry):
                raise ValueError(f"index {a} not in registry of size {len(self.registry)}")
        self.entries = {}
        for t, fn in (entries or {}).items():
            sign, key = sort_sign(t)
            if len(key) != n:
                raise ValueError(f"tuple {t} has length {len(key)}, arity is {n}")
            if sign == 0:
                raise ValueError(f"tuple {t} has repeated entries")
            bound = self.bound(key)
            if not isinstance(fn, GridFn):
                fn = GridFn(bound, fn)
            if fn.bound != bound:
                raise ValueError(f"entry at {key} has domain I({list(fn.bound)}), "
                                 f"expected I({list(bound)})")
            if not fn.is_zero():
                self.entries[key] = fn * sign
        self._zero_cache = {}

    @property
    def N(self) -> int:
        return len(self.registry[0])

    def bound(self, t: Sequence[int]) -> TruncFn:
        return meet([self.registry[a] for a in t])

    def __call__(self, t: Sequence[int]) -> GridFn:
        """The alternating lookup ``phi_t``."""
        sign, key = sort_sign(t)
        if len(key) != self.n:
            raise ValueError(f"lookup at {tuple(t)} in an arity-{self.n} family")
        fn = self.entries.get(key) if sign else None
        if fn is None:
            return GridFn.zero(self.bound(key))
        return fn if sign == 1 else -fn

    def tuples(self, length: Optional[int] = None):
        return combinations(self.indices, self.n if length is None else length)

    def restrict(self, indices: Iterable[int]) -> "Family":
        idx = set(indices)
        return Family(self.registry, self.n,
                      {t: fn for t, fn in self.entries.items() if set(t) <= idx},
                      self.kstar, idx)

    def with_kstar(self, kstar: int) -> "Family":
        return Family(self.registry, self.n, self.entries, kstar, self.indices)

    def __add__(self, other: "Family") -> "Family":
        _check_compatible(self, other)
        out = dict(self.entries)
        for t, fn in other.entries.items():
            out[t] = out[t] + fn if t in out else fn
        return Family(self.registry, self.n, out, self.kstar, self.indices)

    def __neg__(self):
        return Family(self.registry, self.n, {t: -fn for t, fn in self.entries.items()},
                      self.kstar, self.indices)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, Family):
            return NotImplemented
        return (self.registry == other.registry and self.n == other.n
                and self.indices == other.indices and self.entries == other.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def max_column(self) -> int:
        return max((fn.max_column() for fn in self.entries.values()), default=-1)

    def __repr__(self):
        return (f"Family(n={self.n}, |F|={len(self.indices)}, N={self.N}, "
                f"kstar={self.kstar}, {len(self.entries)} nonzero entries)")


def _check_compatible(a: Family, b: Family):
    if a.registry != b.registry or a.n != b.n:
        raise ValueError("families over different registries or arities")


Trivialization = Union[Family, GridFn]


def defect(phi: Family, t: Sequence[int]) -> GridFn:
    """``e(t) = sum_i (-1)^i phi(t^i)`` on ``I(^t)``."""
    t = tuple(t)
    if len(t) != phi.n + 1:
        raise ValueError(f"defect of an arity-{phi.n} family needs {phi.n + 1} indices, got {t}")
    bound = phi.bound(t)
    if len(set(t)) < len(t):
        return GridFn.zero(bound)
    out = GridFn.zero(bound)
    for i in range(len(t)):
        term = phi(face(t, i))
        out = out + term if i % 2 == 0 else out - term
    return out


def coherence_failure(phi: Family, kstar: Optional[int] = None):
    """First ``(tuple, points)`` whose defect has support in columns ``>= kstar``."""
    kstar = phi.kstar if kstar is None else kstar
    for t in phi.tuples(phi.n + 1):
        bad = sorted(x for x in defect(phi, t).entries if x[0] >= kstar)
        if bad:
            return t, bad
    return None


def is_n_coherent(phi: Family, kstar: Optional[int] = None) -> bool:
    # alternation holds by construction: only sorted tuples are stored
    return coherence_failure(phi, kstar) is None


def cech_d(c: Family) -> Family:
    """The alternating family of defects, of arity ``c.n + 1``."""
    return Family(c.registry, c.n + 1,
                  {t: defect(c, t) for t in c.tuples(c.n + 1)},
                  c.kstar, c.indices)


def total_fn(registry: Sequence[Sequence[int]], entries: Optional[Mapping] = None,
             indices: Optional[Iterable[int]] = None) -> GridFn:
    """A function on the union of the regions of ``registry`` (zero elsewhere)."""
    idx = range(len(registry)) if indices is None else indices
    return GridFn(join([registry[a] for a in idx]), entries or {})


def restrict_total(psi: GridFn, registry, kstar=0, indices=None) -> Family:
    """The arity-1 family ``phi_f = psi | I(f)``."""
    fam = Family(registry, 1, kstar=kstar, indices=indices)
    return Family(registry, 1, {(a,): _covering_restrict(psi, fam.registry[a])
                                for a in fam.indices}, kstar, fam.indices)


def _covering_restrict(psi: GridFn, f) -> GridFn:
    if not leq(f, psi.bound):
        raise ValueError(f"psi on I({list(psi.bound)}) does not cover I({list(f)})")
    return psi.restrict(f)


def trivialization_sum(T: Trivialization, phi: Family, t: Sequence[int]) -> GridFn:
    """``sum_i (-1)^i T(t^i)`` on ``I(^t)`` (``psi | I(f)`` when ``n == 1``)."""
    bound = phi.bound(t)
    if phi.n == 1:
        return _covering_restrict(T, bound)
    out = GridFn.zero(bound)
    for i in range(len(t)):
        term = T(face(t, i)).restrict(bound)
        out = out + term if i % 2 == 0 else out - term
    return out


def _check_triv_arity(phi: Family, T: Trivialization):
    if phi.n == 1:
        if not isinstance(T, GridFn):
            raise ValueError("an arity-1 family is trivialized by a single function")
    elif not isinstance(T, Family) or T.n != phi.n - 1:
        raise ValueError(f"an arity-{phi.n} family needs an arity-{phi.n - 1} trivialization")


def trivialization_failure(phi: Family, T: Trivialization, kstar: Optional[int] = None):
    kstar = phi.kstar if kstar is None else kstar
    _check_triv_arity(phi, T)
    for t in phi.tuples():
        bad = disagreements_above(trivialization_sum(T, phi, t), phi(t), kstar)
        if bad:
            return t, bad
    return None


def is_trivialization(phi: Family, T: Trivialization, kstar: Optional[int] = None) -> bool:
    return trivialization_failure(phi, T, kstar) is None


# -- finitely supported reformulation -----------------------------------------

@dataclass
class FinsupResult:
    sat: bool
    psi: Optional[Family] = None
    # UNSAT: point, offending tuple, pivot data, and rank of that point's subsystem
    certificate: dict = field(default_factory=dict)


def covering(phi: Family, x) -> list:
    return [a for a in phi.indices if in_region(phi.registry[a], x)]


def solve_finsup(phi: Family, kstar: Optional[int] = None, check: bool = True) -> FinsupResult:
    """Find an alternating ``Psi`` supported in columns ``< kstar`` with ``d Psi = d Phi``.

    The system decouples by grid point: at ``x`` the unknowns are
    ``psi_t(x)`` for ``n``-tuples ``t`` of indices whose regions contain
    ``x``, one equation per such ``(n+1)``-tuple.  With ``check=False`` the
    coherence precondition is not enforced and the equations at columns
    ``>= kstar`` (which have no unknowns) are included, so incoherent input
    yields UNSAT instead of an error.
    """
    kstar = phi.kstar if kstar is None else kstar
    if check:
        bad = coherence_failure(phi, kstar)
        if bad is not None:
            t, pts = bad
            raise ValueError(f"family is not {phi.n}-coherent at kstar={kstar}: "
                             f"defect at {t} nonzero at {pts[:3]}")
    n = phi.n
    defects = {t: defect(phi, t) for t in phi.tuples(n + 1)}
    values: dict = {}
    all_points = sorted(set(region(join([phi.registry[a] for a in phi.indices]))))
    for x in all_points:
        if check and x[0] >= kstar:
            continue
        cover = covering(phi, x)
        eqs = list(combinations(cover, n + 1))
        if not eqs:
            continue
        unknowns = list(combinations(cover, n)) if x[0] < kstar else []
        col = {u: c for c, u in enumerate(unknowns)}
        A = []
        for g in eqs:
            row = [0] * len(unknowns)
            for i in range(n + 1):
                if unknowns:
                    row[col[face(g, i)]] += (-1) ** i
            A.append(row)
        b = [defects[g](x) for g in eqs]
        if not unknowns:
            bad_rows = [r for r, v in enumerate(b) if v]
            if bad_rows:
                r = bad_rows[0]
                return FinsupResult(False, certificate={
                    "point": list(x), "tuple": list(eqs[r]), "kind": "inconsistent",
                    "residual": b[r], "rank": 0, "equations": len(eqs), "unknowns": 0})
            continue
        sol = solve(A, b)
        if not sol.sat:
            cert = dict(sol.certificate)
            cert.update(point=list(x), rank=sol.rank, equations=len(eqs),
                        unknowns=len(unknowns))
            return FinsupResult(False, certificate=cert)
        for u, v in zip(unknowns, sol.x):
            if v:
                values.setdefault(u, {})[x] = v
    psi = Family(phi.registry, n, {t: GridFn(phi.bound(t), vals) for t, vals in values.items()},
                 kstar, phi.indices)
    return FinsupResult(True, psi)


def finsup_failure(phi: Family, psi: Family):
    """First tuple where ``d Psi`` and ``d Phi`` differ, with the points."""
    if psi.n != phi.n:
        raise ValueError(f"Psi has arity {psi.n}, Phi has arity {phi.n}")
    for t in phi.tuples(phi.n + 1):
        diff = defect(phi, t) - defect(psi, t)
        if not diff.is_zero():
            return t, sorted(diff.entries)
    return None


def least_index(candidates: Sequence[int]) -> int:
    return candidates[0]


def finsup_to_trivialization(phi: Family, psi: Family,
                             pick: Callable[[list], int] = least_index) -> Trivialization:
    """Rebuild a trivialization from a finitely supported ``Psi``.

    ``pick`` chooses ``f_x`` among the indices whose regions contain ``x``.
    """
    bad = finsup_failure(phi, psi)
    if bad is not None:
        raise ValueError(f"Psi does not satisfy d Psi = d Phi: differs at {bad[0]}, {bad[1][:3]}")
    n = phi.n
    chosen = {}

    def f_x(x):
        if x not in chosen:
            chosen[x] = pick(covering(phi, x))
        return chosen[x]

    if n == 1:
        bound = join([phi.registry[a] for a in phi.indices])
        tau = {}
        for x in region(bound):
            cover = covering(phi, x)
            if cover:
                f = f_x(x)
                tau[x] = phi((f,))(x) - psi((f,))(x)
        return GridFn(bound, tau)

    sign = (-1) ** n
    entries = {}
    for t in combinations(phi.indices, n - 1):
        vals = {}
        for x in region(phi.bound(t)):
            g = t + (f_x(x),)
            vals[x] = sign * (psi(g)(x) - phi(g)(x))
        entries[t] = GridFn(phi.bound(t), vals)
    return Family(phi.registry, n - 1, entries, phi.kstar, phi.indices)


def trivialization_to_finsup(phi: Family, T: Trivialization, kstar: Optional[int] = None) -> Family:
    """``psi_t = phi_t - sum_i (-1)^i T(t^i)``; supported in columns ``< kstar``."""
    kstar = phi.kstar if kstar is None else kstar
    bad = trivialization_failure(phi, T, kstar)
    if bad is not None:
        raise ValueError(f"not a trivialization at kstar={kstar}: fails at {bad[0]}, {bad[1][:3]}")
    return Family(phi.registry, phi.n,
                  {t: phi(t) - trivialization_sum(T, phi, t) for t in phi.tuples()},
                  kstar, phi.indices)


# -- cofinal extension --------------------------------------------------------

def domination_map(registry, F: Sequence[int], kstar: int,
                   a: Optional[Mapping[int, int]] = None, indices=None) -> dict:
    """Check or build ``a``: each index ``g`` maps to a member of ``F``
    dominating it on columns ``>= kstar``."""
    F = sorted(F)
    idx = range(len(registry)) if indices is None else indices
    out = {}
    for g in idx:
        if a is not None and g in a:
            h = a[g]
            if h not in F:
                raise ValueError(f"a({g}) = {h} is not in F")
            if not leq(registry[g], registry[h], kstar):
                raise ValueError(f"a({g}) = {h} does not dominate g_{g} above column {kstar}")
            out[g] = h
            continue
        for h in F:
            if leq(registry[g], registry[h], kstar):
                out[g] = h
                break
        else:
            raise ValueError(f"g_{g} is not dominated above column {kstar} by any member of F")
    return out


def extend_from_cofinal(phi: Family, F: Sequence[int], upsilon: Trivialization,
                        a: Optional[Mapping[int, int]] = None,
                        kstar: Optional[int] = None) -> tuple[Trivialization, int]:
    """Extend a trivialization of ``phi | F`` to all of ``phi``.

    Returns ``(Psi, k')`` where ``k'`` is the least threshold ``>= kstar``
    at which ``Psi`` trivializes ``phi``.
    """
    kstar = phi.kstar if kstar is None else kstar
    amap = domination_map(phi.registry, F, kstar, a, phi.indices)
    sub = phi.restrict(F)
    bad = trivialization_failure(sub, upsilon, kstar)
    if bad is not None:
        raise ValueError(f"upsilon does not trivialize phi | F at kstar={kstar}: fails at {bad[0]}")
    n = phi.n
    if n == 1:
        bound = join([phi.registry[g] for g in phi.indices] + [upsilon.bound])
        out: Trivialization = GridFn(bound, upsilon.entries)
    else:
        entries = {}
        for g in combinations(phi.indices, n - 1):
            ag = tuple(amap[x] for x in g)
            terms = [(1, upsilon, ag)]
            for i in range(n - 1):
                terms.append(((-1) ** (i + 1), phi, g[:i + 1] + ag[i:]))
            looked = [(s, fam(t), fam.bound(t)) for s, fam, t in terms]
            vals = {}
            for x in region(phi.bound(g)):
                if all(in_region(b, x) for _, _, b in looked):
                    vals[x] = sum(s * fn(x) for s, fn, _ in looked)
            entries[g] = GridFn(phi.bound(g), vals)
        out = Family(phi.registry, n - 1, entries, kstar, phi.indices)
    for k in range(kstar, phi.N + 1):
        if is_trivialization(phi, out, k):
            return out, k
    raise AssertionError("unreachable: every function agrees above the last column")


# -- instance generation ------------------------------------------------------

MODES = ("exact_trivial", "trivial_plus_noise", "incoherent")


def random_registry(size: int, N: int, rng: random.Random, max_height: int = 3) -> list:
    return [tuple(rng.randint(0, max_height) for _ in range(N)) for _ in range(size)]


def random_family(registry, n, rng: random.Random, spread: int = 3, kstar: int = 0,
                  below: Optional[int] = None, density: float = 1.0, indices=None) -> Family:
    """Random alternating family; values in ``[-spread, spread]``, optionally
    only on columns ``< below``."""
    fam = Family(registry, n, kstar=kstar, indices=indices)
    entries = {}
    for t in fam.tuples():
        vals = {}
        for x in region(fam.bound(t)):
            if below is not None and x[0] >= below:
                continue
            if rng.random() < density:
                vals[x] = rng.randint(-spread, spread)
        entries[t] = GridFn(fam.bound(t), vals)
    return Family(registry, n, entries, kstar, fam.indices)


def coboundary(T: Trivialization, registry, n: int, kstar: int = 0, indices=None) -> Family:
    """The exact family built from ``T`` by the defining alternating sum."""
    if n == 1:
        return restrict_total(T, registry, kstar, indices)
    return cech_d(T).with_kstar(kstar)


def gen_family(mode: str, n: int, registry, kstar: int, seed: int,
               spread: int = 3, with_witness: bool = False):
    """Seeded test family.

    ``exact_trivial`` is the coboundary of a random arity-``n-1`` family (or
    of one total function when ``n == 1``); ``trivial_plus_noise`` adds random
    alternating noise on columns ``< kstar``; ``incoherent`` additionally
    bumps one value at height 0 of a column ``>= kstar``.  With
    ``with_witness`` the pair ``(Phi, T)`` is returned.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    registry = [truncfn(f) for f in registry]
    if not registry:
        raise ValueError("registry must be nonempty")
    rng = random.Random(seed)
    if n == 1:
        T: Trivialization = total_fn(registry, {
            x: rng.randint(-spread, spread) for x in region(join(registry))})
    else:
        T = random_family(registry, n - 1, rng, spread, kstar)
    phi = coboundary(T, registry, n, kstar)
    if mode in ("trivial_plus_noise", "incoherent"):
        phi = phi + random_family(registry, n, rng, spread, kstar, below=kstar, density=0.5)
    if mode == "incoherent":
        if len(registry) < n + 1:
            raise ValueError(f"incoherent mode needs at least {n + 1} registry functions")
        N = len(registry[0])
        if kstar >= N:
            raise ValueError(f"incoherent mode needs kstar < N (kstar={kstar}, N={N})")
        t = rng.choice(list(phi.tuples()))
        # height 0 lies in every region, so every (n+1)-tuple through t sees the bump
        x = (rng.randint(kstar, N - 1), 0)
        bump = rng.choice([-2, -1, 1, 2])
        phi = phi + Family(registry, n, {t: GridFn(phi.bound(t), {x: bump})}, kstar)
    return (phi, T) if with_witness else phi
