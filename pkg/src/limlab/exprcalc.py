"""Formal sums of e-terms and the recursive expressions A_n, S_n, C_n.

An e-term is a sequence of index symbols: concrete ordinals ``eta`` and
formal ordinals ``alpha_sigma`` attached to finite sets ``sigma``.  Only the
order along subset chains is known (``eta < alpha_sigma`` for ``eta`` in
``sigma``, ``alpha_rho < alpha_sigma`` for ``rho`` a proper subset of
``sigma``), which is all the generated terms ever need.

Three levels of expansion are used:

* block level: ``d e(seq)`` kept as an unexpanded block,
* e level: every block replaced by its alternating sum of faces,
* phi level: every e-term replaced by ``sum_i (-1)^i phi(seq^i)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Mapping, Optional, Union

from .families import Family, cech_d, defect, face, random_family
from .grid import GridFn, leq, meet, region, truncfn


@dataclass(frozen=True)
class Concrete:
    eta: int

    def __str__(self):
        return str(self.eta)


@dataclass(frozen=True)
class Formal:
    sigma: frozenset

    def __post_init__(self):
        if len(self.sigma) < 2:
            raise ValueError("use Concrete for singletons; alpha_{eta} = eta")

    def __str__(self):
        return "a{" + ",".join(map(str, sorted(self.sigma))) + "}"


Symbol = Union[Concrete, Formal]


def sym(x) -> Symbol:
    """``3 -> Concrete(3)``; a collection ``sigma -> alpha_sigma`` (a singleton
    collapses to its element)."""
    if isinstance(x, (Concrete, Formal)):
        return x
    if isinstance(x, int):
        return Concrete(x)
    s = frozenset(x)
    if not s:
        raise ValueError("alpha_sigma needs a nonempty sigma")
    if len(s) == 1:
        return Concrete(next(iter(s)))
    return Formal(s)


def syms(xs: Iterable) -> tuple:
    return tuple(sym(x) for x in xs)


def as_set(s: Symbol) -> frozenset:
    return frozenset([s.eta]) if isinstance(s, Concrete) else s.sigma


def precedes(a: Symbol, b: Symbol) -> bool:
    """``a < b`` is known from the chain order alone."""
    if isinstance(a, Concrete) and isinstance(b, Concrete):
        return a.eta < b.eta
    if isinstance(b, Concrete):
        return False
    return as_set(a) < b.sigma


def fmt_seq(seq) -> str:
    return ",".join(map(str, seq))


def _sort_key(seq):
    return tuple((0, s.eta) if isinstance(s, Concrete) else (1, len(s.sigma), sorted(s.sigma))
                 for s in seq)


def _add_into(d: dict, seq, c):
    v = d.get(seq, 0) + c
    if v:
        d[seq] = v
    else:
        d.pop(seq, None)


class FormalSum:
    """An integer combination of e-terms, plus unexpanded ``d e`` blocks."""

    __slots__ = ("terms", "blocks")

    def __init__(self, terms: Optional[Mapping] = None, blocks: Optional[Mapping] = None):
        self.terms, self.blocks = {}, {}
        for seq, c in (terms or {}).items():
            seq = syms(seq)
            if len(seq) < 2:
                raise ValueError(f"e is defined on sequences of length >= 2, got e({fmt_seq(seq)})")
            if len(set(seq)) == len(seq):
                _add_into(self.terms, seq, c)
        for seq, c in (blocks or {}).items():
            seq = syms(seq)
            if len(seq) < 3:
                raise ValueError(f"d e is defined on sequences of length >= 3, got {fmt_seq(seq)}")
            if len(set(seq)) == len(seq):
                _add_into(self.blocks, seq, c)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = FormalSum(self.terms, self.blocks)
        for seq, c in other.terms.items():
            _add_into(out.terms, seq, c)
        for seq, c in other.blocks.items():
            _add_into(out.blocks, seq, c)
        return out

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c: int):
        if c == 0:
            return FormalSum()
        return FormalSum({s: c * v for s, v in self.terms.items()},
                         {s: c * v for s, v in self.blocks.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self.terms == other.terms and self.blocks == other.blocks

    def __len__(self):
        return len(self.terms) + len(self.blocks)

    def is_empty(self) -> bool:
        return not self.terms and not self.blocks

    def star(self, beta) -> "FormalSum":
        return star(self, beta)

    def slice(self, j: int) -> "FormalSum":
        return slice_terms(self, j)

    def d(self) -> "FormalSum":
        """``d L``: every e-term becomes a ``d e`` block."""
        if self.blocks:
            raise ValueError("d is defined on combinations of e-terms only")
        return FormalSum(blocks=self.terms)

    def raw_terms(self) -> list:
        """``(seq, coeff)`` pairs at e level, blocks expanded, nothing merged."""
        out = list(self.terms.items())
        for seq, c in self.blocks.items():
            out.extend((face(seq, i), (-1) ** i * c) for i in range(len(seq)))
        return out

    def expand_blocks(self) -> "FormalSum":
        out: dict = {}
        for seq, c in self.raw_terms():
            _add_into(out, seq, c)
        return FormalSum(out)

    def lines(self) -> list:
        out = [f"{'+' if c > 0 else '-'}{abs(c) if abs(c) != 1 else ''}e({fmt_seq(s)})"
               for s, c in sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))]
        out += [f"{'+' if c > 0 else '-'}{abs(c) if abs(c) != 1 else ''}de({fmt_seq(s)})"
                for s, c in sorted(self.blocks.items(), key=lambda kv: _sort_key(kv[0]))]
        return out

    def __str__(self):
        return " ".join(self.lines()) or "0"

    __repr__ = __str__


def mk_e(seq, coeff: int = 1) -> FormalSum:
    seq = syms(seq)
    if len(seq) < 2:
        raise ValueError(f"e is defined on sequences of length >= 2, got length {len(seq)}")
    return FormalSum({seq: coeff})


def d_expand(seq) -> FormalSum:
    """``d e(seq) = sum_i (-1)^i e(seq^i)`` at e level."""
    seq = syms(seq)
    if len(seq) < 3:
        raise ValueError(f"d e is defined on sequences of length >= 3, got length {len(seq)}")
    return FormalSum(blocks={seq: 1}).expand_blocks()


def star(L: FormalSum, beta) -> FormalSum:
    """``L * beta``: append the symbols ``beta`` to every term."""
    if L.blocks:
        raise ValueError("* is defined on combinations of e-terms only")
    if isinstance(beta, (int, Concrete, Formal, frozenset)):
        beta = [beta]
    beta = syms(beta)
    for a, b in zip(beta, beta[1:]):
        if not precedes(a, b):
            raise ValueError(f"appended symbols {fmt_seq(beta)} are not increasing")
    out = {}
    for seq, c in L.terms.items():
        if beta and not precedes(seq[-1], beta[0]):
            raise ValueError(f"cannot append {fmt_seq(beta)} to e({fmt_seq(seq)}): "
                             f"{seq[-1]} is not known to lie below {beta[0]}")
        out[seq + beta] = c
    return FormalSum(out)


def slice_terms(L: FormalSum, j: int) -> FormalSum:
    """``L^j``: delete entry ``j`` from every term."""
    if L.blocks:
        raise ValueError("slicing is defined on combinations of e-terms only")
    out = {}
    for seq, c in L.terms.items():
        if not 0 <= j < len(seq):
            raise ValueError(f"index {j} out of range for e({fmt_seq(seq)})")
        if len(seq) < 3:
            raise ValueError(f"slicing e({fmt_seq(seq)}) would leave a sequence of length 1")
        _add_into(out, face(seq, j), c)
    return FormalSum(out)


# -- the recursive expressions ------------------------------------------------

def _as_tau(tau, size):
    tau = tuple(sorted(tau))
    if len(set(tau)) != len(tau):
        raise ValueError(f"repeated ordinal in {tau}")
    if len(tau) != size:
        raise ValueError(f"expected a set of size {size}, got {tau} of size {len(tau)}")
    return tau


@lru_cache(maxsize=None)
def _build_A(n: int, rho: tuple) -> FormalSum:
    if n == 2:
        return mk_e(rho + (frozenset(rho),))
    return star(_build_C(n - 1, rho) * (-1) ** n, frozenset(rho))


@lru_cache(maxsize=None)
def _build_C(n: int, tau: tuple) -> FormalSum:
    out = mk_e(tau)
    for i in range(n + 1):
        out = out - _build_A(n, face(tau, i)) * (-1) ** i
    return out


@lru_cache(maxsize=None)
def _build_S(n: int, tau: tuple) -> FormalSum:
    top = frozenset(tau)
    out = mk_e(tau + (top,)).d()
    for i in range(n + 1):
        out = out - star(_build_A(n, face(tau, i)), top).d() * (-1) ** i
    return out


def build_A(n: int, rho) -> FormalSum:
    if n < 2:
        raise ValueError(f"A_n is defined for n >= 2, got {n}")
    return _build_A(n, _as_tau(rho, n))


def build_C(n: int, tau) -> FormalSum:
    if n < 2:
        raise ValueError(f"C_n is defined for n >= 2, got {n}")
    return _build_C(n, _as_tau(tau, n + 1))


def build_S(n: int, tau) -> FormalSum:
    """S_n(tau) as a combination of ``d e`` blocks."""
    if n < 2:
        raise ValueError(f"S_n is defined for n >= 2, got {n}")
    return _build_S(n, _as_tau(tau, n + 1))


# -- expansion and shape ------------------------------------------------------

def expand_full(L: FormalSum, level: str = "phi") -> dict:
    """Canonical coefficient map of ``L`` after full expansion.

    ``level="phi"`` expands every e-term into the underlying phi-terms (keys
    are phi index sequences); ``level="e"`` only expands ``d e`` blocks.
    """
    out: dict = {}
    if level == "e":
        for seq, c in L.raw_terms():
            _add_into(out, seq, c)
    elif level == "phi":
        for seq, c in L.raw_terms():
            for i in range(len(seq)):
                key = face(seq, i)
                if len(set(key)) == len(key):
                    _add_into(out, key, (-1) ** i * c)
    else:
        raise ValueError(f"level must be 'phi' or 'e', got {level!r}")
    return out


def shape_failure(L: FormalSum, context, n: int) -> Optional[str]:
    """First term (blocks expanded, unmerged) violating the chain shape."""
    ctx = frozenset(context)
    for seq, c in L.raw_terms():
        where = f"{c:+d} e({fmt_seq(seq)})"
        if len(seq) != n + 1:
            return f"{where}: length {len(seq)}, expected {n + 1}"
        p = 0
        while p < len(seq) and isinstance(seq[p], Concrete):
            p += 1
        sigma0 = [s.eta for s in seq[:p]]
        rest = seq[p:]
        if not sigma0:
            return f"{where}: empty concrete prefix"
        if sigma0 != sorted(set(sigma0)):
            return f"{where}: concrete prefix not increasing"
        if any(not isinstance(s, Formal) for s in rest):
            return f"{where}: concrete entry after a formal one"
        sig = [frozenset(sigma0)] + [s.sigma for s in rest]
        if rest:
            if not sig[0] <= sig[1]:
                return f"{where}: sigma_0 not contained in sigma_1"
            for a, b in zip(sig[1:], sig[2:]):
                if not a < b:
                    return f"{where}: {sorted(a)} not a proper subset of {sorted(b)}"
        if not sig[-1] <= ctx:
            return f"{where}: {sorted(sig[-1])} not contained in {sorted(ctx)}"
    return None


def shape_check(L: FormalSum, context, n: int) -> bool:
    return shape_failure(L, context, n) is None


# -- subset chains and the S -> C reduction -----------------------------------

@dataclass(frozen=True)
class SubsetChain:
    sigmas: tuple  # of frozensets, |sigma_i| = i
    long: bool

    def alpha_seq(self) -> tuple:
        return tuple(sym(s) for s in self.sigmas)

    def __str__(self):
        return "<" + ", ".join("{" + ",".join(map(str, sorted(s))) + "}" for s in self.sigmas) + ">"


def enumerate_chains(tau, m: int) -> list:
    tau = tuple(sorted(set(tau)))
    if not 1 <= m <= len(tau):
        raise ValueError(f"chain length must be in 1..{len(tau)}, got {m}")
    out = []
    for order in permutations(tau, m):
        sigmas = tuple(frozenset(order[:i + 1]) for i in range(m))
        out.append(SubsetChain(sigmas, m == len(tau)))
    return out


def long_string_seqs(tau) -> set:
    return {c.alpha_seq() for c in enumerate_chains(tau, len(tuple(tau)))}


@dataclass
class ReductionReport:
    n: int
    tau: tuple
    status: str
    type1_residual: dict = field(default_factory=dict)
    long_string_terms: dict = field(default_factory=dict)
    long_string_net: int = 0
    raw_terms: int = 0
    type1_cancelled_pairs: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "SUCCESS"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "tau": list(self.tau),
            "status": self.status,
            "type1_residual": {f"e({fmt_seq(s)})": c for s, c in
                               sorted(self.type1_residual.items(), key=lambda kv: _sort_key(kv[0]))},
            "long_string_net": self.long_string_net,
            "long_string_terms": {f"e({fmt_seq(s)})": c for s, c in
                                  sorted(self.long_string_terms.items(), key=lambda kv: _sort_key(kv[0]))},
            "raw_terms": self.raw_terms,
            "type1_cancelled_pairs": self.type1_cancelled_pairs,
        }


def reduce_S_to_C(n: int, tau, S: Optional[FormalSum] = None) -> ReductionReport:
    """Compare S_n(tau) with (-1)^(n+1) C_n(tau) at e level.

    The difference is split into long-string terms and the rest; the
    reduction succeeds when the rest vanishes identically (type 1) and the
    long-string coefficients sum to zero (type 2: under the uniformity
    condition all long-string terms agree on ``I(tau)``).
    """
    tau = _as_tau(tau, n + 1)
    S = build_S(n, tau) if S is None else S
    C = build_C(n, tau)
    raw = S.raw_terms() + [(s, -((-1) ** (n + 1)) * c) for s, c in C.raw_terms()]
    diff: dict = {}
    for seq, c in raw:
        _add_into(diff, seq, c)
    longs = long_string_seqs(tau)
    ls = {s: c for s, c in diff.items() if s in longs}
    other = {s: c for s, c in diff.items() if s not in longs}
    net = sum(ls.values())
    cancelled = (sum(abs(c) for _, c in raw) - sum(abs(c) for c in diff.values())) // 2
    status = "SUCCESS" if not other and net == 0 else "FAILURE"
    return ReductionReport(n, tau, status, other, ls, net, len(raw), cancelled)


# -- numeric evaluation -------------------------------------------------------

@dataclass
class UInstance:
    """Ordinals ``alpha_sigma`` for the nonempty subsets of ``tau`` and an
    arity-``n`` family over a registry indexed by ordinals."""

    tau: tuple
    assignment: dict  # frozenset -> int, |sigma| >= 2
    family: Family

    def __post_init__(self):
        self.tau = tuple(sorted(self.tau))
        self.assignment = {frozenset(k): int(v) for k, v in self.assignment.items()}
        for eta in self.tau:
            got = self.assignment.setdefault(frozenset([eta]), eta)
            if got != eta:
                raise ValueError(f"alpha_{{{eta}}} must be {eta}, got {got}")
        subsets = [frozenset(c) for r in range(1, len(self.tau) + 1)
                   for c in combinations(self.tau, r)]
        for s in subsets:
            if s not in self.assignment:
                raise ValueError(f"no ordinal assigned to {sorted(s)}")
            if not 0 <= self.assignment[s] < len(self.family.registry):
                raise ValueError(f"alpha_{sorted(s)} = {self.assignment[s]} is not a registry index")
        for r in subsets:
            for s in subsets:
                if r < s and not self.assignment[r] < self.assignment[s]:
                    raise ValueError(f"alpha_{sorted(r)} must lie below alpha_{sorted(s)}")

    @property
    def n(self) -> int:
        return self.family.n

    def resolve(self, seq) -> tuple:
        out = []
        for s in syms(seq):
            key = as_set(s)
            if key not in self.assignment:
                raise ValueError(f"symbol {s} has no assigned ordinal")
            out.append(self.assignment[key])
        return tuple(out)

    def g(self, key) -> tuple:
        return self.family.registry[self.assignment[frozenset(key)]]


def evaluate(L: FormalSum, inst: UInstance) -> GridFn:
    """Sum of coefficient times defect over the terms of ``L``, on the common domain."""
    phi = inst.family
    resolved = []
    for seq, c in L.raw_terms():
        t = inst.resolve(seq)
        if any(a >= b for a, b in zip(t, t[1:])):
            raise ValueError(f"e({fmt_seq(seq)}) resolves to the non-increasing tuple {t}")
        if len(t) != phi.n + 1:
            raise ValueError(f"e({fmt_seq(seq)}) has length {len(t)}; the family needs {phi.n + 1}")
        resolved.append((t, c))
    bound = meet([phi.registry[a] for a in inst.tau]
                 + [phi.registry[a] for t, _ in resolved for a in t])
    out = GridFn.zero(bound)
    for t, c in resolved:
        out = out + defect(phi, t).restrict(bound) * c
    return out


def support_restricted(fn: GridFn) -> dict:
    return dict(fn.entries)


def u_failure(inst: UInstance) -> Optional[str]:
    phi = inst.family
    eps = None
    for chain in enumerate_chains(inst.tau, len(inst.tau)):
        t = inst.resolve(chain.alpha_seq())
        e = support_restricted(defect(phi, t))
        if eps is None:
            eps, first = e, chain
        elif e != eps:
            return f"(a) restricted defects differ on long strings {first} and {chain}"
    subsets = sorted(inst.assignment, key=lambda s: (len(s), sorted(s)))
    for r in subsets:
        for s in subsets:
            if r < s and not leq(inst.g(r), inst.g(s)):
                return f"(b) g at alpha_{sorted(r)} exceeds g at alpha_{sorted(s)}"
    return None


def check_u(inst: UInstance) -> bool:
    return u_failure(inst) is None


def n2_identity_sum(inst: UInstance) -> GridFn:
    """``e(a0,a1,a2) - e(a1,a2,a12) + e(a0,a2,a02) - e(a0,a1,a01)`` for n = 2, on ``I(tau)``."""
    if inst.n != 2:
        raise ValueError("this sum is the n = 2 identity")
    a0, a1, a2 = inst.tau
    al = inst.assignment
    phi = inst.family
    bound = phi.bound(inst.tau)
    terms = [(1, (a0, a1, a2)),
             (-1, (a1, a2, al[frozenset((a1, a2))])),
             (1, (a0, a2, al[frozenset((a0, a2))])),
             (-1, (a0, a1, al[frozenset((a0, a1))]))]
    out = GridFn.zero(bound)
    for c, t in terms:
        out = out + defect(phi, t).restrict(bound) * c
    return out


U_MODES = ("coboundary", "uniform_eps", "random")


def gen_u_instance(n: int, seed: int, N: int = 8, max_registry: int = 12,
                   mode: str = "coboundary", kstar: Optional[int] = None,
                   spread: int = 3) -> UInstance:
    """Seeded instance with tau = {0..n} and a monotone registry.

    ``coboundary``: exact coboundary family, every defect is 0.
    ``uniform_eps``: coboundary plus a perturbation that makes every
    long-string defect equal to one nonzero ``eps`` (supported below
    ``kstar``) while leaving other tuples free.
    ``random``: an arbitrary alternating family (the uniformity condition
    generally fails).
    """
    if mode not in U_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {U_MODES}")
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = random.Random(seed)
    kstar = N // 2 if kstar is None else kstar
    tau = tuple(range(n + 1))
    levels = {s: [frozenset(c) for c in combinations(tau, s)] for s in range(2, n + 2)}
    budget = max_registry - (n + 1)
    if budget < n:
        raise ValueError(f"max_registry={max_registry} too small for n={n}")
    # distinct ordinals per level; incomparable sets may share one
    per_level = {s: 1 for s in levels}
    spare = budget - len(levels)
    for s in sorted(levels):
        extra = min(len(levels[s]) - 1, spare)
        per_level[s] += extra
        spare -= extra
    assignment, nxt = {}, n + 1
    for s in sorted(levels):
        pool = list(range(nxt, nxt + per_level[s]))
        nxt += per_level[s]
        sets = levels[s][:]
        rng.shuffle(sets)
        for i, sigma in enumerate(sets):
            assignment[sigma] = pool[i] if i < len(pool) else rng.choice(pool)
    size = nxt
    registry: list = [None] * size
    for eta in tau:
        registry[eta] = tuple(rng.randint(0, 3) for _ in range(N))
    by_ordinal: dict = {}
    for sigma, a in assignment.items():
        by_ordinal.setdefault(a, []).append(sigma)
    full = dict(assignment)
    full.update({frozenset([eta]): eta for eta in tau})
    for a in sorted(by_ordinal):
        floor = [registry[full[r]] for sigma in by_ordinal[a] for r in full
                 if r < sigma and registry[full[r]] is not None]
        base = [max(col) for col in zip(*floor)]
        registry[a] = tuple(v + rng.randint(0, 1) for v in base)
    registry = [truncfn(g) for g in registry]

    if mode == "random":
        phi = random_family(registry, n, rng, spread, kstar)
        return UInstance(tau, assignment, phi)

    T = random_family(registry, n - 1, rng, spread, kstar)
    phi = cech_d(T).with_kstar(kstar)
    if mode == "uniform_eps":
        inst0 = UInstance(tau, assignment, phi)
        long_tuples = {inst0.resolve(c.alpha_seq()) for c in enumerate_chains(tau, n + 1)}
        tails = {t[1:] for t in long_tuples}
        faces_of_long = {face(t, i) for t in long_tuples for i in range(len(t))}
        eps = {(rng.randrange(max(kstar, 1)), 0): rng.choice([-2, -1, 1, 2])}
        noise = {}
        for t in tails:
            noise[t] = GridFn(phi.bound(t), eps)
        # free noise on tuples that are not faces of any long-string tuple
        for t in phi.tuples():
            if t in faces_of_long:
                continue
            vals = {x: rng.randint(-spread, spread) for x in region(phi.bound(t))
                    if x[0] < kstar and rng.random() < 0.5}
            noise[t] = GridFn(phi.bound(t), vals)
        phi = phi + Family(registry, n, noise, kstar)
    return UInstance(tau, assignment, phi)
