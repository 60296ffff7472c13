"""Finite sets of ordinals, their relative-position types, and type cycles.

Ordinals are modelled by natural numbers; only the relative order of the
values is ever meaningful.  A *type* is a string over ``"012"`` recording,
for each element of ``u | v`` in increasing order, whether it lies in ``u``
only (``0``), ``v`` only (``1``) or both (``2``).

>>> type_of((1, 2), (2, 3))
'021'
>>> is_aligned_type("001011")
True
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

OrdSet = tuple  # strictly increasing tuple of ints

_SWAP = str.maketrans("01", "10")


def ordset(elements: Iterable[int]) -> OrdSet:
    """Normalize ``elements`` into a strictly increasing tuple."""
    out = tuple(sorted(elements))
    for a, b in zip(out, out[1:]):
        if a == b:
            raise ValueError(f"repeated ordinal {a} in {out}")
    return out


def parse_ordset(text: str) -> OrdSet:
    """Parse ``"0,2,5"`` into ``(0, 2, 5)``."""
    text = text.strip()
    if not text:
        return ()
    try:
        return ordset(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad ordinal set {text!r}: {exc}") from None


def type_width(t: str) -> int:
    """Width of a type; raises if ``t`` is not a well-formed type."""
    if not t or set(t) - set("012"):
        raise ValueError(f"type must be a nonempty string over '012', got {t!r}")
    left = t.count("0") + t.count("2")
    right = t.count("1") + t.count("2")
    if left != right:
        raise ValueError(
            f"malformed type {t!r}: {left} entries in {{0,2}} but {right} in {{1,2}}")
    return left


def swap_type(t: str) -> str:
    """The type of ``(v, u)`` given the type of ``(u, v)``."""
    return t.translate(_SWAP)


def type_of(u: Sequence[int], v: Sequence[int]) -> str:
    u, v = ordset(u), ordset(v)
    if len(u) != len(v) or not u:
        raise ValueError(f"type_of needs equal nonzero sizes, got |u|={len(u)}, |v|={len(v)}")
    us, vs = set(u), set(v)
    return "".join("2" if a in us and a in vs else "0" if a in us else "1"
                   for a in sorted(us | vs))


def is_aligned_sets(u: Sequence[int], v: Sequence[int]) -> bool:
    u, v = ordset(u), ordset(v)
    if len(u) != len(v):
        return False
    common = set(u) & set(v)
    # position of a common element = number of smaller elements in the set
    return all(u.index(a) == v.index(a) for a in common)


def is_aligned_type(t: str) -> bool:
    type_width(t)
    zeros = ones = 0
    for c in t:
        if c == "2" and zeros != ones:
            return False
        zeros += c == "0"
        ones += c == "1"
    return True


def realize_type(t: str) -> tuple[OrdSet, OrdSet]:
    """The canonical pair ``(u, v)`` over ``0..len(t)-1`` with ``type_of(u, v) == t``."""
    type_width(t)
    u = tuple(i for i, c in enumerate(t) if c in "02")
    v = tuple(i for i, c in enumerate(t) if c in "12")
    return u, v


def aligned_types(max_length: int):
    """Yield every aligned type of length at most ``max_length``, shortest first."""
    from itertools import product
    for length in range(1, max_length + 1):
        for symbols in product("012", repeat=length):
            t = "".join(symbols)
            try:
                if is_aligned_type(t):
                    yield t
            except ValueError:
                continue


@dataclass(frozen=True)
class CycleSeq:
    """A sequence ``u_0, ..., u_{2m}`` of equal-size ordinal sets."""

    sets: tuple

    def __post_init__(self):
        sets = tuple(ordset(s) for s in self.sets)
        if len(sets) < 3 or len(sets) % 2 == 0:
            raise ValueError(f"a cycle needs 2m+1 >= 3 sets, got {len(sets)}")
        if len({len(s) for s in sets}) != 1:
            raise ValueError("all sets of a cycle must have the same size")
        object.__setattr__(self, "sets", sets)

    @property
    def m(self) -> int:
        return (len(self.sets) - 1) // 2

    def __len__(self):
        return len(self.sets)

    def __getitem__(self, j):
        return self.sets[j]

    def to_json(self) -> dict:
        return {"m": self.m, "sets": [list(s) for s in self.sets]}


def check_type_cycle(t: str, c: CycleSeq | Sequence[Sequence[int]]) -> Optional[str]:
    """Return ``None`` if ``c`` is a cycle for ``t``, else the first failure."""
    try:
        sets = c.sets if isinstance(c, CycleSeq) else CycleSeq(tuple(c)).sets
    except ValueError as exc:
        return str(exc)
    m = (len(sets) - 1) // 2

    def tp(a, b):
        try:
            return type_of(sets[a], sets[b])
        except ValueError as exc:
            return f"<{exc}>"

    for j in range(m):
        for a, b in ((2 * j, 2 * j + 1), (2 * j + 2, 2 * j + 1)):
            got = tp(a, b)
            if got != t:
                return f"tp(u_{a}, u_{b}) = {got}, expected {t}"
    got = tp(0, 2 * m)
    if got != t:
        return f"tp(u_0, u_{2 * m}) = {got}, expected {t}"
    return None


def verify_type_cycle(t: str, c) -> bool:
    return check_type_cycle(t, c) is None


# -- construction -------------------------------------------------------------
#
# Internally a cycle is a list of sorted lists of Fractions: density of the
# rationals stands in for the "limit of limit ordinals" room the induction
# needs, and every level is compressed back to 0..K-1 afterwards.

def _compress(sets):
    values = sorted({a for s in sets for a in s})
    rank = {a: i for i, a in enumerate(values)}
    return [[rank[a] for a in s] for s in sets]


def _between(lo, hi):
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    if not lo < hi:
        raise AssertionError(f"empty interval ({lo}, {hi})")
    return (lo + hi) / 2


def _max(*xs):
    xs = [x for x in xs if x is not None]
    return max(xs) if xs else None


def _min(*xs):
    xs = [x for x in xs if x is not None]
    return min(xs) if xs else None


def _at(s, i):
    return s[i] if 0 <= i < len(s) else None


def _realize_against(t, u, cap_below=None, floor_above=None):
    """A set ``w`` with ``type_of(u, w) == t`` (``u`` sorted Fractions).

    Elements of ``w`` below ``max(u)`` are kept below ``cap_below``; elements
    above ``max(u)`` are pushed above ``floor_above``.
    """
    w, run, i_u = [], 0, 0
    for c in t + "2":  # trailing sentinel flushes the last run of 1s
        if c == "1":
            run += 1
            continue
        if run:
            lo = u[i_u - 1] if i_u > 0 else None
            hi = u[i_u] if i_u < len(u) else None
            if hi is None:
                lo = _max(lo, floor_above)
            else:
                hi = _min(hi, cap_below)
            if lo is None:
                w.extend(hi - run + i for i in range(run))
            elif hi is None:
                w.extend(lo + 1 + i for i in range(run))
            else:
                w.extend(lo + (hi - lo) * (i + 1) / (run + 1) for i in range(run))
            run = 0
        if i_u < len(u):
            if c == "2":
                w.append(u[i_u])
            i_u += 1
    return sorted(w)


def _cycle(t: str) -> list:
    k = type_width(t)
    if t == "2":
        return [[0], [0], [0]]
    if t == "01":
        return [[0], [2], [1]]
    if t[-1] == "0":
        # mirror: reversing every edge turns a cycle for swap(t) into one for t
        u = _cycle(swap_type(t))
        two_m = len(u) - 1
        return [u[j] for j in range(two_m - 1, -1, -1)] + [u[two_m]]
    if t[-1] == "2":
        u = _cycle(t[:-1])
        beta = max(a for s in u for a in s) + 1
        return [s + [beta] for s in u]

    # t ends in 1 and k >= 2: drop the last 0 and the last 1, recurse, re-augment
    ell = len(t)
    l0 = t.rindex("0")
    k0 = sum(c in "12" for c in t[:l0])
    t_prime = t[:l0] + "1" * (ell - 2 - l0)
    u = [[Fraction(a) for a in s] for s in _cycle(t_prime)]
    two_m = len(u) - 1
    top = max(a for s in u for a in s)
    beta = {}

    if k0 == k - 1:
        # every element of v' lies below max(u): new elements go on top,
        # evens below odds and beta_0 < beta_2m
        for j in range(0, two_m + 1, 2):
            beta[j] = top + 1
        beta[two_m] = top + 2
        beta_star = top + 3
    elif k0 == 0:
        # t = 0^k 1^k: each even set gets a new max just below its neighbours
        for j in range(0, two_m + 1, 2):
            nbrs = [x for x in (j - 1, j + 1) if 0 < x < two_m]
            hi = _min(*(u[x][0] for x in nbrs), u[two_m][0] if j == 0 else None)
            lo = _max(u[j][-1], beta.get(0) if j == two_m else None)
            beta[j] = _between(lo, hi)
        beta_star = max(top, *beta.values()) + 1
    else:
        # odd (v-role) sets: their elements from index k0 on sit above every
        # u-role element, so they may be pushed arbitrarily high
        for j in range(1, two_m, 2):
            for i in range(k0, k - 1):
                u[j][i] = top + 1 + i
        for j in range(0, two_m + 1, 2):
            nbrs = [x for x in (j - 1, j + 1) if 0 < x < two_m]
            lo = _max(u[j][-1], *(u[x][k0 - 1] for x in nbrs))
            hi = _min(*(u[x][k0] for x in nbrs))
            beta[j] = _between(lo, hi)
        beta_star = max(max(a for s in u for a in s), *beta.values()) + 1

    star = [sorted(u[j] + [beta[j] if j % 2 == 0 else beta_star]) for j in range(two_m + 1)]
    if _tp_frac(star[0], star[two_m]) == t:
        return _compress(star)

    # closing pair is off: add u*_{2m+1}, u*_{2m+2} and rotate two steps
    last = star[two_m]
    w = _realize_against(t, star[0], cap_below=last[k0], floor_above=beta_star)
    gamma = _between(_max(star[0][k - 2], w[k0 - 1], last[k0 - 1]), last[k0])
    odd_new = sorted(star[0][:k - 1] + [gamma])
    return _compress([odd_new, w] + star)


def _tp_frac(u, v):
    us, vs = set(u), set(v)
    return "".join("2" if a in us and a in vs else "0" if a in us else "1"
                   for a in sorted(us | vs))


def build_type_cycle(t: str) -> CycleSeq:
    """Construct a type cycle for the aligned type ``t``.

    Follows the induction on the width: a trailing ``2`` gets a common top
    element, a trailing ``1`` removes the last ``0`` and last ``1``, recurses
    and re-inserts them (rotating by two steps when the closing pair comes out
    wrong); a trailing ``0`` is the mirror image of the trailing-``1`` case.

    >>> build_type_cycle("01").sets
    ((0,), (2,), (1,))
    """
    if not is_aligned_type(t):
        raise ValueError(f"type {t!r} is not aligned; no cycle is guaranteed")
    cycle = CycleSeq(tuple(tuple(s) for s in _cycle(t)))
    problem = check_type_cycle(t, cycle)
    if problem is not None:  # pragma: no cover - construction invariant
        raise AssertionError(f"cycle construction failed for {t}: {problem}")
    return cycle
