"""Hechler conditions and finite-support iteration conditions at finite scale.

Bounds are eventually constant functions ``omega -> omega``; iteration
conditions carry ground bounds at every coordinate (no names).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence


@dataclass(frozen=True)
class EvConstFn:
    """``f(i) = head[i]`` for ``i < len(head)``, else ``tail``."""

    head: tuple = ()
    tail: int = 0

    def __post_init__(self):
        head = tuple(int(v) for v in self.head)
        if any(v < 0 for v in head) or self.tail < 0:
            raise ValueError("bounds take values in the naturals")
        # canonical form: no trailing head entries equal to the tail
        while head and head[-1] == self.tail:
            head = head[:-1]
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "tail", int(self.tail))

    @classmethod
    def const(cls, c: int) -> "EvConstFn":
        return cls((), c)

    def __call__(self, i: int) -> int:
        return self.head[i] if i < len(self.head) else self.tail

    def horizon(self) -> int:
        return len(self.head)

    def __ge__(self, other: "EvConstFn") -> bool:
        span = max(self.horizon(), other.horizon())
        return self.tail >= other.tail and all(self(i) >= other(i) for i in range(span))

    def __le__(self, other: "EvConstFn") -> bool:
        return other >= self

    def pmax(self, other: "EvConstFn") -> "EvConstFn":
        span = max(self.horizon(), other.horizon())
        return EvConstFn(tuple(max(self(i), other(i)) for i in range(span)),
                         max(self.tail, other.tail))


def pmax(fns: Iterable[EvConstFn]) -> EvConstFn:
    out = EvConstFn.const(0)
    for f in fns:
        out = out.pmax(f)
    return out


@dataclass(frozen=True)
class HechlerCond:
    stem: tuple
    bound: EvConstFn

    def __post_init__(self):
        stem = tuple(int(v) for v in self.stem)
        if any(v < 0 for v in stem):
            raise ValueError(f"stem entries must be naturals, got {stem}")
        object.__setattr__(self, "stem", stem)

    def to_json(self) -> dict:
        return {"stem": list(self.stem), "head": list(self.bound.head), "tail": self.bound.tail}

    @classmethod
    def from_json(cls, d: Mapping) -> "HechlerCond":
        return cls(tuple(d["stem"]), EvConstFn(tuple(d.get("head", ())), int(d["tail"])))


def extension_failure(q: HechlerCond, p: HechlerCond) -> Optional[str]:
    """Why ``q <= p`` fails, or ``None``."""
    if q.stem[:len(p.stem)] != p.stem:
        return f"stem {list(q.stem)} does not extend {list(p.stem)}"
    if not q.bound >= p.bound:
        return "bound of q is not pointwise >= bound of p"
    for i in range(len(p.stem), len(q.stem)):
        if not q.stem[i] > p.bound(i):
            return f"new stem entry s_q({i}) = {q.stem[i]} is not above f_p({i}) = {p.bound(i)}"
    return None


def extends(q: HechlerCond, p: HechlerCond) -> bool:
    """``q <= p`` in Hechler forcing."""
    return extension_failure(q, p) is None


def compatible(p: HechlerCond, q: HechlerCond) -> tuple[bool, Optional[HechlerCond]]:
    """Decide compatibility via the comparable-stem merge.

    Incomparable stems give ``False``: any common extension would have a stem
    extending both.
    """
    if len(p.stem) > len(q.stem):
        p, q = q, p
    if q.stem[:len(p.stem)] != p.stem:
        return False, None
    w = HechlerCond(q.stem, p.bound.pmax(q.bound))
    if extends(w, p) and extends(w, q):
        return True, w
    return False, None


# -- iteration conditions -----------------------------------------------------

@dataclass(frozen=True)
class IterCond:
    coords: tuple  # sorted ((alpha, HechlerCond), ...)

    def __init__(self, coords: Mapping | Iterable = ()):
        items = coords.items() if isinstance(coords, Mapping) else coords
        items = tuple(sorted((int(a), c) for a, c in items))
        if len({a for a, _ in items}) != len(items):
            raise ValueError("repeated coordinate")
        if any(a < 0 for a, _ in items):
            raise ValueError("coordinates are ordinals >= 0")
        object.__setattr__(self, "coords", items)

    @property
    def dom(self) -> tuple:
        return tuple(a for a, _ in self.coords)

    def __getitem__(self, alpha) -> HechlerCond:
        return dict(self.coords)[alpha]

    def as_dict(self) -> dict:
        return dict(self.coords)

    def restrict(self, beta: int) -> "IterCond":
        """``p`` restricted to the coordinates below ``beta``."""
        return IterCond((a, c) for a, c in self.coords if a < beta)

    def to_json(self) -> dict:
        return {"dom": list(self.dom), "coords": {str(a): c.to_json() for a, c in self.coords}}

    @classmethod
    def from_json(cls, d: Mapping) -> "IterCond":
        coords = {int(a): HechlerCond.from_json(c) for a, c in d["coords"].items()}
        if "dom" in d and sorted(d["dom"]) != sorted(coords):
            raise ValueError(f"dom {d['dom']} does not match coords {sorted(coords)}")
        return cls(coords)


def iter_extension_failure(q: IterCond, p: IterCond) -> Optional[str]:
    qd = q.as_dict()
    for a, pc in p.coords:
        if a not in qd:
            return f"coordinate {a} missing"
        why = extension_failure(qd[a], pc)
        if why:
            return f"coordinate {a}: {why}"
    return None


def iter_extends(q: IterCond, p: IterCond) -> bool:
    return iter_extension_failure(q, p) is None


def _cut(r: IterCond) -> int:
    return max(r.dom) + 1 if r.dom else 0


def lower_bound_premise_failure(A: Sequence[IterCond], r: IterCond) -> Optional[str]:
    for x in range(len(A)):
        for y in range(x + 1, len(A)):
            px, py = A[x].as_dict(), A[y].as_dict()
            for a in sorted(set(px) & set(py)):
                if px[a].stem != py[a].stem:
                    return f"conditions {x} and {y} have different stems at coordinate {a}"
    cut = _cut(r)
    for x, p in enumerate(A):
        why = iter_extension_failure(r, p.restrict(cut))
        if why:
            return f"r does not extend condition {x} below {cut}: {why}"
    return None


def iter_lower_bound(A: Sequence[IterCond], r: IterCond) -> IterCond:
    """Common lower bound of ``A`` and ``r``: ``r`` below ``max(dom r)+1``,
    shared stems and pointwise-max bounds above it."""
    A = list(A)
    why = lower_bound_premise_failure(A, r)
    if why:
        raise ValueError(why)
    cut = _cut(r)
    out = dict(r.coords)
    above = sorted({a for p in A for a in p.dom if a >= cut})
    for a in above:
        members = [p[a] for p in A if a in p.dom]
        out[a] = HechlerCond(members[0].stem, pmax(c.bound for c in members))
    return IterCond(out)


# -- random generators for property tests -------------------------------------

def random_evconst(rng: random.Random, horizon: int = 4, top: int = 6) -> EvConstFn:
    return EvConstFn(tuple(rng.randint(0, top) for _ in range(rng.randint(0, horizon))),
                     rng.randint(0, top))


def random_hechler(rng: random.Random, max_stem: int = 4, top: int = 8) -> HechlerCond:
    return HechlerCond(tuple(rng.randint(0, top) for _ in range(rng.randint(0, max_stem))),
                       random_evconst(rng, top=top))


def random_extension(p: HechlerCond, rng: random.Random, grow: int = 3) -> HechlerCond:
    """A random ``q <= p``."""
    stem = list(p.stem)
    for i in range(rng.randint(0, grow)):
        stem.append(p.bound(len(stem)) + 1 + rng.randint(0, 3))
    span = max(p.bound.horizon(), 1) + rng.randint(0, 3)
    head = tuple(p.bound(i) + rng.randint(0, 2) for i in range(span))
    return HechlerCond(tuple(stem), EvConstFn(head, p.bound.tail + rng.randint(0, 2)))


def random_lower_bound_premise(rng: random.Random, size: int = 4, coords: int = 10):
    """Seeded ``(A, r)`` satisfying the lower-bound premises."""
    stems = {a: tuple(rng.randint(0, 6) for _ in range(rng.randint(0, 3))) for a in range(coords)}
    A = []
    for _ in range(rng.randint(1, size)):
        dom = rng.sample(range(coords), rng.randint(0, 4))
        A.append(IterCond({a: HechlerCond(stems[a], random_evconst(rng)) for a in dom}))
    cut = rng.randint(0, coords)
    r = {}
    for a in range(cut):
        covering = [p[a] for p in A if a in p.dom]
        if covering:
            base = HechlerCond(covering[0].stem, pmax(c.bound for c in covering))
            r[a] = random_extension(base, rng)
        elif rng.random() < 0.3:
            r[a] = random_hechler(rng)
    # the premise is phrased with max(dom r) + 1, so trim the cut to dom r
    rc = IterCond(r)
    return A, rc
