"""Truncated functions ``{0..N-1} -> N`` and sparse integer functions on grid regions.

A point of the grid is a pair ``(i, j)``: ``i`` is the column (the argument of
a truncated function ``f``) and ``j`` the height.  The region under ``f`` is
``I(f) = {(i, j) : j <= f(i)}``.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Sequence

TruncFn = tuple  # tuple of N non-negative ints


def truncfn(values: Iterable[int]) -> TruncFn:
    out = tuple(int(v) for v in values)
    if any(v < 0 for v in out):
        raise ValueError(f"truncated function values must be >= 0, got {out}")
    return out


def meet(fns: Sequence[Sequence[int]]) -> TruncFn:
    """Pointwise minimum of a nonempty list of equal-length functions."""
    if not fns:
        raise ValueError("meet of an empty list is undefined")
    n = len(fns[0])
    if any(len(f) != n for f in fns):
        raise ValueError("meet needs functions with a common column count")
    return tuple(min(col) for col in zip(*fns))


def join(fns: Sequence[Sequence[int]]) -> TruncFn:
    if not fns:
        raise ValueError("join of an empty list is undefined")
    return tuple(max(col) for col in zip(*fns))


def leq(f: Sequence[int], g: Sequence[int], start: int = 0) -> bool:
    """``f(i) <= g(i)`` for every column ``i >= start``."""
    return all(a <= b for a, b in list(zip(f, g))[start:])


def region(f: Sequence[int]) -> Iterator[tuple]:
    for i, h in enumerate(f):
        for j in range(h + 1):
            yield (i, j)


def in_region(f: Sequence[int], x: tuple) -> bool:
    i, j = x
    return 0 <= i < len(f) and 0 <= j <= f[i]


class GridFn:
    """An integer-valued function on ``I(bound)``, stored sparsely.

    Keys absent from ``entries`` are 0.  Instances are treated as immutable;
    arithmetic returns new objects, restricting both operands to the
    intersection of their domains.
    """

    __slots__ = ("bound", "entries")

    def __init__(self, bound: Sequence[int], entries: Mapping | None = None):
        self.bound = truncfn(bound)
        clean = {}
        for x, v in (entries or {}).items():
            x = (int(x[0]), int(x[1]))
            if not in_region(self.bound, x):
                raise ValueError(f"point {x} outside the domain I({list(self.bound)})")
            if v:
                clean[x] = int(v)
        self.entries = clean

    @classmethod
    def zero(cls, bound):
        return cls(bound)

    @classmethod
    def constant(cls, bound, c: int):
        return cls(bound, {x: c for x in region(bound)})

    @property
    def N(self) -> int:
        return len(self.bound)

    def __call__(self, x) -> int:
        return self.entries.get(tuple(x), 0)

    def domain(self):
        return region(self.bound)

    def support(self) -> frozenset:
        return frozenset(self.entries)

    def restrict(self, bound) -> "GridFn":
        bound = meet([self.bound, bound])
        return GridFn(bound, {x: v for x, v in self.entries.items() if in_region(bound, x)})

    def _combine(self, other, sign):
        bound = meet([self.bound, other.bound])
        out = {x: v for x, v in self.entries.items() if in_region(bound, x)}
        for x, v in other.entries.items():
            if in_region(bound, x):
                out[x] = out.get(x, 0) + sign * v
        return GridFn(bound, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return GridFn(self.bound, {x: -v for x, v in self.entries.items()})

    def __mul__(self, c: int):
        return GridFn(self.bound, {x: c * v for x, v in self.entries.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GridFn):
            return NotImplemented
        return self.bound == other.bound and self.entries == other.entries

    def __hash__(self):
        return hash((self.bound, frozenset(self.entries.items())))

    def is_zero(self) -> bool:
        return not self.entries

    def max_column(self) -> int:
        """Largest column carrying a nonzero value, or -1."""
        return max((i for i, _ in self.entries), default=-1)

    def __repr__(self):
        return f"GridFn({list(self.bound)}, {dict(sorted(self.entries.items()))})"


def eq_above(phi: GridFn, psi: GridFn, kstar: int) -> bool:
    """Agreement on every point of the common domain with column ``>= kstar``."""
    return not [x for x in (phi - psi).entries if x[0] >= kstar]


def disagreements_above(phi: GridFn, psi: GridFn, kstar: int) -> list:
    return sorted(x for x in (phi - psi).entries if x[0] >= kstar)
