"""Exact solution of integer linear systems ``A x = b`` over the integers.

The matrix is brought to lower-triangular column echelon (Hermite) form
``A U = H`` by unimodular column operations, ``H y = b`` is solved by forward
substitution, and ``x = U y``.  Free coordinates of ``y`` are set to zero, so
the returned solution is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class IntSolution:
    sat: bool
    x: Optional[list] = None
    rank: int = 0
    # for UNSAT: the row of ``H y = b`` that cannot be met, and why
    certificate: dict = field(default_factory=dict)


def _xgcd(a: int, b: int):
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def column_hnf(A: list) -> tuple[list, list, list]:
    """Column-style Hermite form.

    Returns ``(H, U, pivots)`` where ``H = A U``, ``U`` is unimodular and
    ``pivots[c]`` is the row of the pivot in column ``c`` (pivot entries are
    positive, entries left of a pivot are reduced modulo it).
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    H = [list(r) for r in A]
    U = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def colop(i, j, a, b, c, d):
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for M in (H, U):
            for r in M:
                x, y = r[i], r[j]
                r[i], r[j] = a * x + b * y, c * x + d * y

    pivots = []
    c = 0
    for r in range(rows):
        if c == cols:
            break
        for j in range(c + 1, cols):
            if H[r][j] == 0:
                continue
            x, y = H[r][c], H[r][j]
            g, s, t = _xgcd(x, y)
            # [s, -y/g; t, x/g] has determinant 1
            colop(c, j, s, t, -y // g, x // g)
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            colop(c, c, -1, 0, -1, 0)
        p = H[r][c]
        for j in range(c):
            q = H[r][j] // p
            if q:
                colop(j, c, 1, -q, 0, 1)
        pivots.append(r)
        c += 1
    return H, U, pivots


def solve(A: list, b: list, ncols: Optional[int] = None) -> IntSolution:
    """Find an integer ``x`` with ``A x = b`` or report infeasibility."""
    rows = len(A)
    cols = len(A[0]) if rows else (ncols or 0)
    if len(b) != rows:
        raise ValueError(f"right-hand side has {len(b)} entries for {rows} rows")
    if rows == 0:
        return IntSolution(True, [0] * cols, 0)
    H, U, pivots = column_hnf(A)
    rank = len(pivots)
    y = [0] * cols
    pivot_of_row = {r: c for c, r in enumerate(pivots)}
    for r in range(rows):
        # H[r][c] == 0 for every column c whose pivot row lies below r
        partial = sum(H[r][c] * y[c] for c in range(rank) if pivots[c] < r)
        residual = b[r] - partial
        c = pivot_of_row.get(r)
        if c is None:
            if residual != 0:
                return IntSolution(False, rank=rank, certificate={
                    "row": r, "kind": "inconsistent", "residual": residual})
            continue
        p = H[r][c]
        if residual % p:
            return IntSolution(False, rank=rank, certificate={
                "row": r, "kind": "non-divisible", "pivot": p, "residual": residual})
        y[c] = residual // p
    x = [sum(U[i][c] * y[c] for c in range(rank)) for i in range(cols)]
    return IntSolution(True, x, rank)
