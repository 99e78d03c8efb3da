"""Exact Gaussian elimination over Q(q) (``RatFunc`` entries)."""

from __future__ import annotations

from typing import Sequence

import flint

from .pi_ring import RatFunc

ZERO_R = RatFunc(flint.fmpq_poly())
ONE_R = RatFunc(flint.fmpq_poly([1]))


def rref(rows: Sequence[Sequence[RatFunc]]) -> tuple[list[list[RatFunc]], list[int]]:
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[RatFunc]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[RatFunc]], ncols: int) -> list[list[RatFunc]]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [[ONE_R if i == j else ZERO_R for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO_R] * ncols
        v[f] = ONE_R
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def matmul(a: Sequence[Sequence[RatFunc]], b: Sequence[Sequence[RatFunc]]) -> list[list[RatFunc]]:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = ZERO_R
            for t in range(k):
                if a[i][t] and b[t][j]:
                    acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out
