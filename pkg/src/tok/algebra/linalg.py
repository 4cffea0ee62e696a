"""Exact sparse matrices over Z and Q: Smith normal form and rank."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator, Mapping


@dataclass
class Matrix:
    """Sparse matrix with explicit shape; entries are ints or Fractions."""

    nrows: int
    ncols: int
    entries: dict[tuple[int, int], int | Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for (i, j), v in list(self.entries.items()):
            if not (0 <= i < self.nrows and 0 <= j < self.ncols):
                raise IndexError(f"entry ({i}, {j}) outside {self.nrows}x{self.ncols}")
            if not v:
                del self.entries[i, j]

    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def dense(self) -> list[list]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def __iter__(self) -> Iterator[tuple[int, int, int | Fraction]]:
        for (i, j), v in self.entries.items():
            yield i, j, v


def smith_normal_form(M: Matrix | list[list[int]]) -> tuple[int, list[int]]:
    """Rank and elementary divisors ``d1 | d2 | ...`` of an integer matrix."""
    a = M.dense() if isinstance(M, Matrix) else [list(r) for r in M]
    # drop zero rows/columns up front; they never matter
    a = [r for r in a if any(r)]
    if not a:
        return 0, []
    keep = [j for j in range(len(a[0])) if any(r[j] for r in a)]
    a = [[r[j] for j in keep] for r in a]
    for r in a:
        for v in r:
            if isinstance(v, Fraction) and v.denominator != 1:
                raise ValueError("smith_normal_form needs an integer matrix")
    a = [[int(v) for v in r] for r in a]
    m, n = len(a), len(a[0])
    divisors: list[int] = []
    t = 0
    while t < min(m, n):
        # magnitude-minimal pivot in the remaining block
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        a[t], a[pi] = a[pi], a[t]
        if pj != t:
            for r in a:
                r[t], r[pj] = r[pj], r[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                v = a[i][t]
                if v:
                    q = v // p
                    ri, rt = a[i], a[t]
                    for j in range(t, n):
                        if rt[j]:
                            ri[j] -= q * rt[j]
                    if ri[t]:
                        dirty = True
            for j in range(t + 1, n):
                v = a[t][j]
                if v:
                    q = v // p
                    for r in a[t:]:
                        if r[t]:
                            r[j] -= q * r[t]
                    if a[t][j]:
                        dirty = True
            if not dirty:
                # pivot must divide the whole remaining block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                for j in range(t, n):
                    a[t][j] += a[bad][j]
                continue
            # move the smallest remaining entry of row/column t into the pivot
            best = (abs(p), t, t)
            for i in range(t + 1, m):
                if a[i][t] and abs(a[i][t]) < best[0]:
                    best = (abs(a[i][t]), i, t)
            for j in range(t + 1, n):
                if a[t][j] and abs(a[t][j]) < best[0]:
                    best = (abs(a[t][j]), t, j)
            _, bi, bj = best
            if bi != t:
                a[t], a[bi] = a[bi], a[t]
            if bj != t:
                for r in a:
                    r[t], r[bj] = r[bj], r[t]
        divisors.append(abs(a[t][t]))
        t += 1
    return len(divisors), sorted(divisors)


def _row_integerize(row: Mapping[int, int | Fraction]) -> dict[int, int]:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    return {j: int(v * den) for j, v in row.items() if v}


def rank_q(M: Matrix | list[list]) -> int:
    """Rank over Q by fraction-free sparse row elimination."""
    if not isinstance(M, Matrix):
        M = Matrix.from_rows(M)
    rows: dict[int, dict[int, int | Fraction]] = {}
    for i, j, v in M:
        rows.setdefault(i, {})[j] = v
    work = [_row_integerize(r) for r in rows.values()]
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for row in work:
        row = dict(row)
        while row:
            col = min(row)
            piv = pivots.get(col)
            if piv is None:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                pivots[col] = {j: v // g for j, v in row.items()}
                rank += 1
                break
            a, b = piv[col], row[col]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            new = {j: v * fa for j, v in row.items()}
            for j, v in piv.items():
                new[j] = new.get(j, 0) - v * fb
            row = {j: v for j, v in new.items() if v}
            if row:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                row = {j: v // g for j, v in row.items()}
    return rank
