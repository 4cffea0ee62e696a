"""Delta-graded chain complexes: homology over Z and Q, and Gaussian cancellation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Mapping, Sequence

from .algebra.linalg import Matrix, rank_q, smith_normal_form
from .algebra.poly import Poly


class ComplexError(ValueError):
    pass


@dataclass
class GradedComplex:
    """Generators with a delta-degree and a filtration position; ``diff[src][tgt]`` is a coefficient."""

    degrees: list[int]
    diff: dict[int, dict[int, Any]]
    positions: list[int] = field(default_factory=list)
    labels: list[Hashable] = field(default_factory=list)

    def __post_init__(self):
        if not self.positions:
            self.positions = [0] * len(self.degrees)
        if not self.labels:
            self.labels = list(range(len(self.degrees)))
        self.diff = {s: {t: v for t, v in row.items() if v} for s, row in self.diff.items()}
        self.diff = {s: row for s, row in self.diff.items() if row}

    def __len__(self) -> int:
        return len(self.degrees)

    def map_coefficients(self, f: Callable[[Any], Any]) -> "GradedComplex":
        diff = {s: {t: f(v) for t, v in row.items()} for s, row in self.diff.items()}
        return GradedComplex(list(self.degrees), diff, list(self.positions), list(self.labels))

    def euler_characteristic(self) -> int:
        return sum(-1 if (d // 2) % 2 else 1 for d in self.degrees)

    def by_degree(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            out.setdefault(d, []).append(i)
        return out


@dataclass
class HomologyResult:
    """Per delta-degree: free rank and torsion divisors (> 1)."""

    ranks: dict[int, int]
    torsion: dict[int, list[int]] = field(default_factory=dict)

    @property
    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def support(self) -> list[int]:
        return sorted(d for d, r in self.ranks.items() if r)

    def nonzero(self) -> "HomologyResult":
        return HomologyResult(
            {d: r for d, r in self.ranks.items() if r},
            {d: t for d, t in self.torsion.items() if t},
        )

    def euler_characteristic(self) -> int:
        return sum((-1 if (d // 2) % 2 else 1) * r for d, r in self.ranks.items())

    def to_json(self) -> dict:
        degs = sorted(set(self.ranks) | set(self.torsion))
        return {
            "delta_graded": [
                {"delta": d, "rank": self.ranks.get(d, 0), "torsion": list(self.torsion.get(d, []))}
                for d in degs
                if self.ranks.get(d, 0) or self.torsion.get(d)
            ],
            "total_rank": self.total_rank,
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomologyResult):
            return NotImplemented
        a, b = self.nonzero(), other.nonzero()
        return a.ranks == b.ranks and a.torsion == b.torsion


def _is_zero(v) -> bool:
    return not v


def d_squared_check(c: GradedComplex) -> bool:
    for src, row in c.diff.items():
        acc: dict[int, Any] = {}
        for mid, a in row.items():
            for tgt, b in c.diff.get(mid, {}).items():
                acc[tgt] = acc.get(tgt, 0) + a * b
        if any(not _is_zero(v) for v in acc.values()):
            return False
    return True


def _check_degree(c: GradedComplex) -> None:
    for s, row in c.diff.items():
        for t in row:
            if c.degrees[t] != c.degrees[s] - 2:
                raise ComplexError(f"differential entry {c.labels[s]} -> {c.labels[t]} does not lower delta by 2")


def _inverse(p):
    if isinstance(p, Poly):
        if not p.is_constant() or p.constant_value() not in (1, -1):
            raise ComplexError(f"pivot {p} is not a unit")
        return p.constant_value()
    if isinstance(p, int):
        if p not in (1, -1):
            raise ComplexError(f"pivot {p} is not a unit over Z")
        return p
    if isinstance(p, Fraction):
        if not p:
            raise ComplexError("zero pivot")
        return 1 / p
    raise ComplexError(f"unsupported coefficient type {type(p).__name__}")


def is_unit(p) -> bool:
    try:
        _inverse(p)
    except ComplexError:
        return False
    return True


class _Work:
    """Mutable forward/backward sparse storage for sequential cancellation."""

    def __init__(self, c: GradedComplex):
        self.alive = set(range(len(c)))
        self.fwd: dict[int, dict[int, Any]] = {s: dict(row) for s, row in c.diff.items()}
        self.bwd: dict[int, dict[int, Any]] = {}
        for s, row in self.fwd.items():
            for t, v in row.items():
                self.bwd.setdefault(t, {})[s] = v

    def cancel(self, x: int, y: int) -> None:
        p = self.fwd[x][y]
        inv = _inverse(p)
        srcs = [(z, a) for z, a in self.bwd.get(y, {}).items() if z != x]
        tgts = [(t, b) for t, b in self.fwd.get(x, {}).items() if t != y]
        for z, a in srcs:
            row = self.fwd.setdefault(z, {})
            for t, b in tgts:
                v = row.get(t, 0) - a * inv * b
                if _is_zero(v):
                    row.pop(t, None)
                    self.bwd.get(t, {}).pop(z, None)
                else:
                    row[t] = v
                    self.bwd.setdefault(t, {})[z] = v
        for g in (x, y):
            for t in list(self.fwd.get(g, {})):
                self.bwd.get(t, {}).pop(g, None)
            self.fwd.pop(g, None)
            for s in list(self.bwd.get(g, {})):
                self.fwd.get(s, {}).pop(g, None)
            self.bwd.pop(g, None)
            self.alive.discard(g)

    def result(self, c: GradedComplex) -> tuple[GradedComplex, list[int]]:
        keep = sorted(self.alive)
        new = {old: i for i, old in enumerate(keep)}
        diff = {
            new[s]: {new[t]: v for t, v in row.items() if t in new and not _is_zero(v)}
            for s, row in self.fwd.items()
            if s in new
        }
        return (
            GradedComplex(
                [c.degrees[i] for i in keep],
                diff,
                [c.positions[i] for i in keep],
                [c.labels[i] for i in keep],
            ),
            keep,
        )


PivotFilter = Callable[[int, int, Any], bool]


def cancel(
    c: GradedComplex,
    pivot_filter: PivotFilter | None = None,
    order: Callable[[int], Any] | None = None,
) -> GradedComplex:
    """Cancel every admissible invertible entry, one pair at a time.

    Sources are scanned in ascending ``order`` (default: delta, position, index);
    for each source the first admissible target in the same order is used.
    The induced differential picks up ``-a * p^-1 * b`` for every zig-zag
    ``z -a-> y <-p- x -b-> t`` through a cancelled pair.
    """
    key = order or (lambda i: (c.degrees[i], c.positions[i], i))
    w = _Work(c)
    changed = True
    while changed:
        changed = False
        for x in sorted(w.alive, key=key):
            if x not in w.alive:
                continue
            row = w.fwd.get(x)
            if not row:
                continue
            for y in sorted(row, key=key):
                v = row[y]
                if not is_unit(v):
                    continue
                if pivot_filter is not None and not pivot_filter(x, y, v):
                    continue
                w.cancel(x, y)
                changed = True
                break
    return w.result(c)[0]


def cancel_pairs(c: GradedComplex, pairs: Sequence[tuple[int, int]]) -> GradedComplex:
    """Cancel an explicit sequence of pivot pairs (indices into ``c``)."""
    w = _Work(c)
    for x, y in pairs:
        if x not in w.alive or y not in w.alive or y not in w.fwd.get(x, {}):
            raise ComplexError(f"pivot {c.labels[x]} -> {c.labels[y]} is no longer present")
        w.cancel(x, y)
    return w.result(c)[0]


def _matrix(c: GradedComplex, deg: int, groups: dict[int, list[int]]) -> Matrix:
    """Matrix of d from degree ``deg`` to ``deg - 2``; rows are sources."""
    src = groups.get(deg, [])
    tgt = groups.get(deg - 2, [])
    ti = {t: j for j, t in enumerate(tgt)}
    entries = {}
    for i, s in enumerate(src):
        for t, v in c.diff.get(s, {}).items():
            entries[i, ti[t]] = v
    return Matrix(len(src), len(tgt), entries)


def homology_z(c: GradedComplex, simplify: bool = True) -> HomologyResult:
    """Free ranks and torsion per delta, via Smith normal form."""
    _check_degree(c)
    if not d_squared_check(c):
        raise ComplexError("d^2 != 0")
    for row in c.diff.values():
        for v in row.values():
            if isinstance(v, Fraction) and v.denominator != 1:
                raise ComplexError("homology_z needs integer coefficients")
            if isinstance(v, Poly) and not v.is_constant():
                raise ComplexError("homology_z needs integer coefficients")
    c = c.map_coefficients(lambda v: v.constant_value() if isinstance(v, Poly) else int(v))
    if simplify:
        c = cancel(c)
    groups = c.by_degree()
    ranks, torsion = {}, {}
    snf = {d: smith_normal_form(_matrix(c, d, groups)) for d in groups}
    for d, gens in groups.items():
        r_out = snf[d][0]
        r_in, divs = snf.get(d + 2, (0, []))
        ranks[d] = len(gens) - r_out - r_in
        torsion[d] = [x for x in divs if x > 1]
    return HomologyResult(ranks, torsion).nonzero()


def homology_q(c: GradedComplex, simplify: bool = False) -> HomologyResult:
    """Ranks per delta over Q by rank-nullity."""
    _check_degree(c)
    if not d_squared_check(c):
        raise ComplexError("d^2 != 0")
    c = c.map_coefficients(lambda v: Fraction(v.constant_value()) if isinstance(v, Poly) else Fraction(v))
    if simplify:
        c = cancel(c)
    groups = c.by_degree()
    rk = {d: rank_q(_matrix(c, d, groups)) for d in groups}
    ranks = {d: len(g) - rk[d] - rk.get(d + 2, 0) for d, g in groups.items()}
    return HomologyResult(ranks).nonzero()


def from_twisted(tc, evaluation: Mapping[str, Fraction | int] | None = None, include_v: bool = True) -> GradedComplex:
    """GradedComplex of a TwistedComplex; d_v entries are evaluated if an assignment is given."""
    diff: dict[int, dict[int, Any]] = {}
    for s, row in tc.d_odd.items():
        diff[s] = {t: (Fraction(v) if evaluation is not None else v) for t, v in row.items()}
    if include_v:
        for s, row in tc.d_v.items():
            r = diff.setdefault(s, {})
            for t, p in row.items():
                val = p.evaluate(evaluation) if evaluation is not None else p
                r[t] = r.get(t, 0) + val
    return GradedComplex(list(tc.delta), diff, [s for s, _ in tc.basis], list(tc.basis))
