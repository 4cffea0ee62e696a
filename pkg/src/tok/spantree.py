"""Spanning-tree complexes: cancel the vertical (Koszul) part at disconnected resolutions.

Over a generic evaluation every circle weight is invertible, so the vertical
differential at a resolution with a non-basepoint circle is an acyclic Koszul
complex and cancels completely.  What survives lives at the connected
resolutions, which correspond to spanning trees of the Tait graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra.exterior import left_gen_sign, popcount
from .cube import TwistedComplex, build_complex
from .diagram import MarkedDiagram
from .homology import GradedComplex, HomologyResult, cancel, d_squared_check, from_twisted, homology_q


class SpanTreeError(ValueError):
    pass


class InternalTreeError(RuntimeError):
    pass


@dataclass(frozen=True)
class Evaluation:
    """Assignment of positive rationals to mark variables."""

    values: Mapping[str, Fraction]

    def __post_init__(self):
        vals = {str(k): Fraction(v) for k, v in self.values.items()}
        bad = [k for k, v in vals.items() if v <= 0]
        if bad:
            raise SpanTreeError(f"evaluation values must be positive: {', '.join(sorted(bad))}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def default(cls, d: MarkedDiagram, scheme: str = "index") -> "Evaluation":
        """``x_i -> i`` by mark position; ``scheme="square"`` gives ``i**2 + 1`` instead."""
        names = list(dict.fromkeys(m for m, _ in d.marks))
        if scheme == "index":
            return cls({m: i + 1 for i, m in enumerate(names)})
        if scheme == "square":
            return cls({m: (i + 1) ** 2 + 1 for i, m in enumerate(names)})
        raise ValueError(f"unknown evaluation scheme {scheme!r}")

    @classmethod
    def parse(cls, text: str) -> "Evaluation":
        vals = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            name, sep, val = part.partition("=")
            if not sep:
                raise SpanTreeError(f"bad evaluation item {part!r}; expected name=value")
            try:
                vals[name.strip()] = Fraction(val.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise SpanTreeError(f"bad evaluation value in {part!r}") from exc
        return cls(vals)

    def for_diagram(self, d: MarkedDiagram) -> dict[str, Fraction]:
        missing = sorted({m for m, _ in d.marks} - set(self.values))
        if missing:
            raise SpanTreeError(f"evaluation misses mark variables {', '.join(missing)}")
        return dict(self.values)

    def circle_weight(self, d: MarkedDiagram, names: list[str]) -> Fraction:
        return sum((self.values[m] for m in names), Fraction(0))

    def to_json(self) -> dict[str, str]:
        return {k: str(v) for k, v in sorted(self.values.items())}


def koszul_acyclicity_check(d: MarkedDiagram, state: int, ev: Evaluation, reduced: bool = True) -> bool:
    """Is the evaluated vertical complex at ``state`` acyclic?"""
    ev.for_diagram(d)
    r = d.resolve(state)
    bp = d.basepoint_circle(r) if reduced else None
    if reduced and bp is None:
        raise SpanTreeError("the reduced complex needs a basepoint")
    weights = [ev.circle_weight(d, ms) for ms in d.circle_weights(r)]
    live = [i for i in range(r.k) if i != bp]
    zero = [i for i in live if not weights[i]]
    if zero:
        raise SpanTreeError(f"circle weight vanishes on circle(s) {zero} of resolution {state:b}")
    masks = [m for m in range(1 << r.k) if bp is None or not m >> bp & 1]
    idx = {m: i for i, m in enumerate(masks)}
    diff: dict[int, dict[int, Fraction]] = {}
    for m in masks:
        row = {}
        for i in live:
            g = left_gen_sign(i, m)
            if g:
                row[idx[m | 1 << i]] = weights[i] * g
        if row:
            diff[idx[m]] = row
    gc = GradedComplex([-2 * popcount(m) for m in masks], diff)
    return homology_q(gc).total_rank == 0


@dataclass
class SpanningTreeComplex:
    generators: list[int]
    delta: list[int]
    diff: dict[int, dict[int, Fraction]]
    evaluation: Evaluation
    n: int
    reduced_complex: TwistedComplex | None = field(default=None, repr=False, compare=False)

    def index(self, state: int) -> int:
        return self.generators.index(state)

    def coefficient(self, src: int, tgt: int) -> Fraction:
        return self.diff.get(self.index(src), {}).get(self.index(tgt), Fraction(0))

    def graded(self) -> GradedComplex:
        return GradedComplex(list(self.delta), self.diff, list(self.generators), list(self.generators))

    def d_squared_zero(self) -> bool:
        return d_squared_check(self.graded())

    def homology(self) -> HomologyResult:
        return homology_q(self.graded())

    def bits(self, state: int) -> str:
        return format(state, f"0{self.n}b") if self.n else ""

    def to_json(self) -> dict:
        return {
            "evaluation": self.evaluation.to_json(),
            "generators": [{"vertex": self.bits(s), "delta": dl} for s, dl in zip(self.generators, self.delta)],
            "differential": [
                [self.bits(self.generators[s]), self.bits(self.generators[t]), str(v)]
                for s in sorted(self.diff)
                for t, v in sorted(self.diff[s].items())
            ],
        }


def build_tree_complex(d: MarkedDiagram, ev: Evaluation | None = None, tc: TwistedComplex | None = None) -> SpanningTreeComplex:
    if not d.is_knot():
        raise SpanTreeError("spanning-tree complexes are built for knot diagrams")
    if d.basepoint is None:
        raise SpanTreeError("a basepoint is required")
    marked = {e for _, e in d.marks}
    unmarked = [e for e in d.edges if e not in marked]
    if unmarked:
        raise SpanTreeError(f"every edge must carry a mark; unmarked: {unmarked}")
    ev = ev or Evaluation.default(d)
    assignment = ev.for_diagram(d)
    tc = tc or build_complex(d, reduced=True)
    gc = from_twisted(tc, assignment)
    connected = {s for s in range(1 << d.n) if tc.cube.k(s) == 1}

    def koszul_pivot(x: int, y: int, v) -> bool:
        sx, sy = gc.labels[x][0], gc.labels[y][0]
        return sx == sy and sx not in connected

    reduced_gc = cancel(gc, koszul_pivot)
    survivors = [lab[0] for lab in reduced_gc.labels]
    if sorted(survivors) != sorted(connected) or len(survivors) != len(connected):
        left = sorted({s for s in survivors if s not in connected})
        raise SpanTreeError(f"vertical differential did not cancel at resolutions {[format(s, 'b') for s in left]}; a circle weight evaluates to zero")
    diff = {s: {t: Fraction(v) for t, v in row.items()} for s, row in reduced_gc.diff.items()}
    return SpanningTreeComplex(survivors, list(reduced_gc.degrees), diff, ev, d.n, tc)


@dataclass
class TreePairReport:
    source: int
    target: int
    crossings: tuple[int, int]
    configuration: str  # "X" or "Y"
    w: Fraction
    w_prime: Fraction
    coefficient: Fraction
    expected_abs: Fraction
    sign: int  # +1 / -1 relative to (1/w -+ 1/w'), 0 when the two differ
    bp_same_side: bool  # basepoint circle on the same side of both split arcs

    @property
    def passed(self) -> bool:
        """The X/Y formula taken literally."""
        return abs(self.coefficient) == self.expected_abs

    @property
    def corrected_abs(self) -> Fraction:
        """Sum exactly when the face label agrees with the basepoint-side parity."""
        if (self.configuration == "X") == self.bp_same_side:
            return abs(1 / self.w + 1 / self.w_prime)
        return abs(1 / self.w - 1 / self.w_prime)

    @property
    def passed_corrected(self) -> bool:
        return abs(self.coefficient) == self.corrected_abs

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "crossings": list(self.crossings),
            "configuration": self.configuration,
            "w": str(self.w),
            "w_prime": str(self.w_prime),
            "coefficient": str(self.coefficient),
            "expected_abs": str(self.expected_abs),
            "sign": self.sign,
            "bp_same_side": self.bp_same_side,
            "pass": self.passed,
            "pass_corrected": self.passed_corrected,
        }


def tree_coefficient_check(d: MarkedDiagram, t0: int, t1: int, ev: Evaluation | None = None, tree: SpanningTreeComplex | None = None) -> TreePairReport:
    """Compare the cancelled coefficient ``t0 -> t1`` with ``1/w + 1/w'`` (X) or ``1/w - 1/w'`` (Y)."""
    tree = tree or build_tree_complex(d, ev)
    ev = tree.evaluation
    diff_bits = t0 ^ t1
    if popcount(diff_bits) != 2:
        raise SpanTreeError(f"trees {t0:b} and {t1:b} must differ at exactly two crossings")
    if t0 & diff_bits:
        raise SpanTreeError(f"tree {t1:b} must be obtained from {t0:b} by changing two 0-resolutions to 1")
    if t0 not in tree.generators or t1 not in tree.generators:
        raise SpanTreeError("both resolutions must be connected")
    i, j = (b for b in range(d.n) if diff_bits >> b & 1)
    cube = tree.reduced_complex.cube
    mids = (t0 | 1 << i, t0 | 1 << j)
    ws, sides = [], []
    for c, s in zip((i, j), mids):
        r = cube.resolution(s)
        if r.k != 2:
            raise SpanTreeError(f"intermediate resolution {s:b} must have two circles")
        bp = d.basepoint_circle(r)
        ws.append(ev.circle_weight(d, d.circle_weights(r)[1 - bp]))
        sides.append(bp == r.circle_at(d, c, d.crossings[c].zero_arc))
    ft = cube.classify_face(t0, i, j)
    if not ft.is_zero:
        raise InternalTreeError(f"face {t0:b} ({i}, {j}) between trees is not a zero face")
    conf = "X" if ft.label else "Y"
    w, w2 = ws
    formula = 1 / w + 1 / w2 if conf == "X" else 1 / w - 1 / w2
    coef = tree.coefficient(t0, t1)
    sign = 0 if not formula else (1 if coef == formula else -1 if coef == -formula else 0)
    return TreePairReport(t0, t1, (i, j), conf, w, w2, coef, abs(formula), sign, sides[0] == sides[1])


def adjacent_tree_pairs(tree: SpanningTreeComplex) -> list[tuple[int, int]]:
    gens = set(tree.generators)
    out = []
    for s in sorted(gens):
        for t in sorted(gens):
            if popcount(s ^ t) == 2 and not s & (s ^ t):
                out.append((s, t))
    return out
