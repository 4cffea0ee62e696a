"""Executable checks: mark slides, configuration parity, reduction to odd Khovanov homology.

Each check returns :class:`CheckResult` records; nothing here raises on a
mathematical failure, only on malformed input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .algebra.exterior import left_gen_sign, mask_indices
from .algebra.poly import Poly
from .cube import (
    Cube,
    FaceType,
    InternalError,
    TwistedComplex,
    _add_sparse,
    _compose_sparse,
    build_complex,
    check_complex,
    compose,
    d_squared_total,
    face_boundary,
    sign_data,
)
from .diagram import MarkedDiagram, Resolution, add_kink
from .homology import HomologyResult, from_twisted, homology_q, homology_z

Sparse = dict[int, dict[int, Any]]


class SlideError(ValueError):
    pass


@dataclass
class CheckResult:
    name: str
    instance: str
    passed: bool
    witness: Any = None

    def to_json(self) -> dict:
        out = {"name": self.name, "instance": self.instance, "result": "pass" if self.passed else "fail"}
        if not self.passed and self.witness is not None:
            out["witness"] = self.witness
        return out


def _first_entry(m: Sparse, basis) -> Any:
    for s in sorted(m):
        for t in sorted(m[s]):
            return {"source": list(basis[s]), "target": list(basis[t]), "value": str(m[s][t])}
    return None


# -- mark slides --------------------------------------------------------------


@dataclass
class SlideMap:
    """``F = id + H`` from the complex of ``D`` to that of ``D'`` (one mark moved across a crossing)."""

    source: TwistedComplex
    target: TwistedComplex
    mark: str
    crossing: int
    slot_from: int
    slot_to: int
    direction: str
    kappa: int
    rotation: int
    h_sign: dict[int, int]
    H: Sparse = field(repr=False)

    def F(self) -> Sparse:
        return _add_sparse({i: {i: Poly.const(1)} for i in range(len(self.source.basis))}, self.H)

    def inverse(self) -> Sparse:
        return _add_sparse(
            {i: {i: Poly.const(1)} for i in range(len(self.source.basis))},
            {s: {t: -v for t, v in row.items()} for s, row in self.H.items()},
        )

    def chain_map_defect(self) -> Sparse:
        """``F o D - D' o F``; empty when F is a chain map."""
        F = self.F()
        lhs = _compose_sparse(F, self.source.total())
        rhs = _compose_sparse(self.target.total(), F)
        return _add_sparse(lhs, {s: {t: -v for t, v in row.items()} for s, row in rhs.items()})

    def is_invertible(self) -> bool:
        ident = {i: {i: 1} for i in range(len(self.source.basis))}
        prod = _compose_sparse(self.inverse(), self.F())
        diff = _add_sparse(prod, {s: {t: -v for t, v in row.items()} for s, row in ident.items()})
        return not diff


def slide_slots(d: MarkedDiagram, mark: str, c: int, direction: str | None = None) -> tuple[int, int]:
    """Slot where the mark's edge meets ``c`` and the slot across the crossing."""
    edges = [e for m, e in d.marks if m == mark]
    if not edges:
        raise SlideError(f"no mark named {mark!r}")
    if not 0 <= c < d.n:
        raise SlideError(f"no crossing {c}")
    cr = d.crossings[c]
    slots = [s for s in range(4) if cr.ends[s] == edges[0]]
    if direction is not None:
        if direction not in ("under", "over"):
            raise SlideError("direction must be 'under' or 'over'")
        slots = [s for s in slots if cr.is_under_slot(s) == (direction == "under")]
    if not slots:
        raise SlideError(f"mark {mark} on edge {edges[0]} is not adjacent to crossing {c}" + (f" along the {direction} strand" if direction else ""))
    s = slots[0]
    return s, (s + 2) % 4


def slide_isomorphism(
    d: MarkedDiagram,
    mark: str,
    c: int,
    direction: str | None = None,
    reduced: bool = False,
    *,
    source: TwistedComplex | None = None,
    slot: int | None = None,
) -> SlideMap:
    """Slide ``mark`` across crossing ``c`` and build the comparison map.

    ``H`` at outer resolution rho is ``kappa * (-1)^(sigma(rho,1) + eps(rho,c)) * x``
    times the surgery from ``(rho,1)`` back to ``(rho,0)`` along the 1-arc,
    rotated counterclockwise for under slides and clockwise for over slides.
    ``kappa`` is -1 when the mark starts on the head side of the 0-arc.
    """
    if slot is None:
        s_from, s_to = slide_slots(d, mark, c, direction)
    else:
        s_from, s_to = slot % 4, (slot + 2) % 4
        if d.crossings[c].ends[s_from] != dict(d.marks)[mark]:
            raise SlideError(f"mark {mark} is not on the edge at slot {slot} of crossing {c}")
    cr = d.crossings[c]
    under = cr.is_under_slot(s_from)
    t0 = cr.zero_arc
    rel = (s_from - t0) % 4
    kappa = 1 if rel in (0, 3) else -1
    rotation = 1 if under else 3
    new_edge = cr.ends[s_to]
    marks = [(m, new_edge if m == mark else e) for m, e in d.marks]
    d2 = d.replace(marks=marks)
    src = source or build_complex(d, reduced)
    cube, signs = src.cube, src.signs
    tgt = build_complex(d2, reduced, cube=cube, signs=signs)
    x = Poly.var(mark)
    H: Sparse = {}
    h_sign: dict[int, int] = {}
    for rho in range(1 << d.n):
        if rho >> c & 1:
            continue
        s1 = rho | 1 << c
        surg = cube.surgery(s1, c, t0 + rotation)
        hs = (signs.sigma[s1] + signs.eps[rho, c]) % 2
        h_sign[rho] = hs
        sign = kappa * (-1 if hs else 1)
        bp1, bp0 = src.bp_circle[s1], src.bp_circle[rho]
        for m in range(1 << cube.k(s1)):
            img = surg.apply_mask(m)
            if bp1 is not None and m >> bp1 & 1:
                if any(not m2 >> bp0 & 1 for m2 in img):
                    raise InternalError(f"backward map at {s1:b}/{c} does not descend to the reduced complex")
                continue
            row = {}
            for m2, v in img.items():
                if bp0 is not None and m2 >> bp0 & 1:
                    continue
                row[src.index[rho, m2]] = x * (v * sign)
            if row:
                H[src.index[s1, m]] = row
    return SlideMap(src, tgt, mark, c, s_from, s_to, "under" if under else "over", kappa, rotation, h_sign, H)


def verify_slide(sm: SlideMap, instance: str = "") -> list[CheckResult]:
    defect = sm.chain_map_defect()
    res = [
        CheckResult("slide_chain_map", instance, not defect, _first_entry(defect, sm.source.basis)),
        CheckResult("slide_invertible", instance, sm.is_invertible()),
    ]
    back = slide_isomorphism(sm.target.diagram, sm.mark, sm.crossing, reduced=sm.source.reduced, source=sm.target, slot=sm.slot_to)
    round_trip = _compose_sparse(back.F(), sm.F())
    ident_defect = _add_sparse(round_trip, {i: {i: -1} for i in range(len(sm.source.basis))})
    res.append(CheckResult("slide_round_trip", instance, not ident_defect, _first_entry(ident_defect, sm.source.basis)))
    res.append(slide_mod2_check(sm, instance))
    return res


def slide_instances(d: MarkedDiagram) -> Iterable[tuple[str, int, int]]:
    """Every (mark, crossing, slot) with the mark's edge ending at that slot."""
    for m, e in d.marks:
        for ci, cr in enumerate(d.crossings):
            for s in range(4):
                if cr.ends[s] == e:
                    yield m, ci, s


def slide_checks(d: MarkedDiagram, name: str = "", reduced_too: bool = True) -> list[CheckResult]:
    out = []
    variants = [False, True] if reduced_too and d.basepoint is not None else [False]
    for reduced in variants:
        src = build_complex(d, reduced)
        for m, c, s in slide_instances(d):
            inst = f"{name} mark={m} crossing={c} slot={s}{' reduced' if reduced else ''}"
            out.extend(verify_slide(slide_isomorphism(d, m, c, reduced=reduced, source=src, slot=s), inst))
    return out


# -- local relations of a crossing-change square ---------------------------------


def _dot(r: Resolution, circle: int) -> dict[int, dict[int, int]]:
    out = {}
    for m in range(1 << r.k):
        g = left_gen_sign(circle, m)
        if g:
            out[m] = {m | 1 << circle: g}
    return out


def _lin_sub(a, b):
    out = {}
    for src in set(a) | set(b):
        row = dict(a.get(src, {}))
        for t, v in b.get(src, {}).items():
            row[t] = row.get(t, 0) - v
        row = {t: v for t, v in row.items() if v}
        if row:
            out[src] = row
    return out


def _neg(a):
    return {s: {t: -v for t, v in row.items()} for s, row in a.items()}


def local_relations_check(d: MarkedDiagram, rho: int, c: int, slot: int, cube: Cube | None = None) -> CheckResult:
    """Relations between dots beside crossing ``c`` and the forward/backward surgeries.

    The dots sit on the edges at ``slot`` (before the slide) and ``slot + 2``
    (after).  ``kappa`` accounts for which side of the 0-arc the dot starts on.
    """
    cube = cube or Cube(d)
    cr = d.crossings[c]
    if rho >> c & 1:
        raise ValueError("outer resolution must have crossing c 0-resolved")
    s1 = rho | 1 << c
    t0 = cr.zero_arc
    rot = 1 if cr.is_under_slot(slot) else 3
    kappa = 1 if (slot - t0) % 4 in (0, 3) else -1
    r0, r1 = cube.resolution(rho), cube.resolution(s1)
    fwd = cube.surgery(rho, c, t0)
    bwd = cube.surgery(s1, c, t0 + rot)
    e1, e2 = cr.ends[slot], cr.ends[(slot + 2) % 4]
    v_before, v_after = _dot(r0, r0.circle_of_edge[e1]), _dot(r0, r0.circle_of_edge[e2])
    h_before, h_after = _dot(r1, r1.circle_of_edge[e1]), _dot(r1, r1.circle_of_edge[e2])
    problems = []
    # forward o backward = kappa (dot before - dot after), on the 1-side and the 0-side
    if compose(fwd.table, bwd.table) != ({} if kappa == 0 else _scale(_lin_sub(h_before, h_after), kappa)):
        problems.append("forward o backward")
    if compose(bwd.table, fwd.table) != _scale(_lin_sub(v_before, v_after), kappa):
        problems.append("backward o forward")
    if fwd.kind == "split":
        # backward map is a merge: dots commute through it, and before the split the dots agree
        if compose(v_after, bwd.table) != compose(bwd.table, h_before):
            problems.append("split: dot commutation")
        if v_before != v_after:
            problems.append("split: dots on one circle")
    else:
        if compose(v_after, bwd.table) != _neg(compose(bwd.table, h_before)):
            problems.append("join: dot anticommutation")
        if h_before != h_after:
            problems.append("join: dots on one circle")
    return CheckResult(
        "local_relations",
        f"rho={rho:b} crossing={c} slot={slot}",
        not problems,
        problems or None,
    )


def _scale(a, k):
    return {s: {t: v * k for t, v in row.items()} for s, row in a.items()}


# -- forward / backward configurations ---------------------------------------------


@dataclass
class ConfigPair:
    state: int
    c: int
    e: int
    rotation: int
    forward: FaceType
    backward: FaceType
    backward_kind: str

    @property
    def a_f(self) -> int:
        return self.forward.label

    @property
    def a_b(self) -> int:
        return self.backward.label

    @property
    def holds(self) -> bool:
        want = (self.a_b + 1) % 2 if self.backward_kind == "split" else self.a_b
        return self.a_f == want


def config_pair(cube: Cube, state: int, c: int, e: int, rotation: int = 1) -> ConfigPair:
    cr = cube.d.crossings
    if state >> c & 1 or state >> e & 1 or c == e:
        raise ValueError("c and e must be distinct and 0-resolved")
    f = cube.classify_config(state, c, cr[c].zero_arc, e, cr[e].zero_arc)
    sb = state | 1 << c
    b = cube.classify_config(sb, c, cr[c].zero_arc + rotation, e, cr[e].zero_arc)
    kind = cube.surgery(sb, e, cr[e].zero_arc).kind
    return ConfigPair(state, c, e, rotation, f, b, kind)


def config_lemma_check(d: MarkedDiagram, state: int, c: int, e: int, cube: Cube | None = None) -> CheckResult:
    p = config_pair(cube or Cube(d), state, c, e)
    return CheckResult(
        "config_lemma",
        f"rho={state:b} c={c} e={e}",
        p.holds,
        None if p.holds else {"a_f": p.a_f, "a_b": p.a_b, "backward": p.backward_kind},
    )


def config_lemma_scan(d: MarkedDiagram, name: str = "") -> list[CheckResult]:
    cube = Cube(d)
    out = []
    for c in range(d.n):
        for e in range(d.n):
            if c == e:
                continue
            for s in range(1 << d.n):
                if s >> c & 1 or s >> e & 1:
                    continue
                r = config_lemma_check(d, s, c, e, cube)
                r.instance = f"{name} {r.instance}"
                out.append(r)
    return out


def sigma_identities(tc: TwistedComplex, name: str = "") -> list[CheckResult]:
    """Per face: Delta sigma(e) + Delta sigma(c) + a_f = 1; per slide face: Delta sigma(H) + Delta sigma(e) + a_b = 0.

    The slide identity is checked for under slides (counterclockwise rotation).
    """
    d, cube, sd = tc.diagram, tc.cube, tc.signs
    out = []
    bad = []
    for (s, i, j), ft in sd.face_types.items():
        e1, e2, e3, e4 = face_boundary(s, i, j)
        if (sd.eps[e1] + sd.eps[e2] + sd.eps[e3] + sd.eps[e4] + ft.label) % 2 != 1:
            bad.append([s, i, j])
    out.append(CheckResult("delta_sigma_face", name, not bad, bad[:5] or None))
    bad = []
    for c in range(d.n):
        for e in range(d.n):
            if c == e:
                continue
            for rho in range(1 << d.n):
                if rho >> c & 1 or rho >> e & 1:
                    continue
                rho2 = rho | 1 << e
                h = lambda r: (sd.sigma[r | 1 << c] + sd.eps[r, c]) % 2  # noqa: E731
                d_h = h(rho) + h(rho2)
                d_e = sd.eps[rho, e] + sd.eps[rho | 1 << c, e]
                a_b = config_pair(cube, rho, c, e).a_b
                if (d_h + d_e + a_b) % 2:
                    bad.append([rho, c, e])
    out.append(CheckResult("delta_sigma_slide", name, not bad, bad[:5] or None))
    return out


# -- naive vertical differential vs edge maps ------------------------------------


def split_join_check(d: MarkedDiagram, name: str = "", cube: Cube | None = None) -> CheckResult:
    """Naive ``d'_v`` anticommutes with split edge maps and commutes with joins."""
    cube = cube or Cube(d)
    bad = []
    for s, i in cube.edges():
        surg = cube.edge_surgery(s, i)
        r0, r1 = cube.resolution(s), cube.resolution(surg.dst)
        w0 = [Poly.linear(ms) for ms in d.circle_weights(r0)]
        w1 = [Poly.linear(ms) for ms in d.circle_weights(r1)]
        sign = -1 if surg.kind == "split" else 1
        for m in range(1 << r0.k):
            lhs: dict[int, Poly] = {}
            for m2, v in surg.apply_mask(m).items():
                for k, w in enumerate(w1):
                    g = left_gen_sign(k, m2)
                    if g and w:
                        lhs[m2 | 1 << k] = lhs.get(m2 | 1 << k, Poly()) + w * (g * v)
            rhs: dict[int, Poly] = {}
            for k, w in enumerate(w0):
                g = left_gen_sign(k, m)
                if not g or not w:
                    continue
                for m2, v in surg.apply_mask(m | 1 << k).items():
                    rhs[m2] = rhs.get(m2, Poly()) + w * (g * v * sign)
            keys = set(lhs) | set(rhs)
            if any(lhs.get(x, Poly()) - rhs.get(x, Poly()) for x in keys):
                bad.append([s, i, m])
    return CheckResult("split_join", name, not bad, bad[:5] or None)


# -- reduction to odd Khovanov homology ---------------------------------------------


def slide_path(d: MarkedDiagram, mark: str, reverse: bool = False) -> list[tuple[int, int]]:
    """(crossing, slot) steps moving ``mark`` along its component to the basepoint edge."""
    if d.basepoint is None:
        raise SlideError("a basepoint is required")
    e = dict(d.marks)[mark]
    if e == d.basepoint:
        return []
    comp = next((cp for cp in d.components if e in cp), None)
    if comp is None or d.basepoint not in comp:
        raise SlideError(f"mark {mark} is not on the basepoint's component; no slide sequence exists")
    steps = []
    seen = set()
    while e != d.basepoint:
        if e in seen:
            raise SlideError("slide walk did not reach the basepoint")
        seen.add(e)
        c, s = d.head[e]
        if reverse:
            c, s = d.other_end(e, d.head[e])
        steps.append((c, s))
        e = d.crossings[c].ends[(s + 2) % 4]
    return steps


@dataclass
class ReductionReport:
    slides: int
    dv_vanishes: bool
    chain_maps_ok: bool
    composite_ok: bool
    homology_slid: HomologyResult
    homology_direct: HomologyResult
    homology_start_q: HomologyResult | None

    @property
    def passed(self) -> bool:
        ok = self.dv_vanishes and self.chain_maps_ok and self.composite_ok and self.homology_slid == self.homology_direct
        if self.homology_start_q is not None:
            ok = ok and self.homology_start_q.ranks == self.homology_direct.ranks
        return ok

    def to_json(self) -> dict:
        return {
            "slides": self.slides,
            "dv_vanishes": self.dv_vanishes,
            "chain_maps_ok": self.chain_maps_ok,
            "composite_ok": self.composite_ok,
            "homology_after_slides": self.homology_slid.to_json(),
            "homology_direct": self.homology_direct.to_json(),
            "pass": self.passed,
        }


def reduction_to_odd_kh(
    d: MarkedDiagram,
    ev: Mapping[str, Fraction] | None = None,
    reverse: bool = False,
    compose_all: bool = True,
) -> ReductionReport:
    """Slide every mark to the basepoint edge and compare with reduced odd Khovanov homology."""
    if not d.is_knot():
        raise SlideError("reduction needs a knot diagram")
    if d.basepoint is None:
        raise SlideError("a basepoint is required")
    start = build_complex(d, reduced=True)
    cube, signs = start.cube, start.signs
    cur, cur_d = start, d
    composite: Sparse | None = None
    ok = True
    count = 0
    for mark, _ in d.marks:
        for c, s in slide_path(cur_d, mark, reverse):
            sm = slide_isomorphism(cur_d, mark, c, reduced=True, source=cur, slot=s)
            if sm.chain_map_defect():
                ok = False
            if compose_all:
                composite = sm.F() if composite is None else _compose_sparse(sm.F(), composite)
            cur, cur_d = sm.target, sm.target.diagram
            count += 1
    composite_ok = True
    if compose_all and composite is not None:
        lhs = _compose_sparse(composite, start.total())
        rhs = _compose_sparse(cur.total(), composite)
        composite_ok = not _add_sparse(lhs, _neg(rhs))
    dv_zero = not cur.d_v
    bare = build_complex(d.replace(marks=()), reduced=True, cube=cube, signs=signs)
    h_slid = homology_z(from_twisted(cur, include_v=True).map_coefficients(lambda v: v.constant_value() if isinstance(v, Poly) else v))
    h_direct = homology_z(from_twisted(bare, include_v=False))
    h_start = None
    if ev is not None:
        h_start = homology_q(from_twisted(start, ev))
    return ReductionReport(count, dv_zero, ok, composite_ok, h_slid, h_direct, h_start)


# -- invariance --------------------------------------------------------------------


def move_invariance_check(d1: MarkedDiagram, d2: MarkedDiagram, ev1=None, ev2=None, name: str = "") -> CheckResult:
    """Equality of delta-graded Q-ranks of the reduced evaluated twisted complexes."""
    from .spantree import Evaluation

    hs = []
    for d, ev in ((d1, ev1), (d2, ev2)):
        ev = ev or Evaluation.default(d).values
        hs.append(homology_q(from_twisted(build_complex(d, reduced=True), ev)))
    return CheckResult("invariance", name, hs[0] == hs[1], {"left": hs[0].to_json(), "right": hs[1].to_json()})


def r1_checks(d: MarkedDiagram, name: str = "") -> list[CheckResult]:
    out = []
    edge = d.basepoint if d.basepoint is not None else d.edges[0]
    for positive in (True, False):
        d2 = add_kink(d, edge, positive=positive)
        out.append(move_invariance_check(d, d2, name=f"{name} R1 {'+' if positive else '-'} at edge {edge}"))
    return out


# -- mod 2: unsigned Frobenius-algebra oracle ---------------------------------------


def _circle_sets(r: Resolution) -> list[frozenset[int]]:
    return [frozenset(c) for c in r.circles]


def jaeger_edge_map(r0: Resolution, r1: Resolution) -> dict[frozenset, set[frozenset]]:
    """Unsigned merge/split on labelled circles over F2.

    Generators are sets of circles labelled ``v-``; unlisted circles are ``v+``.
    """
    c0, c1 = _circle_sets(r0), _circle_sets(r1)
    gone = [c for c in c0 if c not in c1]
    new = [c for c in c1 if c not in c0]
    stay = [c for c in c0 if c in c1]
    out: dict[frozenset, set[frozenset]] = {}
    for m in range(1 << len(c0)):
        minus = frozenset(c0[i] for i in mask_indices(m))
        kept = minus & frozenset(stay)
        if len(gone) == 2 and len(new) == 1:
            k = len(minus & frozenset(gone))
            out[minus] = set() if k == 2 else {kept | {new[0]}} if k == 1 else {kept}
        elif len(gone) == 1 and len(new) == 2:
            if gone[0] in minus:
                out[minus] = {kept | {new[0], new[1]}}
            else:
                out[minus] = {kept | {new[0]}, kept | {new[1]}}
        else:
            raise InternalError("resolutions differ by neither a merge nor a split")
    return out


def mod2_check(tc: TwistedComplex, name: str = "") -> CheckResult:
    """d_odd and d_v reduced mod 2 against the unsigned oracle, vertex by vertex."""
    d, cube = tc.diagram, tc.cube
    bad = []
    for s in range(1 << d.n):
        r0 = cube.resolution(s)
        circ0 = _circle_sets(r0)
        bp0 = tc.bp_circle[s]
        for i in range(d.n):
            if s >> i & 1:
                continue
            t = s | 1 << i
            r1 = cube.resolution(t)
            circ1 = _circle_sets(r1)
            bp1 = tc.bp_circle[t]
            oracle = jaeger_edge_map(r0, r1)
            for m in tc.vertex_basis(s):
                want = set()
                for g in oracle[frozenset(circ0[k] for k in mask_indices(m))]:
                    m2 = sum(1 << circ1.index(cset) for cset in g)
                    if bp1 is not None and m2 >> bp1 & 1:
                        continue
                    want ^= {m2}
                row = tc.d_odd.get(tc.index[s, m], {})
                got = {tc.basis[j][1] for j, v in row.items() if tc.basis[j][0] == t and v % 2}
                if got != want:
                    bad.append({"edge": [s, i], "monomial": m})
        weights = d.circle_weights(r0)
        for m in tc.vertex_basis(s):
            want = {}
            for k, ms in enumerate(weights):
                if k == bp0 or m >> k & 1 or not ms:
                    continue
                want[m | 1 << k] = Poly.linear(ms).mod(2)
            row = tc.d_v.get(tc.index[s, m], {})
            got = {tc.basis[j][1]: p.mod(2) for j, p in row.items()}
            got = {k: v for k, v in got.items() if v}
            want = {k: v for k, v in want.items() if v}
            if got != want:
                bad.append({"vertex": s, "monomial": m})
    return CheckResult("mod2_jaeger", name, not bad, bad[:5] or None)


def slide_mod2_check(sm: SlideMap, instance: str = "") -> CheckResult:
    """``F`` mod 2 is ``id + x * (unsigned backward surgery)`` from the Frobenius oracle."""
    src, cube = sm.source, sm.source.cube
    x = Poly.var(sm.mark)
    bad = []
    for rho in range(1 << src.n):
        if rho >> sm.crossing & 1:
            continue
        s1 = rho | 1 << sm.crossing
        r1, r0 = cube.resolution(s1), cube.resolution(rho)
        circ1, circ0 = _circle_sets(r1), _circle_sets(r0)
        oracle = jaeger_edge_map(r1, r0)
        for m in src.vertex_basis(s1):
            want = set()
            for g in oracle[frozenset(circ1[k] for k in mask_indices(m))]:
                m2 = sum(1 << circ0.index(cset) for cset in g)
                if src.bp_circle[rho] is not None and m2 >> src.bp_circle[rho] & 1:
                    continue
                want ^= {m2}
            row = sm.H.get(src.index[s1, m], {})
            got = set()
            for j, p in row.items():
                red = p.mod(2)
                if red and red != x:
                    bad.append({"vertex": s1, "monomial": m, "entry": str(p)})
                if red:
                    got.add(src.basis[j][1])
            if got != want:
                bad.append({"vertex": s1, "monomial": m})
    return CheckResult("slide_mod2", instance, not bad, bad[:5] or None)


# -- aggregate checks ------------------------------------------------------------------


def d2_check(tc: TwistedComplex, name: str = "") -> CheckResult:
    rest = d_squared_total(tc)
    try:
        check_complex(tc)
        structural = None
    except InternalError as exc:
        structural = str(exc)
    return CheckResult("d2", name, not rest and structural is None, structural or _first_entry(rest, tc.basis))


def faces_check(d: MarkedDiagram, name: str = "", cube: Cube | None = None) -> list[CheckResult]:
    from .cube import check_psi_cocycle, check_tau_cocycle

    cube = cube or Cube(d)
    tau = cube.tau()
    ft = cube.face_types()
    psi = {f: t.label for f, t in ft.items()}
    out = [
        CheckResult("tau_cocycle", name, not check_tau_cocycle(d.n, tau), check_tau_cocycle(d.n, tau)[:5] or None),
        CheckResult("psi_cocycle", name, not check_psi_cocycle(d.n, psi), check_psi_cocycle(d.n, psi)[:5] or None),
    ]
    try:
        sd = sign_data(cube)
    except InternalError as exc:
        out.append(CheckResult("sign_solve", name, False, str(exc)))
        return out
    bad_sigma = [[s, i] for (s, i), t in sd.tau.items() if (sd.sigma[s] + sd.sigma[s | 1 << i]) % 2 != t]
    bad_eps = [list(f) for f in ft if sum(sd.eps[e] for e in face_boundary(*f)) % 2 != (psi[f] + 1) % 2]
    out.append(CheckResult("sigma_solve", name, not bad_sigma, bad_sigma[:5] or None))
    out.append(CheckResult("eps_solve", name, not bad_eps, bad_eps[:5] or None))
    return out
