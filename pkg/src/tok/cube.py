"""The twisted odd Khovanov cube.

Vertices of the cube are integers whose bit ``i`` is the resolution of crossing
``i``.  Module elements at a vertex are combinations of exterior monomials
(bitmasks over the canonical circle order of that resolution).

The naive surgery map along an oriented arc is a merge (quotient identifying
the two circles) or a split ``w -> (b - c) ^ lift(w)``, where ``b`` is the new
circle on the left of the arc and ``c`` the one on its right.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping

from .algebra.exterior import (
    ExtElement,
    left_gen_sign,
    left_mult,
    mask_indices,
    popcount,
    relabel_sign,
)
from .algebra.poly import Poly
from .diagram import MarkedDiagram, Resolution

LinearMap = dict[int, dict[int, int]]


class InternalError(RuntimeError):
    """A structural identity that must hold by construction failed."""


class FaceType(enum.Enum):
    COMMUTE = "commute"
    ANTICOMMUTE = "anticommute"
    ZERO_X = "zero_X"
    ZERO_Y = "zero_Y"

    @property
    def label(self) -> int:
        """Face label in Z/2: anticommute and X count as 1."""
        return 1 if self in (FaceType.ANTICOMMUTE, FaceType.ZERO_X) else 0

    @property
    def is_zero(self) -> bool:
        return self in (FaceType.ZERO_X, FaceType.ZERO_Y)


@dataclass(frozen=True)
class Surgery:
    """Naive map of a single surgery along an oriented arc."""

    src: int
    dst: int
    crossing: int
    tail_slot: int
    kind: str  # "merge" or "split"
    table: LinearMap = field(compare=False, hash=False)

    def apply_mask(self, m: int) -> dict[int, int]:
        return self.table.get(m, {})


@dataclass
class EdgeMap:
    source: int
    target: int
    crossing: int
    kind: str
    table: LinearMap
    eps: int = 0

    @property
    def sign(self) -> int:
        return -1 if self.eps else 1

    def apply(self, v: ExtElement, k_out: int) -> ExtElement:
        terms: dict[int, Poly] = {}
        for m, c in v.terms.items():
            for m2, s in self.table.get(m, {}).items():
                terms[m2] = terms.get(m2, Poly()) + c * (s * self.sign)
        return ExtElement(k_out, terms)


def compose(f: LinearMap, g: LinearMap) -> LinearMap:
    """``f`` after ``g``."""
    out: LinearMap = {}
    for m, img in g.items():
        acc: dict[int, int] = {}
        for m1, c1 in img.items():
            for m2, c2 in f.get(m1, {}).items():
                acc[m2] = acc.get(m2, 0) + c1 * c2
        acc = {k: v for k, v in acc.items() if v}
        if acc:
            out[m] = acc
    return out


# Walking along the circle from the tail of one arc toward its head, with that
# arc on the left, one meets an endpoint of the other arc first.  X is the case
# where that endpoint is the other arc's tail.  This is the choice under which
# forward/backward configuration parity holds with counterclockwise rotation.
X_MEETS = "tail"


class Cube:
    """Resolutions and naive surgery maps of a diagram, computed lazily."""

    def __init__(self, d: MarkedDiagram):
        self.d = d
        self.n = d.n
        self._res: dict[int, Resolution] = {}
        self._surg: dict[tuple[int, int, int], Surgery] = {}

    def resolution(self, state: int) -> Resolution:
        r = self._res.get(state)
        if r is None:
            r = self._res[state] = self.d.resolve(state)
        return r

    def k(self, state: int) -> int:
        return self.resolution(state).k

    def surgery(self, state: int, c: int, t: int) -> Surgery:
        key = (state, c, t % 4)
        s = self._surg.get(key)
        if s is None:
            s = self._surg[key] = self._surgery(state, c, t % 4)
        return s

    def edge_surgery(self, state: int, c: int) -> Surgery:
        """Naive cube edge map out of ``state`` at crossing ``c`` (bit must be 0)."""
        if state >> c & 1:
            raise ValueError(f"crossing {c} already 1-resolved in {state:b}")
        return self.surgery(state, c, self.d.crossings[c].zero_arc)

    def _surgery(self, state: int, c: int, t: int) -> Surgery:
        d = self.d
        cr = d.crossings[c]
        if cr.state_of_arc(t) != (state >> c & 1):
            raise ValueError(f"arc with tail slot {t} does not live at crossing {c} in state {state:b}")
        r0 = self.resolution(state)
        dst = state ^ (1 << c)
        r1 = self.resolution(dst)
        tail = r0.circle_at(d, c, t)
        head = r0.circle_at(d, c, (t + 2) % 4)
        phi = [r1.circle_of_edge[cs[0]] for cs in r0.circles]
        table: LinearMap = {}
        if tail != head:
            merged = r1.circle_at(d, c, t)
            phi[tail] = phi[head] = merged
            both = (1 << tail) | (1 << head)
            for m in range(1 << r0.k):
                if m & both == both:
                    continue
                m2, s = relabel_sign(phi[i] for i in mask_indices(m))
                table[m] = {m2: s}
            return Surgery(state, dst, c, t, "merge", table)
        b = r1.circle_at(d, c, t)
        cc = r1.circle_at(d, c, (t + 2) % 4)
        if b == cc:
            raise InternalError(f"surgery at crossing {c} in state {state:b} neither splits nor merges")
        phi[tail] = b
        for m in range(1 << r0.k):
            m2, s = relabel_sign(phi[i] for i in mask_indices(m))
            img: dict[int, int] = {}
            sb = left_gen_sign(b, m2)
            if sb:
                img[m2 | 1 << b] = sb * s
            sc = left_gen_sign(cc, m2)
            if sc:
                img[m2 | 1 << cc] = img.get(m2 | 1 << cc, 0) - sc * s
            table[m] = {x: v for x, v in img.items() if v}
        return Surgery(state, dst, c, t, "split", table)

    # -- 2-dimensional configurations -----------------------------------------

    def classify_config(self, state: int, c: int, tc: int, e: int, te: int) -> FaceType:
        """Compare the two naive composites through a square of surgeries."""
        s_c = self.surgery(state, c, tc)
        s_e = self.surgery(state, e, te)
        path1 = compose(self.surgery(s_c.dst, e, te).table, s_c.table)
        path2 = compose(self.surgery(s_e.dst, c, tc).table, s_e.table)
        if not path1 and not path2:
            return self._zero_type(state, c, tc, e, te)
        if path1 == path2:
            return FaceType.COMMUTE
        neg = {m: {x: -v for x, v in img.items()} for m, img in path2.items()}
        if path1 == neg:
            return FaceType.ANTICOMMUTE
        raise InternalError(f"face at {state:b} ({c}, {e}) neither commutes nor anticommutes")

    def _zero_type(self, state: int, c: int, tc: int, e: int, te: int) -> FaceType:
        return FaceType.ZERO_X if ladybug_pattern(self.d, self.resolution(state), c, tc, e, te) == X_MEETS else FaceType.ZERO_Y

    def classify_face(self, state: int, i: int, j: int) -> FaceType:
        if state >> i & 1 or state >> j & 1:
            raise ValueError("face base must have both crossings 0-resolved")
        cr = self.d.crossings
        return self.classify_config(state, i, cr[i].zero_arc, j, cr[j].zero_arc)

    # -- cochains ---------------------------------------------------------------

    def edges(self) -> list[tuple[int, int]]:
        return [(s, i) for s in range(1 << self.n) for i in range(self.n) if not s >> i & 1]

    def faces(self) -> list[tuple[int, int, int]]:
        return [
            (s, i, j)
            for s in range(1 << self.n)
            for i, j in combinations(range(self.n), 2)
            if not (s >> i & 1 or s >> j & 1)
        ]

    def tau(self) -> dict[tuple[int, int], int]:
        """Split edges 0, join edges 1."""
        return {(s, i): 0 if self.edge_surgery(s, i).kind == "split" else 1 for s, i in self.edges()}

    def face_types(self) -> dict[tuple[int, int, int], FaceType]:
        return {f: self.classify_face(*f) for f in self.faces()}


def ladybug_pattern(d: MarkedDiagram, r: Resolution, c: int, tc: int, e: int, te: int) -> str:
    """Walk pattern of two interleaved arcs on one circle: ``"tail"`` or ``"head"``.

    Walk from the tail of the ``c`` arc toward its head keeping the arc on the
    left, and report which endpoint of the ``e`` arc comes first.
    """
    circle = r.circle_at(d, c, tc)
    ps = list(r.passages[circle])
    want = {
        "c_tail": (c, {tc % 4, (tc + 1) % 4}),
        "c_head": (c, {(tc + 2) % 4, (tc + 3) % 4}),
        "e_tail": (e, {te % 4, (te + 1) % 4}),
        "e_head": (e, {(te + 2) % 4, (te + 3) % 4}),
    }
    where = {}
    for name, (x, slots) in want.items():
        hits = [i for i, p in enumerate(ps) if p.crossing == x and {p.slot_in, p.slot_out} == slots]
        if len(hits) != 1:
            raise InternalError(f"zero face at {r.state:b} ({c}, {e}) is not a single-circle configuration")
        where[name] = hits[0]
    start = ps[where["c_tail"]]
    forward = start.slot_out == (start.slot_in + 1) % 4
    n = len(ps)
    step = 1 if forward else -1
    # the crossing centre sits left of a passage that turns from slot s to s+1
    head_p = ps[where["c_head"]]
    if (head_p.slot_out == (head_p.slot_in + 1) % 4) != forward:
        raise InternalError("arc attaches on different sides of its circle")
    i = where["c_tail"]
    for _ in range(n):
        i = (i + step) % n
        if i == where["e_tail"]:
            return "tail"
        if i == where["e_head"]:
            return "head"
        if i == where["c_head"]:
            break
    raise InternalError("arcs of a zero face are not interleaved")


# -- sign assignments -----------------------------------------------------------


def _faces_of(n: int) -> Iterable[tuple[int, int, int]]:
    for s in range(1 << n):
        for i, j in combinations(range(n), 2):
            if not (s >> i & 1 or s >> j & 1):
                yield s, i, j


def face_boundary(s: int, i: int, j: int) -> tuple[tuple[int, int], ...]:
    return ((s, i), (s | 1 << i, j), (s, j), (s | 1 << j, i))


def check_tau_cocycle(n: int, tau: Mapping[tuple[int, int], int]) -> list[tuple[int, int, int]]:
    """Faces where tau sums to 1 (empty when tau is a cocycle)."""
    return [f for f in _faces_of(n) if sum(tau[e] for e in face_boundary(*f)) % 2]


def check_psi_cocycle(n: int, psi: Mapping[tuple[int, int, int], int]) -> list[tuple[int, int, int, int]]:
    """3-cubes on which psi + 1 fails to be a cocycle."""
    bad = []
    for s in range(1 << n):
        for i, j, l in combinations(range(n), 3):
            if s >> i & 1 or s >> j & 1 or s >> l & 1:
                continue
            fs = [
                (s, i, j),
                (s | 1 << l, i, j),
                (s, i, l),
                (s | 1 << j, i, l),
                (s, j, l),
                (s | 1 << i, j, l),
            ]
            if sum(psi[f] + 1 for f in fs) % 2:
                bad.append((s, i, j, l))
    return bad


def solve_vertex_signs(n: int, tau: Mapping[tuple[int, int], int]) -> dict[int, int]:
    """sigma with delta(sigma) = tau and sigma(0...0) = 0."""
    bad = check_tau_cocycle(n, tau)
    if bad:
        raise InternalError(f"tau is not a cocycle on faces {bad[:5]}")
    sigma = {0: 0}
    for v in range(1, 1 << n):
        low = (v & -v).bit_length() - 1
        sigma[v] = sigma[v ^ 1 << low] ^ tau[v ^ 1 << low, low]
    for (s, i), t in tau.items():
        if sigma[s] ^ sigma[s | 1 << i] != t:
            raise InternalError(f"vertex sign solve failed on edge ({s:b}, {i})")
    return sigma


def solve_edge_signs(n: int, psi: Mapping[tuple[int, int, int], int]) -> dict[tuple[int, int], int]:
    """eps with delta(eps) = psi + 1, zero on the lowest-bit spanning tree of the cube."""
    bad = check_psi_cocycle(n, psi)
    if bad:
        raise InternalError(f"psi + 1 is not a cocycle on 3-cubes {bad[:5]}")
    eps: dict[tuple[int, int], int] = {}
    for v in sorted(range(1, 1 << n), key=lambda x: (popcount(x), x)):
        low = (v & -v).bit_length() - 1
        eps[v ^ 1 << low, low] = 0
        for j in mask_indices(v):
            if j == low:
                continue
            base = v ^ 1 << low ^ 1 << j
            i0, j0 = min(low, j), max(low, j)
            # face (base; i0, j0): edges (base,i0), (base+i0, j0), (base,j0), (base+j0, i0)
            target = psi[base, i0, j0] + 1
            known = eps[base, low] + eps[base, j]
            eps[base | 1 << low, j] = (target + known + eps[base | 1 << j, low]) % 2
    for f in _faces_of(n):
        if sum(eps[e] for e in face_boundary(*f)) % 2 != (psi[f] + 1) % 2:
            raise InternalError(f"edge sign solve failed on face {f}")
    return eps


@dataclass
class SignData:
    tau: dict[tuple[int, int], int]
    sigma: dict[int, int]
    psi: dict[tuple[int, int, int], int]
    eps: dict[tuple[int, int], int]
    face_types: dict[tuple[int, int, int], FaceType]


def sign_data(cube: Cube) -> SignData:
    tau = cube.tau()
    sigma = solve_vertex_signs(cube.n, tau)
    ft = cube.face_types()
    psi = {f: t.label for f, t in ft.items()}
    eps = solve_edge_signs(cube.n, psi)
    return SignData(tau, sigma, psi, eps, ft)


# -- operations on ExtElements ----------------------------------------------------


def naive_edge_map(d: MarkedDiagram, r0: Resolution, r1: Resolution, c: int, cube: Cube | None = None) -> EdgeMap:
    if r1.state != r0.state ^ (1 << c) or r0.state >> c & 1:
        raise ValueError(f"resolutions {r0.state:b} -> {r1.state:b} are not a cube edge at crossing {c}")
    cube = cube or Cube(d)
    s = cube.edge_surgery(r0.state, c)
    return EdgeMap(r0.state, r1.state, c, s.kind, s.table)


def vertical_map(r: Resolution, weights: list[Poly], sigma: int) -> Callable[[ExtElement], ExtElement]:
    """``(-1)^sigma * sum_i (w_i a_i) ^ .``"""
    sign = -1 if sigma else 1

    def apply(v: ExtElement) -> ExtElement:
        out = ExtElement(v.k)
        for i, w in enumerate(weights):
            if w:
                out = out + left_mult(w * sign, i + 1, v)
        return out

    return apply


# -- the assembled complex --------------------------------------------------------


class TwistedComplex:
    """The twisted complex of a marked diagram over Z[x].

    ``d_odd`` and ``d_v`` map a basis index to ``{target index: coefficient}``;
    ``d_odd`` coefficients are ints, ``d_v`` coefficients are Polys.
    """

    def __init__(self, d: MarkedDiagram, reduced: bool, cube: Cube, signs: SignData):
        self.diagram = d
        self.reduced = reduced
        self.cube = cube
        self.signs = signs
        self.basis: list[tuple[int, int]] = []
        self.delta: list[int] = []
        self.index: dict[tuple[int, int], int] = {}
        self.bp_circle: dict[int, int | None] = {}
        self.d_odd: dict[int, dict[int, int]] = {}
        self.d_v: dict[int, dict[int, Poly]] = {}

    @property
    def n(self) -> int:
        return self.diagram.n

    def vertex_basis(self, state: int) -> list[int]:
        k = self.cube.k(state)
        bp = self.bp_circle.get(state)
        ms = [m for m in range(1 << k) if bp is None or not m >> bp & 1]
        return sorted(ms, key=lambda m: (popcount(m), m))

    def total(self) -> dict[int, dict[int, Poly | int]]:
        out: dict[int, dict[int, Poly | int]] = {}
        for src in range(len(self.basis)):
            row: dict[int, Poly | int] = dict(self.d_odd.get(src, {}))
            for t, p in self.d_v.get(src, {}).items():
                row[t] = row.get(t, 0) + p
            row = {t: v for t, v in row.items() if v}
            if row:
                out[src] = row
        return out

    def to_json(self) -> dict:
        vertices = []
        states = sorted({s for s, _ in self.basis})
        for s in states:
            vertices.append(
                {
                    "vertex": format(s, f"0{self.n}b") if self.n else "",
                    "circles": self.cube.k(s),
                    "basis": [
                        {"monomial": _mono_name(m), "delta": self.delta[self.index[s, m]]} for m in self.vertex_basis(s)
                    ],
                }
            )
        entries = []
        for name, mat in (("odd", self.d_odd), ("v", self.d_v)):
            for src in sorted(mat):
                for tgt in sorted(mat[src]):
                    (s1, m1), (s2, m2) = self.basis[src], self.basis[tgt]
                    entries.append(
                        {
                            "part": name,
                            "source_vertex": format(s1, f"0{self.n}b") if self.n else "",
                            "source": _mono_name(m1),
                            "target_vertex": format(s2, f"0{self.n}b") if self.n else "",
                            "target": _mono_name(m2),
                            "coefficient": str(mat[src][tgt]),
                        }
                    )
        return {
            "crossings": self.n,
            "reduced": self.reduced,
            "n_plus": self.diagram.n_plus,
            "n_minus": self.diagram.n_minus,
            "vertices": vertices,
            "differential": entries,
        }


def _mono_name(m: int) -> str:
    return "1" if not m else "".join(f"a{i + 1}" for i in mask_indices(m))


def delta_degree(k: int, e: int, height: int, n_plus: int, reduced: bool) -> int:
    """delta = q - 2h with q = (k - 2e) + |rho| + n+ - 2n-, h = |rho| - n-."""
    q_internal = (k - 1 if reduced else k) - 2 * e
    return q_internal - height + n_plus


def circle_weight_polys(d: MarkedDiagram, r: Resolution) -> list[Poly]:
    return [Poly.linear(ms) for ms in d.circle_weights(r)]


def build_complex(
    d: MarkedDiagram,
    reduced: bool = False,
    *,
    cube: Cube | None = None,
    signs: SignData | None = None,
    check: bool = True,
) -> TwistedComplex:
    if reduced and d.basepoint is None:
        raise ValueError("the reduced complex needs a basepoint")
    cube = cube or Cube(d)
    signs = signs or sign_data(cube)
    tc = TwistedComplex(d, reduced, cube, signs)
    n = d.n
    states = sorted(range(1 << n), key=lambda s: (popcount(s), s))
    for s in states:
        r = cube.resolution(s)
        tc.bp_circle[s] = d.basepoint_circle(r) if reduced else None
        for m in tc.vertex_basis(s):
            tc.index[s, m] = len(tc.basis)
            tc.basis.append((s, m))
            tc.delta.append(delta_degree(r.k, popcount(m), popcount(s), d.n_plus, reduced))
    for s in states:
        bp = tc.bp_circle[s]
        for i in range(n):
            if s >> i & 1:
                continue
            surg = cube.edge_surgery(s, i)
            t = s | 1 << i
            bp_t = tc.bp_circle[t]
            sign = -1 if signs.eps[s, i] else 1
            for m in range(1 << cube.k(s)):
                img = surg.apply_mask(m)
                if bp is not None and m >> bp & 1:
                    if any(not m2 >> bp_t & 1 for m2 in img):
                        raise InternalError(f"edge map at {s:b}/{i} does not descend to the reduced complex")
                    continue
                row = {}
                for m2, c in img.items():
                    if bp_t is not None and m2 >> bp_t & 1:
                        continue
                    row[tc.index[t, m2]] = c * sign
                if row:
                    tc.d_odd.setdefault(tc.index[s, m], {}).update(row)
        weights = circle_weight_polys(d, cube.resolution(s))
        vsign = -1 if signs.sigma[s] else 1
        for m in tc.vertex_basis(s):
            row: dict[int, Poly] = {}
            for i, w in enumerate(weights):
                if not w or i == bp:
                    continue
                g = left_gen_sign(i, m)
                if g:
                    row[tc.index[s, m | 1 << i]] = w * (g * vsign)
            if row:
                tc.d_v[tc.index[s, m]] = row
    if check:
        check_complex(tc)
    return tc


def _compose_sparse(f: Mapping[int, Mapping[int, object]], g: Mapping[int, Mapping[int, object]]) -> dict[int, dict[int, object]]:
    """Sparse ``f o g``: entry (src, tgt) = sum over mid of g[src][mid] * f[mid][tgt]."""
    out: dict[int, dict[int, object]] = {}
    for src, row in g.items():
        acc: dict[int, object] = {}
        for mid, a in row.items():
            for tgt, b in f.get(mid, {}).items():
                acc[tgt] = acc.get(tgt, 0) + a * b
        acc = {t: v for t, v in acc.items() if v}
        if acc:
            out[src] = acc
    return out


def _add_sparse(*ms) -> dict[int, dict[int, object]]:
    out: dict[int, dict[int, object]] = {}
    for m in ms:
        for src, row in m.items():
            r = out.setdefault(src, {})
            for t, v in row.items():
                r[t] = r.get(t, 0) + v
    return {s: {t: v for t, v in r.items() if v} for s, r in out.items() if any(r.values())}


def check_complex(tc: TwistedComplex) -> None:
    """All four structural identities, plus delta-homogeneity; raises InternalError."""
    if _compose_sparse(tc.d_odd, tc.d_odd):
        raise InternalError("d_odd^2 != 0")
    if _compose_sparse(tc.d_v, tc.d_v):
        raise InternalError("d_v^2 != 0")
    if _add_sparse(_compose_sparse(tc.d_v, tc.d_odd), _compose_sparse(tc.d_odd, tc.d_v)):
        raise InternalError("d_v d_odd + d_odd d_v != 0")
    for mat in (tc.d_odd, tc.d_v):
        for src, row in mat.items():
            for tgt in row:
                if tc.delta[tgt] - tc.delta[src] != -2:
                    raise InternalError(f"entry {tc.basis[src]} -> {tc.basis[tgt]} is not of delta-degree -2")


def d_squared_total(tc: TwistedComplex) -> dict[int, dict[int, object]]:
    """(d_v + d_odd)^2 computed symbolically over Z[x]; empty means zero."""
    tot = tc.total()
    return _compose_sparse(tot, tot)
