"""Marked oriented link diagrams: parsing, resolutions, circle tracing, Tait graphs.

Conventions
-----------
Each crossing lists the edges at its four slots in counterclockwise order.
``over`` names the over strand: 0 means slots 0-2, 1 means slots 1-3.  The
under strand enters the crossing at the lower slot of the under pair
(``ends[0]`` when ``over == 1``, ``ends[1]`` when ``over == 0``), so a
Knot Atlas ``X[i,j,k,l]`` is ``{"ends": [i, j, k, l], "over": 1}``.  Writing
``u`` for that incoming slot, the 0-resolution pairs slots ``(u, u+1)`` and
``(u+2, u+3)``; the 1-resolution pairs ``(u+1, u+2)`` and ``(u+3, u)``.

An oriented surgery arc at a crossing is stored as its *tail slot* ``t``: it
runs from the smoothing strand through slots ``(t, t+1)`` to the strand
through ``(t+2, t+3)``.  ``arrow == 0`` gives the 0-resolution arc ``t = u``,
``arrow == 1`` gives ``t = u + 2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

End = tuple[int, int]  # (crossing index, slot)


class DiagramError(ValueError):
    """Invalid diagram input; the message names the offending location."""


@dataclass(frozen=True)
class Crossing:
    id: int
    ends: tuple[int, int, int, int]
    over: int
    arrow: int

    @property
    def under_in(self) -> int:
        """Slot where the under strand enters."""
        return 1 - self.over

    @property
    def zero_arc(self) -> int:
        """Tail slot of the arrow-oriented arc in the 0-resolution."""
        return (self.under_in + 2 * self.arrow) % 4

    def partner(self, slot: int, bit: int) -> int:
        r = (slot - self.under_in) % 4
        r = r ^ 1 if bit == 0 else 3 - r
        return (self.under_in + r) % 4

    def state_of_arc(self, tail: int) -> int:
        """Resolution bit in which the strand ``(tail, tail+1)`` exists."""
        return (tail - self.under_in) % 2

    def is_under_slot(self, slot: int) -> bool:
        return (slot - self.under_in) % 2 == 0


@dataclass(frozen=True)
class Passage:
    """A circle passing through a crossing along one smoothing strand."""

    crossing: int
    slot_in: int
    slot_out: int


@dataclass(frozen=True)
class Arc:
    crossing: int
    tail_slot: int
    tail_circle: int
    head_circle: int


@dataclass(frozen=True)
class Resolution:
    state: int
    circles: tuple[tuple[int, ...], ...]
    passages: tuple[tuple[Passage, ...], ...]
    circle_of_edge: dict[int, int] = field(compare=False, hash=False)
    arcs: tuple[Arc, ...] = ()

    @property
    def k(self) -> int:
        return len(self.circles)

    def circle_at(self, d: "MarkedDiagram", crossing: int, slot: int) -> int:
        return self.circle_of_edge[d.crossings[crossing].ends[slot]]


@dataclass(frozen=True)
class TaitGraph:
    n_regions: int
    shaded: tuple[int, ...]
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]  # (vertex, vertex, sign) per crossing

    def spanning_tree_count(self) -> int:
        return matrix_tree_count(len(self.vertices), [(a, b) for a, b, _ in self.edges])


def matrix_tree_count(nv: int, edges: Iterable[tuple[int, int]]) -> int:
    """Number of spanning trees of a multigraph (loops ignored) via the matrix-tree theorem."""
    if nv <= 1:
        return 1
    lap = [[Fraction(0)] * nv for _ in range(nv)]
    for a, b in edges:
        if a == b:
            continue
        lap[a][a] += 1
        lap[b][b] += 1
        lap[a][b] -= 1
        lap[b][a] -= 1
    m = [row[1:] for row in lap[1:]]
    size = nv - 1
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if m[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, size):
            if m[r][col]:
                f = m[r][col] / m[col][col]
                for c2 in range(col, size):
                    m[r][c2] -= f * m[col][c2]
    return int(det)


class MarkedDiagram:
    """Validated marked diagram; treat as immutable."""

    def __init__(
        self,
        crossings: Sequence[Crossing],
        marks: Sequence[tuple[str, int]] = (),
        basepoint: int | None = None,
        free_loops: Sequence[int] = (),
    ):
        self.crossings: tuple[Crossing, ...] = tuple(crossings)
        self.marks: tuple[tuple[str, int], ...] = tuple((str(m), int(e)) for m, e in marks)
        self.basepoint = basepoint
        self.free_loops: tuple[int, ...] = tuple(free_loops)
        self._validate()
        self._orient()

    # -- construction helpers -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.crossings)

    def replace(self, **kw) -> "MarkedDiagram":
        args = dict(crossings=self.crossings, marks=self.marks, basepoint=self.basepoint, free_loops=self.free_loops)
        args.update(kw)
        return MarkedDiagram(**args)

    def with_arrows(self, arrows: Sequence[int]) -> "MarkedDiagram":
        cs = [Crossing(c.id, c.ends, c.over, int(a)) for c, a in zip(self.crossings, arrows)]
        return self.replace(crossings=cs)

    def flip_arrow(self, i: int) -> "MarkedDiagram":
        arrows = [c.arrow for c in self.crossings]
        arrows[i] ^= 1
        return self.with_arrows(arrows)

    def with_marks(self, marks: Sequence[tuple[str, int]]) -> "MarkedDiagram":
        return self.replace(marks=marks)

    def auto_marked(self) -> "MarkedDiagram":
        """One mark per edge, named x1, x2, ... in edge order."""
        return self.with_marks([(f"x{i + 1}", e) for i, e in enumerate(self.edges)])

    def marks_at_basepoint(self) -> "MarkedDiagram":
        if self.basepoint is None:
            raise DiagramError("no basepoint set")
        return self.with_marks([(m, self.basepoint) for m, _ in self.marks])

    # -- validation -----------------------------------------------------------

    def _validate(self) -> None:
        uses: dict[int, list[End]] = {}
        for ci, c in enumerate(self.crossings):
            if c.id != ci:
                raise DiagramError(f"crossing {ci}: id {c.id} out of sequence")
            if len(c.ends) != 4:
                raise DiagramError(f"crossing {ci}: needs exactly 4 ends")
            if c.over not in (0, 1) or c.arrow not in (0, 1):
                raise DiagramError(f"crossing {ci}: over/arrow must be 0 or 1")
            for s, e in enumerate(c.ends):
                uses.setdefault(e, []).append((ci, s))
        for e, ends in sorted(uses.items()):
            if len(ends) != 2:
                raise DiagramError(f"edge multiplicity: edge {e} used {len(ends)} times (at {ends})")
        for e in self.free_loops:
            if e in uses:
                raise DiagramError(f"free loop {e} also appears at a crossing")
        if len(set(self.free_loops)) != len(self.free_loops):
            raise DiagramError("duplicate free loop id")
        self.end_map: dict[int, tuple[End, End]] = {e: (ends[0], ends[1]) for e, ends in uses.items()}
        self.edges: tuple[int, ...] = tuple(sorted(list(uses) + list(self.free_loops)))
        edge_set = set(self.edges)
        seen = set()
        for m, e in self.marks:
            if m in seen:
                raise DiagramError(f"duplicate mark id {m!r}")
            seen.add(m)
            if e not in edge_set:
                raise DiagramError(f"mark {m!r}: unknown edge {e}")
        if self.basepoint is not None and self.basepoint not in edge_set:
            raise DiagramError(f"unknown basepoint edge {self.basepoint}")
        self.edge_at: dict[End, int] = {(ci, s): e for ci, c in enumerate(self.crossings) for s, e in enumerate(c.ends)}
        self._check_planar()

    def other_end(self, e: int, end: End) -> End:
        a, b = self.end_map[e]
        return b if end == a else a

    def _darts_faces(self) -> dict[End, int]:
        """Face to the left of each outgoing dart ``(crossing, slot)``."""
        face: dict[End, int] = {}
        nf = 0
        for start in sorted(self.edge_at):
            if start in face:
                continue
            cur = start
            while cur not in face:
                face[cur] = nf
                e = self.edge_at[cur]
                c2, s2 = self.other_end(e, cur)
                cur = (c2, (s2 - 1) % 4)
            nf += 1
        return face

    def _check_planar(self) -> None:
        if not self.crossings:
            return
        face = self._darts_faces()
        comp = self._crossing_components()
        faces_per: dict[int, set[int]] = {}
        for (c, _), f in face.items():
            faces_per.setdefault(comp[c], set()).add(f)
        for root, fs in faces_per.items():
            v = sum(1 for c in comp if comp[c] == root)
            if v - 2 * v + len(fs) != 2:
                raise DiagramError(
                    f"rotation system is not planar around crossing {root}: V-E+F = {v - 2 * v + len(fs)}"
                )

    def _crossing_components(self) -> dict[int, int]:
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e, (a, b) in self.end_map.items():
            ra, rb = find(a[0]), find(b[0])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return {c: find(c) for c in range(self.n)}

    def is_connected(self) -> bool:
        if self.free_loops:
            return self.n == 0 and len(self.free_loops) == 1
        return len(set(self._crossing_components().values())) <= 1

    # -- orientation ------------------------------------------------------------

    def _orient(self) -> None:
        """Orient link components from the under-strand convention; fix crossing signs."""
        head: dict[int, End] = {}  # edge -> end where it enters a crossing
        visited: set[int] = set()
        components: list[list[int]] = []
        for e0 in sorted(self.end_map):
            if e0 in visited:
                continue
            # walk the component once, recording passages as (edge_in, end_in)
            start_end = self.end_map[e0][0]
            walk: list[tuple[int, End]] = []
            e, from_end = e0, start_end
            while True:
                to_end = self.other_end(e, from_end)
                walk.append((e, to_end))
                c, s = to_end
                out = (c, (s + 2) % 4)
                e2 = self.edge_at[out]
                if e2 == e0 and out == start_end:
                    break
                e, from_end = e2, out
            votes = set()
            for e, (c, s) in walk:
                cr = self.crossings[c]
                if cr.is_under_slot(s):
                    votes.add(s == cr.under_in)
            if len(votes) > 1:
                raise DiagramError(
                    f"inconsistent orientation on the component through edge {e0}: "
                    "under strands must enter at the first under slot"
                )
            forward = votes.pop() if votes else True
            comp = []
            for e, to_end in walk:
                visited.add(e)
                comp.append(e)
                head[e] = to_end if forward else self.other_end(e, to_end)
            components.append(comp)
        self.head = head
        self.components = components
        signs = []
        for ci, cr in enumerate(self.crossings):
            over_in = [s for s in ((cr.under_in + 1) % 4, (cr.under_in + 3) % 4) if head[cr.ends[s]] == (ci, s)]
            if len(over_in) != 1:
                raise DiagramError(f"crossing {ci}: over strand is not consistently oriented")
            signs.append(1 if over_in[0] == (cr.under_in + 3) % 4 else -1)
        self.signs: tuple[int, ...] = tuple(signs)
        self.n_plus = signs.count(1)
        self.n_minus = signs.count(-1)

    def is_knot(self) -> bool:
        return len(self.components) + len(self.free_loops) == 1

    # -- resolutions ----------------------------------------------------------

    def resolve(self, state: int) -> Resolution:
        if state >> self.n:
            raise ValueError(f"state {state:b} has more than {self.n} bits")
        circles: list[list[int]] = []
        passages: list[list[Passage]] = []
        seen: set[int] = set()
        for e0 in self.edges:
            if e0 in seen:
                continue
            if e0 not in self.end_map:
                seen.add(e0)
                circles.append([e0])
                passages.append([])
                continue
            edges_here: list[int] = []
            ps: list[Passage] = []
            start = self.end_map[e0][0]
            e, from_end = e0, start
            while True:
                seen.add(e)
                edges_here.append(e)
                c, s = self.other_end(e, from_end)
                s2 = self.crossings[c].partner(s, state >> c & 1)
                ps.append(Passage(c, s, s2))
                nxt = (c, s2)
                e = self.edge_at[nxt]
                from_end = nxt
                if e == e0 and from_end == start:
                    break
            circles.append(edges_here)
            passages.append(ps)
        order = sorted(range(len(circles)), key=lambda i: min(circles[i]))
        circles_t = tuple(tuple(circles[i]) for i in order)
        passages_t = tuple(tuple(passages[i]) for i in order)
        coe = {e: ci for ci, cs in enumerate(circles_t) for e in cs}
        arcs = []
        for ci, cr in enumerate(self.crossings):
            t = cr.zero_arc if not state >> ci & 1 else (cr.zero_arc + 1) % 4
            arcs.append(Arc(ci, t, coe[cr.ends[t]], coe[cr.ends[(t + 2) % 4]]))
        return Resolution(state, circles_t, passages_t, coe, tuple(arcs))

    def circle_weights(self, r: Resolution) -> list[list[str]]:
        """Mark variables on each circle; the weight w_i is their sum."""
        out: list[list[str]] = [[] for _ in r.circles]
        for m, e in self.marks:
            out[r.circle_of_edge[e]].append(m)
        return out

    def basepoint_circle(self, r: Resolution) -> int | None:
        if self.basepoint is None:
            return None
        return r.circle_of_edge[self.basepoint]

    def connected_vertices(self) -> list[int]:
        if self.free_loops and self.n == 0:
            return [0] if len(self.free_loops) == 1 else []
        return [s for s in range(1 << self.n) if self.resolve(s).k == 1]

    # -- Tait graph -------------------------------------------------------------

    def tait_graph(self) -> TaitGraph:
        if self.n == 0:
            raise DiagramError("Tait graph needs at least one crossing")
        if not self.is_connected():
            raise DiagramError("Tait graph needs a connected diagram")
        face = self._darts_faces()
        nf = len(set(face.values()))
        adj: dict[int, set[int]] = {f: set() for f in range(nf)}
        for e, (a, b) in self.end_map.items():
            # the two sides of an edge are the faces left of its two darts
            fa, fb = face[a], face[b]
            adj[fa].add(fb)
            adj[fb].add(fa)
        # shade the face left of the lowest edge, traversed along its orientation
        e0 = min(self.end_map)
        tail = self.other_end(e0, self.head[e0])
        color = {face[tail]: 1}
        stack = [face[tail]]
        while stack:
            f = stack.pop()
            for g in adj[f]:
                if g not in color:
                    color[g] = 1 - color[f]
                    stack.append(g)
                elif color[g] == color[f]:
                    raise DiagramError("diagram regions are not 2-colourable")
        shaded = tuple(sorted(f for f in range(nf) if color[f] == 1))
        vid = {f: i for i, f in enumerate(shaded)}
        edges = []
        for ci, cr in enumerate(self.crossings):
            corners = [s for s in range(4) if color[face[(ci, s)]] == 1]
            a, b = corners
            # the 0-smoothing opens corners starting at slots u+1 and u+3
            sign = 1 if (a - cr.under_in) % 2 == 1 else -1
            edges.append((vid[face[(ci, a)]], vid[face[(ci, b)]], sign))
        return TaitGraph(nf, shaded, tuple(range(len(shaded))), tuple(edges))

    # -- serialisation ------------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "crossings": [{"ends": list(c.ends), "over": c.over, "arrow": c.arrow} for c in self.crossings],
            "marks": [{"id": m, "edge": e} for m, e in self.marks],
            "basepoint": self.basepoint,
        }
        if self.free_loops:
            out["free_loops"] = list(self.free_loops)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MarkedDiagram):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __repr__(self) -> str:
        return f"MarkedDiagram(n={self.n}, edges={len(self.edges)}, marks={len(self.marks)}, basepoint={self.basepoint})"


def parse_diagram(text: str | dict) -> MarkedDiagram:
    """Parse the JSON diagram format (a string or an already-decoded dict)."""
    if isinstance(text, str):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DiagramError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    else:
        data = text
    if not isinstance(data, dict):
        raise DiagramError("top level must be a JSON object")
    crossings = []
    for i, c in enumerate(data.get("crossings", [])):
        try:
            ends = tuple(int(e) for e in c["ends"])
            over = int(c.get("over", 1))
            arrow = int(c.get("arrow", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise DiagramError(f"crossing {i}: malformed entry ({exc})") from None
        if len(ends) != 4:
            raise DiagramError(f"crossing {i}: needs exactly 4 ends")
        crossings.append(Crossing(i, ends, over, arrow))
    used = {e for c in crossings for e in c.ends}
    fl = data.get("free_loops", 0)
    if isinstance(fl, int):
        base = max(used, default=0)
        free_loops = [base + 1 + i for i in range(fl)]
    else:
        free_loops = [int(e) for e in fl]
    marks = []
    for i, m in enumerate(data.get("marks", [])):
        try:
            marks.append((str(m["id"]), int(m["edge"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise DiagramError(f"mark {i}: malformed entry ({exc})") from None
    bp = data.get("basepoint")
    return MarkedDiagram(crossings, marks, None if bp is None else int(bp), free_loops)


def load_diagram(path) -> MarkedDiagram:
    with open(path) as fh:
        return parse_diagram(fh.read())


def add_kink(d: MarkedDiagram, edge: int, positive: bool = True, mark: bool = True) -> MarkedDiagram:
    """Reidemeister I: insert a kink on ``edge``; new edges get fresh ids and marks."""
    if edge not in d.edges:
        raise DiagramError(f"unknown edge {edge}")
    top = max(d.edges)
    e_loop, e_out = top + 1, top + 2
    ci = d.n
    crossings = list(d.crossings)
    free_loops = list(d.free_loops)
    if edge in free_loops:
        free_loops.remove(edge)
        e_out = edge  # the loop closes back onto itself
    else:
        hc, hs = d.head[edge]
        old = crossings[hc]
        ends = list(old.ends)
        ends[hs] = e_out
        crossings[hc] = Crossing(old.id, tuple(ends), old.over, old.arrow)
    # strand: edge -> slot 0 -> slot 2 -> loop -> slot 1 -> slot 3 -> e_out (or the
    # mirrored pairing for a positive kink), loop joins adjacent slots 1 and 2
    if positive:
        new = Crossing(ci, (edge, e_loop, e_loop, e_out), 0, 0)
    else:
        new = Crossing(ci, (edge, e_loop, e_loop, e_out), 1, 0)
    crossings.append(new)
    marks = list(d.marks)
    if mark:
        names = {m for m, _ in marks}
        for e in (e_loop, e_out):
            if e == edge:
                continue
            k = len(marks) + 1
            while f"x{k}" in names:
                k += 1
            names.add(f"x{k}")
            marks.append((f"x{k}", e))
    return MarkedDiagram(crossings, marks, d.basepoint, free_loops)
