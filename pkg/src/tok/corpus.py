"""Small diagram corpus: braid closures, Knot Atlas PD codes and R-move pairs."""

from __future__ import annotations

import random
from typing import Sequence

from .diagram import Crossing, MarkedDiagram, add_kink


def braid_closure(word: Sequence[int], strands: int | None = None, basepoint: bool = True) -> MarkedDiagram:
    """Closure of a braid word; ``i`` is sigma_i (strand i over i+1), ``-i`` its inverse.

    Strands run upward; edges get fresh ids along the word and the closing
    segments reuse the ids of the bottom positions.  Untouched strands become
    free loops.
    """
    if strands is None:
        strands = max((abs(g) for g in word), default=0) + 1
    cur = list(range(1, strands + 1))
    nxt = strands + 1
    raw: list[tuple[list[int], int]] = []
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < strands - 1:
            raise ValueError(f"generator {g} out of range for {strands} strands")
        bl, br = cur[i], cur[i + 1]
        tl, tr = nxt, nxt + 1
        nxt += 2
        if g > 0:
            # under strand BR -> TL, ccw from BR: BR, TR, TL, BL
            raw.append(([br, tr, tl, bl], 1))
        else:
            # under strand BL -> TR, ccw from BL: BL, BR, TR, TL
            raw.append(([bl, br, tr, tl], 1))
        cur[i], cur[i + 1] = tl, tr
    rename = {cur[p]: p + 1 for p in range(strands)}
    touched = {e for ends, _ in raw for e in ends}
    crossings = [Crossing(ci, tuple(rename.get(e, e) for e in ends), over, 0) for ci, (ends, over) in enumerate(raw)]
    free = [p + 1 for p in range(strands) if p + 1 not in touched and cur[p] == p + 1]
    labels = sorted({e for c in crossings for e in c.ends} | set(free))
    relabel = {e: i + 1 for i, e in enumerate(labels)}
    crossings = [Crossing(c.id, tuple(relabel[e] for e in c.ends), c.over, c.arrow) for c in crossings]
    free = [relabel[e] for e in free]
    d = MarkedDiagram(crossings, (), None, free)
    d = d.auto_marked()
    if basepoint and d.edges:
        d = d.replace(basepoint=d.edges[0])
    return d


def pd_diagram(pd: Sequence[Sequence[int]], basepoint: int | None = 1, marks: bool = True) -> MarkedDiagram:
    """Knot Atlas PD code ``X[i,j,k,l]`` list (under strand i -> k, counterclockwise)."""
    crossings = [Crossing(ci, tuple(x), 1, 0) for ci, x in enumerate(pd)]
    d = MarkedDiagram(crossings, (), basepoint, ())
    return d.auto_marked() if marks else d


def unknot(crossings: int = 0) -> MarkedDiagram:
    if crossings == 0:
        return MarkedDiagram([], [("x1", 1)], 1, [1])
    if crossings == 1:
        return braid_closure([1])
    if crossings == 2:
        return braid_closure([1, 2])
    raise ValueError("only 0-2 crossing unknots are built in")


KNOT_ATLAS = {
    "3_1": [(1, 4, 2, 5), (3, 6, 4, 1), (5, 2, 6, 3)],
    "4_1": [(4, 2, 5, 1), (8, 6, 1, 5), (6, 3, 7, 4), (2, 7, 3, 8)],
    "5_1": [(1, 6, 2, 7), (3, 8, 4, 9), (5, 10, 6, 1), (7, 2, 8, 3), (9, 4, 10, 5)],
    "5_2": [(1, 4, 2, 5), (3, 8, 4, 9), (5, 10, 6, 1), (9, 6, 10, 7), (7, 2, 8, 3)],
}

BRAIDS = {
    "hopf": [1, 1],
    "trefoil_braid": [1, 1, 1],
    "figure8_braid": [1, -2, 1, -2],
    "square_knot": [1, 1, 1, -2, -2, -2],
    "granny_knot": [1, 1, 1, 2, 2, 2],
}


def named(name: str) -> MarkedDiagram:
    """Corpus diagram by name; all are fully marked and (for knots) basepointed."""
    if name == "unknot0":
        return unknot(0)
    if name == "unknot1":
        return unknot(1)
    if name == "unknot2":
        return unknot(2)
    if name == "trefoil":
        return pd_diagram(KNOT_ATLAS["3_1"])
    if name == "figure8":
        return pd_diagram(KNOT_ATLAS["4_1"])
    if name in ("5_1", "5_2"):
        return pd_diagram(KNOT_ATLAS[name])
    if name in BRAIDS:
        return braid_closure(BRAIDS[name])
    raise KeyError(name)


CORPUS = ["unknot0", "unknot1", "unknot2", "hopf", "trefoil", "figure8", "5_1", "5_2", "square_knot"]
KNOT_CORPUS = ["unknot1", "unknot2", "trefoil", "figure8", "5_1", "5_2", "square_knot"]


def move_pairs() -> dict[str, tuple[MarkedDiagram, MarkedDiagram]]:
    """Diagram pairs related by a single Reidemeister move."""
    tref = named("trefoil")
    return {
        "unknot R1": (unknot(0), unknot(1)),
        "unknot R1 negative": (unknot(0), add_kink(unknot(0), 1, positive=False)),
        "unknot R2": (braid_closure([1, 2]), braid_closure([1, 2, -2, 2])),
        "unknot R3": (braid_closure([1, 2, 1, -2]), braid_closure([2, 1, 2, -2])),
        "trefoil R1": (tref, add_kink(tref, 3, positive=True)),
        "trefoil R1 negative": (tref, add_kink(tref, 2, positive=False)),
        "trefoil R1 braid": (braid_closure([1, 1, 1]), braid_closure([1, 1, 1, 2])),
        "trefoil R2": (braid_closure([1, 1, 1]), braid_closure([1, 1, 1, 1, -1])),
        "trefoil R3": (braid_closure([1, 2, 1, 2]), braid_closure([2, 1, 2, 2])),
    }


def random_diagram(rng: random.Random, max_crossings: int = 6, max_strands: int = 4) -> MarkedDiagram:
    """Random braid closure with random arrows and random marks (not necessarily a knot)."""
    strands = rng.randint(2, max_strands)
    length = rng.randint(1, max_crossings)
    word = [rng.choice([1, -1]) * rng.randint(1, strands - 1) for _ in range(length)]
    d = braid_closure(word, strands, basepoint=False)
    d = d.with_arrows([rng.randint(0, 1) for _ in range(d.n)])
    n_marks = rng.randint(0, len(d.edges) + 2)
    marks = [(f"x{i + 1}", rng.choice(d.edges)) for i in range(n_marks)]
    return d.replace(marks=marks, basepoint=rng.choice(d.edges))
