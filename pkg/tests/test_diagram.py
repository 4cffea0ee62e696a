import json

import pytest
import sympy
from hypothesis import given, strategies as st

from tok.corpus import CORPUS, braid_closure, named, unknot
from tok.diagram import DiagramError, add_kink, load_diagram, parse_diagram


def union_find_circles(d, state):
    """Count circles of a resolution from the raw crossing data only.

    Slot pairing: with ``u`` the under-incoming slot, bit 0 joins (u, u+1) and
    (u+2, u+3); bit 1 joins (u+1, u+2) and (u+3, u).
    """
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for ci, cr in enumerate(d.crossings):
        u = 1 - cr.over
        shift = 0 if not state >> ci & 1 else 1
        for a in (0, 2):
            s1, s2 = (u + a + shift) % 4, (u + a + shift + 1) % 4
            union(("e", cr.ends[s1]), ("e", cr.ends[s2]))
    for e in d.free_loops:
        find(("e", e))
    return len({find(("e", e)) for e in d.edges})


def laplacian_tree_count(edges, nv):
    """Matrix-tree theorem, determinant taken by sympy."""
    if nv <= 1:
        return 1
    lap = sympy.zeros(nv, nv)
    for a, b in edges:
        if a != b:
            lap[a, a] += 1
            lap[b, b] += 1
            lap[a, b] -= 1
            lap[b, a] -= 1
    return int(lap[1:, 1:].det())


TREFOIL_JSON = {
    "crossings": [
        {"ends": [1, 4, 2, 5], "over": 1},
        {"ends": [3, 6, 4, 1], "over": 1},
        {"ends": [5, 2, 6, 3], "over": 1},
    ],
    "marks": [{"id": f"x{i}", "edge": i} for i in range(1, 7)],
    "basepoint": 1,
}


def test_parse_unknot():
    d = parse_diagram('{"crossings": [], "marks": [{"id": "x1", "edge": 1}], "free_loops": [1], "basepoint": 1}')
    assert d.n == 0 and len(d.free_loops) == 1 and len(d.marks) == 1


def test_parse_trefoil():
    d = parse_diagram(json.dumps(TREFOIL_JSON))
    assert (d.n, len(d.edges), len(d.marks)) == (3, 6, 6)
    assert d == named("trefoil")


def test_round_trip_json():
    for name in CORPUS:
        d = named(name)
        assert parse_diagram(json.dumps(d.to_json())) == d


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda t: t["crossings"][0].update(ends=[7, 4, 2, 5]), "edge multiplicity"),
        (lambda t: t.update(basepoint=99), "unknown basepoint"),
        (lambda t: t["marks"].append({"id": "x1", "edge": 2}), "duplicate mark"),
        (lambda t: t["marks"].append({"id": "y", "edge": 42}), "unknown edge"),
        (lambda t: t["crossings"][1].update(ends=[3, 6, 4]), "4 ends"),
    ],
)
def test_parse_errors(mutate, message):
    t = json.loads(json.dumps(TREFOIL_JSON))
    mutate(t)
    with pytest.raises(DiagramError, match=message):
        parse_diagram(t)


def test_malformed_json_reports_location():
    with pytest.raises(DiagramError, match="line 1"):
        parse_diagram('{"crossings": [}')


def test_shipped_diagram_files(diagrams_dir):
    files = sorted(diagrams_dir.glob("*.json"))
    assert files
    for f in files:
        load_diagram(f)
    assert load_diagram(diagrams_dir / "trefoil.json").n == 3


def test_kink_resolutions():
    d = unknot(1)
    assert d.resolve(0).k == 2
    assert d.resolve(1).k == 1
    assert d.connected_vertices() == [1]


@pytest.mark.parametrize("name", CORPUS)
def test_circles_match_union_find(name):
    d = named(name)
    for s in range(1 << d.n):
        assert d.resolve(s).k == union_find_circles(d, s)


def test_weights():
    d = unknot(0)
    r = d.resolve(0)
    assert d.circle_weights(r) == [["x1"]]
    k = unknot(1)  # x1 sits on the kink loop, x2 on the other edge
    assert sorted(map(sorted, k.circle_weights(k.resolve(0)))) == [["x1"], ["x2"]]
    t = named("trefoil")
    ws = t.circle_weights(t.resolve(0))
    assert sorted(m for w in ws for m in w) == [f"x{i}" for i in range(1, 7)]


@pytest.mark.parametrize("name, count", [("trefoil", 3), ("figure8", 5), ("unknot1", 1), ("5_1", 5), ("5_2", 7)])
def test_tait_tree_counts(name, count):
    d = named(name)
    g = d.tait_graph()
    assert g.spanning_tree_count() == count
    assert laplacian_tree_count([(a, b) for a, b, _ in g.edges], len(g.vertices)) == count
    assert len(d.connected_vertices()) == count


def test_tait_needs_crossings():
    with pytest.raises(DiagramError):
        unknot(0).tait_graph()


def test_kink_keeps_validity():
    t = named("trefoil")
    for positive in (True, False):
        k = add_kink(t, 3, positive=positive)
        assert k.n == 4 and k.is_knot()
        assert len(k.connected_vertices()) == k.tait_graph().spanning_tree_count()


words = st.lists(st.integers(1, 3).flatmap(lambda i: st.sampled_from([i, -i])), min_size=1, max_size=6)


@given(words, st.data())
def test_bit_flip_changes_circle_count_by_one(word, data):
    d = braid_closure(word, 4)
    s = data.draw(st.integers(0, (1 << d.n) - 1))
    c = data.draw(st.integers(0, d.n - 1))
    assert abs(d.resolve(s).k - d.resolve(s ^ 1 << c).k) == 1


@given(words)
def test_connected_states_count_spanning_trees(word):
    d = braid_closure(word, max(abs(g) for g in word) + 1)
    if d.free_loops or not d.is_connected():
        return
    conn = [s for s in range(1 << d.n) if union_find_circles(d, s) == 1]
    g = d.tait_graph()
    assert len(conn) == laplacian_tree_count([(a, b) for a, b, _ in g.edges], len(g.vertices))


@given(words, st.data())
def test_weights_partition_marks(word, data):
    d = braid_closure(word, 4)
    r = d.resolve(data.draw(st.integers(0, (1 << d.n) - 1)))
    ws = d.circle_weights(r)
    assert len(ws) == r.k
    assert sorted(m for w in ws for m in w) == sorted(m for m, _ in d.marks)
