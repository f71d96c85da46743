import pytest

from regtrans.string_graphs import (LEFT, RIGHT, UNLAB, Alphabet, Graph, GraphError, decode,
                                    egr_encode, ngr_encode, parse_graph, tape_encode, valuate)


def test_ngr_empty_and_single():
    assert len(ngr_encode("").nodes) == 0
    g = ngr_encode("a")
    assert len(g.nodes) == 1 and not g.edges


def test_ngr_ababb():
    g = ngr_encode("ababb")
    assert [g.node_label[u] for u in g.nodes] == list("ababb")
    assert len(g.edges) == 4
    assert all(lab == UNLAB for (_, lab, _) in g.edges)


def test_egr_shapes():
    g = egr_encode("")
    assert len(g.nodes) == 1 and not g.edges
    g = egr_encode("ababb")
    assert len(g.nodes) == 6
    assert sorted(l for (_, l, _) in g.edges) == sorted("ababb")
    assert len(egr_encode("a").edges) == 1


def test_tape_encode():
    g = tape_encode("")
    assert [g.node_label[u] for u in g.nodes] == [LEFT, RIGHT]
    assert len(g.edges) == 1
    assert len(tape_encode("aaabbaba").nodes) == 10


@pytest.mark.parametrize("w", ["", "a", "ab", "ababb", "bbbaa"])
def test_round_trips(w):
    assert decode(ngr_encode(w), "ngr") == w
    assert decode(egr_encode(w), "egr") == w


def test_parallel_edges_rejected():
    g = Graph([0, 1], {0: UNLAB, 1: UNLAB}, [(0, "a", 1), (0, "b", 1)])
    with pytest.raises(GraphError):
        decode(g, "egr")


def test_graph_invariants():
    with pytest.raises(GraphError):
        Graph([0, 0], {0: "a"}, [])
    with pytest.raises(GraphError):
        Graph([0], {0: "a"}, [(0, UNLAB, 1)])


def test_canonical_equality():
    g1 = Graph([5, 7], {5: "a", 7: "b"}, [(5, UNLAB, 7)])
    assert g1 == ngr_encode("ab")
    assert g1 != ngr_encode("ba")


def test_text_round_trip():
    g = egr_encode("abba")
    assert parse_graph(g.to_text()) == g


def test_valuate():
    g = ngr_encode("ab")
    u0, u1 = g.nodes
    vg = valuate(g, {"x": u0})
    assert vg.base.node_label[u0] == ("a", (("x", 1),))
    assert vg.base.node_label[u1] == ("b", (("x", 0),))
    vg = valuate(g, {"X": {u0, u1}})
    assert all(dict(vg.base.node_label[u][1])["X"] == 1 for u in g.nodes)
    vg = valuate(g, {"x": u0, "y": u0})
    assert dict(vg.base.node_label[u0][1]) == {"x": 1, "y": 1}
    assert vg.assignment() == {"x": u0, "y": u0}


def test_alphabet_rejects_reserved():
    with pytest.raises(ValueError):
        Alphabet("aL")
    with pytest.raises(ValueError):
        Alphabet("")
    assert list(Alphabet("ab")) == ["a", "b"]
