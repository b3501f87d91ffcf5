import numpy as np
import pytest

from ergoset import DiGraph, ParseError, ingest_edge_list

from _oracles import random_digraph


def test_ingest_default_weights():
    g = ingest_edge_list("a b\nb c")
    assert g.node_count == 3
    assert g.edge_dict() == {("a", "b"): 1.0, ("b", "c"): 1.0}


def test_ingest_merges_duplicates_by_sum():
    g = ingest_edge_list("a b 0.5\na b 0.25")
    assert g.edge_dict() == {("a", "b"): 0.75}


def test_ingest_skips_comments():
    g = ingest_edge_list("a b\n# comment\nb a 2.0")
    assert g.node_count == 2
    assert g.edge_dict() == {("a", "b"): 1.0, ("b", "a"): 2.0}


def test_ingest_inline_comment_and_blank_lines():
    g = ingest_edge_list("\na b 3.0  # trailing note\n\n")
    assert g.edge_dict() == {("a", "b"): 3.0}


def test_ingest_nodes_section_keeps_isolated():
    g = ingest_edge_list("a b\nNODES:\nz\na\n")
    assert set(g.labels) == {"a", "b", "z"}
    assert g.out_degrees()[g.index_of("z")] == 0


def test_ingest_comma_delimiter():
    g = ingest_edge_list("a,b,2.5\nb,c\n", delimiter=",")
    assert g.edge_dict() == {("a", "b"): 2.5, ("b", "c"): 1.0}


@pytest.mark.parametrize("text,line", [
    ("a\n", 1),
    ("a b c d\n", 1),
    ("a b\nx y 0\n", 2),
    ("a b\nx y -1\n", 2),
    ("a b\nx y nope\n", 2),
    ("a b inf\n", 1),
])
def test_ingest_rejects_malformed_lines(text, line):
    with pytest.raises(ParseError) as err:
        ingest_edge_list(text)
    assert err.value.line == line


def test_ingest_empty_input_is_an_error():
    with pytest.raises(ParseError):
        ingest_edge_list("# nothing here\n")


def test_roundtrip_is_exact():
    rng = np.random.default_rng(7)
    for trial in range(40):
        g = random_digraph(rng, max_nodes=8)
        # random awkward weights and an isolated node for good measure
        src, dst, _ = g.edge_arrays()
        wt = rng.uniform(1e-8, 1e8, size=src.size)
        g = DiGraph.from_arrays(g.labels + [f"iso{trial}"], src, dst, wt)
        again = ingest_edge_list(g.to_edge_list())
        assert again == g
        assert ingest_edge_list(again.to_edge_list()) == again


def test_reverse_examples_and_involution():
    g = ingest_edge_list("a b 2.0")
    assert g.reverse().edge_dict() == {("b", "a"): 2.0}
    cyc = ingest_edge_list("a b\nb c\nc a")
    assert cyc.reverse().edge_dict() == {("b", "a"): 1.0, ("c", "b"): 1.0, ("a", "c"): 1.0}
    rng = np.random.default_rng(11)
    for _ in range(25):
        g = random_digraph(rng, max_nodes=7)
        assert g.reverse().reverse() == g
        assert g.reverse().out_wt.sum() == pytest.approx(g.out_wt.sum(), abs=0.0)


def test_induced_subgraph_examples():
    g = ingest_edge_list("a b\nb c")
    sub = g.induced_subgraph(g.indices_of(["a", "b"]))
    assert sub.edge_dict() == {("a", "b"): 1.0}
    assert g.induced_subgraph(np.arange(g.node_count)) == g
    g2 = ingest_edge_list("a b\nb a\na c")
    sub2 = g2.induced_subgraph(g2.indices_of(["a", "b"]))
    assert sub2.edge_dict() == {("a", "b"): 1.0, ("b", "a"): 1.0}


def test_induced_subgraph_rejects_out_of_range():
    g = ingest_edge_list("a b")
    with pytest.raises(ValueError):
        g.induced_subgraph(np.asarray([0, 5]))


def test_induced_subgraph_degree_monotonicity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_digraph(rng, max_nodes=8)
        if g.node_count < 2:
            continue
        k = int(rng.integers(1, g.node_count + 1))
        nodes = np.sort(rng.choice(g.node_count, size=k, replace=False))
        sub = g.induced_subgraph(nodes)
        assert sub.edge_count <= g.edge_count
        for new, old in enumerate(nodes.tolist()):
            assert sub.out_degrees()[new] <= g.out_degrees()[old]
            assert sub.in_degrees()[new] <= g.in_degrees()[old]


def test_weakly_connected_components():
    g = ingest_edge_list("a b\nc d")
    comps = [set(c.tolist()) for c in g.weakly_connected_components()]
    assert comps == [{0, 1}, {2, 3}]
    iso = ingest_edge_list("NODES:\nx\ny\nz\n")
    assert len(iso.weakly_connected_components()) == 3
    cyc = ingest_edge_list("a b\nb c\nc a")
    assert len(cyc.weakly_connected_components()) == 1


def test_self_loops_are_retained_and_count_in_degrees():
    g = ingest_edge_list("a a 2.0\na b")
    i = g.index_of("a")
    assert g.out_degrees()[i] == 2
    assert g.in_degrees()[i] == 1
    assert g.weighted_out_degrees()[i] == pytest.approx(3.0)


def test_serialization_is_deterministic():
    text = "b a 1.5\na b\nNODES:\nq\n"
    g = ingest_edge_list(text)
    assert g.to_edge_list() == ingest_edge_list(g.to_edge_list()).to_edge_list()


def test_serializer_rejects_untokenizable_labels():
    for bad in ("a b", "a,b", "x#y", "NODES:"):
        g = DiGraph.from_edges([(bad, "ok")])
        with pytest.raises(ValueError):
            g.to_edge_list()
