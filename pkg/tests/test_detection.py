import numpy as np
import pytest

from ergoset import (ContractViolation, ingest_edge_list, is_backward_ergodic_set,
                     is_forward_ergodic_set, partition, partition_to_json, scc)

from _oracles import brute_partition, library_partition_sets, random_digraph


def sets_of(g, arrs):
    return [{g.labels[i] for i in a.tolist()} for a in arrs]


def test_scc_examples():
    g = ingest_edge_list("a b\nb a\nb c")
    d = scc(g)
    assert sets_of(g, d.components) == [{"a", "b"}, {"c"}]
    dag = scc(ingest_edge_list("a b\nb c"))
    assert len(dag.components) == 3
    complete = ingest_edge_list("\n".join(f"v{i} v{j}" for i in range(4)
                                          for j in range(4) if i != j))
    assert len(scc(complete).components) == 1


def test_scc_component_of_matches_components():
    rng = np.random.default_rng(5)
    for _ in range(30):
        g = random_digraph(rng, max_nodes=7)
        d = scc(g)
        for cid, nodes in enumerate(d.components):
            assert np.all(d.component_of[nodes] == cid)
        assert sum(c.size for c in d.components) == g.node_count


def test_forward_test_examples():
    g = ingest_edge_list("a b\nb a")
    assert is_forward_ergodic_set(g, g.indices_of(["a", "b"]))
    g2 = ingest_edge_list("a b\nb a\nb c")
    assert not is_forward_ergodic_set(g2, g2.indices_of(["a", "b"]))
    chain = ingest_edge_list("a b\nb c")
    assert is_forward_ergodic_set(chain, chain.indices_of(["c"]))


def test_backward_test_examples():
    chain = ingest_edge_list("a b\nb c")
    assert is_backward_ergodic_set(chain, chain.indices_of(["a"]))
    g = ingest_edge_list("a b\nb a\nc b")
    assert not is_backward_ergodic_set(g, g.indices_of(["a", "b"]))
    iso = ingest_edge_list("a b\nNODES:\nz\n")
    z = iso.indices_of(["z"])
    assert is_backward_ergodic_set(iso, z) and is_forward_ergodic_set(iso, z)


def test_non_scc_input_is_a_contract_violation():
    g = ingest_edge_list("a b\nb c")
    with pytest.raises(ContractViolation):
        is_forward_ergodic_set(g, g.indices_of(["a", "b"]))
    with pytest.raises(ContractViolation):
        is_backward_ergodic_set(g, np.asarray([], dtype=np.int64))


def test_partition_chain():
    g = ingest_edge_list("a b\nb c")
    p = partition(g)
    assert sets_of(g, p.backward_sets) == [{"a"}]
    assert sets_of(g, p.forward_sets) == [{"c"}]
    assert {g.labels[i] for i in p.transient_core.tolist()} == {"b"}
    assert p.both == ()


def test_partition_core_free_graph():
    g = ingest_edge_list("a b\nb c\nc b")
    p = partition(g)
    assert sets_of(g, p.backward_sets) == [{"a"}]
    assert sets_of(g, p.forward_sets) == [{"b", "c"}]
    assert p.transient_core.size == 0


def test_partition_strongly_connected_graph_is_flagged_both():
    g = ingest_edge_list("a b\nb c\nc a")
    p = partition(g)
    assert p.both == (0,)
    assert sets_of(g, p.forward_sets) == [{"a", "b", "c"}]
    assert sets_of(g, p.backward_sets) == [{"a", "b", "c"}]
    assert p.transient_core.size == 0


def test_isolated_node_is_both():
    g = ingest_edge_list("a b\nNODES:\nz\n")
    p = partition(g)
    z = {"z"}
    assert z in sets_of(g, p.forward_sets)
    assert z in sets_of(g, p.backward_sets)
    both_sets = [set(g.labels[i] for i in p.forward_sets[k]) for k in p.both]
    assert z in both_sets


def test_duality_with_reverse_graph():
    rng = np.random.default_rng(23)
    for _ in range(60):
        g = random_digraph(rng, max_nodes=7)
        p = partition(g)
        q = partition(g.reverse())
        fw = {frozenset(s.tolist()) for s in p.forward_sets}
        bw_rev = {frozenset(s.tolist()) for s in q.backward_sets}
        assert fw == bw_rev


def test_forward_sets_have_no_exit_edges():
    rng = np.random.default_rng(31)
    for _ in range(40):
        g = random_digraph(rng, max_nodes=7)
        p = partition(g)
        src, dst, _ = g.edge_arrays()
        for s in p.forward_sets:
            member = np.zeros(g.node_count, dtype=bool)
            member[s] = True
            assert not np.any(member[src] & ~member[dst])


def test_counting_invariant_per_weak_component():
    rng = np.random.default_rng(37)
    for _ in range(40):
        g = random_digraph(rng, max_nodes=8)
        for comp in g.weakly_connected_components():
            sub = g.induced_subgraph(comp)
            p = partition(sub)
            n_scc = len(scc(sub).components)
            core_sccs = len(scc(sub.induced_subgraph(p.transient_core)).components) \
                if p.transient_core.size else 0
            assert p.f + p.b + core_sccs - len(p.both) == n_scc
            assert p.f >= 1 and p.b >= 1


def test_matches_reachability_closure_oracle():
    rng = np.random.default_rng(41)
    for _ in range(150):
        g = random_digraph(rng, max_nodes=6)
        assert library_partition_sets(g, partition(g)) == brute_partition(g)


def test_partition_json_shape():
    g = ingest_edge_list("a b\nb c")
    payload = partition_to_json(g, partition(g))
    assert payload == {"forward_sets": [["c"]], "backward_sets": [["a"]],
                       "transient_core": ["b"], "both": []}
