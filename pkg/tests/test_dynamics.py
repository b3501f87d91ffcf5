import numpy as np
import pytest

from ergoset import (NonConvergenceError, absorb, compress_step1, delta_start,
                     ingest_edge_list, initial_state, mixing_matrix, partition, step,
                     transition_matrix, uniform_start)

from _oracles import weakly_connected_digraph


def test_chain_absorbs_in_two_steps():
    g = ingest_edge_list("a b\nb c")
    tm = transition_matrix(g)
    state = initial_state(tm, delta_start(tm, "a"))
    state = step(state, tm)
    assert state.dist[g.index_of("b")] == 1.0
    assert state.residual == 1.0
    state = step(state, tm)
    assert state.absorbed[g.index_of("c")] == 1.0
    assert state.residual == 0.0
    assert state.steps == 2


def test_two_cycle_mass_alternates_forever():
    g = ingest_edge_list("a b\nb a")
    tm = transition_matrix(g)
    state = initial_state(tm, delta_start(tm, "a"))
    for expected in ("b", "a", "b"):
        state = step(state, tm)
        assert state.dist[g.index_of(expected)] == 1.0
    with pytest.raises(NonConvergenceError):
        absorb(tm, delta_start(tm, "a"), max_steps=500)


def test_uniform_start_two_step_absorption():
    g = ingest_edge_list("s u\nu t")
    tm = transition_matrix(g)
    start = uniform_start(tm, g.indices_of(["s", "u"]))
    state = initial_state(tm, start)
    state = step(state, tm)
    state = step(state, tm)
    assert state.absorbed[g.index_of("t")] == pytest.approx(1.0, abs=1e-15)


def test_start_mass_on_sink_is_absorbed_at_time_zero():
    g = ingest_edge_list("a b")
    tm = transition_matrix(g)
    state = initial_state(tm, delta_start(tm, "b"))
    assert state.absorbed[g.index_of("b")] == 1.0
    assert state.residual == 0.0
    assert absorb(tm, delta_start(tm, "b"))[g.index_of("b")] == 1.0


def test_mass_is_conserved_every_step():
    rng = np.random.default_rng(13)
    for _ in range(10):
        g = weakly_connected_digraph(rng, max_nodes=25)
        tm = transition_matrix(g)
        state = initial_state(tm, np.full(g.node_count, 1.0 / g.node_count))
        for _ in range(15):
            state = step(state, tm)
            assert state.total_mass == pytest.approx(1.0, abs=1e-12)


def test_invalid_starts_are_rejected():
    g = ingest_edge_list("a b")
    tm = transition_matrix(g)
    with pytest.raises(ValueError):
        absorb(tm, np.array([0.5, 0.4]))
    with pytest.raises(ValueError):
        absorb(tm, np.array([-0.5, 1.5]))
    with pytest.raises(ValueError):
        absorb(tm, np.array([1.0]))


def test_absorb_matches_mixing_rows_small():
    rng = np.random.default_rng(15)
    for _ in range(10):
        g = weakly_connected_digraph(rng, max_nodes=20)
        cg, _ = compress_step1(g, partition(g))
        b = mixing_matrix(cg)
        tm = transition_matrix(cg)
        for i, src_label in enumerate(b.source_labels):
            absorbed = absorb(tm, delta_start(tm, src_label))
            row = [absorbed[cg.graph.index_of(lab)] for lab in b.sink_labels]
            assert np.max(np.abs(b.values[i] - np.asarray(row))) < 1e-10


def test_absorb_respects_eps_and_reports_steps():
    g = ingest_edge_list("a b 1\na a 9\nb c")  # slow leak through the self-loop
    tm = transition_matrix(g)
    with pytest.raises(NonConvergenceError) as err:
        absorb(tm, delta_start(tm, "a"), eps=1e-12, max_steps=3)
    assert err.value.steps == 3
    assert err.value.residual > 1e-12
    out = absorb(tm, delta_start(tm, "a"), eps=1e-12)
    assert out[g.index_of("c")] == pytest.approx(1.0, abs=1e-11)
