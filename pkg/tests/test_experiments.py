import math

import numpy as np
import pytest

from ergoset import (ErSweepConfig, StatisticsError, compare_statistics, correlate,
                     compress_step1, er_digraph, er_sweep, ergodic_set_fractions,
                     ingest_edge_list, laplacian_spectrum, mixing_matrix, partition,
                     rewire_core)

from _oracles import bowtie_digraph


def test_er_extremes():
    rng = np.random.default_rng(0)
    empty = er_digraph(12, 0.0, rng)
    assert empty.node_count == 12 and empty.edge_count == 0
    full = er_digraph(6, 1.0, rng)
    assert full.edge_count == 6 * 5
    assert len(partition(full).both) == 1  # one strongly connected block


def test_er_no_self_loops_unit_weights():
    rng = np.random.default_rng(1)
    g = er_digraph(30, 0.3, rng)
    src, dst, wt = g.edge_arrays()
    assert not np.any(src == dst)
    assert np.all(wt == 1.0)


def test_er_edge_count_is_binomial():
    n, p, reps = 20, 0.1, 1000
    rng = np.random.default_rng(2)
    counts = [er_digraph(n, p, rng).edge_count for _ in range(reps)]
    pairs = n * (n - 1)
    mean_se = math.sqrt(pairs * p * (1 - p) / reps)
    assert abs(np.mean(counts) - pairs * p) < 5 * mean_se


def test_sweep_endpoints_are_exact():
    cfg = ErSweepConfig(sizes=(15,), probabilities=(0.0, 1.0), replicates=20, seed=3)
    rows = er_sweep(cfg).rows
    by_p = {r.p: r for r in rows}
    assert by_p[0.0].mean_frac_any == 1.0 and by_p[0.0].std_frac_any == 0.0
    assert by_p[0.0].mean_frac_largest == pytest.approx(1 / 15)
    assert by_p[1.0].mean_frac_any == 1.0
    assert by_p[1.0].mean_frac_largest == 1.0


def test_sweep_is_deterministic_and_job_independent():
    cfg1 = ErSweepConfig(sizes=(12, 20), probabilities=(0.0, 0.05, 0.3),
                         replicates=15, seed=11, jobs=1)
    cfg4 = ErSweepConfig(sizes=(12, 20), probabilities=(0.0, 0.05, 0.3),
                         replicates=15, seed=11, jobs=4)
    assert er_sweep(cfg1).to_csv() == er_sweep(cfg4).to_csv()


def test_ergodic_fraction_counts_both_sets_once():
    g = er_digraph(10, 0.0, np.random.default_rng(5))
    frac_any, frac_largest = ergodic_set_fractions(g, partition(g))
    assert frac_any == 1.0
    assert frac_largest == pytest.approx(0.1)


def test_rewire_preserves_core_degrees_exactly():
    rng = np.random.default_rng(7)
    for _ in range(15):
        g = bowtie_digraph(rng)
        part = partition(g)
        res = rewire_core(g, part, swaps_per_edge=10, rng=rng)
        h = res.graph
        in_core = np.zeros(g.node_count, dtype=bool)
        in_core[part.transient_core] = True

        def core_degrees(graph):
            src, dst, _ = graph.edge_arrays()
            keep = in_core[src] & in_core[dst]
            din = np.bincount(dst[keep], minlength=graph.node_count)
            dout = np.bincount(src[keep], minlength=graph.node_count)
            return din, dout, int(keep.sum())

        def non_core_edges(graph):
            src, dst, wt = graph.edge_arrays()
            keep = ~(in_core[src] & in_core[dst])
            return {(graph.labels[u], graph.labels[v]): w
                    for u, v, w in zip(src[keep], dst[keep], wt[keep])}

        assert h.labels == g.labels
        din_g, dout_g, m_g = core_degrees(g)
        din_h, dout_h, m_h = core_degrees(h)
        assert np.array_equal(din_g, din_h)
        assert np.array_equal(dout_g, dout_h)
        assert m_g == m_h == res.core_edge_count
        assert non_core_edges(g) == non_core_edges(h)
        src, dst, _ = h.edge_arrays()
        assert not np.any(src == dst)


def test_rewire_single_core_edge_is_a_noop():
    g = ingest_edge_list("s c1\nc1 c2\nc2 t\n")
    part = partition(g)
    res = rewire_core(g, part, rng=np.random.default_rng(0))
    assert not res.changed
    assert res.graph == g
    assert res.core_edge_count == 1


def test_single_swap_on_four_cycle_by_hand():
    # core cycle 0->1->2->3->0; swapping edges (0->1) and (2->3) is the only
    # kind of move possible and must yield (0->3),(2->1) with degrees intact
    from ergoset import _kernels
    src = np.array([0, 1, 2, 3], dtype=np.int64)
    dst = np.array([1, 2, 3, 0], dtype=np.int64)
    exists = np.zeros((4, 4), dtype=bool)
    exists[src, dst] = True
    accepted = _kernels.edge_swap(src, dst, exists,
                                  np.array([0], dtype=np.int64),
                                  np.array([2], dtype=np.int64))
    assert accepted == 1
    pairs = set(zip(src.tolist(), dst.tolist()))
    assert pairs == {(0, 3), (1, 2), (2, 1), (3, 0)}
    assert np.bincount(src, minlength=4).tolist() == [1, 1, 1, 1]
    assert np.bincount(dst, minlength=4).tolist() == [1, 1, 1, 1]


def test_rewire_changes_edges_not_degrees():
    # 6-cycle core with chords; source/sink attachments keep it transient
    text = ("s c0\nc0 c1\nc1 c2\nc2 c3\nc3 c4\nc4 c5\nc5 c0\n"
            "c0 c3\nc2 c5\nc4 c1\nc1 t\nc5 t\n")
    g = ingest_edge_list(text)
    part = partition(g)
    assert part.transient_core.size == 6
    res = rewire_core(g, part, swaps_per_edge=10, rng=np.random.default_rng(12))
    assert res.accepted > 0
    assert res.graph != g
    assert res.graph.edge_count == g.edge_count


def test_laplacian_identity_matrix():
    s = laplacian_spectrum(np.eye(2))
    assert s.eigenvalues == pytest.approx([0.0, 0.0], abs=1e-14)
    assert s.zero_count == 2


def test_laplacian_rank_one_mixing():
    s = laplacian_spectrum(np.full((2, 2), 0.5))
    assert s.eigenvalues == pytest.approx([0.0, 1.0], abs=1e-12)
    assert s.zero_count == 1
    assert s.lambda_2 == pytest.approx(1.0)


def test_laplacian_block_diagonal_has_one_zero_per_block():
    b = np.zeros((2, 4))
    b[0, :2] = 0.5
    b[1, 2:] = 0.5
    s = laplacian_spectrum(b)
    assert s.zero_count >= 2


def test_laplacian_spectrum_properties_on_pipeline_output():
    rng = np.random.default_rng(21)
    for _ in range(10):
        g = bowtie_digraph(rng)
        cg, _ = compress_step1(g, partition(g))
        b = mixing_matrix(cg)
        s = laplacian_spectrum(b)
        sym = b.values.T @ b.values
        lap = np.diag(sym.sum(axis=1)) - sym
        assert np.max(np.abs(sym - sym.T)) == 0.0
        assert s.eigenvalues.min() >= -1e-10
        assert s.eigenvalues.sum() == pytest.approx(np.trace(lap), abs=1e-8)


def test_welch_t_on_shifted_samples():
    x = [1, 2, 3, 4, 5]
    y = [3, 4, 5, 6, 7]
    # hand evaluation: means 3 and 5, both sample variances 2.5,
    # se = sqrt(2.5/5 + 2.5/5) = 1, t = -2, Welch df = 8
    r = compare_statistics(x, y)
    assert r.t_statistic == pytest.approx(-2.0, abs=1e-12)
    assert r.df == pytest.approx(8.0, abs=1e-12)
    assert r.std_before == pytest.approx(math.sqrt(2.5), abs=1e-12)
    assert 0.0 < r.p_value < 1.0
    pooled = compare_statistics(x, y, equal_var=True)
    assert pooled.t_statistic == pytest.approx(-2.0, abs=1e-12)
    assert pooled.df == 8.0


def test_identical_samples_give_t_zero_p_one():
    r = compare_statistics([2.0, 2.0, 2.0], [2.0, 2.0, 2.0])
    assert r.t_statistic == 0.0
    assert r.p_value == 1.0


def test_statistics_needs_two_samples():
    with pytest.raises(StatisticsError):
        compare_statistics([1.0], [1.0, 2.0])


def test_correlate_examples():
    x = [1.0, 2.0, 3.0, 4.0]
    assert correlate(x, x) == pytest.approx(1.0, abs=1e-12)
    assert correlate(x, [-v for v in x]) == pytest.approx(-1.0, abs=1e-12)
    # hand pair: x=(1,2,3), y=(1,2,4): r = 3 / sqrt(2 * 14/3)
    assert correlate([1, 2, 3], [1, 2, 4]) == pytest.approx(
        3.0 / math.sqrt(2.0 * (14.0 / 3.0)), abs=1e-12)
    with pytest.raises(StatisticsError):
        correlate([1.0, 1.0], [1.0, 2.0])
    with pytest.raises(StatisticsError):
        correlate([1.0, 2.0], [1.0])
