"""Collapse of sources and sinks into flow-preserving meta-nodes.

Every forward ergodic set becomes a single sink node that inherits the summed
incoming weight of its members; every backward ergodic set becomes a single
source node whose outgoing weights reproduce the one-step outflow of the set
under a time-independent site occupancy (by default proportional to each
member's in-degree). Core nodes and their edges are copied verbatim, as are
sets that are simultaneously source and sink (their weakly connected component
is strongly connected, so there is nothing to compress).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detection import ErgodicPartition, _entry_edge_count, _exit_edge_count, _require_scc
from .errors import ContractViolation, NumericalError
from .graph import DiGraph

SITE_PROB_MODELS = ("indegree", "uniform", "stationary")


@dataclass(frozen=True)
class CompressedGraph:
    """Graph after source/sink collapse plus the meta-node bookkeeping."""
    graph: DiGraph
    meta_map: dict[str, list[str]]        # every node -> original labels
    kind: dict[str, str]                  # meta label -> collapsed-forward/-backward
    backward_meta_labels: list[str]       # sources, detection order
    forward_meta_labels: list[str]        # sinks, detection order
    both_member_labels: tuple[str, ...]   # nodes of uncompressed source+sink sets


@dataclass(frozen=True)
class CompressionReport:
    n: int
    n1: int
    c1: float

    def as_dict(self) -> dict:
        return {"N": self.n, "N1": self.n1, "C1": self.c1}


def _site_probabilities(g: DiGraph, members: np.ndarray, model: str,
                        weighted: bool) -> np.ndarray:
    """Occupancy distribution over a backward set's members."""
    if model not in SITE_PROB_MODELS:
        raise ValueError(f"unknown site-probability model: {model!r}")
    k = members.size
    if model == "uniform" or k == 1:
        return np.full(k, 1.0 / k)
    if model == "indegree":
        if weighted:
            din = g.weighted_in_degrees()[members]
        else:
            din = g.in_degrees()[members].astype(np.float64)
        total = din.sum()
        if total == 0.0:
            return np.full(k, 1.0 / k)
        return din / total
    # stationary distribution of the walk restricted to the set (no leakage)
    sub = g.induced_subgraph(members)
    a = np.zeros((k, k))
    src, dst, wt = sub.edge_arrays()
    a[src, dst] = wt
    rows = a.sum(axis=1)
    if np.any(rows == 0.0):
        raise ContractViolation("backward set member with no internal out-edge")
    a /= rows[:, None]
    m = a.T - np.eye(k)
    m[-1, :] = 1.0
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"stationary distribution solve failed: {exc}") from exc
    return pi


def _forward_inflow(g: DiGraph, members: np.ndarray) -> dict[int, float]:
    member = np.zeros(g.node_count, dtype=bool)
    member[members] = True
    acc: dict[int, float] = {}
    for v in members.tolist():
        lo, hi = g.in_ptr[v], g.in_ptr[v + 1]
        for w, wt in zip(g.in_idx[lo:hi].tolist(), g.in_wt[lo:hi].tolist()):
            if not member[w]:
                acc[w] = acc.get(w, 0.0) + wt
    return acc


def _backward_outflow(g: DiGraph, members: np.ndarray, site_prob: str,
                      weighted: bool) -> dict[int, float]:
    member = np.zeros(g.node_count, dtype=bool)
    member[members] = True
    p = _site_probabilities(g, members, site_prob, weighted)
    dout = g.out_degrees()
    if np.any(dout[members] == 0):
        raise ContractViolation(
            "backward set member with out-degree 0 (a source that is also a "
            "sink belongs to an uncompressible source+sink set)")
    wout = g.weighted_out_degrees() if weighted else None
    acc: dict[int, float] = {}
    for pos, u in enumerate(members.tolist()):
        lo, hi = g.out_ptr[u], g.out_ptr[u + 1]
        for v, wt in zip(g.out_idx[lo:hi].tolist(), g.out_wt[lo:hi].tolist()):
            if member[v]:
                continue
            step = wt / wout[u] if weighted else 1.0 / dout[u]
            acc[v] = acc.get(v, 0.0) + p[pos] * step
    return acc


def collapse_forward(g: DiGraph, nodes) -> dict[int, float]:
    """Weights of the edges into the meta-node replacing the sink set
    ``nodes``: source node index -> summed original weight into the set.

    Raises ContractViolation unless ``nodes`` is an SCC with no exiting edge.
    """
    nodes = _require_scc(g, nodes)
    if _exit_edge_count(g, nodes) != 0:
        raise ContractViolation("set has edges leaving it; not a forward ergodic set")
    return _forward_inflow(g, nodes)


def collapse_backward(g: DiGraph, nodes, site_prob: str = "indegree",
                      weighted: bool = False) -> dict[int, float]:
    """Weights of the edges out of the meta-node replacing the source set
    ``nodes``: target node index -> occupancy-weighted transition mass.

    With the default unweighted model, each member u contributes
    p(u) / d_out(u) per outgoing edge, p(u) proportional to u's in-degree.
    """
    nodes = _require_scc(g, nodes)
    if _entry_edge_count(g, nodes) != 0:
        raise ContractViolation("set has edges entering it; not a backward ergodic set")
    return _backward_outflow(g, nodes, site_prob, weighted)


def _meta_label(prefix: str, g: DiGraph, members: np.ndarray, taken: set[str]) -> str:
    label = prefix + min(g.labels[i] for i in members.tolist())
    while label in taken:
        label += "'"
    return label


def compress_step1(g: DiGraph, part: ErgodicPartition, site_prob: str = "indegree",
                   weighted: bool = False) -> tuple[CompressedGraph, CompressionReport]:
    """Collapse every forward and backward ergodic set of ``g`` into one node.

    ``part`` must be ``partition(g)``. Sets flagged both are left untouched.
    Collapse weights are all computed on the original graph, then assembled:
    an edge from a collapsed source into a collapsed sink picks up the source
    rule for its weight and the sink meta-node as its target.
    """
    n = g.node_count
    both_fw = part.both_forward_indices()
    fw_of = part.forward_set_of.copy()
    bw_of = part.backward_set_of.copy()
    for i in both_fw:
        fw_of[part.forward_sets[i]] = -1
    both_mask = part.both_member_mask(n)
    bw_of[both_mask] = -1

    untouched = [g.labels[i] for i in range(n) if fw_of[i] < 0 and bw_of[i] < 0]
    taken = set(untouched)
    fw_labels: dict[int, str] = {}
    for i, members in enumerate(part.forward_sets):
        if i in both_fw:
            continue
        lab = _meta_label("FW:", g, members, taken)
        taken.add(lab)
        fw_labels[i] = lab
    bw_labels: dict[int, str] = {}
    for j, members in enumerate(part.backward_sets):
        if both_mask[members[0]]:
            continue
        lab = _meta_label("BW:", g, members, taken)
        taken.add(lab)
        bw_labels[j] = lab

    def target_label(v: int) -> str:
        i = fw_of[v]
        return fw_labels[i] if i >= 0 else g.labels[v]

    edges: list[tuple[str, str, float]] = []
    emitted_bw: set[int] = set()
    src, dst, wt = g.edge_arrays()
    for u, v, w in zip(src.tolist(), dst.tolist(), wt.tolist()):
        ju = bw_of[u]
        if ju >= 0:
            if ju not in emitted_bw:
                emitted_bw.add(ju)
                outflow = _backward_outflow(g, part.backward_sets[ju], site_prob, weighted)
                for tgt in sorted(outflow):
                    edges.append((bw_labels[ju], target_label(tgt), outflow[tgt]))
            continue
        if fw_of[u] >= 0:
            continue  # sink-internal edge
        edges.append((g.labels[u], target_label(v), w))

    node_order = untouched + [bw_labels[j] for j in sorted(bw_labels)] \
        + [fw_labels[i] for i in sorted(fw_labels)]
    cg_graph = DiGraph.from_edges(edges, nodes=node_order)

    meta_map = {lab: [lab] for lab in untouched}
    kind: dict[str, str] = {}
    for i, lab in fw_labels.items():
        meta_map[lab] = [g.labels[k] for k in part.forward_sets[i].tolist()]
        kind[lab] = "collapsed-forward"
    for j, lab in bw_labels.items():
        meta_map[lab] = [g.labels[k] for k in part.backward_sets[j].tolist()]
        kind[lab] = "collapsed-backward"

    cg = CompressedGraph(
        graph=cg_graph,
        meta_map=meta_map,
        kind=kind,
        backward_meta_labels=[bw_labels[j] for j in sorted(bw_labels)],
        forward_meta_labels=[fw_labels[i] for i in sorted(fw_labels)],
        both_member_labels=tuple(g.labels[i] for i in np.flatnonzero(both_mask).tolist()),
    )
    n1 = cg_graph.node_count
    report = CompressionReport(n=n, n1=n1, c1=1.0 - n1 / n if n else 0.0)
    return cg, report
