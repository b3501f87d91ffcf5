"""Strongly connected components and the source/sink/core node partition.

A strongly connected set with no edge leaving it is a *forward ergodic set*
(a sink structure: random-walk mass that enters never leaves). One with no
edge entering it is a *backward ergodic set* (a source). Everything else is
the *transient core*. Classification reduces to a degree difference per SCC:
the number of boundary-crossing edges is the total degree minus the degree
inside the induced subgraph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ContractViolation
from .graph import DiGraph


@dataclass(frozen=True)
class SccDecomposition:
    """Maximal strongly connected components, ordered by smallest member index."""
    components: list[np.ndarray]
    component_of: np.ndarray

    @property
    def count(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class ErgodicPartition:
    """Three-way node partition: forward sets, backward sets, transient core.

    A set that is simultaneously forward and backward (this happens exactly
    when its weakly connected component is strongly connected, isolated nodes
    included) appears in both lists; ``both`` holds its indices into
    ``forward_sets``. Set lists are ordered by smallest contained node index.
    """
    forward_sets: list[np.ndarray]
    backward_sets: list[np.ndarray]
    transient_core: np.ndarray
    both: tuple[int, ...]
    forward_set_of: np.ndarray   # node -> index into forward_sets, -1 if none
    backward_set_of: np.ndarray  # node -> index into backward_sets, -1 if none

    @property
    def f(self) -> int:
        return len(self.forward_sets)

    @property
    def b(self) -> int:
        return len(self.backward_sets)

    def both_forward_indices(self) -> frozenset[int]:
        return frozenset(self.both)

    def both_member_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        for i in self.both:
            mask[self.forward_sets[i]] = True
        return mask


def _scc_raw(g: DiGraph) -> tuple[np.ndarray, int]:
    comp, ncomp = _kernels.scc_labels(g.node_count, g.out_ptr, g.out_idx)
    return np.asarray(comp), int(ncomp)


def scc(g: DiGraph) -> SccDecomposition:
    """All maximal strongly connected components of ``g``."""
    n = g.node_count
    comp, ncomp = _scc_raw(g)
    if ncomp == 0:
        return SccDecomposition([], comp)
    # renumber components by smallest contained node index
    first = np.full(ncomp, n, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(n, dtype=np.int64))
    remap = np.empty(ncomp, dtype=np.int64)
    remap[np.argsort(first)] = np.arange(ncomp, dtype=np.int64)
    comp = remap[comp]
    order = np.argsort(comp, kind="stable")
    bounds = np.searchsorted(comp[order], np.arange(ncomp + 1))
    components = [order[bounds[k]:bounds[k + 1]] for k in range(ncomp)]
    return SccDecomposition(components, comp)


def _require_scc(g: DiGraph, nodes: np.ndarray) -> np.ndarray:
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if nodes.size == 0:
        raise ContractViolation("node set is empty")
    if nodes[0] < 0 or nodes[-1] >= g.node_count:
        raise ContractViolation("node index out of range")
    comp, _ = _scc_raw(g)
    cid = comp[nodes[0]]
    if not np.all(comp[nodes] == cid) or int((comp == cid).sum()) != nodes.size:
        raise ContractViolation("node set is not a strongly connected component")
    return nodes


def _exit_edge_count(g: DiGraph, nodes: np.ndarray) -> int:
    """Sum over the set of full out-degree minus induced out-degree."""
    member = np.zeros(g.node_count, dtype=bool)
    member[nodes] = True
    total = 0
    for v in nodes.tolist():
        nbrs = g.out_idx[g.out_ptr[v]:g.out_ptr[v + 1]]
        total += nbrs.size - int(member[nbrs].sum())
    return total


def _entry_edge_count(g: DiGraph, nodes: np.ndarray) -> int:
    member = np.zeros(g.node_count, dtype=bool)
    member[nodes] = True
    total = 0
    for v in nodes.tolist():
        nbrs = g.in_idx[g.in_ptr[v]:g.in_ptr[v + 1]]
        total += nbrs.size - int(member[nbrs].sum())
    return total


def is_forward_ergodic_set(g: DiGraph, nodes) -> bool:
    """True iff the SCC ``nodes`` has no edge leaving it.

    Raises ContractViolation when ``nodes`` is not an SCC of ``g``.
    """
    nodes = _require_scc(g, nodes)
    return _exit_edge_count(g, nodes) == 0


def is_backward_ergodic_set(g: DiGraph, nodes) -> bool:
    """True iff the SCC ``nodes`` has no edge entering it."""
    nodes = _require_scc(g, nodes)
    return _entry_edge_count(g, nodes) == 0


def partition(g: DiGraph) -> ErgodicPartition:
    """Classify every SCC as forward / backward / both / transient core."""
    n = g.node_count
    decomp = scc(g)
    comp = decomp.component_of
    ncomp = decomp.count
    out_cross = np.zeros(ncomp, dtype=bool)
    in_cross = np.zeros(ncomp, dtype=bool)
    if g.edge_count:
        src, dst, _ = g.edge_arrays()
        cs, cd = comp[src], comp[dst]
        crossing = cs != cd
        out_cross[cs[crossing]] = True
        in_cross[cd[crossing]] = True
    forward_sets: list[np.ndarray] = []
    backward_sets: list[np.ndarray] = []
    both: list[int] = []
    core_chunks: list[np.ndarray] = []
    forward_set_of = np.full(n, -1, dtype=np.int64)
    backward_set_of = np.full(n, -1, dtype=np.int64)
    for cid, nodes in enumerate(decomp.components):
        fw = not out_cross[cid]
        bw = not in_cross[cid]
        if fw:
            forward_set_of[nodes] = len(forward_sets)
            forward_sets.append(nodes)
        if bw:
            backward_set_of[nodes] = len(backward_sets)
            backward_sets.append(nodes)
            if fw:
                both.append(len(forward_sets) - 1)
        if not fw and not bw:
            core_chunks.append(nodes)
    core = np.sort(np.concatenate(core_chunks)) if core_chunks else np.empty(0, dtype=np.int64)
    return ErgodicPartition(forward_sets, backward_sets, core, tuple(both),
                            forward_set_of, backward_set_of)


def partition_to_json(g: DiGraph, part: ErgodicPartition) -> dict:
    """JSON-ready dict with node labels instead of indices."""
    def lab(arr: np.ndarray) -> list[str]:
        return [g.labels[i] for i in arr.tolist()]

    return {
        "forward_sets": [lab(s) for s in part.forward_sets],
        "backward_sets": [lab(s) for s in part.backward_sets],
        "transient_core": lab(part.transient_core),
        "both": list(part.both),
    }
