"""Weighted directed graphs: dense-index storage, text round-trips, primitives.

Nodes carry arbitrary string labels externally and contiguous integer indices
0..N-1 internally. All adjacency is stored twice, CSR by out-neighbour and CSR
by in-neighbour, so reversal is free and both degree directions are O(1).
Graphs are immutable once built and safe to share across threads.
"""

from __future__ import annotations

from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .errors import ParseError

NODES_MARKER = "NODES:"


def fmt17(x: float) -> str:
    """Render a float with 17 significant digits (lossless for float64)."""
    return format(float(x), ".17g")


def _build_csr(n: int, src: np.ndarray, dst: np.ndarray, wt: np.ndarray):
    """CSR triple sorted by (src, dst). Assumes no duplicate (src, dst) pairs."""
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    wt = wt[order]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, src + 1, 1)
    np.cumsum(ptr, out=ptr)
    return ptr, dst.astype(np.int64, copy=False), wt.astype(np.float64, copy=False)


class DiGraph:
    """Immutable weighted digraph over dense node indices with string labels."""

    __slots__ = ("labels", "_index", "out_ptr", "out_idx", "out_wt",
                 "in_ptr", "in_idx", "in_wt")

    def __init__(self, labels, out_ptr, out_idx, out_wt, in_ptr, in_idx, in_wt):
        # Internal constructor: use from_edges / from_arrays / ingest_edge_list.
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}
        self.out_ptr = out_ptr
        self.out_idx = out_idx
        self.out_wt = out_wt
        self.in_ptr = in_ptr
        self.in_idx = in_idx
        self.in_wt = in_wt

    # -- construction -------------------------------------------------------

    @classmethod
    def from_arrays(cls, labels: Sequence[str], src: np.ndarray, dst: np.ndarray,
                    wt: np.ndarray | None = None) -> "DiGraph":
        """Build from parallel index arrays; duplicate (src, dst) pairs merge
        by weight summation. Weights must be strictly positive and finite."""
        n = len(labels)
        if len(set(labels)) != n:
            raise ValueError("node labels must be unique")
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if wt is None:
            wt = np.ones(src.shape[0], dtype=np.float64)
        else:
            wt = np.asarray(wt, dtype=np.float64)
        if src.size:
            if src.min() < 0 or src.max() >= n or dst.min() < 0 or dst.max() >= n:
                raise ValueError("edge endpoint index out of range")
            if not np.all(np.isfinite(wt)) or np.any(wt <= 0.0):
                raise ValueError("edge weights must be strictly positive and finite")
            order = np.lexsort((dst, src))
            src, dst, wt = src[order], dst[order], wt[order]
            keep = np.empty(src.shape[0], dtype=bool)
            keep[0] = True
            keep[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
            if not keep.all():
                group = np.cumsum(keep) - 1
                wt = np.bincount(group, weights=wt)
                src, dst = src[keep], dst[keep]
        out_ptr, out_idx, out_wt = _build_csr(n, src, dst, wt)
        in_ptr, in_idx, in_wt = _build_csr(n, dst, src, wt)
        return cls(list(labels), out_ptr, out_idx, out_wt, in_ptr, in_idx, in_wt)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], nodes: Sequence[str] = ()) -> "DiGraph":
        """Build from (src, dst) or (src, dst, weight) label tuples.

        ``nodes`` pre-registers labels (fixing their dense order and allowing
        isolated nodes); labels first seen in ``edges`` are appended after.
        """
        labels: list[str] = []
        index: dict[str, int] = {}

        def intern(lab: str) -> int:
            i = index.get(lab)
            if i is None:
                i = len(labels)
                index[lab] = i
                labels.append(lab)
            return i

        for lab in nodes:
            intern(lab)
        src, dst, wt = [], [], []
        for edge in edges:
            if len(edge) == 2:
                u, v = edge
                w = 1.0
            else:
                u, v, w = edge
            src.append(intern(u))
            dst.append(intern(v))
            wt.append(float(w))
        return cls.from_arrays(labels,
                               np.asarray(src, dtype=np.int64),
                               np.asarray(dst, dtype=np.int64),
                               np.asarray(wt, dtype=np.float64))

    # -- basic accessors ----------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return int(self.out_idx.shape[0])

    def index_of(self, label: str) -> int:
        return self._index[label]

    def indices_of(self, labels: Iterable[str]) -> np.ndarray:
        return np.asarray([self._index[lab] for lab in labels], dtype=np.int64)

    def out_degrees(self) -> np.ndarray:
        """Number of distinct out-neighbours per node (self-loops count)."""
        return np.diff(self.out_ptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    def weighted_out_degrees(self) -> np.ndarray:
        n = self.node_count
        if self.out_idx.size == 0:
            return np.zeros(n)
        src = np.repeat(np.arange(n, dtype=np.int64), self.out_degrees())
        return np.bincount(src, weights=self.out_wt, minlength=n)

    def weighted_in_degrees(self) -> np.ndarray:
        n = self.node_count
        if self.in_idx.size == 0:
            return np.zeros(n)
        dst = np.repeat(np.arange(n, dtype=np.int64), self.in_degrees())
        return np.bincount(dst, weights=self.in_wt, minlength=n)

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[v]:self.out_ptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[v]:self.in_ptr[v + 1]]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(src, dst, weight) index arrays in (src, dst) order."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.out_degrees())
        return src, self.out_idx, self.out_wt

    def edges(self) -> Iterator[tuple[str, str, float]]:
        src, dst, wt = self.edge_arrays()
        for u, v, w in zip(src.tolist(), dst.tolist(), wt.tolist()):
            yield self.labels[u], self.labels[v], w

    def edge_dict(self) -> dict[tuple[str, str], float]:
        return {(u, v): w for u, v, w in self.edges()}

    def __eq__(self, other) -> bool:
        # Label-keyed equality; dense index order is irrelevant.
        if not isinstance(other, DiGraph):
            return NotImplemented
        return (set(self.labels) == set(other.labels)
                and self.edge_dict() == other.edge_dict())

    def __hash__(self):  # pragma: no cover - mutability guard only
        raise TypeError("DiGraph is not hashable")

    def __repr__(self) -> str:
        return f"DiGraph(nodes={self.node_count}, edges={self.edge_count})"

    # -- structural primitives ----------------------------------------------

    def reverse(self) -> "DiGraph":
        """Graph with every edge (u, v, w) turned into (v, u, w)."""
        return DiGraph(self.labels, self.in_ptr, self.in_idx, self.in_wt,
                       self.out_ptr, self.out_idx, self.out_wt)

    def induced_subgraph(self, nodes: Sequence[int] | np.ndarray) -> "DiGraph":
        """Subgraph on ``nodes`` and every edge with both endpoints inside."""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        if nodes.size and (nodes[0] < 0 or nodes[-1] >= self.node_count):
            raise ValueError("induced_subgraph: node index out of range")
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size, dtype=np.int64)
        src, dst, wt = self.edge_arrays()
        keep = (remap[src] >= 0) & (remap[dst] >= 0)
        labels = [self.labels[i] for i in nodes.tolist()]
        return DiGraph.from_arrays(labels, remap[src[keep]], remap[dst[keep]], wt[keep])

    def weakly_connected_components(self) -> list[np.ndarray]:
        """Node partition ignoring edge direction, ordered by smallest member."""
        n = self.node_count
        parent = list(range(n))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        src, dst, _ = self.edge_arrays()
        for u, v in zip(src.tolist(), dst.tolist()):
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        roots = np.asarray([find(i) for i in range(n)], dtype=np.int64)
        comps: dict[int, list[int]] = {}
        for i, r in enumerate(roots.tolist()):
            comps.setdefault(r, []).append(i)
        return [np.asarray(comps[r], dtype=np.int64) for r in sorted(comps)]

    # -- serialization ------------------------------------------------------

    def to_edge_list(self) -> str:
        """Deterministic edge-list text: edges sorted by (src, dst) index,
        weights at 17 significant digits, isolated nodes in a NODES: section."""
        for lab in self.labels:
            if (not lab or lab.split() != [lab] or "," in lab or "#" in lab
                    or lab == NODES_MARKER):
                raise ValueError(f"label not serializable in edge-list format: {lab!r}")
        lines = [f"{u} {v} {fmt17(w)}" for u, v, w in self.edges()]
        isolated = [self.labels[i] for i in
                    np.flatnonzero((self.out_degrees() + self.in_degrees()) == 0).tolist()]
        if isolated:
            lines.append(NODES_MARKER)
            lines.extend(isolated)
        return "\n".join(lines) + "\n"


def ingest_edge_list(source: str | IO[str], delimiter: str | None = None,
                     default_weight: float = 1.0) -> DiGraph:
    """Parse edge-list text into a DiGraph.

    Each non-comment line is ``src dst`` or ``src dst weight``; ``#`` starts a
    comment. After an optional ``NODES:`` marker, lines are bare labels (the
    way isolated nodes are declared). ``delimiter=None`` splits on whitespace,
    otherwise on the given character. Duplicate edges merge by weight sum.
    """
    text = source if isinstance(source, str) else source.read()
    edges: list[tuple[str, str, float]] = []
    nodes: list[str] = []
    in_nodes = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == NODES_MARKER:
            in_nodes = True
            continue
        fields = [f.strip() for f in line.split(delimiter)] if delimiter else line.split()
        fields = [f for f in fields if f]
        if in_nodes:
            if len(fields) != 1:
                raise ParseError(f"expected a bare node label, got {len(fields)} fields", lineno)
            nodes.append(fields[0])
            continue
        if len(fields) == 2:
            weight = default_weight
        elif len(fields) == 3:
            try:
                weight = float(fields[2])
            except ValueError:
                raise ParseError(f"weight is not a number: {fields[2]!r}", lineno) from None
        else:
            raise ParseError(f"expected 2 or 3 fields, got {len(fields)}", lineno)
        if not np.isfinite(weight) or weight <= 0.0:
            raise ParseError(f"weight must be positive and finite, got {weight}", lineno)
        edges.append((fields[0], fields[1], weight))
    if not edges and not nodes:
        raise ParseError("empty input: no edges and no node declarations")
    # dense indices follow first appearance: edge endpoints, then NODES labels
    order: list[str] = []
    seen: set[str] = set()
    for u, v, _ in edges:
        for lab in (u, v):
            if lab not in seen:
                seen.add(lab)
                order.append(lab)
    for lab in nodes:
        if lab not in seen:
            seen.add(lab)
            order.append(lab)
    return DiGraph.from_edges(edges, nodes=order)
