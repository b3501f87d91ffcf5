"""Source-to-sink absorption probabilities and their low-rank factorization.

The collapsed graph walks mass from source meta-nodes through the transient
core into absorbing sink meta-nodes. The mixing matrix B holds, per source
row, the probability of ending in each sink; it is computed exactly with one
sparse linear solve over the transient block rather than by iterating the
walk (the iterative route lives in ``dynamics`` and serves as the independent
cross-check). A truncated SVD of B then yields the latent-space factors and
the reconstruction error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .compress import CompressedGraph
from .detection import ErgodicPartition
from .errors import NumericalError
from .graph import DiGraph


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic CSR over a graph's nodes; absorbing rows have no entries."""
    indptr: np.ndarray
    indices: np.ndarray
    prob: np.ndarray
    absorbing: np.ndarray
    labels: list[str]

    @property
    def n(self) -> int:
        return len(self.labels)

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.prob, self.indices, self.indptr), shape=(self.n, self.n))


def transition_matrix(g: DiGraph | CompressedGraph,
                      absorbing: np.ndarray | list | None = None) -> TransitionMatrix:
    """Normalize out-weights into transition probabilities.

    Rows with zero out-weight are absorbing. ``absorbing`` forces additional
    node indices to be treated as absorbing (their out-edges are dropped),
    which turns "mass ever entering this set" into a terminal event.
    """
    graph = g.graph if isinstance(g, CompressedGraph) else g
    n = graph.node_count
    wout = graph.weighted_out_degrees()
    sink = wout == 0.0
    if absorbing is not None:
        forced = np.asarray(absorbing, dtype=np.int64)
        sink = sink.copy()
        sink[forced] = True
    src, dst, wt = graph.edge_arrays()
    keep = ~sink[src]
    src, dst, wt = src[keep], dst[keep], wt[keep]
    prob = wt / wout[src]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return TransitionMatrix(indptr=indptr, indices=dst.astype(np.int64),
                            prob=prob, absorbing=sink, labels=graph.labels)


@dataclass(frozen=True)
class MixingMatrix:
    """Absorption probabilities, sources on rows and sinks on columns."""
    values: np.ndarray
    source_labels: list[str]
    sink_labels: list[str]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def mixing_matrix(cg: CompressedGraph) -> MixingMatrix:
    """Solve (I - Q) U = R over the transient block and keep the source rows.

    Q holds transient-to-transient transition probabilities, R the
    transient-to-sink ones. Nodes of uncompressed source+sink sets take part
    in no source-to-sink flow and are excluded from the system.
    """
    graph = cg.graph
    tm = transition_matrix(cg)
    n = graph.node_count
    sinks = graph.indices_of(cg.forward_meta_labels)
    sources = graph.indices_of(cg.backward_meta_labels)
    excluded = np.zeros(n, dtype=bool)
    if cg.both_member_labels:
        excluded[graph.indices_of(cg.both_member_labels)] = True
    transient = ~tm.absorbing & ~excluded
    if np.any(tm.absorbing & ~excluded):
        sink_set = set(sinks.tolist())
        stray = [graph.labels[i] for i in np.flatnonzero(tm.absorbing & ~excluded)
                 if i not in sink_set]
        if stray:
            raise NumericalError(f"absorbing nodes outside the sink meta-nodes: {stray}")
    if sinks.size and not np.all(tm.absorbing[sinks]):
        leaky = [graph.labels[i] for i in sinks[~tm.absorbing[sinks]].tolist()]
        raise NumericalError(f"sink meta-nodes with outgoing weight: {leaky}")
    t_index = np.flatnonzero(transient)
    n_t = t_index.size
    pos_t = np.full(n, -1, dtype=np.int64)
    pos_t[t_index] = np.arange(n_t)
    if sources.size and not np.all(pos_t[sources] >= 0):
        raise NumericalError("source meta-node is not a transient state")

    if n_t == 0 or sinks.size == 0:
        b = np.zeros((sources.size, sinks.size))
        return MixingMatrix(b, list(cg.backward_meta_labels), list(cg.forward_meta_labels))

    p = tm.to_scipy()[t_index, :]
    q = p[:, t_index]
    r = p[:, sinks]
    system = sp.identity(n_t, format="csc") - q.tocsc()
    try:
        lu = spla.splu(system)
    except RuntimeError as exc:
        raise NumericalError(
            f"(I - Q) is singular; a closed class escaped detection: {exc}") from exc
    u = lu.solve(np.asarray(r.todense()))
    u = u.reshape(n_t, sinks.size)
    b = u[pos_t[sources], :]
    # scrub solver noise just outside [0, 1]; anything worse is a real failure
    if b.size:
        low, high = b.min(), b.max()
        if low < -1e-9 or high > 1.0 + 1e-9:
            raise NumericalError(f"absorption probabilities out of range: [{low}, {high}]")
        b = np.clip(b, 0.0, 1.0)
    return MixingMatrix(b, list(cg.backward_meta_labels), list(cg.forward_meta_labels))


@dataclass(frozen=True)
class SvdFactors:
    """Truncated SVD of the mixing matrix: B ~ m_bw @ diag(singular_values) @ m_fw."""
    m_bw: np.ndarray
    singular_values: np.ndarray
    m_fw: np.ndarray
    k: int
    epsilon: float

    def reconstruct(self) -> np.ndarray:
        return (self.m_bw * self.singular_values) @ self.m_fw


def svd_compress(b: MixingMatrix | np.ndarray, rank_tol: float | None = None,
                 rank_rtol: float | None = None, rank_k: int | None = None) -> SvdFactors:
    """Factorize B keeping singular values above the rank threshold.

    Default threshold is max(shape) * sigma_max * machine epsilon (the usual
    numerical-rank rule). ``rank_tol`` is an absolute cutoff, ``rank_rtol`` a
    cutoff relative to sigma_max, ``rank_k`` a fixed rank for lossy use. Signs
    are fixed by making the largest-magnitude entry of each left singular
    vector positive, so the factors are reproducible.
    """
    values = b.values if isinstance(b, MixingMatrix) else np.asarray(b, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("mixing matrix must be 2-dimensional")
    if not np.all(np.isfinite(values)):
        raise NumericalError("mixing matrix contains non-finite entries")
    if values.size == 0:
        return SvdFactors(np.zeros((values.shape[0], 0)), np.zeros(0),
                          np.zeros((0, values.shape[1])), 0, 0.0)
    try:
        u, s, vh = np.linalg.svd(values, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc
    if rank_k is not None:
        if rank_k < 0:
            raise ValueError("rank_k must be non-negative")
        k = min(int(rank_k), s.size)
    else:
        if rank_tol is not None:
            threshold = float(rank_tol)
        elif rank_rtol is not None:
            threshold = float(rank_rtol) * (s[0] if s.size else 0.0)
        else:
            threshold = max(values.shape) * np.finfo(np.float64).eps * (s[0] if s.size else 0.0)
        k = int((s > threshold).sum())
    u, s, vh = u[:, :k].copy(), s[:k].copy(), vh[:k, :].copy()
    for j in range(k):
        i = int(np.argmax(np.abs(u[:, j])))
        if u[i, j] < 0.0:
            u[:, j] = -u[:, j]
            vh[j, :] = -vh[j, :]
    residual = values - (u * s) @ vh
    epsilon = float(np.linalg.norm(residual))
    return SvdFactors(u, s, vh, k, epsilon)


@dataclass(frozen=True)
class FullReport:
    """Node counts, compression factors and factor shapes for one pipeline run."""
    n: int
    n1: int
    n2: int
    c1: float
    c2: float
    rank: int
    shapes: dict[str, tuple[int, int]]
    epsilon: float
    warnings: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "N": self.n, "N1": self.n1, "C1": self.c1, "r": self.rank,
            "shapes": {name: list(shape) for name, shape in self.shapes.items()},
            "E": self.epsilon, "N2": self.n2, "C2": self.c2,
            "warnings": list(self.warnings),
        }


def full_report(g: DiGraph, part: ErgodicPartition, cg: CompressedGraph,
                factors: SvdFactors) -> FullReport:
    """Assemble N, N1, N2 = N_bw + k + N_fw and the two compression factors.

    N2 and C2 are definitions, not guarantees: on tiny or degenerate inputs
    N2 can exceed N. The raw value is reported together with a warning.
    """
    n = g.node_count
    n1 = cg.graph.node_count
    n_bw = len(cg.backward_meta_labels)
    n_fw = len(cg.forward_meta_labels)
    k = factors.k
    n2 = n_bw + k + n_fw
    c1 = 1.0 - n1 / n if n else 0.0
    c2 = 1.0 - n2 / n if n else 0.0
    warnings = []
    if n_bw + n_fw == 0:
        warnings.append("trivial-decomposition: no source or sink meta-nodes; "
                        "N2 and C2 are meaningless for this input")
    if c2 < 0.0:
        warnings.append("degenerate-size: N2 exceeds N, C2 is negative")
    elif c2 < c1:
        warnings.append("no-gain: second stage did not reduce the node count")
    shapes = {"M_bw": (n_bw, k), "C": (k, k), "M_fw": (k, n_fw)}
    return FullReport(n=n, n1=n1, n2=n2, c1=c1, c2=c2, rank=k, shapes=shapes,
                      epsilon=factors.epsilon, warnings=tuple(warnings))
