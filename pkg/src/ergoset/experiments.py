"""Numerical studies: random-graph sweeps, core rewiring, spectra, statistics.

Every experiment is reproducible from (seed, config): replicate streams come
from a counter-based Philox generator keyed on the master seed plus the grid
position, so results are independent of scheduling and of the number of
worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import io

import numpy as np
import scipy.stats

from . import _kernels
from .detection import ErgodicPartition, partition
from .errors import StatisticsError
from .graph import DiGraph, fmt17
from .mixing import MixingMatrix


def _replicate_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *key])))


def er_digraph(n: int, p: float, rng: np.random.Generator) -> DiGraph:
    """Directed Erdos-Renyi draw: each ordered pair (u, v), u != v, gets an
    edge with probability p, weight 1. No self-loops."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    labels = [str(i) for i in range(n)]
    if p == 0.0 or n < 2:
        return DiGraph.from_edges([], nodes=labels)
    hit = rng.random((n, n)) < p
    np.fill_diagonal(hit, False)
    src, dst = np.nonzero(hit)
    return DiGraph.from_arrays(labels, src.astype(np.int64), dst.astype(np.int64))


@dataclass(frozen=True)
class ErSweepConfig:
    sizes: tuple[int, ...]
    probabilities: tuple[float, ...]
    replicates: int = 1000
    seed: int = 0
    jobs: int = 1


@dataclass(frozen=True)
class ErSweepRow:
    n: int
    p: float
    mean_frac_any: float
    std_frac_any: float
    mean_frac_largest: float
    std_frac_largest: float
    replicates: int


@dataclass(frozen=True)
class ErSweepResult:
    rows: list[ErSweepRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("N,p,mean_frac_any,std_frac_any,mean_frac_largest,std_frac_largest,replicates\n")
        for r in self.rows:
            buf.write(",".join([str(r.n), fmt17(r.p), fmt17(r.mean_frac_any),
                                fmt17(r.std_frac_any), fmt17(r.mean_frac_largest),
                                fmt17(r.std_frac_largest), str(r.replicates)]) + "\n")
        return buf.getvalue()


def ergodic_set_fractions(g: DiGraph, part: ErgodicPartition) -> tuple[float, float]:
    """(fraction of nodes in any source/sink set, fraction in the largest one).

    Sets flagged both source and sink count once.
    """
    n = g.node_count
    in_any = n - part.transient_core.size
    largest = 0
    for s in part.forward_sets:
        largest = max(largest, s.size)
    for s in part.backward_sets:
        largest = max(largest, s.size)
    return in_any / n, largest / n


def _one_replicate(task: tuple) -> tuple[float, float]:
    seed, ni, pi, rep, n, p = task
    rng = _replicate_rng(seed, ni, pi, rep)
    g = er_digraph(n, p, rng)
    return ergodic_set_fractions(g, partition(g))


def er_sweep(cfg: ErSweepConfig) -> ErSweepResult:
    """Fraction of nodes inside source/sink sets across an (N, p) grid.

    Replicates run independently (optionally on ``jobs`` threads); each draws
    from its own stream keyed on (seed, size index, p index, replicate), so
    the aggregated rows do not depend on scheduling.
    """
    cells = [(ni, pi, n, p)
             for ni, n in enumerate(cfg.sizes)
             for pi, p in enumerate(cfg.probabilities)]
    tasks = [(cfg.seed, ni, pi, rep, n, p)
             for ni, pi, n, p in cells
             for rep in range(cfg.replicates)]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            fractions = list(pool.map(_one_replicate, tasks))
    else:
        fractions = [_one_replicate(t) for t in tasks]
    ddof = 1 if cfg.replicates > 1 else 0
    rows = []
    for c, (ni, pi, n, p) in enumerate(cells):
        chunk = np.asarray(fractions[c * cfg.replicates:(c + 1) * cfg.replicates])
        rows.append(ErSweepRow(
            n=n, p=p,
            mean_frac_any=float(chunk[:, 0].mean()),
            std_frac_any=float(chunk[:, 0].std(ddof=ddof)),
            mean_frac_largest=float(chunk[:, 1].mean()),
            std_frac_largest=float(chunk[:, 1].std(ddof=ddof)),
            replicates=cfg.replicates,
        ))
    return ErSweepResult(rows=rows)


@dataclass(frozen=True)
class RewireResult:
    graph: DiGraph
    core_edge_count: int
    attempts: int
    accepted: int
    changed: bool  # an even swap count can restore the original wiring


def rewire_core(g: DiGraph, part: ErgodicPartition, swaps_per_edge: int = 10,
                rng: np.random.Generator | None = None) -> RewireResult:
    """Randomize core-internal wiring with degree-preserving double-edge swaps.

    Only edges with both endpoints in the transient core move; every core
    node's core-internal in- and out-degree is preserved exactly, no
    self-loops or duplicate edges are ever introduced, and each swapped edge
    keeps its weight (it stays attached to its source endpoint). Cores with
    fewer than two internal edges come back unchanged.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    core = part.transient_core
    in_core = np.zeros(g.node_count, dtype=bool)
    in_core[core] = True
    src, dst, wt = g.edge_arrays()
    core_edge = in_core[src] & in_core[dst]
    m = int(core_edge.sum())
    if m < 2:
        return RewireResult(graph=g, core_edge_count=m, attempts=0, accepted=0,
                            changed=False)
    compact = np.full(g.node_count, -1, dtype=np.int64)
    compact[core] = np.arange(core.size)
    c_src = compact[src[core_edge]]
    c_dst = compact[dst[core_edge]]
    exists = np.zeros((core.size, core.size), dtype=bool)
    exists[c_src, c_dst] = True
    attempts = int(swaps_per_edge) * m
    pick_a = rng.integers(0, m, size=attempts)
    pick_b = rng.integers(0, m, size=attempts)
    accepted = int(_kernels.edge_swap(c_src, c_dst, exists,
                                      pick_a.astype(np.int64), pick_b.astype(np.int64)))
    new_src = src.copy()
    new_dst = dst.copy()
    new_src[core_edge] = core[c_src]
    new_dst[core_edge] = core[c_dst]
    rewired = DiGraph.from_arrays(g.labels, new_src, new_dst, wt)
    return RewireResult(graph=rewired, core_edge_count=m, attempts=attempts,
                        accepted=accepted, changed=rewired != g)


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues of the Laplacian of the sink-similarity matrix B^T B."""
    eigenvalues: np.ndarray
    zero_count: int
    graph_id: str = ""
    rewired: bool = False

    @property
    def lambda_2(self) -> float:
        return float(self.eigenvalues[1]) if self.eigenvalues.size > 1 else float("nan")


def laplacian_spectrum(b: MixingMatrix | np.ndarray, zero_tol: float | None = None,
                       graph_id: str = "", rewired: bool = False) -> SpectralSummary:
    """Spectrum of L(S) = diag(row sums of S) - S for S = B^T B.

    S is symmetric positive semidefinite by construction, so the spectrum is
    real and non-negative up to round-off; eigenvalues below
    ``zero_tol`` (default 1e-10 * max(1, lambda_max)) count as zero.
    """
    values = b.values if isinstance(b, MixingMatrix) else np.asarray(b, dtype=np.float64)
    s = values.T @ values
    lap = np.diag(s.sum(axis=1)) - s
    eigenvalues = np.linalg.eigvalsh(lap)
    if zero_tol is None:
        lam_max = float(eigenvalues[-1]) if eigenvalues.size else 0.0
        zero_tol = 1e-10 * max(1.0, lam_max)
    zero_count = int((np.abs(eigenvalues) < zero_tol).sum())
    return SpectralSummary(eigenvalues=eigenvalues, zero_count=zero_count,
                           graph_id=graph_id, rewired=rewired)


def spectral_csv(summaries: list[SpectralSummary]) -> str:
    buf = io.StringIO()
    buf.write("graph_id,rewired,n_eigenvalues,zero_count,lambda_2\n")
    for s in summaries:
        lam2 = fmt17(s.lambda_2) if s.eigenvalues.size > 1 else "nan"
        buf.write(f"{s.graph_id},{int(s.rewired)},{s.eigenvalues.size},{s.zero_count},{lam2}\n")
    return buf.getvalue()


@dataclass(frozen=True)
class StatsReport:
    mean_before: float
    mean_after: float
    std_before: float
    std_after: float
    t_statistic: float
    df: float
    p_value: float
    equal_var: bool

    def as_dict(self) -> dict:
        return {
            "means": {"before": self.mean_before, "after": self.mean_after},
            "stds": {"before": self.std_before, "after": self.std_after},
            "t_statistic": self.t_statistic,
            "df": self.df,
            "p_value": self.p_value,
            "equal_var": self.equal_var,
        }


def compare_statistics(before, after, equal_var: bool = False) -> StatsReport:
    """Two-sample t comparison, Welch form by default.

    Sample standard deviations use the n-1 denominator; the Welch degrees of
    freedom follow Welch-Satterthwaite. ``equal_var=True`` switches to the
    pooled-variance form with n1+n2-2 degrees of freedom.
    """
    x = np.asarray(before, dtype=np.float64)
    y = np.asarray(after, dtype=np.float64)
    if x.size < 2 or y.size < 2:
        raise StatisticsError("need at least 2 samples per group")
    n1, n2 = x.size, y.size
    m1, m2 = float(x.mean()), float(y.mean())
    v1 = float(x.var(ddof=1))
    v2 = float(y.var(ddof=1))
    if equal_var:
        df = float(n1 + n2 - 2)
        pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / df
        se = np.sqrt(pooled * (1.0 / n1 + 1.0 / n2))
    else:
        a, b = v1 / n1, v2 / n2
        se = np.sqrt(a + b)
        if a + b == 0.0:
            df = float(n1 + n2 - 2)
        else:
            df = (a + b) ** 2 / (a * a / (n1 - 1) + b * b / (n2 - 1))
    if se == 0.0:
        t = 0.0 if m1 == m2 else float(np.copysign(np.inf, m1 - m2))
    else:
        t = (m1 - m2) / se
    if np.isinf(t):
        p = 0.0
    else:
        p = float(2.0 * scipy.stats.t.sf(abs(t), df))
    return StatsReport(mean_before=m1, mean_after=m2,
                       std_before=float(np.sqrt(v1)), std_after=float(np.sqrt(v2)),
                       t_statistic=float(t), df=float(df), p_value=p,
                       equal_var=equal_var)


def correlate(x, y) -> float:
    """Pearson correlation coefficient."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise StatisticsError("samples must have equal length")
    if x.size < 2:
        raise StatisticsError("need at least 2 samples")
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt((dx * dx).sum() * (dy * dy).sum())
    if denom == 0.0:
        raise StatisticsError("zero variance sample has no correlation")
    return float((dx * dy).sum() / denom)
