"""Detection of source/sink node sets in directed networks and a two-step,
flow-preserving network compression built on them."""

from ._kernels import get_backend
from .compress import (CompressedGraph, CompressionReport, collapse_backward,
                       collapse_forward, compress_step1)
from .detection import (ErgodicPartition, SccDecomposition, is_backward_ergodic_set,
                        is_forward_ergodic_set, partition, partition_to_json, scc)
from .dynamics import WalkState, absorb, delta_start, initial_state, step, uniform_start
from .errors import (ContractViolation, ErgosetError, NonConvergenceError,
                     NumericalError, ParseError, StatisticsError)
from .experiments import (ErSweepConfig, ErSweepResult, RewireResult, SpectralSummary,
                          StatsReport, compare_statistics, correlate, er_digraph,
                          er_sweep, ergodic_set_fractions, laplacian_spectrum,
                          rewire_core)
from .graph import DiGraph, ingest_edge_list
from .mixing import (FullReport, MixingMatrix, SvdFactors, TransitionMatrix,
                     full_report, mixing_matrix, svd_compress, transition_matrix)

__version__ = "0.1.0"

__all__ = [
    "CompressedGraph", "CompressionReport", "ContractViolation", "DiGraph",
    "ErSweepConfig", "ErSweepResult", "ErgodicPartition", "ErgosetError",
    "FullReport", "MixingMatrix", "NonConvergenceError", "NumericalError",
    "ParseError", "RewireResult", "SccDecomposition", "SpectralSummary",
    "StatsReport", "SvdFactors", "TransitionMatrix", "WalkState",
    "absorb", "collapse_backward", "collapse_forward", "compare_statistics",
    "compress_step1", "correlate", "delta_start", "er_digraph", "er_sweep",
    "ergodic_set_fractions", "full_report", "get_backend", "ingest_edge_list",
    "initial_state", "is_backward_ergodic_set", "is_forward_ergodic_set",
    "laplacian_spectrum", "mixing_matrix", "partition", "partition_to_json",
    "rewire_core", "scc", "step", "svd_compress", "transition_matrix",
    "uniform_start",
]
