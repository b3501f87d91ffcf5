"""Discrete-time random-walk evolution by explicit power iteration.

This is the slow, independent route to absorption probabilities: push a mass
vector through the transition matrix step by step, accumulate whatever lands
on absorbing nodes, and stop when the transient residual is below tolerance.
It exists to cross-check the linear-solve route in ``mixing`` and is what the
``verify`` subcommand and the test oracles run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonConvergenceError
from .mixing import TransitionMatrix

DEFAULT_EPS = 1e-12
DEFAULT_MAX_STEPS = 10 ** 6


@dataclass(frozen=True)
class WalkState:
    """Mass still in transit, mass absorbed so far, and the step counter."""
    dist: np.ndarray
    absorbed: np.ndarray
    steps: int

    @property
    def residual(self) -> float:
        return float(self.dist.sum())

    @property
    def total_mass(self) -> float:
        return float(self.dist.sum() + self.absorbed.sum())


def delta_start(tm: TransitionMatrix, node: int | str) -> np.ndarray:
    """Unit mass on a single node."""
    i = tm.labels.index(node) if isinstance(node, str) else int(node)
    start = np.zeros(tm.n)
    start[i] = 1.0
    return start


def uniform_start(tm: TransitionMatrix, nodes) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=np.int64)
    start = np.zeros(tm.n)
    start[nodes] = 1.0 / nodes.size
    return start


def _validated(tm: TransitionMatrix, start: np.ndarray) -> np.ndarray:
    start = np.asarray(start, dtype=np.float64)
    if start.shape != (tm.n,):
        raise ValueError(f"start distribution must have shape ({tm.n},)")
    if np.any(start < 0.0) or abs(start.sum() - 1.0) > 1e-12:
        raise ValueError("start distribution must be non-negative and sum to 1")
    return start


def initial_state(tm: TransitionMatrix, start: np.ndarray) -> WalkState:
    """Walk state at t=0; mass starting on absorbing nodes counts as absorbed."""
    start = _validated(tm, start)
    dist = start.copy()
    absorbed = np.zeros(tm.n)
    absorbed[tm.absorbing] = dist[tm.absorbing]
    dist[tm.absorbing] = 0.0
    return WalkState(dist=dist, absorbed=absorbed, steps=0)


def step(state: WalkState, tm: TransitionMatrix) -> WalkState:
    """One synchronous update: transient mass moves along the matrix, arrivals
    on absorbing nodes join the accumulator."""
    dist, newly, _, _ = _kernels.absorb_loop(
        tm.indptr, tm.indices, tm.prob, tm.absorbing, state.dist, -1.0, 1)
    return WalkState(dist=dist, absorbed=state.absorbed + newly, steps=state.steps + 1)


def absorb(tm: TransitionMatrix, start: np.ndarray, eps: float = DEFAULT_EPS,
           max_steps: int = DEFAULT_MAX_STEPS) -> np.ndarray:
    """Iterate until the transient residual mass is below ``eps``.

    Returns the absorbed mass per node (non-zero only on absorbing nodes).
    Raises NonConvergenceError when max_steps is hit first, which happens
    exactly when some start mass sits in a class that cannot reach a sink.
    """
    start = _validated(tm, start)
    _, absorbed, residual, steps = _kernels.absorb_loop(
        tm.indptr, tm.indices, tm.prob, tm.absorbing, start, float(eps), int(max_steps))
    if residual > eps:
        raise NonConvergenceError(
            f"residual transient mass {residual:.3e} after {steps} steps; "
            "start mass cannot reach any absorbing node", residual, int(steps))
    return absorbed
