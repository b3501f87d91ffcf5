"""Hot inner loops, compiled with numba when available.

Each kernel exists in two interchangeable builds: a ``@njit`` one and a plain
numpy/Python one. Selection happens once at import time from the environment
variable ``ERGOSET_BACKEND``:

    auto   (default) use numba if it imports, else fall back
    numba  require numba, raise if it is missing
    numpy  force the pure numpy/Python path

Both builds of every kernel are importable directly (``*_numba`` / ``*_plain``)
so the benchmark and the equivalence tests can compare them head to head.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "ERGOSET_BACKEND"


def _resolve_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be one of auto/numba/numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise RuntimeError(f"{_ENV_VAR}=numba but numba is not importable")
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()


def get_backend() -> str:
    """Name of the kernel build in use: 'numba' or 'numpy'."""
    return BACKEND


# ---------------------------------------------------------------------------
# Kernel bodies. Written against raw CSR arrays so the same source compiles
# under nopython mode and runs as-is in the fallback.
# ---------------------------------------------------------------------------


def _scc_labels_impl(n, indptr, indices):
    # Iterative Tarjan: explicit DFS stack, component ids assigned at root pop.
    index = np.full(n, -1, np.int64)
    lowlink = np.zeros(n, np.int64)
    on_stack = np.zeros(n, np.bool_)
    comp = np.full(n, -1, np.int64)
    stack = np.empty(n, np.int64)
    dfs_node = np.empty(n, np.int64)
    dfs_edge = np.empty(n, np.int64)
    sp = 0
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        depth = 0
        dfs_node[0] = root
        dfs_edge[0] = indptr[root]
        index[root] = counter
        lowlink[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = True
        while depth >= 0:
            v = dfs_node[depth]
            if dfs_edge[depth] < indptr[v + 1]:
                w = indices[dfs_edge[depth]]
                dfs_edge[depth] += 1
                if index[w] == -1:
                    index[w] = counter
                    lowlink[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    on_stack[w] = True
                    depth += 1
                    dfs_node[depth] = w
                    dfs_edge[depth] = indptr[w]
                elif on_stack[w]:
                    if index[w] < lowlink[v]:
                        lowlink[v] = index[w]
            else:
                if lowlink[v] == index[v]:
                    while True:
                        w = stack[sp - 1]
                        sp -= 1
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
                depth -= 1
                if depth >= 0:
                    u = dfs_node[depth]
                    if lowlink[v] < lowlink[u]:
                        lowlink[u] = lowlink[v]
    return comp, ncomp


def _absorb_loop_impl(indptr, indices, prob, absorbing, dist0, eps, max_steps):
    # Redistributes transient mass along the row-stochastic CSR until the
    # residual drops below eps. Absorbing rows carry no CSR entries; any mass
    # arriving there is moved to the accumulator and never propagates.
    n = dist0.shape[0]
    dist = dist0.copy()
    absorbed = np.zeros(n)
    for i in range(n):
        if absorbing[i] and dist[i] != 0.0:
            absorbed[i] += dist[i]
            dist[i] = 0.0
    residual = 0.0
    for i in range(n):
        residual += dist[i]
    steps = 0
    while residual > eps and steps < max_steps:
        nxt = np.zeros(n)
        for i in range(n):
            di = dist[i]
            if di == 0.0:
                continue
            for k in range(indptr[i], indptr[i + 1]):
                nxt[indices[k]] += di * prob[k]
        residual = 0.0
        for j in range(n):
            if absorbing[j]:
                if nxt[j] != 0.0:
                    absorbed[j] += nxt[j]
                    nxt[j] = 0.0
            else:
                residual += nxt[j]
        dist = nxt
        steps += 1
    return dist, absorbed, residual, steps


def _absorb_loop_plain(indptr, indices, prob, absorbing, dist0, eps, max_steps):
    # Vectorized fallback: scatter-add one step at a time via bincount.
    n = dist0.shape[0]
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    dist = dist0.copy()
    absorbed = np.zeros(n)
    absorbed[absorbing] += dist[absorbing]
    dist[absorbing] = 0.0
    residual = float(dist.sum())
    steps = 0
    while residual > eps and steps < max_steps:
        nxt = np.bincount(indices, weights=dist[src] * prob, minlength=n)
        absorbed[absorbing] += nxt[absorbing]
        nxt[absorbing] = 0.0
        dist = nxt
        residual = float(dist.sum())
        steps += 1
    return dist, absorbed, residual, steps


def _edge_swap_impl(src, dst, exists, pick_a, pick_b):
    # Directed double-edge swaps (a->b, c->d) -> (a->d, c->b), rejecting
    # self-loops, duplicates and degenerate picks. Degrees are invariant.
    accepted = 0
    for t in range(pick_a.shape[0]):
        i = pick_a[t]
        j = pick_b[t]
        if i == j:
            continue
        a = src[i]
        b = dst[i]
        c = src[j]
        d = dst[j]
        if a == c or b == d:
            continue
        if a == d or c == b:
            continue
        if exists[a, d] or exists[c, b]:
            continue
        exists[a, b] = False
        exists[c, d] = False
        exists[a, d] = True
        exists[c, b] = True
        dst[i] = d
        dst[j] = b
        accepted += 1
    return accepted


if BACKEND == "numba":
    from numba import njit

    scc_labels_numba = njit(cache=True, nogil=True)(_scc_labels_impl)
    absorb_loop_numba = njit(cache=True, nogil=True)(_absorb_loop_impl)
    edge_swap_numba = njit(cache=True, nogil=True)(_edge_swap_impl)
else:
    scc_labels_numba = None
    absorb_loop_numba = None
    edge_swap_numba = None

scc_labels_plain = _scc_labels_impl
absorb_loop_plain = _absorb_loop_plain
edge_swap_plain = _edge_swap_impl

if BACKEND == "numba":
    scc_labels = scc_labels_numba
    absorb_loop = absorb_loop_numba
    edge_swap = edge_swap_numba
else:
    scc_labels = scc_labels_plain
    absorb_loop = absorb_loop_plain
    edge_swap = edge_swap_plain
