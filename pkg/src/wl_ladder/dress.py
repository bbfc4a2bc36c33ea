"""The DRESS edge-similarity dynamical system and its fixed point.

For every edge ``uv`` one synchronous step computes::

    d'(u, v) = sum_{x in N[u] & N[v]} (d(u, x) + d(x, v)) / (|u| * |v|)
    |u|      = sqrt(sum_{x in N[u]} d(u, x))

over closed neighborhoods, with the loop value ``d(u, u)`` kept in its own
slot. Loop slots follow the same formula, which collapses to 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernel
from .graph import Graph

DEFAULT_EPS = 1e-6
DEFAULT_MAX_ITER = 100


class DressError(ValueError):
    pass


class DressStructure:
    """Flat index arrays for running DRESS on a graph or any masked induced subgraph.

    Arrays: edge endpoints ``eu``/``ev``; vertex incidence CSR ``vptr``/``vedge``;
    per-edge common-open-neighbor CSR ``tptr`` with the third vertex ``tx`` and
    the edge indices ``tue`` (u-x) and ``tve`` (x-v).
    """

    def __init__(self, G: Graph):
        self.n = G.n
        self.m = G.m
        edges = G.edges
        self.eu = np.array([u for u, _ in edges], dtype=np.int32)
        self.ev = np.array([v for _, v in edges], dtype=np.int32)

        inc = [[] for _ in range(G.n)]
        for e, (u, v) in enumerate(edges):
            inc[u].append((v, e))
            inc[v].append((u, e))
        vptr = [0]
        vedge = []
        for u in range(G.n):
            inc[u].sort()
            vedge.extend(e for _, e in inc[u])
            vptr.append(len(vedge))
        self.vptr = np.array(vptr, dtype=np.int32)
        self.vedge = np.array(vedge, dtype=np.int32)

        index = {uv: e for e, uv in enumerate(edges)}
        tptr = [0]
        tx, tue, tve = [], [], []
        max_common = 0
        for u, v in edges:
            common = sorted(G.neighbors(u) & G.neighbors(v))
            max_common = max(max_common, len(common))
            for x in common:
                tx.append(x)
                tue.append(index[(u, x) if u < x else (x, u)])
                tve.append(index[(x, v) if x < v else (v, x)])
            tptr.append(len(tx))
        self.tptr = np.array(tptr, dtype=np.int32)
        self.tx = np.array(tx, dtype=np.int32)
        self.tue = np.array(tue, dtype=np.int32)
        self.tve = np.array(tve, dtype=np.int32)
        max_degree = max(G.degrees(), default=0)
        self.buffer_size = max(4 + 2 * max_common, 1 + max_degree, 4)

    def __getstate__(self):
        # drop per-process kernel caches
        return {k: v for k, v in self.__dict__.items() if not k.startswith("_")}

    def active_edges(self, mask: np.ndarray) -> np.ndarray:
        return (mask[self.eu] == 0) & (mask[self.ev] == 0)


@dataclass
class EdgeValueMap:
    """Loop values (one per vertex) and edge values aligned with ``Graph.edges``."""

    loop_values: np.ndarray
    edge_values: np.ndarray

    def copy(self) -> "EdgeValueMap":
        return EdgeValueMap(self.loop_values.copy(), self.edge_values.copy())


@dataclass(frozen=True)
class ConvergenceReport:
    iterations: int
    final_delta: float
    converged: bool


def init_values(G: Graph) -> EdgeValueMap:
    """Loops at 2, edges at their weight (1 when unweighted)."""
    loops = np.full(G.n, 2.0)
    if G.weights is None:
        edges = np.ones(G.m)
    else:
        edges = np.array(G.weights, dtype=np.float64)
    return EdgeValueMap(loops, edges)


def vertex_norm(G: Graph, d: EdgeValueMap, u: int) -> float:
    terms = [float(d.loop_values[u])]
    terms.extend(float(d.edge_values[G.edge_index(u, x)]) for x in sorted(G.neighbors(u)))
    return math.sqrt(math.fsum(terms))


def _check_positive(d: EdgeValueMap) -> None:
    if not (np.all(d.edge_values > 0) and np.all(d.loop_values > 0)):
        raise DressError("DRESS state has a non-positive value")
    if not (np.all(np.isfinite(d.edge_values)) and np.all(np.isfinite(d.loop_values))):
        raise DressError("DRESS state has a non-finite value")


def dress_step(
    G: Graph,
    d: EdgeValueMap,
    *,
    structure: DressStructure | None = None,
    kernel: str | None = None,
) -> EdgeValueMap:
    """One simultaneous update of every edge and loop slot."""
    _check_positive(d)
    st = structure or DressStructure(G)
    mask = np.zeros(G.n, dtype=np.uint8)
    edges, loops, _ = get_kernel(kernel).step(st, mask, d.edge_values, d.loop_values)
    return EdgeValueMap(loops, edges)


def dress_fixpoint(
    G: Graph,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    structure: DressStructure | None = None,
    kernel: str | None = None,
) -> tuple[EdgeValueMap, ConvergenceReport]:
    """Iterate :func:`dress_step` until the max-norm change (loops included) is below ``eps``.

    Non-convergence is reported, never raised.
    """
    st = structure or DressStructure(G)
    mask = np.zeros(G.n, dtype=np.uint8)
    return run_masked(st, mask, init_values(G), eps, max_iter, kernel=kernel)


def run_masked(
    st: DressStructure,
    mask: np.ndarray,
    start: EdgeValueMap,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    kernel: str | None = None,
) -> tuple[EdgeValueMap, ConvergenceReport]:
    """Fixed point of DRESS on the subgraph induced by the unmasked vertices.

    Masked entries keep their starting values and are ignored by the
    convergence test.
    """
    if eps <= 0:
        raise DressError("eps must be positive")
    if max_iter < 1:
        raise DressError("max_iter must be at least 1")
    if not np.any(st.active_edges(mask)):
        return start.copy(), ConvergenceReport(0, 0.0, True)
    edges, loops, it, delta = get_kernel(kernel).run(
        st, mask, start.edge_values, start.loop_values, eps, max_iter
    )
    return EdgeValueMap(loops, edges), ConvergenceReport(it, delta, delta < eps)
