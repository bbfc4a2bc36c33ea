"""Reference Weisfeiler-Leman refinement: 1-WL on vertices and folklore j-WL on j-tuples.

Color ids are canonical: each round, signatures are sorted and renumbered
from 0. Comparing two graphs refines them together over a shared palette.
A standalone :class:`WlSignature` instead hashes the per-round class tables,
which makes it comparable across graphs as well.
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .fingerprint import Verdict
from .graph import Graph

DEFAULT_MEM_CAP = 2 * 1024**3
MAX_DEFAULT_DIM = 3


class WlResourceError(MemoryError):
    """Refusal to run a refinement whose tuple tensor would exceed the memory cap."""

    def __init__(self, required: int, cap: int, j: int, n: int):
        self.required = required
        self.cap = cap
        super().__init__(
            f"{j}-WL on {n} vertices needs about {required / 2**20:.0f} MiB "
            f"(cap {cap / 2**20:.0f} MiB); raise WL_LADDER_MEM_CAP or pass mem_cap"
        )


@dataclass
class WlColoring:
    j: int
    colors: np.ndarray  # shape (n,) * j, canonical ids
    rounds: int

    @property
    def color_classes(self) -> int:
        return int(np.unique(self.colors).size)

    def color_of(self, tup: Sequence[int]) -> int:
        return int(self.colors[tuple(tup)])


@dataclass(frozen=True)
class WlSignature:
    j: int
    n: int
    rounds: int
    color_classes: int
    digest: str


def memory_estimate(n: int, j: int, batch: int = 1) -> int:
    """Rough peak bytes: the (n^j, n) substitution tensor plus sorting copies."""
    if j == 1:
        return batch * 8 * n * n * 4
    return batch * 8 * n ** (j + 1) * (j + 3)


def _mem_cap(mem_cap: int | None) -> int:
    if mem_cap is not None:
        return mem_cap
    env = os.environ.get("WL_LADDER_MEM_CAP")
    return int(env) if env else DEFAULT_MEM_CAP


def _check_resources(n: int, j: int, batch: int, mem_cap: int | None, allow_high_dim: bool) -> None:
    if j < 1:
        raise ValueError("WL dimension must be at least 1")
    if j > MAX_DEFAULT_DIM and not allow_high_dim:
        raise WlResourceError(memory_estimate(n, j, batch), 0, j, n)
    cap = _mem_cap(mem_cap)
    need = memory_estimate(n, j, batch)
    if need > cap:
        raise WlResourceError(need, cap, j, n)


def _adjacency(G: Graph) -> np.ndarray:
    A = np.zeros((G.n, G.n), dtype=bool)
    for u, v in G.edges:
        A[u, v] = A[v, u] = True
    return A


def _rank(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keys, inv = np.unique(x, return_inverse=True)
    return inv.reshape(x.shape), keys


def _initial_colors(adjs: list[np.ndarray], j: int, marked: list[int | None]):
    """Atomic type of each ordered j-tuple: equalities, adjacencies, individualized slots."""
    n = adjs[0].shape[0]
    out = []
    for A, v in zip(adjs, marked):
        code = np.zeros((n,) * j, dtype=np.int64)
        bit = 0
        grids = np.indices((n,) * j, sparse=True)
        for a, b in combinations(range(j), 2):
            xa, xb = grids[a], grids[b]
            code |= (xa == xb).astype(np.int64) << bit
            code |= A[xa, xb].astype(np.int64) << (bit + 1)
            bit += 2
        if v is not None:
            for a in range(j):
                code |= (grids[a] == v).astype(np.int64) << bit
                bit += 1
        out.append(code)
    return _rank(np.stack(out))


def _refine_once_1(adjs: np.ndarray, c: np.ndarray, ncolors: int):
    # c: (B, n); row = [own color, counts of neighbor colors]
    B, n = c.shape
    onehot = np.zeros((B, n, ncolors), dtype=np.int64)
    np.put_along_axis(onehot, c[..., None], 1, axis=2)
    counts = np.einsum("buv,bvc->buc", adjs.astype(np.int64), onehot)
    rows = np.concatenate([c[..., None], counts], axis=2).reshape(B * n, -1)
    table, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.reshape(B, n), [table]


def _refine_once_folklore(c: np.ndarray, j: int, ncolors: int):
    # c: (B,) + (n,)*j ; for every w build the j colors of the w-substituted tuples
    n = c.shape[1]
    full = c.shape + (n,)
    tables = []
    combined = None
    width = ncolors
    for i in range(j):
        sub = np.broadcast_to(np.expand_dims(np.moveaxis(c, 1 + i, -1), 1 + i), full)
        if combined is None:
            combined = sub.astype(np.int64)
        elif width * ncolors < 2**62:
            combined = combined * ncolors + sub
            width *= ncolors
        else:
            combined, keys = _rank(combined * ncolors + sub)
            tables.append(keys)
            width = keys.size * ncolors
    combined = np.sort(combined, axis=-1)
    rows = np.concatenate([c.reshape(-1, 1), combined.reshape(-1, n)], axis=1)
    table, inv = np.unique(rows, axis=0, return_inverse=True)
    tables.append(table)
    return inv.reshape(c.shape), tables


def _rounds(graphs: Sequence[Graph], j: int, marked: Sequence[int | None]):
    """Yield ``(colors, tables)`` per round for a batch of equal-size graphs.

    ``tables`` are the sorted arrays that define the canonical ids of that
    round. The first item is the initial coloring; iteration stops once a
    round leaves the joint partition unchanged.
    """
    adjs = [_adjacency(G) for G in graphs]
    if j == 1:
        c = np.stack([
            (np.arange(G.n) == v).astype(np.int64) if v is not None
            else np.zeros(G.n, dtype=np.int64)
            for G, v in zip(graphs, marked)
        ])
        c, keys = _rank(c)
    else:
        c, keys = _initial_colors(adjs, j, list(marked))
    ncolors = keys.size
    yield c, [keys]
    A = np.stack(adjs)
    while True:
        if j == 1:
            nxt, tables = _refine_once_1(A, c, ncolors)
        else:
            nxt, tables = _refine_once_folklore(c, j, ncolors)
        nn = int(nxt.max()) + 1 if nxt.size else 0
        if nn == ncolors:
            return
        c, ncolors = nxt, nn
        yield c, tables


def wl_refine(
    G: Graph,
    j: int,
    *,
    individualize: int | None = None,
    mem_cap: int | None = None,
    allow_high_dim: bool = False,
) -> WlColoring:
    """Stable j-WL coloring of ``G`` (optionally with one vertex individualized)."""
    _check_resources(G.n, j, 1, mem_cap, allow_high_dim)
    if individualize is not None and not 0 <= individualize < G.n:
        raise ValueError(f"vertex {individualize} outside 0..{G.n - 1}")
    rounds = -1
    last = None
    for c, _ in _rounds([G], j, [individualize]):
        last = c
        rounds += 1
    return WlColoring(j, last[0], rounds)


def wl_history(G: Graph, j: int, **kw) -> list[np.ndarray]:
    """Colorings after round 0 (initial), 1, 2, ... up to the stable one."""
    _check_resources(G.n, j, 1, kw.get("mem_cap"), kw.get("allow_high_dim", False))
    return [c[0] for c, _ in _rounds([G], j, [kw.get("individualize")])]


def wl_signature(
    G: Graph,
    j: int,
    *,
    individualize: int | None = None,
    mem_cap: int | None = None,
    allow_high_dim: bool = False,
) -> WlSignature:
    """Label-independent signature: a hash chain over each round's class table.

    A class table lists, in canonical order, each class's defining row and its
    size. Equal tables at every round imply identical id assignments, so two
    graphs get equal signatures iff refinement cannot tell them apart.
    """
    _check_resources(G.n, j, 1, mem_cap, allow_high_dim)
    h = hashlib.blake2b(digest_size=16)
    h.update(np.array([j, G.n, -1 if individualize is None else 1], dtype="<i8").tobytes())
    rounds = -1
    last = None
    for c, tables in _rounds([G], j, [individualize]):
        for t in tables:
            h.update(np.array(t.shape, dtype="<i8").tobytes())
            h.update(np.ascontiguousarray(t, dtype="<i8").tobytes())
        sizes = np.bincount(c[0].ravel())
        h.update(np.array([sizes.size], dtype="<i8").tobytes())
        h.update(sizes.astype("<i8").tobytes())
        last = c
        rounds += 1
    classes = int(np.unique(last).size) if last.size else 0
    return WlSignature(j, G.n, rounds, classes, h.hexdigest())


def wl_distinguish(
    G: Graph,
    H: Graph,
    j: int,
    *,
    mem_cap: int | None = None,
    allow_high_dim: bool = False,
) -> Verdict:
    """Refine ``G`` and ``H`` jointly; distinguished iff some round's color counts differ."""
    if G.n != H.n:
        return Verdict.DISTINGUISHED
    _check_resources(G.n, j, 2, mem_cap, allow_high_dim)
    for c, _ in _rounds([G, H], j, [None, None]):
        ncol = int(c.max()) + 1 if c.size else 0
        cg = np.bincount(c[0].ravel(), minlength=ncol)
        ch = np.bincount(c[1].ravel(), minlength=ncol)
        if not np.array_equal(cg, ch):
            return Verdict.DISTINGUISHED
    return Verdict.NOT_DISTINGUISHED


def wl_individualized(G: Graph, v: int, j: int, **kw) -> WlSignature:
    return wl_signature(G, j, individualize=v, **kw)


def common_neighbor_refinement(G: Graph, max_rounds: int | None = None) -> list[dict[tuple[int, int], int]]:
    """Edge coloring refined only through common closed neighborhoods.

    Loop slots and edges start in two classes. Each round an edge ``uv``
    is recolored by its old color and the multiset of unordered pairs
    ``{c(ux), c(xv)}`` over ``x in N[u] & N[v]``; a loop ``uu`` uses ``N[u]``.
    This is the pair refinement that the DRESS update mirrors. Returns the
    edge colors (loops omitted) for round 0, 1, ... up to the stable round,
    or ``max_rounds`` rounds if given.
    """
    cur = {(u, u): 0 for u in range(G.n)}
    cur.update({e: 1 for e in G.edges})
    closed = [G.neighbors(u) | {u} for u in range(G.n)]

    def c(a, b):
        return cur[(a, b) if a <= b else (b, a)]

    history = [{e: cur[e] for e in G.edges}]
    classes = len(set(cur.values()))
    rounds = 0
    while max_rounds is None or rounds < max_rounds:
        sig = {}
        for (u, v), old in cur.items():
            common = closed[u] if u == v else closed[u] & closed[v]
            pairs = sorted(tuple(sorted((c(u, x), c(x, v)))) for x in common)
            sig[(u, v)] = (old, u == v, tuple(pairs))
        order = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        nxt = {key: order[s] for key, s in sig.items()}
        rounds += 1
        if len(order) == classes and max_rounds is None:
            break
        classes = len(order)
        cur = nxt
        history.append({e: cur[e] for e in G.edges})
    return history
