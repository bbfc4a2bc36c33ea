"""Undirected simple graphs, induced deletion, a brute-force isomorphism oracle and text I/O.

Self-loops are never stored. Every consumer treats the closed neighborhood
``N[u]`` as ``N(u) | {u}`` and keeps the loop value in a dedicated slot.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Raised for malformed graph input."""


class IsomorphismLimitError(GraphError):
    """Raised when the brute-force oracle is asked about graphs above its size cap."""


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    ``edges`` is a sorted tuple of pairs ``(u, v)`` with ``u < v``. ``weights``
    is either ``None`` or a tuple aligned with ``edges``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None
    _adj: tuple[frozenset[int], ...] = field(default=(), repr=False, compare=False)
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        adj = [set() for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].add(v)
            adj[v].add(u)
            self._index[(u, v)] = i
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def neighbors(self, u: int) -> frozenset[int]:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edge_index(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self._index[(u, v)]

    def weight(self, u: int, v: int) -> float:
        if self.weights is None:
            return 1.0
        return self.weights[self.edge_index(u, v)]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for x in self._adj[u]:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return len(seen) == self.n


def build_graph(
    n: int,
    edges: Iterable[Sequence[int]],
    weights: Sequence[float] | None = None,
) -> Graph:
    """Validate and normalize an edge list into a :class:`Graph`."""
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    edges = [tuple(e) for e in edges]
    if weights is not None:
        weights = [float(w) for w in weights]
        if len(weights) != len(edges):
            raise GraphError(f"{len(weights)} weights for {len(edges)} edges")
    items = {}
    for i, (u, v) in enumerate(edges):
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"explicit self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in items:
            raise GraphError(f"duplicate edge {key}")
        w = None
        if weights is not None:
            w = weights[i]
            if not w > 0:
                raise GraphError(f"edge {key} has non-positive weight {w}")
        items[key] = w
    keys = sorted(items)
    # an edgeless weighted graph cannot be told apart from an unweighted one
    ws = tuple(items[k] for k in keys) if weights is not None and keys else None
    return Graph(n, tuple(keys), ws)


def induced_delete(G: Graph, S: Iterable[int]) -> Graph:
    """Subgraph induced by ``V - S``, relabeled compactly preserving vertex order."""
    S = set(S)
    for s in S:
        if not 0 <= s < G.n:
            raise GraphError(f"deleted vertex {s} outside 0..{G.n - 1}")
    if not S:
        return G
    relabel = {}
    for u in range(G.n):
        if u not in S:
            relabel[u] = len(relabel)
    edges = []
    weights = [] if G.weights is not None else None
    for i, (u, v) in enumerate(G.edges):
        if u in S or v in S:
            continue
        edges.append((relabel[u], relabel[v]))
        if weights is not None:
            weights.append(G.weights[i])
    # order-preserving relabel keeps the edge list sorted
    return Graph(len(relabel), tuple(edges), tuple(weights) if weights else None)


def closed_neighborhood(G: Graph, u: int) -> tuple[int, ...]:
    if not 0 <= u < G.n:
        raise GraphError(f"vertex {u} outside 0..{G.n - 1}")
    return tuple(sorted(G.neighbors(u) | {u}))


def permute(G: Graph, perm: Sequence[int]) -> Graph:
    """Relabel ``G`` so that vertex ``u`` becomes ``perm[u]``."""
    if sorted(perm) != list(range(G.n)):
        raise GraphError("not a permutation of the vertex set")
    edges = [(perm[u], perm[v]) for u, v in G.edges]
    return build_graph(G.n, edges, G.weights)


def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    """Erdos-Renyi G(n, p) drawn from ``rng``."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return build_graph(n, edges)


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for G in graphs:
        edges.extend((u + offset, v + offset) for u, v in G.edges)
        offset += G.n
    return build_graph(offset, edges)


def are_isomorphic_bruteforce(G: Graph, H: Graph, limit: int = 16) -> bool:
    """Exact isomorphism test by backtracking over degree-compatible assignments.

    Refuses graphs with more than ``limit`` vertices; larger inputs should be
    compared with fingerprints instead.
    """
    if G.weighted or H.weighted:
        raise GraphError("brute-force oracle handles unweighted graphs only")
    if max(G.n, H.n) > limit:
        raise IsomorphismLimitError(
            f"graphs with {max(G.n, H.n)} vertices exceed the brute-force cap of {limit}"
        )
    if G.n != H.n or G.m != H.m:
        return False
    dg, dh = G.degrees(), H.degrees()
    if sorted(dg) != sorted(dh):
        return False

    n = G.n
    # most constrained first: high degree, then connectivity to placed vertices
    order = []
    placed = set()
    remaining = set(range(n))
    while remaining:
        u = max(remaining, key=lambda x: (len(G.neighbors(x) & placed), dg[x], -x))
        order.append(u)
        placed.add(u)
        remaining.remove(u)

    by_degree = {}
    for w in range(n):
        by_degree.setdefault(dh[w], []).append(w)
    mapping: dict[int, int] = {}
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        u = order[i]
        mapped_nbrs = [mapping[x] for x in G.neighbors(u) if x in mapping]
        mapped_non = [mapping[x] for x in mapping if x not in G.neighbors(u)]
        for w in by_degree[dg[u]]:
            if used[w]:
                continue
            nw = H.neighbors(w)
            if any(y not in nw for y in mapped_nbrs) or any(y in nw for y in mapped_non):
                continue
            mapping[u] = w
            used[w] = True
            if extend(i + 1):
                return True
            del mapping[u]
            used[w] = False
        return False

    return extend(0)


def degree_sequence(G: Graph) -> list[int]:
    return sorted(G.degrees())


def degree_histogram(G: Graph) -> Counter:
    return Counter(G.degrees())


# -- text format ------------------------------------------------------------


def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` header plus ``u v [w]`` edge-line format.

    Everything after ``#`` on a line is ignored. Either all edges carry a
    weight or none do.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body.split()))
    if not lines:
        raise GraphError("empty graph file: missing 'n m' header")
    lineno, header = lines[0]
    if len(header) != 2:
        raise GraphError(f"line {lineno}: header must be 'n m', got {' '.join(header)!r}")
    n, m = (_parse_int(tok, lineno) for tok in header)
    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"header declares {m} edges but {len(body)} edge lines follow")
    edges = []
    weights = []
    for lineno, toks in body:
        if len(toks) not in (2, 3):
            raise GraphError(f"line {lineno}: expected 'u v' or 'u v w'")
        u, v = _parse_int(toks[0], lineno), _parse_int(toks[1], lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"line {lineno}: endpoint out of range 0..{n - 1}")
        edges.append((u, v))
        if len(toks) == 3:
            try:
                weights.append(float(toks[2]))
            except ValueError:
                raise GraphError(f"line {lineno}: bad weight {toks[2]!r}") from None
    if weights and len(weights) != len(edges):
        raise GraphError("either every edge line carries a weight or none does")
    return build_graph(n, edges, weights or None)


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphError(f"line {lineno}: non-integer token {tok!r}") from None


def write_graph(G: Graph) -> str:
    out = [f"{G.n} {G.m}"]
    for i, (u, v) in enumerate(G.edges):
        if G.weights is None:
            out.append(f"{u} {v}")
        else:
            out.append(f"{u} {v} {G.weights[i]:.17g}")
    return "\n".join(out) + "\n"


def read_graph_file(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())
