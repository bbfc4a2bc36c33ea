"""CFI gadget graphs and small named base graphs."""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, GraphError, build_graph, read_graph_file


@dataclass(frozen=True)
class GadgetVertex:
    base_vertex: int
    even_subset: frozenset[int]


@dataclass(frozen=True)
class CfiSpec:
    base: Graph
    twist_set: frozenset[tuple[int, int]] = field(default_factory=frozenset)


def cfi_build(spec: CfiSpec) -> tuple[Graph, dict[GadgetVertex, int]]:
    """Build the CFI graph over ``spec.base`` with the given twisted base edges.

    Each base vertex ``v`` becomes one gadget vertex per even-size subset of
    its neighbors. For a base edge ``uv``, gadget vertices ``(u, S)`` and
    ``(v, T)`` are adjacent iff ``(v in S) == (u in T)``, with the condition
    negated on twisted edges. Gadgets carry no internal edges.
    """
    base = spec.base
    if base.weighted:
        raise GraphError("CFI construction needs an unweighted base graph")
    if base.n < 2:
        raise GraphError("CFI base needs at least two vertices")
    if not base.is_connected():
        raise GraphError("CFI base graph must be connected")
    twist = {(min(e), max(e)) for e in spec.twist_set}
    for u, v in twist:
        if not base.has_edge(u, v):
            raise GraphError(f"twisted pair ({u}, {v}) is not a base edge")

    index: dict[GadgetVertex, int] = {}
    # per base vertex: list of (bitmask, vertex id); bit i <-> i-th sorted neighbor
    gadgets: list[list[tuple[int, int]]] = []
    nbr_pos: list[dict[int, int]] = []
    for v in range(base.n):
        nbrs = sorted(base.neighbors(v))
        nbr_pos.append({x: i for i, x in enumerate(nbrs)})
        members = []
        for mask in range(1 << len(nbrs)):
            if bin(mask).count("1") % 2:
                continue
            subset = frozenset(nbrs[i] for i in range(len(nbrs)) if mask >> i & 1)
            vid = len(index)
            index[GadgetVertex(v, subset)] = vid
            members.append((mask, vid))
        gadgets.append(members)

    edges = []
    for u, v in base.edges:
        flip = (u, v) in twist
        bit_v_in_u = 1 << nbr_pos[u][v]
        bit_u_in_v = 1 << nbr_pos[v][u]
        for smask, a in gadgets[u]:
            v_in_s = bool(smask & bit_v_in_u)
            for tmask, b in gadgets[v]:
                u_in_t = bool(tmask & bit_u_in_v)
                if (v_in_s == u_in_t) != flip:
                    edges.append((a, b))
    return build_graph(len(index), edges), index


def cfi_pair(base: Graph) -> tuple[Graph, Graph]:
    """Untwisted graph and its canonical partner twisted on the first base edge."""
    if base.m == 0:
        raise GraphError("CFI base graph must have at least one edge")
    plain, _ = cfi_build(CfiSpec(base))
    twisted, _ = cfi_build(CfiSpec(base, frozenset([base.edges[0]])))
    return plain, twisted


def cfi_vertex_count(base: Graph) -> int:
    return sum(2 ** (d - 1) for d in base.degrees())


def cfi_edge_count(base: Graph) -> int:
    deg = base.degrees()
    return sum(2 ** (deg[u] + deg[v] - 3) for u, v in base.edges)


# -- named graphs -------------------------------------------------------------


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def empty_graph(n: int) -> Graph:
    return build_graph(n, [])


def prism_graph() -> Graph:
    # two triangles joined by a perfect matching
    return build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])


def k33_graph() -> Graph:
    return build_graph(6, [(a, b) for a in range(3) for b in range(3, 6)])


_SIZED = {
    "complete": complete_graph,
    "cycle": cycle_graph,
    "path": path_graph,
    "empty": empty_graph,
}
_FIXED = {"prism": prism_graph, "k33": k33_graph}
NAMES = tuple(sorted(_SIZED) + sorted(_FIXED))


def named_graph(name: str, n: int | None = None) -> Graph:
    """Standard graph by family name: complete, cycle, path, empty (sized), prism, k33."""
    if name in _FIXED:
        if n is not None:
            raise GraphError(f"{name} takes no size parameter")
        return _FIXED[name]()
    if name in _SIZED:
        if n is None or n < 1:
            raise GraphError(f"{name} needs a positive size, e.g. {name}:5")
        return _SIZED[name](n)
    raise GraphError(f"unknown graph family {name!r}; known: {', '.join(NAMES)}")


def resolve_graph(token: str) -> Graph:
    """``family[:n]`` for a named graph, otherwise a path to a graph file."""
    name, _, size = token.partition(":")
    if name in _SIZED or name in _FIXED:
        if size:
            try:
                n = int(size)
            except ValueError:
                raise GraphError(f"bad size in {token!r}") from None
        else:
            n = None
        return named_graph(name, n)
    return read_graph_file(token)
