"""Directed graphs with bounded-length simple path enumeration.

Nodes are positive integers.  An edge ``(j, i)`` means node ``i`` can receive
information from node ``j``.  Graphs are immutable; path enumerations are
cached on the instance.
"""

from __future__ import annotations

import random
from collections import deque
from collections.abc import Iterable
from pathlib import Path as FilePath

from mwmsr.errors import DomainError, GraphFormatError

Path = tuple[int, ...]


class DirectedGraph:
    """Immutable directed graph without self-loops.

    ``nodes`` may be an int ``n`` (nodes ``1..n``) or an iterable of node ids,
    which is how induced subgraphs keep their original identifiers.
    """

    __slots__ = ("nodes", "edges", "_in", "_out", "_cache", "_hash")

    def __init__(self, nodes: int | Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        if isinstance(nodes, int):
            if nodes < 0:
                raise DomainError("node count must be nonnegative")
            node_tuple = tuple(range(1, nodes + 1))
        else:
            node_tuple = tuple(sorted(set(nodes)))
        node_set = set(node_tuple)
        edge_set = set()
        for j, i in edges:
            if j == i:
                raise DomainError(f"self-loop at node {j}")
            if j not in node_set or i not in node_set:
                raise DomainError(f"edge ({j},{i}) references an unknown node")
            edge_set.add((j, i))
        self.nodes = node_tuple
        self.edges = frozenset(edge_set)
        ins: dict[int, list[int]] = {v: [] for v in node_tuple}
        outs: dict[int, list[int]] = {v: [] for v in node_tuple}
        for j, i in self.edges:
            outs[j].append(i)
            ins[i].append(j)
        self._in = {v: tuple(sorted(u)) for v, u in ins.items()}
        self._out = {v: tuple(sorted(u)) for v, u in outs.items()}
        self._cache: dict = {}
        self._hash = hash((self.nodes, self.edges))

    @property
    def n(self) -> int:
        return len(self.nodes)

    def __contains__(self, node) -> bool:
        return node in self._in

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"DirectedGraph(nodes={list(self.nodes)}, edges={sorted(self.edges)})"

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        self._check(i)
        return self._in[i]

    def out_neighbors(self, i: int) -> tuple[int, ...]:
        self._check(i)
        return self._out[i]

    def is_undirected(self) -> bool:
        return all((i, j) in self.edges for j, i in self.edges)

    def _check(self, node) -> None:
        if node not in self._in:
            raise DomainError(f"node {node!r} is not in the graph")

    def paths_into(self, dst: int, l: int) -> tuple[Path, ...]:
        """All simple paths of 1..l hops ending at ``dst``, lexicographic order."""
        self._check(dst)
        if l < 1:
            raise DomainError("hop bound must be at least 1")
        key = ("into", dst, l)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        found: list[Path] = []
        # Walk backwards from dst; the reversed stack is the path.
        stack = [dst]
        on_path = {dst}

        def extend() -> None:
            head = stack[-1]
            for j in self._in[head]:
                if j in on_path:
                    continue
                stack.append(j)
                on_path.add(j)
                found.append(tuple(reversed(stack)))
                if len(stack) <= l:
                    extend()
                stack.pop()
                on_path.discard(j)

        extend()
        result = tuple(sorted(found))
        self._cache[key] = result
        return result

    def shortest_hops(self, src: int, reverse: bool = False) -> dict[int, int]:
        """BFS hop distances from ``src`` (towards ``src`` when ``reverse``)."""
        self._check(src)
        adj = self._in if reverse else self._out
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist


def enumerate_paths(g: DirectedGraph, src: int, dst: int, l: int) -> list[Path]:
    """Every simple path from ``src`` to ``dst`` with at most ``l`` hops.

    Depth-first over node sequences; the result is sorted lexicographically.
    """
    g._check(src)
    g._check(dst)
    if src == dst:
        raise DomainError("source and destination must differ")
    if l < 1:
        raise DomainError("hop bound must be at least 1")
    out: list[Path] = []
    stack = [src]
    visited = {src}

    def walk() -> None:
        for nxt in g._out[stack[-1]]:
            if nxt in visited:
                continue
            if nxt == dst:
                out.append(tuple(stack) + (dst,))
                continue
            if len(stack) < l:
                stack.append(nxt)
                visited.add(nxt)
                walk()
                visited.discard(nxt)
                stack.pop()

    walk()
    out.sort()
    return out


def l_hop_in_neighbors(g: DirectedGraph, i: int, l: int) -> frozenset[int]:
    """Nodes other than ``i`` that reach ``i`` within ``l`` hops."""
    if l < 1:
        raise DomainError("hop bound must be at least 1")
    dist = g.shortest_hops(i, reverse=True)
    return frozenset(j for j, d in dist.items() if 0 < d <= l)


def l_hop_out_neighbors(g: DirectedGraph, i: int, l: int) -> frozenset[int]:
    """Nodes other than ``i`` reachable from ``i`` within ``l`` hops."""
    if l < 1:
        raise DomainError("hop bound must be at least 1")
    dist = g.shortest_hops(i)
    return frozenset(j for j, d in dist.items() if 0 < d <= l)


def induced_subgraph(g: DirectedGraph, keep: Iterable[int]) -> DirectedGraph:
    keep = frozenset(keep)
    if not keep:
        raise DomainError("cannot induce on an empty node set")
    for v in keep:
        g._check(v)
    return DirectedGraph(keep, ((j, i) for j, i in g.edges if j in keep and i in keep))


def has_spanning_tree(g: DirectedGraph) -> bool:
    """True if some node reaches every other node."""
    return any(len(g.shortest_hops(root)) == g.n for root in g.nodes)


# ---------------------------------------------------------------- generators


def undirected(n: int | Iterable[int], pairs: Iterable[tuple[int, int]]) -> DirectedGraph:
    edges = []
    for a, b in pairs:
        edges.append((a, b))
        edges.append((b, a))
    return DirectedGraph(n, edges)


def complete_graph(n: int) -> DirectedGraph:
    return DirectedGraph(n, ((j, i) for j in range(1, n + 1) for i in range(1, n + 1) if i != j))


def cycle_graph(n: int, bidirectional: bool = True) -> DirectedGraph:
    pairs = [(k, k % n + 1) for k in range(1, n + 1)]
    if bidirectional:
        return undirected(n, pairs)
    return DirectedGraph(n, pairs)


def directed_path(n: int) -> DirectedGraph:
    return DirectedGraph(n, ((k, k + 1) for k in range(1, n)))


def wheel_graph(rim: int) -> DirectedGraph:
    """Bidirectional ``rim``-cycle on ``1..rim`` plus hub ``rim + 1``."""
    hub = rim + 1
    pairs = [(k, k % rim + 1) for k in range(1, rim + 1)]
    pairs += [(hub, k) for k in range(1, rim + 1)]
    return undirected(hub, pairs)


def random_digraph(n: int, p: float, rng: random.Random) -> DirectedGraph:
    return DirectedGraph(
        n, ((j, i) for j in range(1, n + 1) for i in range(1, n + 1) if i != j and rng.random() < p)
    )


def random_undirected(n: int, p: float, rng: random.Random) -> DirectedGraph:
    return undirected(n, ((a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if rng.random() < p))


# --------------------------------------------------------------- file format


def parse_graph(text: str) -> DirectedGraph:
    """Parse the ``n`` / ``edge`` / ``uedge`` text format."""
    n = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        word, args = parts[0], parts[1:]
        try:
            values = [int(a) for a in args]
        except ValueError:
            raise GraphFormatError(f"non-integer argument in {line!r}", lineno) from None
        if word == "n":
            if n is not None:
                raise GraphFormatError("duplicate 'n' line", lineno)
            if len(values) != 1 or values[0] < 1:
                raise GraphFormatError("'n' takes one positive count", lineno)
            n = values[0]
            continue
        if word not in ("edge", "uedge"):
            raise GraphFormatError(f"unknown directive {word!r}", lineno)
        if n is None:
            raise GraphFormatError("edge before 'n' line", lineno)
        if len(values) != 2:
            raise GraphFormatError(f"'{word}' takes two node ids", lineno)
        a, b = values
        if not (1 <= a <= n and 1 <= b <= n):
            raise GraphFormatError(f"node id out of range 1..{n}", lineno)
        if a == b:
            raise GraphFormatError("self-loop", lineno)
        edges.append((a, b))
        if word == "uedge":
            edges.append((b, a))
    if n is None:
        raise GraphFormatError("missing 'n' line")
    return DirectedGraph(n, edges)


def format_graph(g: DirectedGraph, comments: Iterable[str] = ()) -> str:
    if g.nodes != tuple(range(1, g.n + 1)):
        raise DomainError("graph file format needs nodes numbered 1..n")
    lines = [f"# {c}" for c in comments]
    lines.append(f"n {g.n}")
    done = set()
    for j, i in sorted(g.edges):
        if (j, i) in done:
            continue
        if (i, j) in g.edges:
            lines.append(f"uedge {j} {i}")
            done.add((i, j))
        else:
            lines.append(f"edge {j} {i}")
    return "\n".join(lines) + "\n"


def read_graph(path: str | FilePath) -> DirectedGraph:
    return parse_graph(FilePath(path).read_text())


def write_graph(g: DirectedGraph, path: str | FilePath, comments: Iterable[str] = ()) -> None:
    FilePath(path).write_text(format_graph(g, comments))
