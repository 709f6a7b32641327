"""Exhaustive certification of multi-hop graph robustness.

A graph is (r, s)-robust with l hops w.r.t. a node set F when for every pair
of nonempty disjoint node sets V1, V2 at least one of them is entirely made of
nodes with r independent paths from outside, or together they contain at
least s such nodes.  Paths have at most l hops, may start or end at F nodes
but never pass through one, and are vertex-disjoint except for the shared
destination.

Certification enumerates every subset once to tabulate its qualifying
members, then searches for a violating pair with a subset-minimum transform.
Witnesses are the first violating pair in ascending bitmask order of V1 then
V2, where node ``g.nodes[k]`` is bit ``k``.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from mwmsr import kernels
from mwmsr.errors import ConsistencyError, DomainError, NodeCountError
from mwmsr.graph import DirectedGraph, induced_subgraph, l_hop_in_neighbors

DEFAULT_MAX_NODES = 20

F_TOTAL = "f_total"
F_LOCAL = "f_local"


@dataclass(frozen=True)
class PlacementModel:
    kind: str
    f: int
    l: int = 1

    def __post_init__(self):
        if self.kind not in (F_TOTAL, F_LOCAL):
            raise DomainError(f"unknown placement model {self.kind!r}")
        if self.f < 0:
            raise DomainError("f must be nonnegative")
        if self.l < 1:
            raise DomainError("locality hop bound must be at least 1")


@dataclass(frozen=True)
class Witness:
    """A violating pair together with the adversary set it was checked against."""

    v1: frozenset[int]
    v2: frozenset[int]
    F: frozenset[int]
    counts: Mapping[int, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "V1": sorted(self.v1),
            "V2": sorted(self.v2),
            "F": sorted(self.F),
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
        }


@dataclass(frozen=True)
class RobustnessVerdict:
    holds: bool
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.holds


def _guard(g: DirectedGraph, max_nodes: int | None) -> None:
    limit = DEFAULT_MAX_NODES if max_nodes is None else max_nodes
    if g.n > limit:
        raise NodeCountError(f"graph has {g.n} nodes; exhaustive certification is limited to {limit}")
    if g.n > kernels.TABLE_BITS:
        raise NodeCountError("graphs above 63 nodes are not supported")


def _restricted_masks(g: DirectedGraph, i: int, va: frozenset[int], l: int, F: frozenset[int]):
    """Node masks (destination excluded) of suffix paths into ``i`` for ``va``."""
    index = _index(g)
    masks = []
    for path in g.paths_into(i, l):
        src, inner = path[0], path[1:-1]
        if src in va or any(v in F or v not in va for v in inner):
            continue
        mask = 1 << index[src]
        for v in inner:
            mask |= 1 << index[v]
        masks.append(mask)
    return masks


@lru_cache(maxsize=256)
def _index(g: DirectedGraph) -> dict[int, int]:
    return {v: k for k, v in enumerate(g.nodes)}


def _mask_to_set(g: DirectedGraph, mask: int) -> frozenset[int]:
    return frozenset(v for k, v in enumerate(g.nodes) if mask >> k & 1)


def _set_to_mask(g: DirectedGraph, nodes: Iterable[int]) -> int:
    index = _index(g)
    return sum(1 << index[v] for v in set(nodes))


def independent_path_count(g: DirectedGraph, i: int, va: Iterable[int], l: int, F: Iterable[int] = ()) -> int:
    """Maximum number of independent paths into ``i`` from sources outside ``va``."""
    va = frozenset(va)
    F = frozenset(F)
    if i not in va:
        raise DomainError(f"node {i} is not in the given set")
    for v in va | F:
        if v not in g:
            raise DomainError(f"node {v} is not in the graph")
    masks = _restricted_masks(g, i, va, l, F)
    return kernels.max_disjoint(masks, len(masks))


def z_set(g: DirectedGraph, va: Iterable[int], r: int, l: int, F: Iterable[int] = ()) -> frozenset[int]:
    va = frozenset(va)
    if not va:
        raise DomainError("set must be nonempty")
    if r <= 0:
        return va
    F = frozenset(F)
    return frozenset(i for i in va if independent_path_count(g, i, va, l, F) >= r)


@lru_cache(maxsize=128)
def _table(g: DirectedGraph, r: int, l: int, F: frozenset[int]):
    index = _index(g)
    dest_paths = []
    for i in g.nodes:
        entries = []
        for path in g.paths_into(i, l):
            inner = path[1:-1]
            if any(v in F for v in inner):
                continue
            inner_mask = 0
            for v in inner:
                inner_mask |= 1 << index[v]
            entries.append((1 << index[path[0]], inner_mask))
        dest_paths.append(entries)
    return kernels.z_table(g.n, dest_paths, r)


def _violation(g: DirectedGraph, r: int, s: int, l: int, F: frozenset[int]):
    if g.n < 2 or r <= 0:
        return None
    return kernels.first_violation(_table(g, r, l, F), g.n, s)


def is_rs_robust_wrt(
    g: DirectedGraph,
    r: int,
    s: int,
    l: int,
    F: Iterable[int] = (),
    *,
    max_nodes: int | None = None,
) -> RobustnessVerdict:
    if r < 0 or s < 1:
        raise DomainError("need r >= 0 and s >= 1")
    if l < 1:
        raise DomainError("hop bound must be at least 1")
    _guard(g, max_nodes)
    F = frozenset(v for v in F if v in g)
    found = _violation(g, r, s, l, F)
    if found is None:
        return RobustnessVerdict(True)
    v1, v2 = (_mask_to_set(g, m) for m in found)
    counts = {i: independent_path_count(g, i, v1, l, F) for i in v1}
    counts.update({i: independent_path_count(g, i, v2, l, F) for i in v2})
    return RobustnessVerdict(False, Witness(v1, v2, F, counts))


def violates(g: DirectedGraph, v1: Iterable[int], v2: Iterable[int], r: int, s: int, l: int, F: Iterable[int] = ()) -> bool:
    """True when the given pair fails all three robustness conditions."""
    v1, v2 = frozenset(v1), frozenset(v2)
    if not v1 or not v2 or v1 & v2:
        raise DomainError("V1 and V2 must be nonempty and disjoint")
    z1, z2 = z_set(g, v1, r, l, F), z_set(g, v2, r, l, F)
    return z1 != v1 and z2 != v2 and len(z1) + len(z2) < s


def enumerate_f_sets(g: DirectedGraph, model: PlacementModel) -> list[frozenset[int]]:
    """Admissible adversary sets, smallest first then lexicographic.

    The full node set is never admissible: at least one node must be normal.
    """
    nodes = g.nodes
    if model.kind == F_TOTAL:
        out = [frozenset(c) for k in range(min(model.f, g.n) + 1) for c in combinations(nodes, k)]
        return [s for s in out if len(s) < g.n]
    reach = {i: l_hop_in_neighbors(g, i, model.l) for i in nodes}
    found: list[frozenset[int]] = []
    chosen: list[int] = []

    def rec(k: int, counts: dict[int, int]) -> None:
        if k == len(nodes):
            if len(chosen) < g.n:
                found.append(frozenset(chosen))
            return
        v = nodes[k]
        # v normal: its count can only grow from here on.
        if counts[v] <= model.f:
            rec(k + 1, counts)
        # v adversarial: every decided normal node that hears v gains one.
        bumped = dict(counts)
        for i in nodes:
            if v in reach[i]:
                bumped[i] += 1
        if all(bumped[u] <= model.f for u in nodes[:k] if u not in chosen):
            chosen.append(v)
            rec(k + 1, bumped)
            chosen.pop()

    rec(0, {i: 0 for i in nodes})
    found.sort(key=lambda s: (len(s), sorted(s)))
    return found


def is_strictly_robust_wrt(
    g: DirectedGraph, r: int, l: int, F: Iterable[int], *, max_nodes: int | None = None
) -> RobustnessVerdict:
    """r-robustness of the subgraph left after removing ``F``."""
    F = frozenset(F)
    for v in F:
        if v not in g:
            raise DomainError(f"node {v} is not in the graph")
    if len(F) >= g.n:
        raise DomainError("F must leave at least one node")
    _guard(g, max_nodes)
    rest = induced_subgraph(g, set(g.nodes) - F)
    verdict = is_rs_robust_wrt(rest, r, 1, l, (), max_nodes=max_nodes)
    if verdict.holds:
        return verdict
    w = verdict.witness
    return RobustnessVerdict(False, Witness(w.v1, w.v2, F, w.counts))


def is_strictly_robust(
    g: DirectedGraph, r: int, l: int, model: PlacementModel, *, max_nodes: int | None = None
) -> RobustnessVerdict:
    _guard(g, max_nodes)
    for F in enumerate_f_sets(g, model):
        verdict = is_strictly_robust_wrt(g, r, l, F, max_nodes=max_nodes)
        if not verdict.holds:
            return verdict
    return RobustnessVerdict(True)


def is_rs_robust_under_model(
    g: DirectedGraph, r: int, s: int, l: int, model: PlacementModel, *, max_nodes: int | None = None
) -> RobustnessVerdict:
    _guard(g, max_nodes)
    seen = set()
    for F in enumerate_f_sets(g, model):
        # F only matters through interior exclusion, which needs l >= 2.
        key = F if l >= 2 else frozenset()
        if key in seen:
            continue
        seen.add(key)
        verdict = is_rs_robust_wrt(g, r, s, l, F, max_nodes=max_nodes)
        if not verdict.holds:
            return verdict
    return RobustnessVerdict(True)


def condition_triple(g: DirectedGraph, f: int, l: int, model: PlacementModel, *, max_nodes: int | None = None):
    """The three graph conditions (A, B, C) without the consistency check."""
    a = is_rs_robust_under_model(g, 2 * f + 1, 1, l, model, max_nodes=max_nodes).holds
    b = is_strictly_robust(g, f + 1, l, model, max_nodes=max_nodes).holds
    c = is_rs_robust_under_model(g, f + 1, f + 1, l, model, max_nodes=max_nodes).holds
    return a, b, c


def verify_condition_order(
    g: DirectedGraph, f: int, l: int, model: PlacementModel, *, max_nodes: int | None = None
) -> tuple[bool, bool, bool]:
    """Evaluate (A) (2f+1)-robust, (B) (f+1)-strictly robust, (C) (f+1,f+1)-robust.

    Raises ConsistencyError if (A) holds without (B) or (B) without (C).
    """
    a, b, c = condition_triple(g, f, l, model, max_nodes=max_nodes)
    if a and not b:
        raise ConsistencyError(f"(A) holds but (B) fails on {g!r}")
    if b and not c:
        raise ConsistencyError(f"(B) holds but (C) fails on {g!r}")
    return a, b, c
