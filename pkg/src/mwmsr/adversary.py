"""Adversary placement and behaviour.

A behaviour decides which value travels on a message path once the message
passes through (or starts at) the adversarial node.  Paths are never altered.
When several adversaries sit on one path each rewrites the value in turn, so
the one closest to the recipient has the final say.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from mwmsr.errors import DomainError
from mwmsr.graph import DirectedGraph, l_hop_in_neighbors
from mwmsr.robustness import (
    F_LOCAL,
    F_TOTAL,
    PlacementModel,
    RobustnessVerdict,
    Witness,
    is_strictly_robust,
    z_set,
)
from mwmsr.graph import induced_subgraph

Path = tuple[int, ...]


def _next_hop(node: int, path: Path) -> int | None:
    k = path.index(node)
    return path[k + 1] if k + 1 < len(path) else None


def _draw(*key) -> random.Random:
    return random.Random("/".join(map(str, key)))


@dataclass(frozen=True)
class Byzantine:
    """Per-neighbour constants with a seeded random fallback.

    The value on a path depends on the node the adversary hands the message
    to (its own next hop), so a hub can feed each neighbour a different
    story while keeping every relayed copy consistent with it.  Neighbours
    not listed in ``values`` get a value drawn from ``[low, high]`` seeded by
    ``(seed, node, step, path)``.
    """

    node: int
    values: Mapping[int, float] = field(default_factory=dict)
    low: float = 0.0
    high: float = 1.0
    seed: int = 0
    kind: str = "byzantine"

    def emit(self, step: int, path: Path, true_value: float | None) -> float:
        nxt = _next_hop(self.node, path)
        if nxt in self.values:
            return float(self.values[nxt])
        return _draw(self.seed, self.node, step, path).uniform(self.low, self.high)


@dataclass(frozen=True)
class Malicious:
    """One value per step on every outgoing and relayed path.

    A constant ``value`` if given, otherwise drawn per step from ``[low, high]``.
    """

    node: int
    value: float | None = None
    low: float = 0.0
    high: float = 1.0
    seed: int = 0
    kind: str = "malicious"

    def emit(self, step: int, path: Path, true_value: float | None) -> float:
        if self.value is not None:
            return float(self.value)
        return _draw(self.seed, self.node, step).uniform(self.low, self.high)


@dataclass(frozen=True)
class Crash:
    node: int
    kind: str = "crash"

    def emit(self, step: int, path: Path, true_value: float | None) -> None:
        return None


@dataclass(frozen=True)
class Scripted:
    """Value chosen by the message's final recipient (attack scripts)."""

    node: int
    toward: Mapping[int, float] = field(default_factory=dict)
    default: float = 0.0
    kind: str = "scripted"

    def emit(self, step: int, path: Path, true_value: float | None) -> float:
        return float(self.toward.get(path[-1], self.default))


BehaviorStrategy = Byzantine | Malicious | Crash | Scripted


def adversary_value(strategy: BehaviorStrategy, step: int, path: Path, true_value: float | None):
    if strategy.node not in path[:-1]:
        raise DomainError(f"node {strategy.node} does not send or relay on path {path}")
    return strategy.emit(step, path, true_value)


@dataclass(frozen=True)
class AdversarySpec:
    members: frozenset[int] = frozenset()
    behavior: Mapping[int, BehaviorStrategy] = field(default_factory=dict)
    model: PlacementModel | None = None

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        for node, strategy in self.behavior.items():
            if node not in self.members or strategy.node != node:
                raise DomainError(f"behaviour for node {node} does not match the member set")
        missing = self.members - set(self.behavior)
        if missing:
            raise DomainError(f"no behaviour for adversary nodes {sorted(missing)}")

    @classmethod
    def of(cls, strategies: Iterable[BehaviorStrategy], model: PlacementModel | None = None) -> AdversarySpec:
        strategies = list(strategies)
        return cls(frozenset(s.node for s in strategies), {s.node: s for s in strategies}, model)

    def tampered(self, path: Path) -> bool:
        return any(v in self.members for v in path[:-1])

    def relay_value(self, step: int, path: Path, true_value: float | None) -> float | None:
        """Value delivered at the end of ``path`` given the source's true value."""
        value = true_value
        for v in path[:-1]:
            if v in self.members:
                value = self.behavior[v].emit(step, path, value)
        return value


NO_ADVERSARY = AdversarySpec()


def validate_model(g: DirectedGraph, A: Iterable[int], model: PlacementModel) -> bool:
    A = frozenset(A)
    for v in A:
        if v not in g:
            raise DomainError(f"node {v} is not in the graph")
    if model.kind == F_TOTAL:
        return len(A) <= model.f
    return all(len(l_hop_in_neighbors(g, i, model.l) & A) <= model.f for i in g.nodes if i not in A)


def check_witness(g: DirectedGraph, f: int, l: int, F: Iterable[int], v1: Iterable[int], v2: Iterable[int]) -> None:
    """Raise DomainError unless (V1, V2) shows the graph minus F is not (f+1)-robust."""
    F, v1, v2 = frozenset(F), frozenset(v1), frozenset(v2)
    if not v1 or not v2 or v1 & v2:
        raise DomainError("witness sets must be nonempty and disjoint")
    rest = set(g.nodes) - F
    if not (v1 | v2) <= rest:
        raise DomainError("witness sets must avoid F")
    h = induced_subgraph(g, rest)
    if z_set(h, v1, f + 1, l) or z_set(h, v2, f + 1, l):
        raise DomainError("witness does not certify a robustness failure for this F")


def necessity_attack(
    g: DirectedGraph,
    f: int,
    l: int,
    F: Iterable[int],
    witness: tuple[Iterable[int], Iterable[int]] | Witness,
    *,
    high: float = 9.0,
    low: float = 1.0,
    mid: float | None = None,
    model: PlacementModel | None = None,
) -> tuple[AdversarySpec, dict[int, float]]:
    """Adversary and initial states that freeze two groups at opposite extremes.

    V1 starts at ``high`` and V2 at ``low``; every other normal node starts at
    ``mid``.  Each member of F feeds ``high`` to V1, ``low`` to V2 and ``mid``
    to everyone else on all paths it touches.
    """
    if isinstance(witness, Witness):
        v1, v2 = witness.v1, witness.v2
    else:
        v1, v2 = (frozenset(x) for x in witness)
    F = frozenset(F)
    if not low < high:
        raise DomainError("need low < high")
    mid = (low + high) / 2 if mid is None else mid
    check_witness(g, f, l, F, v1, v2)
    toward = {i: high for i in v1} | {i: low for i in v2}
    spec = AdversarySpec.of((Scripted(a, toward, mid) for a in sorted(F)), model)
    states = {}
    for i in g.nodes:
        if i in v1:
            states[i] = high
        elif i in v2:
            states[i] = low
        else:
            states[i] = mid
    return spec, states


def synthesize_attack(g: DirectedGraph, f: int, l: int, model: PlacementModel, **kwargs):
    """Find a failing F by certification and build the matching attack.

    Returns ``(verdict, spec, states)``; raises DomainError if the graph is
    (f+1)-strictly robust, since then no such attack exists.
    """
    verdict: RobustnessVerdict = is_strictly_robust(g, f + 1, l, model)
    if verdict.holds:
        raise DomainError("graph is (f+1)-strictly robust with l hops; no necessity attack exists")
    w = verdict.witness
    spec, states = necessity_attack(g, f, l, w.F, w, model=model, **kwargs)
    return verdict, spec, states


__all__ = [
    "AdversarySpec",
    "BehaviorStrategy",
    "Byzantine",
    "Crash",
    "F_LOCAL",
    "F_TOTAL",
    "Malicious",
    "NO_ADVERSARY",
    "Scripted",
    "adversary_value",
    "check_witness",
    "necessity_attack",
    "synthesize_attack",
    "validate_model",
]
