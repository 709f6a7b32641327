"""Seeded random search for graphs separating the three robustness conditions."""

from __future__ import annotations

import random
from dataclasses import dataclass

from mwmsr.graph import DirectedGraph, random_digraph, random_undirected
from mwmsr.robustness import PlacementModel, condition_triple

C_NOT_B = "c_not_b"
B_NOT_A = "b_not_a"


@dataclass(frozen=True)
class Counterexample:
    category: str
    graph: DirectedGraph
    triple: tuple[bool, bool, bool]


def classify(triple: tuple[bool, bool, bool]) -> str | None:
    a, b, c = triple
    if c and not b:
        return C_NOT_B
    if b and not a:
        return B_NOT_A
    return None


def search_counterexamples(
    max_nodes: int,
    f: int,
    l: int,
    model: PlacementModel,
    budget: int,
    seed: int = 0,
    min_nodes: int = 3,
    directed: bool = False,
    max_nodes_guard: int | None = None,
) -> dict[str, list[Counterexample]]:
    """Draw up to ``budget`` graphs; stop early once both categories are found."""
    rng = random.Random(f"search/{seed}")
    found: dict[str, list[Counterexample]] = {C_NOT_B: [], B_NOT_A: []}
    for _ in range(budget):
        if found[C_NOT_B] and found[B_NOT_A]:
            break
        n = rng.randint(min_nodes, max_nodes)
        p = rng.uniform(0.35, 0.9)
        g = random_digraph(n, p, rng) if directed else random_undirected(n, p, rng)
        triple = condition_triple(g, f, l, model, max_nodes=max_nodes_guard)
        cat = classify(triple)
        if cat is not None and not found[cat]:
            found[cat].append(Counterexample(cat, g, triple))
    return found
