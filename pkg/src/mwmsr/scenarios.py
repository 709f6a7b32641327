"""Built-in demonstration networks and the attacks run on them.

``wheel7``: a six-node ring around a Byzantine hub (node 7).  With one hop the
ring nodes only hear their two ring neighbours and the hub, so the hub can
keep two halves apart; with two hops each ring node gets enough independent
routes around the hub.

``net17``: a 17-node undirected network with maximum degree 4.  Nodes 1 and 15
are Byzantine and five hops apart, so no normal node sees both within two
hops.  Node 15 feeds four different values to its four neighbours and node 1
broadcasts a constant.  The graph was found by seeded random search: it is
not 2-strictly robust with one hop under the 1-local model but is 2-strictly
robust with two hops.
"""

from __future__ import annotations

from mwmsr.adversary import AdversarySpec, Byzantine, Malicious
from mwmsr.engine import ASYNCHRONOUS, HopDelay, PeriodicSchedule, SimConfig
from mwmsr.graph import DirectedGraph, undirected, wheel_graph
from mwmsr.robustness import F_LOCAL, PlacementModel

WHEEL_HUB = 7
WHEEL_STATES = {1: 1.0, 2: 2.0, 3: 4.0, 4: 9.0, 5: 8.0, 6: 9.0}
WHEEL_HUB_VALUES = {1: 0.0, 2: -1.0, 3: 0.5, 4: 10.0, 5: 11.0, 6: 9.5}
WHEEL_PERIODS = {1: 1, 2: 2, 3: 5, 4: 6, 5: 4, 6: 3}
WHEEL_TAU = 7


def wheel7() -> DirectedGraph:
    return wheel_graph(6)


def wheel_adversary(l: int) -> AdversarySpec:
    return AdversarySpec.of([Byzantine(WHEEL_HUB, WHEEL_HUB_VALUES)], PlacementModel(F_LOCAL, 1, l))


def wheel_config(l: int, asynchronous: bool = False, horizon: int | None = None) -> SimConfig:
    if asynchronous:
        return SimConfig(
            wheel7(), l, 1, WHEEL_STATES, wheel_adversary(l),
            mode=ASYNCHRONOUS,
            schedule=PeriodicSchedule(WHEEL_PERIODS),
            delays=HopDelay((0, 1)),
            tau=WHEEL_TAU,
            horizon=horizon or 500,
        )
    return SimConfig(wheel7(), l, 1, WHEEL_STATES, wheel_adversary(l), horizon=horizon or 200)


NET17_EDGES = (
    (1, 2), (1, 16), (1, 17), (2, 3), (2, 16), (3, 4), (3, 7), (4, 5), (4, 17), (5, 6),
    (5, 9), (6, 7), (6, 15), (7, 8), (8, 9), (8, 11), (8, 15), (9, 12), (9, 15), (10, 11),
    (10, 13), (10, 15), (11, 12), (12, 13), (12, 14), (13, 14), (14, 16), (16, 17),
)
NET17_CONSTANT = 38.0
NET17_HUB_VALUES = {6: 39.0, 8: 1.0, 9: 2.0, 10: 3.0}
NET17_STATES = {
    2: 35.0, 3: 35.0, 4: 35.0, 5: 35.0, 6: 35.0, 7: 20.0, 8: 5.0, 9: 5.0,
    10: 5.0, 11: 5.0, 12: 5.0, 13: 5.0, 14: 25.0, 16: 15.0, 17: 30.0,
}
NET17_PERIODS = {i: 1 + k % 5 for k, i in enumerate(sorted(NET17_STATES))}
NET17_TAU = 5


def net17() -> DirectedGraph:
    return undirected(17, NET17_EDGES)


def net17_adversary(l: int) -> AdversarySpec:
    return AdversarySpec.of(
        [Malicious(1, value=NET17_CONSTANT), Byzantine(15, NET17_HUB_VALUES)],
        PlacementModel(F_LOCAL, 1, l),
    )


def net17_config(l: int, asynchronous: bool = False, horizon: int | None = None) -> SimConfig:
    if asynchronous:
        return SimConfig(
            net17(), l, 1, NET17_STATES, net17_adversary(l),
            mode=ASYNCHRONOUS,
            schedule=PeriodicSchedule(NET17_PERIODS),
            delays=HopDelay((0, 1)),
            tau=NET17_TAU,
            horizon=horizon or 1500,
        )
    return SimConfig(net17(), l, 1, NET17_STATES, net17_adversary(l), horizon=horizon or 600)
