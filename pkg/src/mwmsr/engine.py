"""Synchronous and asynchronous MW-MSR simulation plus run metrics.

Time is discrete.  ``x[k]`` is the state vector at step ``k``; a run of
``horizon`` steps records ``x[0] .. x[horizon]``.

Asynchronous timing: every normal node emits ``x_j[0]`` at time 0.  A node
that updates at step ``k`` emits ``x_j[k+1]`` at time ``k+1`` on each outgoing
path, and the copy on a path with delay ``d`` becomes usable from step
``k+1+d`` on.  A node that skips keeps its value and sends nothing.  Each
path slot keeps the copy with the latest emission time.  Paths touching an
adversary are delivered every step with whatever the adversary chooses.
"""

from __future__ import annotations

import csv
import json
import math
import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path as FilePath

from mwmsr.adversary import NO_ADVERSARY, AdversarySpec, validate_model
from mwmsr.errors import ConfigError
from mwmsr.filtering import filter_update
from mwmsr.graph import DirectedGraph, l_hop_in_neighbors
from mwmsr.robustness import F_LOCAL, PlacementModel

SYNCHRONOUS = "synchronous"
ASYNCHRONOUS = "asynchronous"

DEFAULT_EPSILON = 1e-6
DEFAULT_HORIZON = 200


# ------------------------------------------------------------------ schedules


@dataclass(frozen=True)
class PeriodicSchedule:
    """Node ``i`` updates at steps divisible by its period (default 1)."""

    periods: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if any(p < 1 for p in self.periods.values()):
            raise ConfigError("update periods must be at least 1")

    def bound(self, node: int) -> int:
        return self.periods.get(node, 1)

    def plan(self, nodes: Sequence[int], horizon: int, seed: int) -> list[list[bool]]:
        return [[k % self.bound(i) == 0 for i in nodes] for k in range(horizon)]


@dataclass(frozen=True)
class RandomSchedule:
    """Each node updates with probability ``p``, and at least every ``bound`` steps."""

    p: float = 0.5
    bound_steps: int = 8

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("activation probability must lie in [0, 1]")
        if self.bound_steps < 1:
            raise ConfigError("activation bound must be at least 1")

    def bound(self, node: int) -> int:
        return self.bound_steps

    def plan(self, nodes: Sequence[int], horizon: int, seed: int) -> list[list[bool]]:
        rng = random.Random(f"schedule/{seed}")
        last = {i: -1 for i in nodes}
        out = []
        for k in range(horizon):
            row = []
            for i in nodes:
                on = rng.random() < self.p or k - last[i] >= self.bound_steps
                if on:
                    last[i] = k
                row.append(on)
            out.append(row)
        return out


Schedule = PeriodicSchedule | RandomSchedule


# --------------------------------------------------------------------- delays


@dataclass(frozen=True)
class ZeroDelay:
    def max_delay(self) -> int:
        return 0

    def sampler(self, seed: int):
        return lambda path, sent: 0


@dataclass(frozen=True)
class HopDelay:
    """Fixed delay by hop count: ``per_hop[h-1]`` for an ``h``-hop path."""

    per_hop: tuple[int, ...] = (0,)

    def __post_init__(self):
        object.__setattr__(self, "per_hop", tuple(int(d) for d in self.per_hop))
        if not self.per_hop or any(d < 0 for d in self.per_hop):
            raise ConfigError("hop delays must be a nonempty list of nonnegative integers")

    def max_delay(self) -> int:
        return max(self.per_hop)

    def sampler(self, seed: int):
        table = self.per_hop

        def delay(path, sent):
            h = len(path) - 1
            return table[h - 1] if h <= len(table) else table[-1]

        return delay


@dataclass(frozen=True)
class RandomDelay:
    """Uniform integer delay in ``[0, high]`` drawn per delivery from a seeded stream."""

    high: int = 1

    def __post_init__(self):
        if self.high < 0:
            raise ConfigError("delay bound must be nonnegative")

    def max_delay(self) -> int:
        return self.high

    def sampler(self, seed: int):
        rng = random.Random(f"delay/{seed}")
        return lambda path, sent: rng.randint(0, self.high)


DelayModel = ZeroDelay | HopDelay | RandomDelay


# --------------------------------------------------------------------- config


@dataclass(frozen=True)
class SimConfig:
    graph: DirectedGraph
    l: int
    f: int
    initial_states: Mapping[int, float]
    adversary: AdversarySpec = NO_ADVERSARY
    mode: str = SYNCHRONOUS
    schedule: Schedule = field(default_factory=PeriodicSchedule)
    delays: DelayModel = field(default_factory=ZeroDelay)
    tau: int = 0
    horizon: int = DEFAULT_HORIZON
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON
    record_deliveries: bool = False

    def __post_init__(self):
        if self.l < 1:
            raise ConfigError("hop bound must be at least 1")
        if self.f < 0:
            raise ConfigError("f must be nonnegative")
        if self.tau < 0 or self.horizon < 1 or not self.epsilon > 0:
            raise ConfigError("need tau >= 0, horizon >= 1 and epsilon > 0")
        if self.mode not in (SYNCHRONOUS, ASYNCHRONOUS):
            raise ConfigError(f"unknown mode {self.mode!r}")
        for v in self.adversary.members:
            if v not in self.graph:
                raise ConfigError(f"adversary node {v} is not in the graph")
        missing = [i for i in self.normal_nodes() if i not in self.initial_states]
        if missing:
            raise ConfigError(f"no initial state for nodes {missing}")
        if self.delays.max_delay() > self.tau:
            raise ConfigError(f"delay model allows {self.delays.max_delay()} steps, above tau={self.tau}")

    def normal_nodes(self) -> tuple[int, ...]:
        return tuple(i for i in self.graph.nodes if i not in self.adversary.members)

    def placement_model(self) -> PlacementModel:
        return self.adversary.model or PlacementModel(F_LOCAL, self.f, self.l)


# ---------------------------------------------------------------------- trace


@dataclass
class Trace:
    """Normal-node states ``states[k][t]`` for node ``nodes[t]``, k = 0..horizon."""

    nodes: tuple[int, ...]
    states: list[list[float]]
    updated: list[list[bool]]
    audits: list[tuple] = field(default_factory=list)
    deliveries: list[tuple] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.states) - 1

    def at(self, k: int) -> dict[int, float]:
        return dict(zip(self.nodes, self.states[k]))

    def window(self, k: int, tau: int) -> list[float]:
        """Normal entries of ``z[k]``; slices before time 0 are not populated."""
        out = []
        for row in self.states[max(0, k - tau) : k + 1]:
            out.extend(row)
        return out

    def state_rows(self):
        for k, row in enumerate(self.states):
            flags = self.updated[k]
            for t, i in enumerate(self.nodes):
                yield k, i, row[t], flags[t]

    def write_states(self, target) -> None:
        with open(target, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("k", "node", "value", "updated"))
            for k, i, v, u in self.state_rows():
                w.writerow((k, i, repr(v), int(u)))

    def write_audits(self, target) -> None:
        from mwmsr.filtering import AUDIT_COLUMNS

        with open(target, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(AUDIT_COLUMNS)
            for row in self.audits:
                w.writerow(row[:-1] + (repr(row[-1]),))


# -------------------------------------------------------------------- engines


def _check_placement(cfg: SimConfig) -> None:
    model = cfg.placement_model()
    if not validate_model(cfg.graph, cfg.adversary.members, model):
        raise ConfigError(f"adversary set {sorted(cfg.adversary.members)} is not admissible under {model}")


def _routes(cfg: SimConfig):
    """Per normal recipient: normal paths and adversary-touched paths, with masks."""
    g, adv = cfg.graph, cfg.adversary
    bit = {v: 1 << k for k, v in enumerate(g.nodes)}
    normal, tampered = {}, {}
    for i in cfg.normal_nodes():
        clean, dirty = [], []
        for path in g.paths_into(i, cfg.l):
            mask = 0
            for v in path[:-1]:
                mask |= bit[v]
            (dirty if adv.tampered(path) else clean).append((path, mask))
        normal[i], tampered[i] = clean, dirty
    return normal, tampered


def _source_value(cfg: SimConfig, x: Mapping[int, float], j: int) -> float:
    if j in x:
        return x[j]
    return float(cfg.initial_states.get(j, 0.0))


def run_synchronous(cfg: SimConfig) -> Trace:
    _check_placement(cfg)
    nodes = cfg.normal_nodes()
    normal, tampered = _routes(cfg)
    adv = cfg.adversary
    x = {i: float(cfg.initial_states[i]) for i in nodes}
    trace = Trace(nodes, [[x[i] for i in nodes]], [[False] * len(nodes)])
    for k in range(cfg.horizon):
        nxt = {}
        for i in nodes:
            items = [(x[p[0]], p, m) for p, m in normal[i]]
            for p, m in tampered[i]:
                v = adv.relay_value(k, p, _source_value(cfg, x, p[0]))
                if v is not None:
                    items.append((v, p, m))
                if cfg.record_deliveries:
                    trace.deliveries.append((k, i, p, v, True))
            if cfg.record_deliveries:
                trace.deliveries.extend((k, i, p, x[p[0]], False) for p, _ in normal[i])
            new, nh, nl, nk = filter_update(items, x[i], cfg.f)
            trace.audits.append((k, i, nh, nl, nk, new))
            nxt[i] = new
        x = nxt
        trace.states.append([x[i] for i in nodes])
        trace.updated.append([True] * len(nodes))
    return trace


def run_asynchronous(cfg: SimConfig) -> Trace:
    _check_placement(cfg)
    nodes = cfg.normal_nodes()
    normal, tampered = _routes(cfg)
    adv = cfg.adversary
    delay = cfg.delays.sampler(cfg.seed)
    plan = cfg.schedule.plan(nodes, cfg.horizon, cfg.seed)

    outgoing: dict[int, list] = {j: [] for j in nodes}
    for i in nodes:
        for path, mask in normal[i]:
            outgoing[path[0]].append((i, path, mask))

    x = {i: float(cfg.initial_states[i]) for i in nodes}
    # slots[i][path] = (value, sent, mask); only normal paths live here.
    slots: dict[int, dict] = {i: {} for i in nodes}
    pending: dict[int, list] = {}

    def emit(j: int, value: float, sent: int) -> None:
        for i, path, mask in outgoing[j]:
            d = delay(path, sent)
            if not 0 <= d <= cfg.tau:
                raise ConfigError(f"delay {d} on normal path {path} outside [0, {cfg.tau}]")
            pending.setdefault(sent + d, []).append((i, path, mask, value, sent))

    for j in nodes:
        emit(j, x[j], 0)

    trace = Trace(nodes, [[x[i] for i in nodes]], [[False] * len(nodes)])
    for k in range(cfg.horizon):
        for i, path, mask, value, sent in pending.pop(k, ()):
            old = slots[i].get(path)
            if old is None or old[1] <= sent:
                slots[i][path] = (value, sent, mask)
            if cfg.record_deliveries:
                trace.deliveries.append((k, i, path, value, False))
        active = plan[k]
        nxt = dict(x)
        for t, i in enumerate(nodes):
            if not active[t]:
                continue
            items = [(v, p, m) for p, (v, _, m) in slots[i].items()]
            for p, m in tampered[i]:
                v = adv.relay_value(k, p, _source_value(cfg, x, p[0]))
                if v is not None:
                    items.append((v, p, m))
                if cfg.record_deliveries:
                    trace.deliveries.append((k, i, p, v, True))
            new, nh, nl, nk = filter_update(items, x[i], cfg.f)
            trace.audits.append((k, i, nh, nl, nk, new))
            nxt[i] = new
        for t, i in enumerate(nodes):
            if active[t]:
                emit(i, nxt[i], k + 1)
        x = nxt
        trace.states.append([x[i] for i in nodes])
        trace.updated.append(list(active))
    return trace


def run(cfg: SimConfig) -> Trace:
    return run_synchronous(cfg) if cfg.mode == SYNCHRONOUS else run_asynchronous(cfg)


def run_nominal(cfg: SimConfig) -> Trace:
    """Attack-free averaging over l-hop in-neighbourhoods with equal weights."""
    if cfg.adversary.members:
        raise ConfigError("the nominal baseline runs without adversaries")
    g = cfg.graph
    nodes = g.nodes
    hood = {i: sorted(l_hop_in_neighbors(g, i, cfg.l)) for i in nodes}
    x = {i: float(cfg.initial_states[i]) for i in nodes}
    trace = Trace(nodes, [[x[i] for i in nodes]], [[False] * len(nodes)])
    for _ in range(cfg.horizon):
        x = {i: math.fsum([x[i]] + [x[j] for j in hood[i]]) / (len(hood[i]) + 1) for i in nodes}
        trace.states.append([x[i] for i in nodes])
        trace.updated.append([True] * len(nodes))
    return trace


# -------------------------------------------------------------------- metrics


def safety_interval(trace: Trace, tau: int = 0) -> tuple[float, float]:
    """Span of the normal initial states; the window before time 0 is empty."""
    first = trace.window(0, tau)
    return min(first), max(first)


@dataclass(frozen=True)
class Metrics:
    delta: tuple[float, ...]
    upper: tuple[float, ...]
    lower: tuple[float, ...]
    converged: bool
    convergence_step: int | None


def consensus_metrics(trace: Trace, tau: int = 0, epsilon: float = DEFAULT_EPSILON) -> Metrics:
    upper, lower = [], []
    for k in range(len(trace.states)):
        w = trace.window(k, tau)
        upper.append(max(w))
        lower.append(min(w))
    delta = [u - d for u, d in zip(upper, lower)]
    step = None
    for k in range(len(delta) - 1, -1, -1):
        if delta[k] < epsilon:
            step = k
        else:
            break
    return Metrics(tuple(delta), tuple(upper), tuple(lower), step is not None, step)


def count_violations(trace: Trace, interval: tuple[float, float]) -> int:
    lo, hi = interval
    return sum(1 for row in trace.states for v in row if not lo <= v <= hi)


def summary(trace: Trace, tau: int, epsilon: float) -> dict:
    interval = safety_interval(trace, tau)
    m = consensus_metrics(trace, tau, epsilon)
    return {
        "converged": m.converged,
        "convergence_step": m.convergence_step,
        "safety_interval": list(interval),
        "violations": count_violations(trace, interval),
        "final_delta": m.delta[-1],
        "horizon": trace.horizon,
    }


def write_metrics(trace: Trace, tau: int, epsilon: float, target) -> None:
    m = consensus_metrics(trace, tau, epsilon)
    with open(target, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("k", "delta_x_tau", "x_bar", "x_under"))
        for k, (d, u, lo) in enumerate(zip(m.delta, m.upper, m.lower)):
            w.writerow((k, repr(d), repr(u), repr(lo)))


def write_outputs(trace: Trace, cfg: SimConfig, out_dir: str | FilePath) -> dict:
    out = FilePath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace.write_states(out / "states.csv")
    write_metrics(trace, cfg.tau, cfg.epsilon, out / "metrics.csv")
    trace.write_audits(out / "filter_audit.csv")
    if cfg.record_deliveries:
        from mwmsr.relay import write_deliveries

        write_deliveries(trace.deliveries, out / "deliveries.csv")
    info = summary(trace, cfg.tau, cfg.epsilon)
    (out / "summary.json").write_text(json.dumps(info, indent=2) + "\n")
    return info
