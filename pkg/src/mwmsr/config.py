"""Experiment configuration files (YAML) with strict schema checking.

Example::

    graph: wheel7.graph        # relative to the config file
    l: 2
    f: 1
    model: f_local             # or f_total; locality radius defaults to l
    mode: asynchronous         # or synchronous
    horizon: 500
    epsilon: 1.0e-6
    seed: 0
    tau: 7
    schedule: {kind: periodic, periods: {1: 1, 2: 2, 3: 5}}
    delays: {kind: hop, per_hop: [0, 1]}
    adversary:
      - {node: 7, kind: byzantine, values: {1: 0.0, 2: -1.0}}
    initial_states: {1: 1.0, 2: 2.0}

Schedules: ``periodic`` (``periods``) or ``random`` (``p``, ``bound``).
Delays: ``zero``, ``hop`` (``per_hop``) or ``random`` (``high``).
Adversary kinds and their optional keys:
``byzantine`` (``values``, ``low``, ``high``, ``seed``),
``malicious`` (``value`` or ``low``/``high``/``seed``), ``crash``,
``scripted`` (``toward``, ``default``).
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path as FilePath

import yaml

from mwmsr.adversary import AdversarySpec, Byzantine, Crash, Malicious, Scripted
from mwmsr.engine import (
    ASYNCHRONOUS,
    DEFAULT_EPSILON,
    DEFAULT_HORIZON,
    SYNCHRONOUS,
    HopDelay,
    PeriodicSchedule,
    RandomDelay,
    RandomSchedule,
    SimConfig,
    ZeroDelay,
)
from mwmsr.errors import ConfigError, DomainError
from mwmsr.graph import DirectedGraph, read_graph
from mwmsr.robustness import F_LOCAL, F_TOTAL, PlacementModel

TOP_KEYS = {
    "graph", "l", "f", "r", "s", "model", "model_l", "mode", "horizon", "epsilon", "seed",
    "tau", "schedule", "delays", "adversary", "initial_states", "output", "record_deliveries",
}
REQUIRED = {"graph", "l", "f", "initial_states"}
ADVERSARY_KEYS = {
    "byzantine": {"values", "low", "high", "seed"},
    "malicious": {"value", "low", "high", "seed"},
    "crash": set(),
    "scripted": {"toward", "default"},
}
SCHEDULE_KEYS = {"periodic": {"periods"}, "random": {"p", "bound"}}
DELAY_KEYS = {"zero": set(), "hop": {"per_hop"}, "random": {"high"}}


def _reject_unknown(block: dict, allowed: set, where: str) -> None:
    extra = set(block) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) {sorted(map(str, extra))} in {where}")


def _int_map(raw, where: str) -> dict[int, float]:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where} must be a mapping from node id to number")
    try:
        return {int(k): float(v) for k, v in raw.items()}
    except (TypeError, ValueError):
        raise ConfigError(f"{where} must map integer node ids to numbers") from None


def _number(block: dict, key: str, kind=float, default=None):
    if key not in block:
        return default
    try:
        return kind(block[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key!r} must be a {kind.__name__}") from None


@dataclass
class ExperimentConfig:
    graph: str
    l: int
    f: int
    initial_states: dict[int, float]
    r: int | None = None
    s: int | None = None
    model: str = F_LOCAL
    model_l: int | None = None
    mode: str = SYNCHRONOUS
    horizon: int = DEFAULT_HORIZON
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    tau: int = 0
    schedule: dict = field(default_factory=lambda: {"kind": "periodic"})
    delays: dict = field(default_factory=lambda: {"kind": "zero"})
    adversary: list[dict] = field(default_factory=list)
    output: str | None = None
    record_deliveries: bool = False
    base_dir: FilePath = field(default=FilePath("."), compare=False, repr=False)

    # ---------------------------------------------------------------- parse

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str | FilePath = ".") -> ExperimentConfig:
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
        _reject_unknown(raw, TOP_KEYS, "config")
        missing = REQUIRED - set(raw)
        if missing:
            raise ConfigError(f"missing required key(s) {sorted(missing)}")
        model = raw.get("model", F_LOCAL)
        if model not in (F_LOCAL, F_TOTAL):
            raise ConfigError(f"model must be {F_LOCAL} or {F_TOTAL}")
        mode = raw.get("mode", SYNCHRONOUS)
        if mode not in (SYNCHRONOUS, ASYNCHRONOUS):
            raise ConfigError(f"mode must be {SYNCHRONOUS} or {ASYNCHRONOUS}")
        cfg = cls(
            graph=str(raw["graph"]),
            l=_number(raw, "l", int),
            f=_number(raw, "f", int),
            initial_states=_int_map(raw["initial_states"], "initial_states"),
            r=_number(raw, "r", int),
            s=_number(raw, "s", int),
            model=model,
            model_l=_number(raw, "model_l", int),
            mode=mode,
            horizon=_number(raw, "horizon", int, DEFAULT_HORIZON),
            epsilon=_number(raw, "epsilon", float, DEFAULT_EPSILON),
            seed=_number(raw, "seed", int, 0),
            tau=_number(raw, "tau", int, 0),
            schedule=cls._parse_schedule(raw.get("schedule", {"kind": "periodic"})),
            delays=cls._parse_delays(raw.get("delays", {"kind": "zero"})),
            adversary=cls._parse_adversary(raw.get("adversary", [])),
            output=None if raw.get("output") is None else str(raw["output"]),
            record_deliveries=bool(raw.get("record_deliveries", False)),
            base_dir=FilePath(base_dir),
        )
        return cfg

    @staticmethod
    def _parse_schedule(raw) -> dict:
        if not isinstance(raw, dict) or raw.get("kind") not in SCHEDULE_KEYS:
            raise ConfigError(f"schedule.kind must be one of {sorted(SCHEDULE_KEYS)}")
        kind = raw["kind"]
        _reject_unknown(raw, SCHEDULE_KEYS[kind] | {"kind"}, "schedule")
        out = {"kind": kind}
        if kind == "periodic":
            out["periods"] = {k: int(v) for k, v in _int_map(raw.get("periods", {}), "schedule.periods").items()}
        else:
            out["p"] = _number(raw, "p", float, 0.5)
            out["bound"] = _number(raw, "bound", int, 8)
        return out

    @staticmethod
    def _parse_delays(raw) -> dict:
        if not isinstance(raw, dict) or raw.get("kind") not in DELAY_KEYS:
            raise ConfigError(f"delays.kind must be one of {sorted(DELAY_KEYS)}")
        kind = raw["kind"]
        _reject_unknown(raw, DELAY_KEYS[kind] | {"kind"}, "delays")
        out = {"kind": kind}
        if kind == "hop":
            per_hop = raw.get("per_hop", [0])
            if not isinstance(per_hop, list):
                raise ConfigError("delays.per_hop must be a list")
            out["per_hop"] = [int(d) for d in per_hop]
        elif kind == "random":
            out["high"] = _number(raw, "high", int, 0)
        return out

    @staticmethod
    def _parse_adversary(raw) -> list[dict]:
        if not isinstance(raw, list):
            raise ConfigError("adversary must be a list of entries")
        out, seen = [], set()
        for entry in raw:
            if not isinstance(entry, dict) or "node" not in entry or entry.get("kind") not in ADVERSARY_KEYS:
                raise ConfigError(f"adversary entries need 'node' and 'kind' in {sorted(ADVERSARY_KEYS)}")
            kind = entry["kind"]
            _reject_unknown(entry, ADVERSARY_KEYS[kind] | {"node", "kind"}, f"adversary entry {entry.get('node')}")
            node = _number(entry, "node", int)
            if node in seen:
                raise ConfigError(f"adversary node {node} listed twice")
            seen.add(node)
            item = {"node": node, "kind": kind}
            for key in ("values", "toward"):
                if key in entry:
                    item[key] = _int_map(entry[key], f"adversary {node}.{key}")
            for key in ("low", "high", "default"):
                if key in entry:
                    item[key] = _number(entry, key, float)
            if "value" in entry:
                item["value"] = _number(entry, "value", float)
            if "seed" in entry:
                item["seed"] = _number(entry, "seed", int)
            out.append(item)
        return out

    # ---------------------------------------------------------------- dump

    def to_dict(self) -> dict:
        out = {
            "graph": self.graph,
            "l": self.l,
            "f": self.f,
            "model": self.model,
            "mode": self.mode,
            "horizon": self.horizon,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "tau": self.tau,
            "schedule": copy.deepcopy(self.schedule),
            "delays": copy.deepcopy(self.delays),
            "adversary": copy.deepcopy(self.adversary),
            "initial_states": dict(self.initial_states),
            "record_deliveries": self.record_deliveries,
        }
        for key in ("r", "s", "model_l", "output"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    # ---------------------------------------------------------------- build

    def graph_path(self) -> FilePath:
        p = FilePath(self.graph)
        return p if p.is_absolute() else self.base_dir / p

    def load_graph(self) -> DirectedGraph:
        return read_graph(self.graph_path())

    def placement(self) -> PlacementModel:
        try:
            return PlacementModel(self.model, self.f, self.model_l or self.l)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def build_adversary(self) -> AdversarySpec:
        strategies = []
        for e in self.adversary:
            node, kind = e["node"], e["kind"]
            if kind == "byzantine":
                strategies.append(
                    Byzantine(node, e.get("values", {}), e.get("low", 0.0), e.get("high", 1.0), e.get("seed", self.seed))
                )
            elif kind == "malicious":
                strategies.append(
                    Malicious(node, e.get("value"), e.get("low", 0.0), e.get("high", 1.0), e.get("seed", self.seed))
                )
            elif kind == "crash":
                strategies.append(Crash(node))
            else:
                strategies.append(Scripted(node, e.get("toward", {}), e.get("default", 0.0)))
        return AdversarySpec.of(strategies, self.placement())

    def build_schedule(self):
        if self.schedule["kind"] == "periodic":
            return PeriodicSchedule(self.schedule.get("periods", {}))
        return RandomSchedule(self.schedule["p"], self.schedule["bound"])

    def build_delays(self):
        kind = self.delays["kind"]
        if kind == "zero":
            return ZeroDelay()
        if kind == "hop":
            return HopDelay(tuple(self.delays["per_hop"]))
        return RandomDelay(self.delays["high"])

    def validate(self, g: DirectedGraph) -> None:
        nodes = set(g.nodes)
        refs = set(self.initial_states) | {e["node"] for e in self.adversary}
        refs |= set(self.schedule.get("periods", {}))
        for e in self.adversary:
            refs |= set(e.get("values", {})) | set(e.get("toward", {}))
        unknown = sorted(refs - nodes)
        if unknown:
            raise ConfigError(f"config references nodes {unknown} not in the graph")

    def to_sim_config(self, g: DirectedGraph | None = None) -> SimConfig:
        g = self.load_graph() if g is None else g
        self.validate(g)
        try:
            return SimConfig(
                graph=g,
                l=self.l,
                f=self.f,
                initial_states=self.initial_states,
                adversary=self.build_adversary(),
                mode=self.mode,
                schedule=self.build_schedule(),
                delays=self.build_delays(),
                tau=self.tau,
                horizon=self.horizon,
                seed=self.seed,
                epsilon=self.epsilon,
                record_deliveries=self.record_deliveries,
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from None


def loads(text: str, base_dir: str | FilePath = ".") -> ExperimentConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return ExperimentConfig.from_dict(raw, base_dir)


def load(path: str | FilePath) -> ExperimentConfig:
    path = FilePath(path)
    return loads(path.read_text(), path.parent)


def dump(cfg: ExperimentConfig, path: str | FilePath) -> None:
    FilePath(path).write_text(cfg.dumps())
