"""Path-tagged messages, multi-hop dissemination and minimum message covers."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path as FilePath
from typing import NamedTuple

from mwmsr import kernels
from mwmsr.errors import DomainError
from mwmsr.graph import DirectedGraph

Path = tuple[int, ...]


class Message(NamedTuple):
    """A value together with the route it travelled, source first."""

    value: float | None
    path: Path

    @property
    def source(self) -> int:
        return self.path[0]

    @property
    def recipient(self) -> int:
        return self.path[-1]


class Slot(NamedTuple):
    value: float | None
    sent: int
    received: int


class Inbox:
    """Latest value per path for one recipient.

    A slot is replaced only by a message emitted no earlier than the one it
    holds, so a late delivery never overwrites fresher information.
    """

    __slots__ = ("owner", "entries")

    def __init__(self, owner: int, own_value: float, time: int = 0):
        self.owner = owner
        self.entries: dict[Path, Slot] = {(owner,): Slot(own_value, time, time)}

    def put(self, path: Path, value: float | None, sent: int, received: int | None = None) -> bool:
        if not path or path[-1] != self.owner:
            raise DomainError(f"path {path} does not end at node {self.owner}")
        old = self.entries.get(path)
        if old is not None and old.sent > sent:
            return False
        self.entries[path] = Slot(value, sent, sent if received is None else received)
        return True

    def set_own(self, value: float, time: int) -> None:
        self.entries[(self.owner,)] = Slot(value, time, time)

    @property
    def own_value(self) -> float:
        return self.entries[(self.owner,)].value

    def messages(self) -> list[Message]:
        """Non-empty messages in path order; crash-empty slots are dropped."""
        return [Message(s.value, p) for p, s in sorted(self.entries.items()) if s.value is not None]

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return f"Inbox(owner={self.owner}, paths={len(self.entries)})"


@dataclass(frozen=True)
class CoverResult:
    cover: frozenset[int]
    cardinality: int


def disseminate(
    g: DirectedGraph,
    states: Mapping[int, float],
    l: int,
    adv=None,
    step: int = 0,
    recipients: Iterable[int] | None = None,
) -> dict[int, Inbox]:
    """One synchronous round of relaying over every simple path of <= l hops."""
    missing = [v for v in g.nodes if v not in states]
    if missing:
        raise DomainError(f"no state for nodes {missing}")
    targets = g.nodes if recipients is None else tuple(recipients)
    out = {}
    for i in targets:
        box = Inbox(i, states[i], step)
        for path in g.paths_into(i, l):
            value = states[path[0]]
            if adv is not None and adv.tampered(path):
                value = adv.relay_value(step, path, value)
            box.put(path, value, step)
        out[i] = box
    return out


def _owner_masks(paths: Iterable[Path], excluded: int) -> tuple[list[int], list[int]]:
    paths = list(paths)
    for p in paths:
        if not p or p[-1] != excluded:
            raise DomainError(f"path {p} does not end at node {excluded}")
        if len(p) == 1:
            raise DomainError("the self-message cannot be covered")
    nodes = sorted({v for p in paths for v in p if v != excluded})
    bit = {v: 1 << k for k, v in enumerate(nodes)}
    masks = []
    for p in paths:
        m = 0
        for v in p[:-1]:
            m |= bit[v]
        masks.append(m)
    return nodes, masks


def minimum_message_cover(msgs: Iterable[Message], excluded: int) -> CoverResult:
    """Smallest node set, never containing ``excluded``, meeting every message path.

    Among covers of minimum size the lexicographically smallest sorted node
    list is returned.
    """
    nodes, masks = _owner_masks((m.path for m in msgs), excluded)
    if not masks:
        return CoverResult(frozenset(), 0)
    found = kernels.min_hitting_set(masks, len(nodes))
    cover = frozenset(v for k, v in enumerate(nodes) if found >> k & 1)
    return CoverResult(cover, len(cover))


def mmc_cardinality(msgs: Iterable[Message], excluded: int) -> int:
    return minimum_message_cover(msgs, excluded).cardinality


def format_path(path: Path) -> str:
    return "-".join(map(str, path))


def parse_path(text: str) -> Path:
    try:
        return tuple(int(v) for v in text.split("-"))
    except ValueError:
        raise DomainError(f"bad path {text!r}") from None


DELIVERY_COLUMNS = ("k", "recipient", "path", "value", "tampered")


def write_deliveries(rows: Iterable[tuple], target: str | FilePath) -> None:
    """Rows are ``(k, recipient, path, value, tampered)``; empty values are blank."""
    with open(target, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DELIVERY_COLUMNS)
        for k, i, path, value, tampered in rows:
            w.writerow([k, i, format_path(path), "" if value is None else repr(value), int(bool(tampered))])
