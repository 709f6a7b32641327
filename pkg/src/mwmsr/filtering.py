"""The MW-MSR filter and averaging update for a single node."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from mwmsr import kernels
from mwmsr.errors import DomainError
from mwmsr.relay import Inbox, Message, _owner_masks


@dataclass(frozen=True)
class FilterOutcome:
    kept: tuple[Message, ...]
    removed_high: tuple[Message, ...]
    removed_low: tuple[Message, ...]
    new_value: float


def _high_key(m: Message):
    return (-m.value, m.path)


def _low_key(m: Message):
    return (m.value, m.path)


def partition_extremes(msgs: Inbox | Sequence[Message], x_i: float) -> tuple[list[Message], list[Message]]:
    """Messages strictly above/below ``x_i``, most extreme first.

    Equal values are ordered by path (source id first), so the order is total.
    """
    if isinstance(msgs, Inbox):
        msgs = msgs.messages()
    above = sorted((m for m in msgs if m.value > x_i), key=_high_key)
    below = sorted((m for m in msgs if m.value < x_i), key=_low_key)
    return above, below


def select_removal_set(side: Sequence[Message], f: int, owner: int) -> list[Message]:
    """Longest extreme-first prefix of ``side`` coverable by at most ``f`` nodes.

    When the whole side is coverable by fewer than ``f`` nodes it is removed
    entirely.  Covers grow monotonically along prefixes, so the result is the
    prefix at which adding the next message would need ``f + 1`` nodes.
    """
    if f < 0:
        raise DomainError("f must be nonnegative")
    if not side:
        return []
    _, masks = _owner_masks((m.path for m in side), owner)
    q = kernels.longest_prefix_within(masks, f)
    return list(side[:q])


def mwmsr_step(inbox: Inbox, x_i: float, f: int) -> FilterOutcome:
    if inbox.own_value != x_i:
        raise DomainError(f"inbox self-value {inbox.own_value} differs from x_i={x_i}")
    msgs = inbox.messages()
    above, below = partition_extremes(msgs, x_i)
    high = select_removal_set(above, f, inbox.owner)
    low = select_removal_set(below, f, inbox.owner)
    gone = set(high) | set(low)
    kept = tuple(m for m in msgs if m not in gone)
    return FilterOutcome(kept, tuple(high), tuple(low), math.fsum(m.value for m in kept) / len(kept))


def filter_update(items: Sequence[tuple[float, tuple, int]], x_i: float, f: int) -> tuple[float, int, int, int]:
    """Allocation-light variant of ``mwmsr_step`` used by the simulators.

    ``items`` holds ``(value, path, mask)`` for every non-self message with a
    precomputed node mask that omits the owner.  Returns ``(new_value,
    removed_high, removed_low, kept)``, where kept counts the self value.
    """
    above = sorted((t for t in items if t[0] > x_i), key=lambda t: (-t[0], t[1]))
    below = sorted((t for t in items if t[0] < x_i), key=lambda t: (t[0], t[1]))
    qh = kernels.longest_prefix_within([t[2] for t in above], f) if above else 0
    ql = kernels.longest_prefix_within([t[2] for t in below], f) if below else 0
    values = [x_i]
    values += [t[0] for t in items if t[0] == x_i]
    values += [t[0] for t in above[qh:]]
    values += [t[0] for t in below[ql:]]
    return math.fsum(values) / len(values), qh, ql, len(values)


AUDIT_COLUMNS = ("k", "node", "removed_high", "removed_low", "kept", "new_value")
