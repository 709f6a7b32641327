import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwmsr.adversary import AdversarySpec, Byzantine, Crash
from mwmsr.errors import DomainError
from mwmsr.graph import complete_graph, wheel_graph
from mwmsr.relay import (
    Inbox,
    Message,
    disseminate,
    format_path,
    minimum_message_cover,
    mmc_cardinality,
    parse_path,
    write_deliveries,
)
from oracles import brute_mmc, brute_paths_into


def msgs(*paths, value=1.0):
    return [Message(value, p) for p in paths]


def test_cover_examples():
    r = minimum_message_cover(msgs((2, 1), (3, 1)), 1)
    assert (r.cover, r.cardinality) == ({2, 3}, 2)
    r = minimum_message_cover([Message(5.0, (2, 4, 1)), Message(6.0, (3, 4, 1))], 1)
    assert (r.cover, r.cardinality) == ({4}, 1)
    r = minimum_message_cover(msgs((2, 1), (2, 4, 1), (3, 1)), 1)
    assert (r.cover, r.cardinality) == ({2, 3}, 2)
    assert brute_mmc([(2, 1), (2, 4, 1), (3, 1)], 1)[0] == 2


def test_cardinality_examples():
    assert mmc_cardinality([], 1) == 0
    assert mmc_cardinality(msgs((3, 2, 1)), 1) == 1
    assert mmc_cardinality(msgs((2, 1), (2, 4, 1), (3, 1)), 1) == 2


def test_cover_rejects_self_and_foreign_paths():
    with pytest.raises(DomainError):
        minimum_message_cover(msgs((1,)), 1)
    with pytest.raises(DomainError):
        minimum_message_cover(msgs((1, 2)), 1)


def test_cover_tie_break_is_lexicographic():
    # {2} and {3} both cover; the smaller id wins.
    r = minimum_message_cover(msgs((2, 3, 1), (3, 2, 1)), 1)
    assert r.cover == {2}


def test_faithful_relay_without_adversary():
    g = complete_graph(4)
    states = {1: 0.5, 2: 1.5, 3: 2.5, 4: 3.5}
    boxes = disseminate(g, states, 2)
    for i, box in boxes.items():
        assert box.own_value == states[i]
        for m in box.messages():
            assert m.value == states[m.source]


def test_byzantine_touches_exactly_its_paths():
    g = complete_graph(4)
    states = {1: 0.0, 2: 1.0, 3: 2.0, 4: 3.0}
    adv = AdversarySpec.of([Byzantine(4, {}, low=100.0, high=200.0, seed=3)])
    boxes = disseminate(g, states, 2, adv)
    for box in boxes.values():
        for m in box.messages():
            if 4 in m.path[:-1]:
                assert 100.0 <= m.value <= 200.0
            else:
                assert m.value == states[m.source]


def test_wheel_inbox_paths():
    g = wheel_graph(6)
    states = {i: float(i) for i in g.nodes}
    adv = AdversarySpec.of([Byzantine(7, {}, low=50, high=60)])
    box = disseminate(g, states, 2, adv, recipients=[1])[1]
    paths = set(box.entries)
    assert paths == {(1,)} | set(brute_paths_into(g, 1, 2))
    assert {(2, 1), (6, 1), (7, 1)} <= paths
    for m in box.messages():
        if 7 in m.path[:-1]:
            assert 50 <= m.value <= 60


def test_crash_values_are_dropped():
    g = complete_graph(3)
    adv = AdversarySpec.of([Crash(3)])
    box = disseminate(g, {1: 1.0, 2: 2.0, 3: 3.0}, 2, adv)[1]
    assert all(3 not in m.path for m in box.messages())
    assert box.entries[(3, 1)].value is None


def test_inbox_keeps_latest_emission():
    box = Inbox(1, 0.0)
    assert box.put((2, 1), 5.0, sent=3, received=4)
    assert not box.put((2, 1), 4.0, sent=2, received=6)
    assert box.entries[(2, 1)] == (5.0, 3, 4)
    assert box.put((2, 1), 7.0, sent=5)
    assert box.entries[(2, 1)].value == 7.0
    with pytest.raises(DomainError):
        box.put((1, 2), 1.0, 0)


def test_path_text_and_delivery_csv(tmp_path):
    assert format_path((3, 2, 1)) == "3-2-1"
    assert parse_path("3-2-1") == (3, 2, 1)
    target = tmp_path / "d.csv"
    write_deliveries([(0, 1, (2, 1), 1.5, False), (0, 1, (3, 1), None, True)], target)
    assert target.read_text().splitlines() == [
        "k,recipient,path,value,tampered",
        "0,1,2-1,1.5,0",
        "0,1,3-1,,1",
    ]


def random_inbox(rng, owner=0, universe=12, count=10, max_len=4):
    others = [v for v in range(1, universe + 1)]
    paths = set()
    for _ in range(count):
        k = rng.randint(1, min(max_len, universe))
        paths.add(tuple(rng.sample(others, k)) + (owner,))
    return [Message(rng.random(), p) for p in sorted(paths)]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 9))
def test_cover_is_minimum_and_sound(seed, count):
    rng = random.Random(seed)
    inbox = random_inbox(rng, universe=rng.randint(2, 10), count=count, max_len=3)
    r = minimum_message_cover(inbox, 0)
    assert all(set(m.path) & r.cover for m in inbox)
    assert 0 not in r.cover
    size, lex = brute_mmc([m.path for m in inbox], 0)
    assert r.cardinality == size
    assert r.cover == lex


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_cover_monotone_under_additions(seed):
    rng = random.Random(seed)
    inbox = random_inbox(rng, universe=8, count=8, max_len=3)
    sizes = [mmc_cardinality(inbox[:k], 0) for k in range(len(inbox) + 1)]
    assert sizes == sorted(sizes)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_paths_do_not_depend_on_behaviour(seed):
    g = wheel_graph(5)
    states = {i: float(i) for i in g.nodes}
    a = disseminate(g, states, 2, AdversarySpec.of([Byzantine(6, {}, seed=seed)]))
    b = disseminate(g, states, 2, AdversarySpec.of([Crash(6)]))
    c = disseminate(g, states, 2)
    for i in g.nodes:
        assert set(a[i].entries) == set(b[i].entries) == set(c[i].entries)
