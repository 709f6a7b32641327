import io
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwmsr.adversary import AdversarySpec, Byzantine, Crash, Malicious
from mwmsr.engine import (
    ASYNCHRONOUS,
    HopDelay,
    PeriodicSchedule,
    RandomDelay,
    RandomSchedule,
    SimConfig,
    Trace,
    ZeroDelay,
    consensus_metrics,
    count_violations,
    run_asynchronous,
    run_nominal,
    run_synchronous,
    safety_interval,
    summary,
    write_outputs,
)
from mwmsr.errors import ConfigError
from mwmsr.graph import DirectedGraph, complete_graph, cycle_graph, wheel_graph
from mwmsr.robustness import F_LOCAL, F_TOTAL, PlacementModel
from mwmsr.scenarios import WHEEL_STATES, wheel_config


def test_constant_states_stay_put():
    g = complete_graph(4)
    tr = run_synchronous(SimConfig(g, 1, 0, {i: 2.5 for i in g.nodes}, horizon=10))
    assert all(v == 2.5 for row in tr.states for v in row)
    m = consensus_metrics(tr)
    assert set(m.delta) == {0.0} and m.converged and m.convergence_step == 0


def test_invalid_placement_is_a_config_error():
    g = complete_graph(4)
    adv = AdversarySpec.of([Crash(1), Crash(2)], PlacementModel(F_TOTAL, 1))
    with pytest.raises(ConfigError):
        run_synchronous(SimConfig(g, 1, 1, {3: 0.0, 4: 1.0}, adv))


def test_config_validation():
    g = complete_graph(3)
    with pytest.raises(ConfigError):
        SimConfig(g, 1, 1, {1: 0.0, 2: 0.0})
    with pytest.raises(ConfigError):
        SimConfig(g, 0, 1, {i: 0.0 for i in g.nodes})
    with pytest.raises(ConfigError):
        SimConfig(g, 1, 1, {i: 0.0 for i in g.nodes}, mode=ASYNCHRONOUS, delays=HopDelay((0, 3)), tau=2)
    with pytest.raises(ConfigError):
        SimConfig(g, 1, 1, {i: 0.0 for i in g.nodes}, epsilon=0.0)
    with pytest.raises(ConfigError):
        PeriodicSchedule({1: 0})


def test_runtime_delay_above_bound_is_rejected():
    class Lying(ZeroDelay):
        def sampler(self, seed):
            return lambda path, sent: 5

    g = complete_graph(3)
    cfg = SimConfig(g, 1, 0, {i: float(i) for i in g.nodes}, mode=ASYNCHRONOUS, delays=Lying(), tau=1)
    with pytest.raises(ConfigError):
        run_asynchronous(cfg)


def _relax(x, hood, steps=5000):
    for _ in range(steps):
        x = {i: (x[i] + sum(x[j] for j in hood[i])) / (len(hood[i]) + 1) for i in x}
    return x


def test_nominal_baseline():
    g = complete_graph(4)
    tr = run_nominal(SimConfig(g, 1, 0, {1: 0.0, 2: 1.0, 3: 2.0, 4: 3.0}, horizon=60))
    expect = _relax({1: 0.0, 2: 1.0, 3: 2.0, 4: 3.0}, {i: [j for j in g.nodes if j != i] for i in g.nodes})
    assert all(abs(v - 1.5) < 1e-12 and abs(v - expect[1]) < 1e-12 for v in tr.states[-1])
    c6 = cycle_graph(6)
    x0 = {i: float(i * i) for i in c6.nodes}
    tr = run_nominal(SimConfig(c6, 2, 0, x0, horizon=300))
    assert consensus_metrics(tr, 0, 1e-9).converged
    assert all(1 <= v <= 36 for row in tr.states for v in row)
    solo = run_nominal(SimConfig(DirectedGraph(1), 1, 0, {1: 4.0}, horizon=5))
    assert all(row == [4.0] for row in solo.states)
    with pytest.raises(ConfigError):
        run_nominal(SimConfig(c6, 1, 1, x0, AdversarySpec.of([Crash(1)])))


def test_safety_interval_examples():
    tr = Trace((1, 2, 3, 4, 5, 6), [[1, 2, 4, 9, 8, 9], [5, 5, 5, 5, 5, 5]], [[False] * 6] * 2)
    assert safety_interval(tr, 7) == (1, 9)
    assert safety_interval(tr, 0) == (1, 9)
    flat = Trace((1, 2), [[3.0, 3.0]], [[False, False]])
    assert safety_interval(flat, 4) == (3.0, 3.0)


def test_window_metrics():
    tr = Trace((1, 2), [[0.0, 4.0], [1.0, 3.0], [2.0, 2.0], [2.0, 2.0]], [[True, True]] * 4)
    m = consensus_metrics(tr, 1, 0.5)
    assert m.delta == (4.0, 4.0, 2.0, 0.0)
    assert m.upper == (4.0, 4.0, 3.0, 2.0)
    assert m.converged and m.convergence_step == 3
    assert not consensus_metrics(tr, 3, 0.5).converged


def test_wheel_one_hop_fails_two_hop_converges():
    one = consensus_metrics(run_synchronous(wheel_config(1)), 0, 1e-6)
    assert not one.converged and min(one.delta) > 0.5
    two = run_synchronous(wheel_config(2))
    assert consensus_metrics(two, 0, 1e-6).converged
    assert count_violations(two, (1, 9)) == 0


def test_periodic_schedule_and_hop_delays():
    cfg = wheel_config(2, asynchronous=True, horizon=40)
    tr = run_asynchronous(cfg)
    idx = {v: t for t, v in enumerate(tr.nodes)}
    for k in range(40):
        # An update during step k shows up as updated[k+1].
        assert tr.updated[k + 1][idx[4]] == (k % 6 == 0)
        assert tr.updated[k + 1][idx[1]]
    assert HopDelay((0, 1)).sampler(0)((2, 1), 0) == 0
    assert HopDelay((0, 1)).sampler(0)((3, 2, 1), 0) == 1


def test_random_schedule_respects_bound():
    plan = RandomSchedule(0.05, 4).plan((1, 2, 3), 200, 9)
    for t in range(3):
        gaps, last = [], -1
        for k, row in enumerate(plan):
            if row[t]:
                gaps.append(k - last)
                last = k
        assert max(gaps) <= 4
    rd = RandomDelay(3).sampler(2)
    assert {rd((1, 2), 0) for _ in range(200)} == {0, 1, 2, 3}


def test_outputs(tmp_path):
    cfg = wheel_config(2)
    tr = run_synchronous(cfg)
    info = write_outputs(tr, cfg, tmp_path)
    assert info == summary(tr, cfg.tau, cfg.epsilon)
    assert info["converged"] and info["violations"] == 0 and info["safety_interval"] == [1.0, 9.0]
    head = (tmp_path / "states.csv").read_text().splitlines()[:2]
    assert head == ["k,node,value,updated", "0,1,1.0,0"]
    assert (tmp_path / "metrics.csv").read_text().startswith("k,delta_x_tau,x_bar,x_under\n0,8.0,9.0,1.0\n")
    assert (tmp_path / "filter_audit.csv").read_text().startswith("k,node,removed_high,removed_low,kept,new_value\n")


def test_delivery_log():
    cfg = SimConfig(wheel_graph(4), 1, 1, {i: 1.0 for i in range(1, 5)},
                    AdversarySpec.of([Malicious(5, 3.0)]), horizon=2, record_deliveries=True)
    tr = run_synchronous(cfg)
    tampered = [d for d in tr.deliveries if d[4]]
    assert tampered and all(d[3] == 3.0 for d in tampered)
    assert len(tr.deliveries) == 2 * 4 * 3


def _csv(trace):
    buf = io.StringIO()
    for row in trace.state_rows():
        buf.write(",".join(map(repr, row)) + "\n")
    return buf.getvalue()


def _random_case(seed):
    rng = random.Random(seed)
    g = wheel_graph(rng.randint(4, 7)) if seed % 2 else complete_graph(rng.randint(3, 6))
    l = rng.randint(1, 2)
    adv_node = g.n
    model = PlacementModel(F_LOCAL, 1, l)
    adv = AdversarySpec.of([Byzantine(adv_node, {}, -20, 20, seed)], model)
    states = {i: float(rng.randint(0, 20)) for i in g.nodes if i != adv_node}
    return g, l, adv, states


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_determinism_and_envelopes(seed):
    g, l, adv, states = _random_case(seed)
    cfg = SimConfig(g, l, 1, states, adv, mode=ASYNCHRONOUS, schedule=RandomSchedule(0.5, 4),
                    delays=RandomDelay(3), tau=3, horizon=60, seed=seed)
    a, b = run_asynchronous(cfg), run_asynchronous(cfg)
    assert _csv(a) == _csv(b)
    m = consensus_metrics(a, 3)
    assert all(x >= y for x, y in zip(m.upper, m.upper[1:]))
    assert all(x <= y for x, y in zip(m.lower, m.lower[1:]))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_degenerate_asynchrony_is_synchronous(seed):
    g, l, adv, states = _random_case(seed)
    sync = run_synchronous(SimConfig(g, l, 1, states, adv, horizon=30))
    asyn = run_asynchronous(SimConfig(g, l, 1, states, adv, mode=ASYNCHRONOUS, horizon=30))
    assert sync.states == asyn.states
