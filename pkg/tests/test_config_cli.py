import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwmsr import config as configmod
from mwmsr.cli import main
from mwmsr.errors import ConfigError
from mwmsr.graph import DirectedGraph, cycle_graph, read_graph, wheel_graph, write_graph
from mwmsr.robustness import F_LOCAL, PlacementModel, verify_condition_order

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def test_shipped_configs_round_trip():
    for path in sorted(SCENARIOS.glob("*.yaml")):
        cfg = configmod.load(path)
        again = configmod.loads(cfg.dumps(), path.parent)
        assert again == cfg
        assert again.to_dict() == cfg.to_dict()
        cfg.to_sim_config()


node = st.integers(1, 6)
adv_entry = st.one_of(
    st.fixed_dictionaries({"node": node, "kind": st.just("crash")}),
    st.fixed_dictionaries({"node": node, "kind": st.just("malicious"), "value": st.floats(-9, 9)}),
    st.fixed_dictionaries({"node": node, "kind": st.just("byzantine"),
                           "values": st.dictionaries(node, st.floats(-9, 9), max_size=3)}),
    st.fixed_dictionaries({"node": node, "kind": st.just("scripted"),
                           "toward": st.dictionaries(node, st.floats(-9, 9), max_size=3), "default": st.floats(-9, 9)}),
)
raw_configs = st.fixed_dictionaries(
    {
        "graph": st.just("g.graph"),
        "l": st.integers(1, 3),
        "f": st.integers(0, 2),
        "initial_states": st.dictionaries(node, st.floats(-100, 100), min_size=1),
        "mode": st.sampled_from(["synchronous", "asynchronous"]),
        "schedule": st.one_of(
            st.fixed_dictionaries({"kind": st.just("periodic"), "periods": st.dictionaries(node, st.integers(1, 5))}),
            st.fixed_dictionaries({"kind": st.just("random"), "p": st.floats(0, 1), "bound": st.integers(1, 9)}),
        ),
        "delays": st.one_of(
            st.fixed_dictionaries({"kind": st.just("zero")}),
            st.fixed_dictionaries({"kind": st.just("hop"), "per_hop": st.lists(st.integers(0, 4), min_size=1, max_size=3)}),
            st.fixed_dictionaries({"kind": st.just("random"), "high": st.integers(0, 5)}),
        ),
        "adversary": st.lists(adv_entry, max_size=3, unique_by=lambda e: e["node"]),
        "seed": st.integers(0, 99),
        "tau": st.integers(0, 9),
    }
)


@settings(max_examples=80, deadline=None)
@given(raw_configs)
def test_config_round_trip(raw):
    cfg = configmod.ExperimentConfig.from_dict(raw)
    again = configmod.loads(cfg.dumps())
    assert again == cfg


@pytest.mark.parametrize(
    "patch",
    [
        {"horizn": 5},
        {"schedule": {"kind": "periodic", "period": {1: 2}}},
        {"delays": {"kind": "hop", "per_hop": [0], "extra": 1}},
        {"adversary": [{"node": 1, "kind": "crash", "value": 3}]},
        {"adversary": [{"node": 1, "kind": "wizard"}]},
        {"mode": "sometimes"},
        {"model": "f_most"},
    ],
)
def test_unknown_or_bad_keys_rejected(patch):
    raw = {"graph": "g", "l": 1, "f": 1, "initial_states": {1: 0.0}}
    raw.update(patch)
    with pytest.raises(ConfigError):
        configmod.ExperimentConfig.from_dict(raw)


def test_missing_required_and_unknown_nodes(tmp_path):
    with pytest.raises(ConfigError):
        configmod.ExperimentConfig.from_dict({"graph": "g", "l": 1})
    write_graph(cycle_graph(4), tmp_path / "c4.graph")
    cfg = configmod.ExperimentConfig.from_dict(
        {"graph": "c4.graph", "l": 1, "f": 0, "initial_states": {1: 0, 2: 1, 3: 2, 4: 3, 9: 1}}, tmp_path
    )
    with pytest.raises(ConfigError):
        cfg.to_sim_config()


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_certify_cycle(tmp_path, capsys):
    write_graph(cycle_graph(6), tmp_path / "c6.graph")
    code, out, _ = run_cli(capsys, "certify", tmp_path / "c6.graph", "--r", 2, "--l", 1)
    report = json.loads(out)
    assert code == 0 and report["verdict"]["holds"] is False
    assert report["verdict"]["witness"]["V1"] == [1, 2] and report["verdict"]["witness"]["V2"] == [3, 4]


def test_certify_wheel_strict_with_two_hops(capsys):
    code, out, _ = run_cli(capsys, "certify", SCENARIOS / "wheel7.graph", "--condition", "strict",
                           "--r", 2, "--l", 2, "--model", "f_local", "--f", 1)
    assert code == 0 and json.loads(out)["verdict"]["holds"] is True
    code, out, _ = run_cli(capsys, "certify", SCENARIOS / "wheel7.graph", "--condition", "strict",
                           "--r", 2, "--l", 1, "--f", 1)
    assert json.loads(out)["verdict"]["witness"]["F"] == [7]


def test_certify_edgeless_and_triple(tmp_path, capsys):
    write_graph(DirectedGraph(3), tmp_path / "e.graph")
    code, out, _ = run_cli(capsys, "certify", tmp_path / "e.graph", "--r", 1)
    assert json.loads(out)["verdict"]["holds"] is False
    code, out, _ = run_cli(capsys, "--out", tmp_path / "rep", "certify", SCENARIOS / "wheel7.graph",
                           "--condition", "triple", "--l", 2)
    # Checked against the brute-force pair oracle: two hops make the wheel 3-robust.
    assert json.loads(out)["triple"] == {"A": True, "B": True, "C": True}
    assert (tmp_path / "rep" / "certify.json").exists()


def test_certify_errors(tmp_path, capsys):
    (tmp_path / "bad.graph").write_text("n 3\nedge 1 2\nedge 4 1\n")
    code, _, err = run_cli(capsys, "certify", tmp_path / "bad.graph")
    assert code == 2 and "line 3" in err
    write_graph(cycle_graph(21), tmp_path / "big.graph")
    code, _, err = run_cli(capsys, "certify", tmp_path / "big.graph", "--r", 1)
    assert code == 2 and "21 nodes" in err
    code, out, _ = run_cli(capsys, "certify", tmp_path / "big.graph", "--r", 1, "--max-nodes-override", 21)
    assert code == 0 and json.loads(out)["verdict"]["holds"] is True


@pytest.mark.parametrize(
    "name,expect",
    [("wheel7_l1_sync", 1), ("wheel7_l2_sync", 0), ("wheel7_l2_async", 0),
     ("net17_l1_sync", 1), ("net17_l2_sync", 0), ("net17_l2_async", 0)],
)
def test_simulate_exit_codes(tmp_path, capsys, name, expect):
    code, out, _ = run_cli(capsys, "simulate", SCENARIOS / f"{name}.yaml", "--out", tmp_path)
    assert code == expect
    assert json.loads(out)["violations"] == 0
    assert json.loads((tmp_path / "summary.json").read_text())["converged"] == (expect == 0)
    for f in ("states.csv", "metrics.csv", "filter_audit.csv"):
        assert (tmp_path / f).exists()


def test_simulate_inverted_exit(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "simulate", SCENARIOS / "wheel7_l1_sync.yaml", "--out", tmp_path,
                         "--expect-nonconvergence")
    assert code == 0
    code, _, _ = run_cli(capsys, "simulate", SCENARIOS / "wheel7_l2_sync.yaml", "--out", tmp_path,
                         "--expect-nonconvergence")
    assert code == 1


def test_simulate_rejects_invalid_placement(tmp_path, capsys):
    cfg = configmod.load(SCENARIOS / "wheel7_l2_sync.yaml")
    cfg.adversary.append({"node": 1, "kind": "crash"})
    configmod.dump(cfg, tmp_path / "bad.yaml")
    (tmp_path / "wheel7.graph").write_text((SCENARIOS / "wheel7.graph").read_text())
    code, _, err = run_cli(capsys, "simulate", tmp_path / "bad.yaml", "--out", tmp_path / "o")
    assert code == 2 and "admissible" in err


def test_sweep(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "--out", tmp_path, "sweep", SCENARIOS / "wheel7_l1_sync.yaml",
                           "--set", "l=1,2", "--workers", 2)
    assert code == 0 and json.loads(out) == {"runs": 2, "converged": 1}
    index = json.loads((tmp_path / "index.json").read_text())
    assert [(r["params"]["l"], r["converged"]) for r in index] == [(1, False), (2, True)]


def test_search_counterexamples(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "search-counterexamples", "--budget", 0, "--out", tmp_path)
    assert json.loads(out) == {"c_not_b": "none found", "b_not_a": "none found"}
    code, out, _ = run_cli(capsys, "search-counterexamples", "--max-nodes", 8, "--f", 1, "--l", 1,
                           "--budget", 3000, "--seed", 0, "--out", tmp_path)
    report = json.loads(out)
    model = PlacementModel(F_LOCAL, 1, 1)
    for cat, want in (("c_not_b", (False, True)), ("b_not_a", (True, False))):
        for item in report[cat]:
            g = read_graph(item["file"])
            a, b, c = verify_condition_order(g, 1, 1, model)
            assert (a, b, c) == (item["triple"]["A"], item["triple"]["B"], item["triple"]["C"])
            assert g.n <= 8
        assert report[cat] != "none found"


def test_synthesize_attack(tmp_path, capsys):
    write_graph(wheel_graph(6), tmp_path / "w.graph")
    code, out, _ = run_cli(capsys, "synthesize-attack", tmp_path / "w.graph", "--l", 1, "--f", 1,
                           "--out", tmp_path)
    assert code == 0 and json.loads(out)["witness"]["F"] == [7]
    code, _, _ = run_cli(capsys, "simulate", tmp_path / "attack.yaml", "--out", tmp_path / "run",
                         "--expect-nonconvergence")
    assert code == 0
    code, _, err = run_cli(capsys, "synthesize-attack", tmp_path / "w.graph", "--l", 2, "--f", 1,
                           "--out", tmp_path / "x")
    assert code == 2 and "strictly robust" in err
