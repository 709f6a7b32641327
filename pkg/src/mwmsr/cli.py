"""Command line entry point: ``mwmsr <subcommand> ...``.

Exit codes: 0 success (for ``simulate``: converged), 1 designed outcome not
met (``simulate`` did not converge), 2 usage, configuration or input error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path as FilePath

from mwmsr import config as configmod
from mwmsr.adversary import synthesize_attack
from mwmsr.engine import run, write_outputs
from mwmsr.errors import DomainError
from mwmsr.graph import read_graph, write_graph
from mwmsr.robustness import (
    F_LOCAL,
    F_TOTAL,
    PlacementModel,
    is_rs_robust_under_model,
    is_rs_robust_wrt,
    is_strictly_robust,
    verify_condition_order,
)
from mwmsr.search import search_counterexamples


CONDITIONS = ("rs", "model", "strict", "triple")


def _node_list(text: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node ids, got {text!r}") from None


def _verdict(v) -> dict:
    out = {"holds": v.holds}
    if v.witness is not None:
        out["witness"] = v.witness.as_dict()
    return out


def _emit(report: dict, out: str | None, name: str) -> None:
    text = json.dumps(report, indent=2)
    print(text)
    if out:
        d = FilePath(out)
        d.mkdir(parents=True, exist_ok=True)
        (d / name).write_text(text + "\n")


# ---------------------------------------------------------------- commands


def cmd_certify(args) -> int:
    g = read_graph(args.graph)
    model = PlacementModel(args.model, args.f, args.model_l or args.l)
    guard = args.max_nodes_override
    report = {"graph": str(args.graph), "n": g.n, "l": args.l, "condition": args.condition}
    if args.condition == "rs":
        report.update(r=args.r, s=args.s, F=sorted(args.F))
        report["verdict"] = _verdict(is_rs_robust_wrt(g, args.r, args.s, args.l, args.F, max_nodes=guard))
    elif args.condition == "model":
        report.update(r=args.r, s=args.s, model=model.kind, f=model.f)
        report["verdict"] = _verdict(is_rs_robust_under_model(g, args.r, args.s, args.l, model, max_nodes=guard))
    elif args.condition == "strict":
        report.update(r=args.r, model=model.kind, f=model.f)
        report["verdict"] = _verdict(is_strictly_robust(g, args.r, args.l, model, max_nodes=guard))
    else:
        a, b, c = verify_condition_order(g, args.f, args.l, model, max_nodes=guard)
        report.update(f=args.f, model=model.kind, triple={"A": a, "B": b, "C": c})
    _emit(report, args.out, "certify.json")
    return 0


def _run_one(cfg: configmod.ExperimentConfig, out_dir: str) -> dict:
    sim = cfg.to_sim_config()
    trace = run(sim)
    return write_outputs(trace, sim, out_dir)


def cmd_simulate(args) -> int:
    cfg = configmod.load(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.mode:
        cfg.mode = args.mode
    if args.l:
        cfg.l = args.l
    if args.horizon:
        cfg.horizon = args.horizon
    out = args.out or cfg.output or "out"
    info = _run_one(cfg, out)
    print(json.dumps(info, indent=2))
    ok = info["converged"] != args.expect_nonconvergence
    return 0 if ok else 1


def _sweep_job(job):
    raw, base_dir, out_dir = job
    cfg = configmod.ExperimentConfig.from_dict(raw, base_dir)
    info = _run_one(cfg, out_dir)
    return out_dir, info


def cmd_sweep(args) -> int:
    base = configmod.load(args.config)
    if args.seed is not None:
        base.seed = args.seed
    axes = []
    for item in args.set or []:
        key, _, values = item.partition("=")
        if key not in configmod.TOP_KEYS or not values:
            raise DomainError(f"bad --set {item!r}; use key=v1,v2 with a top-level config key")
        axes.append((key, [_scalar(v) for v in values.split(",")]))
    out = FilePath(args.out or base.output or "sweep")
    jobs = []
    for k, combo in enumerate(itertools.product(*[vals for _, vals in axes])):
        raw = base.to_dict()
        raw.update({key: v for (key, _), v in zip(axes, combo)})
        jobs.append((raw, str(base.base_dir), str(out / f"run_{k:04d}")))
    results = []
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    index = []
    for (raw, _, _), (run_dir, info) in zip(jobs, results):
        index.append({"dir": run_dir, "params": {key: raw[key] for key, _ in axes}, **info})
    out.mkdir(parents=True, exist_ok=True)
    (out / "index.json").write_text(json.dumps(index, indent=2) + "\n")
    print(json.dumps({"runs": len(index), "converged": sum(r["converged"] for r in index)}, indent=2))
    return 0


def _scalar(text: str):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def cmd_search_counterexamples(args) -> int:
    model = PlacementModel(args.model, args.f, args.l)
    found = search_counterexamples(
        args.max_nodes, args.f, args.l, model, args.budget, args.seed or 0,
        min_nodes=args.min_nodes, directed=args.directed, max_nodes_guard=args.max_nodes_override,
    )
    out = FilePath(args.out or "counterexamples")
    report = {}
    for cat, items in found.items():
        if not items:
            report[cat] = "none found"
            continue
        out.mkdir(parents=True, exist_ok=True)
        files = []
        for k, ce in enumerate(items):
            a, b, c = ce.triple
            path = out / f"{cat}_{k}.graph"
            write_graph(ce.graph, path, [f"category {cat}", f"f {args.f} l {args.l} model {args.model}",
                                         f"A {a} B {b} C {c}"])
            files.append({"file": str(path), "n": ce.graph.n, "triple": {"A": a, "B": b, "C": c}})
        report[cat] = files
    print(json.dumps(report, indent=2))
    return 0


def cmd_synthesize_attack(args) -> int:
    g = read_graph(args.graph)
    model = PlacementModel(args.model, args.f, args.model_l or args.l)
    verdict, spec, states = synthesize_attack(g, args.f, args.l, model, high=args.high, low=args.low)
    w = verdict.witness
    adversary = [
        {"node": a, "kind": "scripted", "toward": dict(spec.behavior[a].toward), "default": spec.behavior[a].default}
        for a in sorted(spec.members)
    ]
    cfg = configmod.ExperimentConfig(
        graph=str(FilePath(args.graph).resolve()),
        l=args.l,
        f=args.f,
        initial_states={i: v for i, v in states.items() if i not in spec.members},
        model=args.model,
        model_l=args.model_l,
        horizon=args.horizon,
        seed=args.seed or 0,
        adversary=adversary,
    )
    out = FilePath(args.out or "attack")
    out.mkdir(parents=True, exist_ok=True)
    configmod.dump(cfg, out / "attack.yaml")
    print(json.dumps({"witness": w.as_dict(), "config": str(out / "attack.yaml")}, indent=2))
    return 0


# ------------------------------------------------------------------ parser


def _globals(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--seed", type=int, default=default, help="reproducibility seed")
    p.add_argument("--out", default=default, help="output directory")
    p.add_argument("--max-nodes-override", type=int, default=default, dest="max_nodes_override",
                   help="raise the node-count guard of exhaustive certification")
    p.add_argument("-v", "--verbose", action="store_true", default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mwmsr", description="Multi-hop resilient consensus toolkit")
    _globals(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)
    # Subcommand copies of the global flags must not clobber values given
    # before the subcommand name.
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, argparse.SUPPRESS)

    def graph_opts(p, need_r=True):
        p.add_argument("--l", type=int, default=1, help="hop bound")
        p.add_argument("--f", type=int, default=1, help="adversary bound")
        p.add_argument("--model", choices=(F_LOCAL, F_TOTAL), default=F_LOCAL)
        p.add_argument("--model-l", type=int, default=None, dest="model_l",
                       help="locality radius of the f-local model (defaults to --l)")
        if need_r:
            p.add_argument("--r", type=int, default=2)
            p.add_argument("--s", type=int, default=1)

    p = sub.add_parser("certify", parents=[common], help="exhaustive robustness certification")
    p.add_argument("graph")
    graph_opts(p)
    p.add_argument("--F", type=_node_list, default=[], help="comma-separated adversary set for --condition rs")
    p.add_argument("--condition", choices=CONDITIONS, default="rs")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("simulate", parents=[common], help="run one experiment config")
    p.add_argument("config")
    p.add_argument("--mode", choices=("synchronous", "asynchronous"))
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--expect-nonconvergence", action="store_true",
                   help="exit 0 iff the run does NOT converge")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="run a config over a parameter grid")
    p.add_argument("config")
    p.add_argument("--set", action="append", help="key=v1,v2,... (repeatable)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search-counterexamples", parents=[common],
                       help="find graphs separating the condition order")
    p.add_argument("--max-nodes", type=int, default=8, dest="max_nodes")
    p.add_argument("--min-nodes", type=int, default=3, dest="min_nodes")
    p.add_argument("--budget", type=int, default=2000, help="number of random graphs to try")
    p.add_argument("--directed", action="store_true")
    graph_opts(p, need_r=False)
    p.set_defaults(func=cmd_search_counterexamples)

    p = sub.add_parser("synthesize-attack", parents=[common],
                       help="build the range-freezing attack for a non-robust graph")
    p.add_argument("graph")
    graph_opts(p, need_r=False)
    p.add_argument("--high", type=float, default=9.0)
    p.add_argument("--low", type=float, default=1.0)
    p.add_argument("--horizon", type=int, default=200)
    p.set_defaults(func=cmd_synthesize_attack)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
