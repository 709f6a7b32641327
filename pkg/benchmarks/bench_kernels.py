"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N] [--skip-slow]

Each workload is timed under every available backend by swapping
``mwmsr.kernels.backend``. The results of both backends are checked to be
identical before any timing is reported.
"""

import argparse
import random
import time

from mwmsr import kernels, robustness
from mwmsr.graph import complete_graph, random_undirected
from mwmsr.relay import Message, minimum_message_cover
from mwmsr.robustness import F_LOCAL, PlacementModel, is_rs_robust_wrt, is_strictly_robust
from mwmsr.scenarios import net17, wheel7, wheel_config
from mwmsr.engine import run_synchronous


def _inboxes(count, seed=0):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        paths = {tuple(rng.sample(range(1, 13), rng.randint(1, 4))) + (0,) for _ in range(rng.randint(4, 16))}
        out.append([Message(rng.random(), p) for p in sorted(paths)])
    return out


def workloads(skip_slow):
    inboxes = _inboxes(500)
    rng = random.Random(1)
    mids = [random_undirected(10, 0.5, rng) for _ in range(5)]
    jobs = [
        ("mmc x500 inboxes", lambda: [minimum_message_cover(m, 0).cardinality for m in inboxes]),
        ("rs table n=10 x5", lambda: [is_rs_robust_wrt(g, 2, 1, 2).holds for g in mids]),
        ("strict K7 f=2", lambda: is_strictly_robust(complete_graph(7), 3, 1, PlacementModel(F_LOCAL, 2, 1)).holds),
        ("strict wheel l=2", lambda: is_strictly_robust(wheel7(), 2, 2, PlacementModel(F_LOCAL, 1, 2)).holds),
        ("wheel l=2 sync run", lambda: run_synchronous(wheel_config(2)).states[-1]),
    ]
    if not skip_slow:
        jobs.append(("rs net17 l=2 F={1,15}", lambda: is_rs_robust_wrt(net17(), 2, 1, 2, (1, 15)).holds))
    return jobs


def _time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        # Path tables are cached per graph and tied to the backend that built them.
        robustness._table.cache_clear()
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-slow", action="store_true", help="skip the 17-node certification")
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is available")
    saved = kernels.backend
    names = list(backends)
    print(f"{'workload':26s}" + "".join(f"{n:>12s}" for n in names) + ("    speedup" if len(names) > 1 else ""))
    try:
        for label, fn in workloads(args.skip_slow):
            times, results = [], []
            for name in names:
                kernels.backend = backends[name]
                t, out = _time(fn, args.repeat)
                times.append(t)
                results.append(out)
            if any(r != results[0] for r in results[1:]):
                raise SystemExit(f"backends disagree on {label}")
            line = f"{label:26s}" + "".join(f"{t:11.4f}s" for t in times)
            if len(times) > 1:
                line += f"  {times[0] / times[1]:8.1f}x"
            print(line)
    finally:
        kernels.backend = saved
        robustness._table.cache_clear()


if __name__ == "__main__":
    main()
