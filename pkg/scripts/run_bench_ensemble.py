"""Streamline vs shooting over an ensemble of random gyre scenarios.

Start and goal are drawn uniformly inside the lattice (5% margin) and kept
only if they are more than half a side apart. The baseline defaults to the
same per-edge budget as the streamline solver (2 rings x 9 + centre = 19).

Usage: python scripts/run_bench_ensemble.py --count 20 --out bench.json
"""

import argparse
import json
import math
import time

import numpy as np

from streamplan.config import config_from_dict
from streamplan.harness import run_bench


def ensemble(count, cell_size, cells, gamma, n_r, n_theta, seed):
    side = cell_size * cells
    rng = np.random.default_rng(seed)
    base = {
        "field": {"type": "gyre", "v_peak": 1.0, "cell_size": cell_size, "n_x": cells, "n_y": cells},
        "gamma": gamma,
        "baseline": {"scheme": "polar", "n_r": n_r, "n_theta": n_theta},
    }
    configs = []
    for k in range(count):
        while True:
            a, b = rng.uniform(0.05 * side, 0.95 * side, 2), rng.uniform(0.05 * side, 0.95 * side, 2)
            if math.dist(a, b) > 0.5 * side:
                break
        configs.append(config_from_dict({**base, "start": list(a), "goal": list(b), "seed": k}))
    return configs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--cell-size", type=float, default=100000.0)
    ap.add_argument("--cells", type=int, default=4)
    ap.add_argument("--gamma", type=float, default=3.0)
    ap.add_argument("--n-r", type=int, default=2)
    ap.add_argument("--n-theta", type=int, default=9)
    ap.add_argument("--scenario-seed", type=int, default=123)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    configs = ensemble(args.count, args.cell_size, args.cells, args.gamma, args.n_r, args.n_theta,
                       args.scenario_seed)
    t0 = time.perf_counter()
    report = run_bench(configs[0], threads=args.threads, configs=configs)
    payload = report.to_dict()
    payload["wall_total_s"] = time.perf_counter() - t0
    for a, b in zip(report.streamline, report.shooting):
        print(f"streamline {a.cost_s}  shooting {b.cost_s}")
    print(json.dumps(payload["aggregate"], indent=2))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)


if __name__ == "__main__":
    main()
