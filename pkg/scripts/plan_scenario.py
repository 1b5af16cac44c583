"""Plan one scenario and write summary.json plus CSV files.

Usage: python scripts/plan_scenario.py configs/gyre_default.json out/ [--threads 2]
"""

import argparse
import sys

from streamplan.config import load_config
from streamplan.harness import run_plan, summary_json


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("out")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    outcome = run_plan(load_config(args.config), args.out, threads=args.threads)
    sys.stdout.write(summary_json(outcome.summary))
    return 0 if outcome.plan is not None else 2


if __name__ == "__main__":
    sys.exit(main())
