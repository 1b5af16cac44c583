"""Idle drift in a gyre: RK4 conserves the stream value, forward Euler does not.

Usage: python scripts/drift_check.py [--dt 1.0] [--steps 10000]
"""

import argparse

from streamplan.flowfield import GyreLattice, advect, stream_value


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dt", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=10_000)
    args = ap.parse_args()
    field = GyreLattice(1.0, 1000.0, 2, 2)
    p0 = (300.0, 450.0)
    for method in ("rk4", "euler"):
        drift = advect(field, p0, args.dt, args.steps, method)
        worst = max(abs(stream_value(field, p0, x)) for x in drift.trajectory)
        print(f"{method:5s} max |dpsi| = {worst:.3e} m^2/s  (scale V*s = {field.v_peak * field.cell_size:g})")


if __name__ == "__main__":
    main()
