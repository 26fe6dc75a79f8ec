"""Grid refinement study for the low spectrum and the collision states.

Varies one resolution parameter at a time from a base configuration and
reports the lowest eigenvalues, the first collision state and the shell
where p_QC is read. Output is a CSV on stdout.

    python scripts/convergence_study.py --axis n_r --values 12 24 48 --k 200
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

import numpy as np

from qcstates.config import parse_config
from qcstates.grid import build_grid
from qcstates.observables import classify_collision_states, collision_probabilities
from qcstates.pipeline import build_operator, solve_config


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--axis", choices=["n_r", "n_rho", "n_theta", "r_max"], default="n_theta")
    ap.add_argument("--values", type=float, nargs="+", default=[8, 16, 32])
    ap.add_argument("--k", type=int, default=100)
    ap.add_argument("--levels", type=int, default=5, help="eigenvalues to report")
    args = ap.parse_args()

    base = parse_config(f"eigen.k={args.k}\n")
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["axis", "value", "n", "shell_R", "shell_rho", "first_collision", "collision_exc",
                  *(f"E{i}" for i in range(args.levels))])
    for value in args.values:
        v = value if args.axis == "r_max" else int(value)
        config = replace(base, grid=replace(base.grid, **{args.axis: v}))
        H = build_operator(config)
        spec = solve_config(config, H)
        grid = build_grid(config.grid)
        p = collision_probabilities(spec, grid)
        rep = classify_collision_states(spec, grid, 0.5 * p.max())
        first = int(rep.collision_state_indices[0])
        out.writerow([args.axis, v, H.n, grid.r_nodes[0], grid.rho_nodes[0], first,
                      float(spec.excitation(first)), *np.round(spec.eigenvalues[: args.levels], 10)])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
