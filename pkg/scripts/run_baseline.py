"""Solve the default configuration and print the collision and two-step summaries.

    python scripts/run_baseline.py --out runs/baseline
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from qcstates.config import parse_config
from qcstates.pipeline import cmd_collision, cmd_spectrum, cmd_twostep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", type=Path, help="optional key=value overrides")
    ap.add_argument("--out", type=Path, default=Path("runs/baseline"))
    args = ap.parse_args()

    config = parse_config(args.config.read_text() if args.config else "")
    run = cmd_spectrum(config, args.out)
    spec = run.spectrum
    print(f"store {run.path}: {len(spec)} states, ground {spec.ground_energy:.6f}, verify ok={run.ok}")

    _, report = cmd_collision(run.path)
    print(f"p_QC read at R={report.shell[0]:.4f}, rho={report.shell[1]:.4f}; eta={report.eta:.4g}")
    for i, exc in zip(report.collision_state_indices, report.excitations):
        print(f"  collision state {i:4d}  excitation {exc:8.4f}  p_QC {report.p_qc[i]:.4g}")
    print(f"  any below 5: {report.any_below_floor}")

    _, ranking = cmd_twostep(run.path, "auto")
    print(f"two-step goal {ranking.goal} (excitation {spec.excitation(ranking.goal):.4f}), "
          f"max/median score {ranking.score[0] / np.median(ranking.score):.3g}")
    for j in range(min(8, len(ranking))):
        n = ranking.intermediate[j]
        print(f"  n={n:4d} exc {spec.excitation(n):8.4f} score {ranking.score[j]:.4e} "
              f"lambda1 {ranking.wavelength_first[j]:.4e} m lambda2 {ranking.wavelength_second[j]:.4e} m")


if __name__ == "__main__":
    main()
