"""Command line entry point: ``qcstates <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, RunConfig, parse_config
from .store import StoreError
from .units import DIMENSIONS, compute_scales, wavelength_for_excitation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_STORE = 4


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return parse_config("")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    return parse_config(text)


def _store_or_run(args) -> str:
    """Existing store from --store, else a fresh spectrum run from --config."""
    if args.store:
        return args.store
    run = pipeline.cmd_spectrum(_load_config(args.config))
    print(f"store={run.path}")
    return str(run.path)


def _spectrum(args) -> int:
    config = _load_config(args.config)
    run = pipeline.cmd_spectrum(config, args.out)
    spec = run.spectrum
    print(f"store={run.path}")
    print(f"states={len(spec)} ground={spec.ground_energy!r} method={spec.method}")
    if not run.ok:
        for line in run.failures[:10]:
            print(f"FAILED {line}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _collision(args) -> int:
    store = _store_or_run(args)
    path, report = pipeline.cmd_collision(store, args.eta, args.out)
    print(f"wrote {path}")
    print(f"eta={report.eta!r} classified={len(report.collision_state_indices)} "
          f"any_below_5={report.any_below_floor}")
    return EXIT_OK


def _twostep(args) -> int:
    store = _store_or_run(args)
    path, ranking = pipeline.cmd_twostep(store, args.goal, args.out)
    print(f"wrote {path}")
    for i in range(min(5, len(ranking))):
        print(f"n={ranking.intermediate[i]} score={ranking.score[i]:.4e} "
              f"lambda1={ranking.wavelength_first[i]:.4e} m lambda2={ranking.wavelength_second[i]:.4e} m")
    return EXIT_OK


def _potential(args) -> int:
    config = _load_config(args.config)
    out = Path(args.out) if args.out else Path("potential.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    print(f"wrote {pipeline.cmd_potential(config, out)}")
    return EXIT_OK


def _units(args) -> int:
    config = _load_config(args.config)
    s = compute_scales(config.particle)
    print(f"g2_over_Z={s.g2_over_Z!r} 1/m")
    for dim, unit in zip(DIMENSIONS, ("m", "eV", "s")):
        print(f"{dim}_unit={s.unit(dim)!r} {unit}")
    print(f"mu={s.mu!r}")
    print(f"wavelength_numerator={s.wavelength_numerator!r} m")
    for de in args.delta_e or ():
        print(f"delta_e={de!r} wavelength={wavelength_for_excitation(de, s)!r} m")
    return EXIT_OK


def _slice(args) -> int:
    store = _store_or_run(args)
    theta = math.pi / 2 if args.theta is None else args.theta
    print(f"wrote {pipeline.cmd_slice(store, args.index, theta, args.out)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcstates", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, config=True, store=False):
        p = sub.add_parser(name, help=help)
        if config:
            p.add_argument("--config", help="key=value configuration file")
        if store:
            p.add_argument("--store", help="existing run directory")
        p.add_argument("--out", help="output path")
        p.set_defaults(func=func)
        return p

    add("spectrum", _spectrum, "solve and persist a spectrum (--out is the run directory)")
    p = add("collision", _collision, "quantum-collision probabilities and classification", store=True)
    p.add_argument("--eta", help="threshold: absolute number or rel:<fraction of max>")
    p = add("twostep", _twostep, "rank intermediates for two-step excitation of a goal state", store=True)
    p.add_argument("--goal", help="goal state index or 'auto' (largest p_QC)")
    add("potential", _potential, "theta-averaged potential table (CSV)")
    p = add("units", _units, "print unit conversion factors")
    p.add_argument("--delta-e", type=float, nargs="*", help="dimensionless excitations to convert to wavelengths")
    p = add("slice", _slice, "|Psi| on the (R, rho) plane at fixed theta", store=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--theta", type=float, help="polar angle in radians (default pi/2)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except StoreError as err:
        print(f"missing store: {err}", file=sys.stderr)
        return EXIT_STORE
    except pipeline.SolverError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, IndexError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
