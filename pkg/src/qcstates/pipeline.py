"""End-to-end commands: solve and persist, then derive observable tables from a store."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import observables as obs
from .config import RunConfig
from .eigen import LanczosOptions, SolverError, Spectrum, solve, verify  # noqa: F401
from .grid import Grid, build_grid
from .operator import HamiltonianOperator, assemble
from .potential import PotentialParams, averaged_diamagnetic, averaged_potential
from .store import LoadedRun, load_run, new_run_dir, save_spectrum, write_table
from .units import compute_scales, wavelength_for_excitation

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpectrumRun:
    path: Path
    spectrum: Spectrum
    grid: Grid
    operator: HamiltonianOperator
    ok: bool
    failures: list[str]


def build_operator(config: RunConfig) -> HamiltonianOperator:
    grid = build_grid(config.grid)
    scales = compute_scales(config.particle)
    return assemble(grid, config.potential_params(), scales.mu, config.heavy_kinetic_coeff)


def solve_config(config: RunConfig, H: HamiltonianOperator) -> Spectrum:
    e = config.eigen
    opts = LanczosOptions(max_iter=e.max_iter, tol=e.tol, seed=e.seed, ncv=e.ncv or None, sigma=e.shift)
    return solve(H, min(e.k, H.n - 1) if e.method != "dense" else e.k, e.method, opts, e.dense_limit)


def cmd_spectrum(config: RunConfig, out: str | Path | None = None) -> SpectrumRun:
    """build grid -> assemble -> solve -> verify -> persist (always, even on failure)."""
    t0 = time.perf_counter()
    H = build_operator(config)
    t1 = time.perf_counter()
    spectrum = solve_config(config, H)
    t2 = time.perf_counter()
    report = verify(spectrum, H, config.eigen.residual_tol, config.eigen.gram_tol)
    failures = report.failures if spectrum.converged else ["solver did not converge", *report.failures]
    run_dir = new_run_dir(out if out is not None else Path(config.output_dir) / "run")
    extra = {
        "verify.passed": not failures,
        "verify.max_residual": float(report.residuals.max()) if len(report.residuals) else 0.0,
        "verify.gram_deviation": report.gram_deviation,
        "timing.assemble_s": t1 - t0,
        "timing.solve_s": t2 - t1,
    }
    save_spectrum(run_dir, config, spectrum, extra)
    write_states(run_dir, config, spectrum, H.grid)
    if failures:
        log.error("spectrum run %s failed verification: %s", run_dir, "; ".join(failures[:5]))
    return SpectrumRun(run_dir, spectrum, H.grid, H, not failures, failures)


def write_states(run_dir: Path, config: RunConfig, spectrum: Spectrum, grid: Grid) -> Path:
    p = obs.collision_probabilities(spectrum, grid)
    g = obs.transition_table(spectrum, grid, 0, config.observables.polarization).couplings
    exc = spectrum.excitation(slice(None))
    rows = zip(range(len(spectrum)), spectrum.eigenvalues, exc, p, g)
    R1, rho1 = obs.innermost_shell(grid)
    return write_table(run_dir / "states.csv", ["index", "energy", "excitation", "p_qc", "coupling_from_ground"],
                       rows, [f"shell_R={R1!r} shell_rho={rho1!r}"])


def _load(store: str | Path) -> tuple[LoadedRun, Grid]:
    run = load_run(store)
    return run, build_grid(run.config.grid)


def cmd_collision(store: str | Path, eta: str | None = None, out: str | Path | None = None) -> tuple[Path, obs.CollisionReport]:
    run, grid = _load(store)
    spectrum = run.spectrum
    p = obs.collision_probabilities(spectrum, grid)
    threshold = obs.resolve_eta(eta or run.config.observables.eta, p)
    report = obs.classify_collision_states(spectrum, grid, threshold)
    flags = np.zeros(len(spectrum), dtype=bool)
    flags[report.collision_state_indices] = True
    exc = spectrum.excitation(slice(None))
    R1, rho1 = report.shell
    lowest = float(report.excitations.min()) if len(report.excitations) else math.nan
    comments = [
        f"eta={threshold!r} shell_R={R1!r} shell_rho={rho1!r}",
        f"classified={len(report.collision_state_indices)} of {len(spectrum)}",
        f"lowest_classified_excitation={lowest!r} any_below_{obs.COLLISION_EXCITATION_FLOOR:g}={report.any_below_floor}",
    ]
    rows = zip(range(len(spectrum)), spectrum.eigenvalues, exc, report.p_qc, flags.astype(int))
    path = write_table(Path(out) if out else run.path / "collision.csv",
                       ["index", "energy", "excitation", "p_qc", "collision"], rows, comments)
    return path, report


def resolve_goal(goal: str, spectrum: Spectrum, grid: Grid) -> int:
    if goal == "auto":
        p = obs.collision_probabilities(spectrum, grid)
        p[0] = -np.inf
        return int(np.argmax(p))
    try:
        index = int(goal)
    except ValueError:
        raise ValueError(f"goal must be 'auto' or a state index, got {goal!r}") from None
    if index == 0:
        raise ValueError("goal must differ from the ground state")
    if not 0 < index < len(spectrum):
        raise ValueError(f"goal {index} outside the stored spectrum of size {len(spectrum)}")
    return index


def cmd_twostep(store: str | Path, goal: str | None = None, out: str | Path | None = None) -> tuple[Path, obs.TwoStepRanking]:
    run, grid = _load(store)
    spectrum = run.spectrum
    index = resolve_goal(goal or run.config.observables.goal, spectrum, grid)
    scales = compute_scales(run.config.particle)
    ranking = obs.two_step_ranking(spectrum, grid, index, scales, run.config.observables.polarization)
    direct = float(spectrum.excitation(index))
    comments = [
        f"goal={index} goal_excitation={direct!r}",
        f"direct_wavelength_m={wavelength_for_excitation(direct, scales) if direct > 0 else math.inf!r}",
        f"polarization={','.join(repr(float(c)) for c in run.config.observables.polarization)}",
    ]
    energies = spectrum.eigenvalues[ranking.intermediate]
    rows = zip(ranking.intermediate, ranking.score, energies, ranking.de_first, ranking.de_second,
               ranking.wavelength_first, ranking.wavelength_second)
    path = write_table(Path(out) if out else run.path / "twostep.csv",
                       ["intermediate", "score", "energy", "de_first", "de_second",
                        "wavelength_first_m", "wavelength_second_m"], rows, comments)
    return path, ranking


def cmd_slice(store: str | Path, index: int, theta: float = math.pi / 2, out: str | Path | None = None) -> Path:
    run, grid = _load(store)
    sl = obs.state_slice(run.spectrum, grid, index, theta)
    rows = ((R, rho, sl.values[i, j]) for i, R in enumerate(sl.r_nodes) for j, rho in enumerate(sl.rho_nodes))
    return write_table(Path(out) if out else run.path / f"slice_{index}.csv", ["R", "rho", "abs_psi"], rows,
                       [f"index={index} theta={sl.theta!r}"])


def potential_table(config: RunConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """theta-averaged potential on a rectangular (R, rho) sampling, without and with the field term."""
    pc = config.potential
    R = config.grid.r_max * np.arange(1, pc.samples_r + 1) / pc.samples_r
    rho = config.grid.rho_max * np.arange(1, pc.samples_rho + 1) / pc.samples_rho
    RR, PP = np.meshgrid(R, rho, indexing="ij")
    params = config.potential_params()
    bare = averaged_potential(RR, PP, PotentialParams(params.Z, params.q))
    field = bare + averaged_diamagnetic(PP, params)
    return RR.ravel(), PP.ravel(), bare.ravel(), field.ravel()


def cmd_potential(config: RunConfig, out: str | Path) -> Path:
    R, rho, bare, field = potential_table(config)
    return write_table(out, ["R", "rho", "v_avg", "v_avg_field"], zip(R, rho, bare, field),
                       [f"Z={config.potential_params().Z!r} q={config.potential_params().q!r} "
                        f"beta={config.potential.beta!r}"])
