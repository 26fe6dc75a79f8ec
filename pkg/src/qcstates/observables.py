"""Collision probabilities, dipole couplings and two-step excitation pathways."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .eigen import Spectrum
from .grid import Grid
from .units import ScaleSet, wavelength_for_excitation

GENERIC_POLARIZATION = (math.sqrt(0.5), 0.0, math.sqrt(0.5))
COLLISION_EXCITATION_FLOOR = 5.0


@dataclass(frozen=True, eq=False)
class CollisionReport:
    p_qc: np.ndarray
    eta: float
    collision_state_indices: np.ndarray
    excitations: np.ndarray  # of the classified states
    shell: tuple[float, float]  # (R, rho) where the density is read

    @property
    def any_below_floor(self) -> bool:
        """True if some classified state sits below 5 excitation units."""
        return bool(np.any(self.excitations <= COLLISION_EXCITATION_FLOOR))


@dataclass(frozen=True, eq=False)
class TransitionTable:
    from_index: int
    couplings: np.ndarray
    polarization: tuple[float, float, float]
    energy_differences: np.ndarray


@dataclass(frozen=True, eq=False)
class TwoStepRanking:
    goal: int
    intermediate: np.ndarray
    score: np.ndarray
    de_first: np.ndarray  # E_n - E_0
    de_second: np.ndarray  # E_s - E_n
    wavelength_first: np.ndarray  # m
    wavelength_second: np.ndarray  # m

    def __len__(self) -> int:
        return len(self.intermediate)


@dataclass(frozen=True, eq=False)
class StateSlice:
    index: int
    theta: float
    r_nodes: np.ndarray
    rho_nodes: np.ndarray
    values: np.ndarray  # |Psi| on (R, rho)


def innermost_shell(grid: Grid) -> tuple[float, float]:
    return float(grid.r_nodes[0]), float(grid.rho_nodes[0])


def collision_probability(state: np.ndarray, grid: Grid) -> float:
    """Angular integral of |Psi|^2 on the innermost (R, rho) shell.

    The lattice has no node at R = rho = 0, so the density is read at
    (R_1, rho_1) and Psi = u / rho_1 there.
    """
    u = np.asarray(state).reshape(grid.shape)[0, 0, :]
    return float(np.sum(grid.theta_weights * u * u) / grid.rho_nodes[0] ** 2)


def collision_probabilities(spectrum: Spectrum, grid: Grid) -> np.ndarray:
    U = spectrum.eigenvectors.reshape(*grid.shape, -1)[0, 0]
    return (grid.theta_weights @ (U * U)) / grid.rho_nodes[0] ** 2


def resolve_eta(policy: str | float, p_qc: np.ndarray) -> float:
    """``rel:f`` -> f * max(p_qc); a bare number is an absolute threshold."""
    if isinstance(policy, str) and policy.startswith("rel:"):
        return float(policy[4:]) * float(np.max(p_qc))
    return float(policy)


def classify_collision_states(spectrum: Spectrum, grid: Grid, eta: float) -> CollisionReport:
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    p = collision_probabilities(spectrum, grid)
    idx = np.nonzero(p > eta)[0]
    return CollisionReport(p, float(eta), idx, np.asarray(spectrum.excitation(idx)), innermost_shell(grid))


def momentum_operator(grid: Grid) -> sp.csr_matrix:
    """z-derivative of the light particle acting on u = rho * Psi.

    d/dz = x d/drho + ((1 - x^2)/rho) d/dx on Psi becomes
    x d/drho + (1/rho) [(1 - x^2) d/dx - x] on u, discretised with centred
    differences so that the matrix is exactly antisymmetric.
    """
    n_r, n_rho, n_x = grid.shape
    step = np.ones(n_rho - 1) / (2.0 * grid.drho)
    d_rho = sp.diags([step, -step], [1, -1])
    f = 1.0 - grid.x_nodes**2
    face = (f[:-1] + f[1:]) / (4.0 * grid.dx)
    # (F D + D F)/2 with F = diag(1 - x^2): the skew part of (1 - x^2) d/dx
    ang = sp.diags([face, -face], [1, -1])
    block = sp.kron(d_rho, sp.diags(grid.x_nodes)) + sp.kron(sp.diags(1.0 / grid.rho_nodes), ang)
    return sp.kron(sp.identity(n_r), block, format="csr")


def _z_projection(polarization) -> float:
    eps = np.asarray(polarization, dtype=float)
    norm = float(np.linalg.norm(eps))
    if eps.shape != (3,) or norm == 0:
        raise ValueError(f"polarization must be a nonzero 3-vector, got {polarization}")
    return float(eps[2]) / norm


def _check_index(i: int, spectrum: Spectrum) -> int:
    if not 0 <= int(i) < len(spectrum):
        raise IndexError(f"state {i} outside spectrum of size {len(spectrum)}")
    return int(i)


def coupling_matrix(spectrum: Spectrum, grid: Grid, polarization=GENERIC_POLARIZATION, columns=None) -> np.ndarray:
    """Signed <n| eps.p |m> / (-i) for all n and the requested columns m."""
    X = spectrum.eigenvectors
    cols = X if columns is None else X[:, list(columns)]
    OX = momentum_operator(grid) @ cols
    return _z_projection(polarization) * spectrum.weight * (X.T @ OX)


def momentum_matrix_element(spectrum: Spectrum, grid: Grid, frm: int, to: int, polarization=GENERIC_POLARIZATION):
    frm, to = _check_index(frm, spectrum), _check_index(to, spectrum)
    X = spectrum.eigenvectors
    val = spectrum.weight * float(X[:, to] @ (momentum_operator(grid) @ X[:, frm]))
    return abs(_z_projection(polarization) * val)


def transition_table(spectrum: Spectrum, grid: Grid, frm: int = 0, polarization=GENERIC_POLARIZATION):
    frm = _check_index(frm, spectrum)
    g = np.abs(coupling_matrix(spectrum, grid, polarization, [frm])[:, 0])
    de = spectrum.eigenvalues - spectrum.eigenvalues[frm]
    return TransitionTable(frm, g, tuple(float(c) for c in polarization), de)


def first_order_transition_probability(g: float, matrix_element: float, delta_e: float, omega: float, t: float):
    """g^2 t^2 |M|^2 sinc^2((omega - delta_e) t / 2), sinc(x) = sin(x)/x."""
    if t < 0:
        raise ValueError("time must be non-negative")
    x = (omega - delta_e) * t / 2.0
    return g * g * t * t * matrix_element**2 * np.sinc(x / np.pi) ** 2


def _wavelengths(de: np.ndarray, scales: ScaleSet) -> np.ndarray:
    out = np.full(de.shape, np.inf)
    for i, d in enumerate(np.abs(de)):
        if d > 0:
            out[i] = wavelength_for_excitation(float(d), scales)
    return out


def rank_two_step(energies, from_ground, to_goal, goal: int, scales: ScaleSet) -> TwoStepRanking:
    """Rank intermediates n by |<n|O|0>| * |<s|O|n>|, excluding 0 and the goal."""
    energies = np.asarray(energies, dtype=float)
    n_states = len(energies)
    if not 0 < goal < n_states:
        raise ValueError(f"goal state {goal} must differ from the ground state and lie in [1, {n_states})")
    score = np.abs(np.asarray(from_ground, dtype=float)) * np.abs(np.asarray(to_goal, dtype=float))
    mid = np.array([i for i in range(n_states) if i not in (0, goal)], dtype=int)
    order = mid[np.argsort(-score[mid], kind="stable")]
    de1 = energies[order] - energies[0]
    de2 = energies[goal] - energies[order]
    return TwoStepRanking(goal, order, score[order], de1, de2, _wavelengths(de1, scales), _wavelengths(de2, scales))


def two_step_ranking(
    spectrum: Spectrum, grid: Grid, goal: int, scales: ScaleSet, polarization=GENERIC_POLARIZATION
) -> TwoStepRanking:
    goal = _check_index(goal, spectrum)
    if goal == 0:
        raise ValueError("goal state must differ from the ground state")
    C = coupling_matrix(spectrum, grid, polarization, [0, goal])
    return rank_two_step(spectrum.eigenvalues, C[:, 0], C[:, 1], goal, scales)


def state_slice(spectrum: Spectrum, grid: Grid, index: int, theta: float = math.pi / 2) -> StateSlice:
    index = _check_index(index, spectrum)
    k = int(np.argmin(np.abs(grid.x_nodes - math.cos(theta))))
    u = spectrum.eigenvectors[:, index].reshape(grid.shape)[:, :, k]
    return StateSlice(index, float(math.acos(grid.x_nodes[k])), grid.r_nodes, grid.rho_nodes,
                      np.abs(u) / grid.rho_nodes[None, :])
