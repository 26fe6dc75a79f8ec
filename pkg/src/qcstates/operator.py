"""Sparse finite-difference Hamiltonian on the (R, rho, cos theta) lattice.

The light-particle wave function is carried as u = rho * Psi. In that variable
the l = 0 Hamiltonian reads

    H u = -c mu d2u/dR2 - d2u/drho2 - (1/rho^2) d/dx[(1 - x^2) du/dx] + V u

with c = 8 by default, and it is symmetric in the flat measure dR drho dx, so
the discrete matrix is a plain symmetric one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import Grid
from .potential import PotentialParams, SingularityError, diamagnetic_x, potential_x

DEFAULT_HEAVY_KINETIC_COEFF = 8.0


class AssemblyError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class HamiltonianOperator:
    matrix: sp.csr_matrix
    grid: Grid
    pparams: PotentialParams
    mu: float
    heavy_kinetic_coeff: float = DEFAULT_HEAVY_KINETIC_COEFF
    potential_diag: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def weight(self) -> float:
        """Uniform integration weight dR * drho * dx of each node."""
        return self.grid.dr * self.grid.drho * self.grid.dx

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        coo = self.matrix.tocoo()
        return coo.row, coo.col, coo.data


def second_difference(n: int, h: float) -> sp.csr_matrix:
    """Dirichlet 3-point d2/dx2 on n interior nodes."""
    off = np.ones(n - 1) / h**2
    return sp.diags([off, -2.0 * np.ones(n) / h**2, off], [-1, 0, 1], format="csr")


def angular_laplacian(x_nodes: np.ndarray, dx: float) -> sp.csr_matrix:
    """Flux-form d/dx[(1 - x^2) d/dx] on cell-centred nodes.

    Face factors vanish at x = +-1, so no boundary condition is needed and the
    constant vector is in the kernel.
    """
    n = len(x_nodes)
    faces = -1.0 + dx * np.arange(1, n)
    flux = (1.0 - faces**2) / dx**2
    diag = np.zeros(n)
    diag[:-1] -= flux
    diag[1:] -= flux
    return sp.diags([flux, diag, flux], [-1, 0, 1], format="csr")


def _light_kinetic(grid: Grid) -> sp.csr_matrix:
    n_rho, n_x = len(grid.rho_nodes), len(grid.x_nodes)
    radial = -second_difference(n_rho, grid.drho)
    angular = -angular_laplacian(grid.x_nodes, grid.dx)
    inv_rho2 = sp.diags(1.0 / grid.rho_nodes**2)
    return sp.kron(radial, sp.identity(n_x), format="csr") + sp.kron(inv_rho2, angular, format="csr")


def _diagonal(R, rho, x, pparams: PotentialParams, shape) -> np.ndarray:
    try:
        v = potential_x(R, rho, x, pparams)
    except SingularityError as err:
        d2 = np.broadcast_to(0.25 * R * R + rho * rho - np.abs(R * rho * x), shape)
        bad = np.unravel_index(int(np.argmin(d2)), shape)
        raise AssemblyError(f"singular potential at node {tuple(int(i) for i in bad)}") from err
    return np.broadcast_to(v + diamagnetic_x(rho, x, pparams), shape).reshape(-1)


def assemble(
    grid: Grid,
    pparams: PotentialParams,
    mu: float,
    heavy_kinetic_coeff: float = DEFAULT_HEAVY_KINETIC_COEFF,
) -> HamiltonianOperator:
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    n_r, n_rho, n_x = grid.shape
    heavy = -heavy_kinetic_coeff * mu * second_difference(n_r, grid.dr)
    kinetic = sp.kron(heavy, sp.identity(n_rho * n_x), format="csr") + sp.kron(
        sp.identity(n_r), _light_kinetic(grid), format="csr"
    )
    R, rho, x = grid.mesh()
    diag = _diagonal(R, rho, x, pparams, grid.shape)
    matrix = (kinetic + sp.diags(diag)).tocsr()
    matrix.sum_duplicates()
    matrix.sort_indices()
    return HamiltonianOperator(matrix, grid, pparams, mu, heavy_kinetic_coeff, diag)


def frozen_r_operator(
    grid: Grid, pparams: PotentialParams, R: float | None = None, include_repulsion: bool = False
) -> sp.csr_matrix:
    """Light-particle block on the (rho, x) plane with R clamped.

    ``R`` defaults to the first R node. The heavy-heavy repulsion Z/R is left
    out unless asked for, since it is a constant shift of the block.
    """
    R = grid.r_nodes[0] if R is None else float(R)
    rho, x = np.meshgrid(grid.rho_nodes, grid.x_nodes, indexing="ij")
    p = pparams if include_repulsion else PotentialParams(0.0, pparams.q, pparams.beta)
    diag = _diagonal(np.full_like(rho, R), rho, x, p, rho.shape)
    return (_light_kinetic(grid) + sp.diags(diag)).tocsr()


def apply(H: HamiltonianOperator, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (H.n,):
        raise ValueError(f"vector of shape {v.shape} does not match operator dimension {H.n}")
    return H.matrix @ v


def rayleigh_quotient(H: HamiltonianOperator, v: np.ndarray) -> float:
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    if vv == 0.0:
        raise ValueError("Rayleigh quotient of the zero vector")
    # uniform node weights cancel between numerator and denominator
    return float(v @ apply(H, v)) / vv
