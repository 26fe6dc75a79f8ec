"""Uniform (R, rho, cos theta) lattice with Dirichlet walls and flat indexing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    n_r: int = 24
    n_rho: int = 24
    n_theta: int = 16
    r_max: float = 10.0
    rho_max: float = 5.0

    def __post_init__(self) -> None:
        # two angular cells already resolve the l = 0 sector
        for name, least in (("n_r", 3), ("n_rho", 3), ("n_theta", 2)):
            value = getattr(self, name)
            if int(value) != value or value < least:
                raise ValueError(f"grid.{name} must be an integer >= {least}, got {value}")
        for name in ("r_max", "rho_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"grid.{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True, eq=False)
class Grid:
    spec: GridSpec
    r_nodes: np.ndarray
    rho_nodes: np.ndarray
    x_nodes: np.ndarray
    theta_weights: np.ndarray
    dr: float
    drho: float
    dx: float
    shape: tuple[int, int, int] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "shape", (len(self.r_nodes), len(self.rho_nodes), len(self.x_nodes)))

    @property
    def n(self) -> int:
        n_r, n_rho, n_x = self.shape
        return n_r * n_rho * n_x

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcast (R, rho, x) arrays of shape ``self.shape``."""
        return np.meshgrid(self.r_nodes, self.rho_nodes, self.x_nodes, indexing="ij")

    def weights(self) -> np.ndarray:
        """Integration weight of every node, flattened."""
        w = self.dr * self.drho * np.broadcast_to(self.theta_weights, self.shape)
        return np.ascontiguousarray(w).reshape(-1)


def build_grid(spec: GridSpec) -> Grid:
    dr = spec.r_max / (spec.n_r + 1)
    drho = spec.rho_max / (spec.n_rho + 1)
    dx = 2.0 / spec.n_theta
    r_nodes = dr * np.arange(1, spec.n_r + 1)
    rho_nodes = drho * np.arange(1, spec.n_rho + 1)
    x_nodes = -1.0 + dx * (np.arange(spec.n_theta) + 0.5)
    weights = np.full(spec.n_theta, dx)
    for arr in (r_nodes, rho_nodes, x_nodes, weights):
        arr.setflags(write=False)
    return Grid(spec, r_nodes, rho_nodes, x_nodes, weights, dr, drho, dx)


def flat_index(i_r: int, i_rho: int, i_x: int, grid: Grid) -> int:
    n_r, n_rho, n_x = grid.shape
    if not (0 <= i_r < n_r and 0 <= i_rho < n_rho and 0 <= i_x < n_x):
        raise IndexError(f"node ({i_r}, {i_rho}, {i_x}) outside grid of shape {grid.shape}")
    return (i_r * n_rho + i_rho) * n_x + i_x


def unflatten(k: int, grid: Grid) -> tuple[int, int, int]:
    if not 0 <= k < grid.n:
        raise IndexError(f"flat index {k} outside [0, {grid.n})")
    _, n_rho, n_x = grid.shape
    i_r, rest = divmod(k, n_rho * n_x)
    i_rho, i_x = divmod(rest, n_x)
    return i_r, i_rho, i_x


def integration_weight(i_r: int, i_rho: int, i_x: int, grid: Grid) -> float:
    flat_index(i_r, i_rho, i_x, grid)
    return grid.dr * grid.drho * float(grid.theta_weights[i_x])
