"""Dimensionless Coulomb potential of two heavy charges at z = +-R/2 and one light charge."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SingularityError(ValueError):
    """Potential requested at R = 0 or on top of a heavy charge."""


@dataclass(frozen=True)
class PotentialParams:
    Z: float = 1.0
    q: float = 1.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        # Z = 0 is allowed so the free-box limit can be assembled
        if not self.Z >= 0:
            raise ValueError(f"Z must be non-negative, got {self.Z}")
        if not self.q >= 0:
            raise ValueError(f"q must be non-negative, got {self.q}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")


def potential_x(R, rho, x, p: PotentialParams) -> np.ndarray | float:
    """V(R, rho, x = cos theta); broadcasts over array arguments.

    The two attraction terms are symmetric under x -> -x, so the result is
    bitwise mirror-symmetric.
    """
    R = np.asarray(R, dtype=float)
    rho = np.asarray(rho, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(R <= 0):
        raise SingularityError("heavy-heavy separation R must be positive")
    # completed squares avoid cancellation next to a heavy charge
    axial = 0.5 * R * x
    transverse = 0.25 * R * R * (1.0 - x * x)
    d_minus = (rho - axial) ** 2 + transverse
    d_plus = (rho + axial) ** 2 + transverse
    if np.any(d_minus <= 0) or np.any(d_plus <= 0):
        bad = np.argwhere(np.broadcast_to((d_minus <= 0) | (d_plus <= 0), np.broadcast(R, rho, x).shape))
        raise SingularityError(f"light charge coincides with a heavy charge at index {bad[0].tolist()}")
    v = p.Z / R - p.q * (1.0 / np.sqrt(d_minus) + 1.0 / np.sqrt(d_plus))
    return float(v) if v.ndim == 0 else v


def coulomb_potential(R, rho, theta, p: PotentialParams):
    return potential_x(R, rho, np.cos(theta), p)


def _graded_nodes(n: int, n_panels: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on [0, 1], geometrically graded towards 0."""
    per_panel = max(n // n_panels, 1)
    edges = np.concatenate([[0.0], np.logspace(1 - n_panels, 0, n_panels)])
    t, wt = np.polynomial.legendre.leggauss(per_panel)
    lo, hi = edges[:-1, None], edges[1:, None]
    s = (0.5 * (hi - lo) * (t + 1.0) + lo).ravel()
    ws = (0.5 * (hi - lo) * wt).ravel()
    return s, ws


def averaged_potential(R, rho, p: PotentialParams, n_theta: int = 512, x_nodes=None, weights=None):
    """Theta-average (1/2) int_{-1}^{1} V dx by quadrature.

    With ``x_nodes``/``weights`` given (e.g. a grid's midpoint rule) those are
    used directly. Otherwise the integrand is folded onto x in [0, 1] and
    mapped by x = 1 - s^2, which turns the inverse-square-root peak near
    rho = R/2 into a bounded ramp in s; the ramp can be arbitrarily steep, so
    s is covered by ``n_theta`` graded Gauss-Legendre nodes.
    """
    R = np.asarray(R, dtype=float)[..., None]
    rho = np.asarray(rho, dtype=float)[..., None]
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    if x_nodes is not None:
        vals = potential_x(R, rho, np.asarray(x_nodes, dtype=float), PotentialParams(p.Z, p.q))
        out = 0.5 * np.sum(vals * np.asarray(weights, dtype=float), axis=-1)
        return float(out) if out.ndim == 0 else out
    if np.any(R <= 0):
        raise SingularityError("heavy-heavy separation R must be positive")
    s, ws = _graded_nodes(n_theta)
    s2 = s * s
    # distances^2 at x = 1 - s^2, written to avoid cancellation near the peak
    d_minus = (rho - 0.5 * R) ** 2 + R * rho * s2
    d_plus = (rho + 0.5 * R) ** 2 - R * rho * s2
    attraction = np.sum((1.0 / np.sqrt(d_minus) + 1.0 / np.sqrt(d_plus)) * 2.0 * s * ws, axis=-1)
    out = p.Z / R[..., 0] - p.q * attraction
    return float(out) if out.ndim == 0 else out


def averaged_potential_closed_form(R, rho, p: PotentialParams):
    """Shell-theorem form: Z/R - 2q/rho outside rho = R/2, Z/R - 4q/R inside."""
    R = np.asarray(R, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(R <= 0) or np.any(rho <= 0):
        raise ValueError("R and rho must be positive")
    out = p.Z / R - 2.0 * p.q / np.maximum(rho, 0.5 * R)
    return float(out) if out.ndim == 0 else out


def diamagnetic_term(rho, theta, p: PotentialParams):
    """beta * rho^2 sin^2(theta): uniform field along the heavy-particle axis."""
    out = p.beta * np.asarray(rho, dtype=float) ** 2 * np.sin(theta) ** 2
    return float(out) if np.ndim(out) == 0 else out


def diamagnetic_x(rho, x, p: PotentialParams):
    out = p.beta * np.asarray(rho, dtype=float) ** 2 * (1.0 - np.asarray(x, dtype=float) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def averaged_diamagnetic(rho, p: PotentialParams, n_theta: int = 512):
    """Theta-average of the field term, by the same folded quadrature as the potential."""
    s, ws = _graded_nodes(n_theta)
    x = 1.0 - s * s
    mean = np.sum(diamagnetic_x(1.0, x, PotentialParams(0.0, 0.0, 1.0)) * 2.0 * s * ws)
    return p.beta * np.asarray(rho, dtype=float) ** 2 * mean
