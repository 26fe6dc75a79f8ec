"""Dimensional analysis for the confined three-body Coulomb system.

Coordinates are scaled by G^2 = Z e^2 m / (2 pi eps0 hbar^2) and energies by
hbar^2 G^4 / (2 m), which turns the light-particle kinetic term into a bare
negative Laplacian and the Coulomb couplings into Z/R and q/r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA 2018
ELEMENTARY_CHARGE = 1.602176634e-19  # C
PLANCK = 6.62607015e-34  # J s
HBAR = PLANCK / (2.0 * math.pi)
SPEED_OF_LIGHT = 299792458.0  # m / s
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F / m
ELECTRON_MASS = 9.1093837015e-31  # kg
PROTON_MASS = 1.67262192369e-27  # kg
DEUTERON_MASS = 3.3435837724e-27  # kg

DIMENSIONS = ("length", "energy", "time")


@dataclass(frozen=True)
class ParticleParams:
    """Charges (in units of e) and masses (kg) of the heavy pair and light particle."""

    Z: float = 1.0
    q: float = 1.0
    m: float = ELECTRON_MASS
    M: float = DEUTERON_MASS

    def __post_init__(self) -> None:
        if not self.Z > 0:
            raise ValueError(f"Z must be positive, got {self.Z}")
        if not self.q >= 0:
            raise ValueError(f"q must be non-negative, got {self.q}")
        if not 0 < self.m < self.M:
            raise ValueError(f"masses must satisfy 0 < m < M, got m={self.m}, M={self.M}")


@dataclass(frozen=True)
class ScaleSet:
    g2_over_Z: float  # 1/m
    length_unit: float  # m
    energy_unit: float  # eV
    time_unit: float  # s
    mu: float
    wavelength_numerator: float  # m, lambda = numerator / delta_e
    Z: float = 1.0

    def unit(self, dimension: str) -> float:
        if dimension == "length":
            return self.length_unit
        if dimension == "energy":
            return self.energy_unit
        if dimension == "time":
            return self.time_unit
        raise ValueError(f"unknown dimension {dimension!r}; expected one of {DIMENSIONS}")


def compute_scales(p: ParticleParams) -> ScaleSet:
    g2_over_Z = ELEMENTARY_CHARGE**2 * p.m / (2.0 * math.pi * VACUUM_PERMITTIVITY * HBAR**2)
    g2 = p.Z * g2_over_Z
    energy_joule = HBAR**2 * g2**2 / (2.0 * p.m)
    return ScaleSet(
        g2_over_Z=g2_over_Z,
        length_unit=1.0 / g2,
        energy_unit=energy_joule / ELEMENTARY_CHARGE,
        time_unit=HBAR / energy_joule,
        mu=p.m / p.M,
        wavelength_numerator=PLANCK * SPEED_OF_LIGHT / energy_joule,
        Z=p.Z,
    )


def convert(value: float, dimension: str, s: ScaleSet) -> float:
    """Dimensionless value -> SI (meters, eV, seconds)."""
    if not math.isfinite(value):
        raise ValueError(f"value must be finite, got {value}")
    return value * s.unit(dimension)


def to_dimensionless(value: float, dimension: str, s: ScaleSet) -> float:
    if not math.isfinite(value):
        raise ValueError(f"value must be finite, got {value}")
    return value / s.unit(dimension)


def wavelength_for_excitation(delta_e: float, s: ScaleSet) -> float:
    """Photon wavelength (m) resonant with a dimensionless excitation energy."""
    if not delta_e > 0:
        raise ValueError(f"excitation energy must be positive, got {delta_e}")
    return s.wavelength_numerator / delta_e


def beta_from_field(b_tesla: float, s: ScaleSet, m: float = ELECTRON_MASS) -> float:
    """Dimensionless diamagnetic strength for a uniform field of ``b_tesla`` along the axis.

    The light-particle term e^2 B^2 rho_perp^2 / (8 m) becomes beta * rho_perp^2
    once rho_perp is measured in length units and the energy in energy units.
    Heavy charges sit on the field axis and do not contribute.
    """
    if b_tesla < 0:
        raise ValueError("field magnitude must be non-negative")
    energy_joule = s.energy_unit * ELEMENTARY_CHARGE
    coeff = ELEMENTARY_CHARGE**2 * b_tesla**2 / (8.0 * m) * s.length_unit**2
    return coeff / energy_joule
