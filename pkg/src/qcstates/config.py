"""Flat ``section.key=value`` run configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

from .grid import GridSpec
from .observables import GENERIC_POLARIZATION
from .operator import DEFAULT_HEAVY_KINETIC_COEFF
from .potential import PotentialParams
from .units import ParticleParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    method: str = "auto"  # auto | dense | lanczos
    k: int = 400
    tol: float = 1e-12
    max_iter: int = 20000
    seed: int = 12345
    ncv: int = 0  # 0 -> solver default
    sigma: str = "auto"  # auto | <float>
    residual_tol: float = 1e-6
    gram_tol: float = 1e-8
    dense_limit: int = 6000

    def __post_init__(self) -> None:
        if self.method not in ("auto", "dense", "lanczos"):
            raise ValueError(f"eigen.method must be auto, dense or lanczos, got {self.method!r}")
        if self.k < 1:
            raise ValueError(f"eigen.k must be >= 1, got {self.k}")
        if not (self.tol > 0 and self.residual_tol > 0 and self.gram_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.sigma != "auto":
            float(self.sigma)

    @property
    def shift(self) -> float | None:
        return None if self.sigma == "auto" else float(self.sigma)


@dataclass(frozen=True)
class ObservablesConfig:
    eta: str = "rel:0.5"
    polarization: tuple[float, float, float] = GENERIC_POLARIZATION
    goal: str = "auto"

    def __post_init__(self) -> None:
        value = self.eta[4:] if self.eta.startswith("rel:") else self.eta
        if not float(value) > 0:
            raise ValueError(f"observables.eta must be positive, got {self.eta!r}")
        if len(self.polarization) != 3 or not any(self.polarization):
            raise ValueError("observables.polarization must be a nonzero 3-vector")
        if self.goal != "auto" and int(self.goal) < 1:
            raise ValueError("observables.goal must be 'auto' or a positive state index")


@dataclass(frozen=True)
class PotentialConfig:
    beta: float = 0.0
    Z: float | None = None  # overrides particle.Z in the potential only
    q: float | None = None
    samples_r: int = 40
    samples_rho: int = 40

    def __post_init__(self) -> None:
        if self.samples_r < 2 or self.samples_rho < 2:
            raise ValueError("potential sampling needs at least 2 points per axis")


@dataclass(frozen=True)
class RunConfig:
    particle: ParticleParams = field(default_factory=ParticleParams)
    grid: GridSpec = field(default_factory=GridSpec)
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    heavy_kinetic_coeff: float = DEFAULT_HEAVY_KINETIC_COEFF
    eigen: SolverConfig = field(default_factory=SolverConfig)
    observables: ObservablesConfig = field(default_factory=ObservablesConfig)
    output_dir: str = "runs"

    def __post_init__(self) -> None:
        if not self.heavy_kinetic_coeff > 0:
            raise ValueError(f"operator.heavy_kinetic_coeff must be positive, got {self.heavy_kinetic_coeff}")

    def potential_params(self) -> PotentialParams:
        Z = self.particle.Z if self.potential.Z is None else self.potential.Z
        q = self.particle.q if self.potential.q is None else self.potential.q
        return PotentialParams(Z, q, self.potential.beta)


def _polarization(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("expected three comma-separated components")
    return tuple(parts)  # type: ignore[return-value]


def _optional_float(text: str) -> float | None:
    return None if text.lower() in ("", "none") else float(text)


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


KEYS: dict[str, tuple[str, str, Any]] = {
    "particle.Z": ("particle", "Z", _float),
    "particle.q": ("particle", "q", _float),
    "particle.m": ("particle", "m", _float),
    "particle.M": ("particle", "M", _float),
    "grid.n_r": ("grid", "n_r", _int),
    "grid.n_rho": ("grid", "n_rho", _int),
    "grid.n_theta": ("grid", "n_theta", _int),
    "grid.r_max": ("grid", "r_max", _float),
    "grid.rho_max": ("grid", "rho_max", _float),
    "potential.beta": ("potential", "beta", _float),
    "potential.Z": ("potential", "Z", _optional_float),
    "potential.q": ("potential", "q", _optional_float),
    "potential.samples_r": ("potential", "samples_r", _int),
    "potential.samples_rho": ("potential", "samples_rho", _int),
    "operator.heavy_kinetic_coeff": ("", "heavy_kinetic_coeff", _float),
    "eigen.method": ("eigen", "method", str),
    "eigen.k": ("eigen", "k", _int),
    "eigen.tol": ("eigen", "tol", _float),
    "eigen.max_iter": ("eigen", "max_iter", _int),
    "eigen.seed": ("eigen", "seed", _int),
    "eigen.ncv": ("eigen", "ncv", _int),
    "eigen.sigma": ("eigen", "sigma", str),
    "eigen.residual_tol": ("eigen", "residual_tol", _float),
    "eigen.gram_tol": ("eigen", "gram_tol", _float),
    "eigen.dense_limit": ("eigen", "dense_limit", _int),
    "observables.eta": ("observables", "eta", str),
    "observables.polarization": ("observables", "polarization", _polarization),
    "observables.goal": ("observables", "goal", str),
    "output.dir": ("", "output_dir", str),
}
SECTIONS = {key.split(".")[0] for key in KEYS}


def parse_config(text: str) -> RunConfig:
    """Parse ``section.key=value`` lines; ``#`` starts a comment."""
    values: dict[str, dict[str, Any]] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        section, attr, parse = KEYS[key]
        try:
            parsed = parse(value)
        except ValueError as err:
            raise ConfigError(f"line {lineno}: bad value for {key}: {err}") from None
        values.setdefault(section, {})[attr] = parsed
        lines[key] = lineno

    base = RunConfig()
    parts: dict[str, Any] = {}
    for section, attrs in values.items():
        if section == "":
            parts.update(attrs)
            continue
        try:
            parts[section] = replace(getattr(base, section), **attrs)
        except (ValueError, TypeError) as err:
            where = ", ".join(f"{section}.{a} (line {lines[f'{section}.{a}']})" for a in attrs)
            raise ConfigError(f"invalid {where}: {err}") from None
    try:
        config = replace(base, **parts)
        config.potential_params()
    except ValueError as err:
        raise ConfigError(f"invalid configuration: {err}") from None
    return config


def _format(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_items(config: RunConfig) -> list[tuple[str, str]]:
    out = []
    for key, (section, attr, _) in KEYS.items():
        holder = config if section == "" else getattr(config, section)
        out.append((key, _format(getattr(holder, attr))))
    return out


def dump_config(config: RunConfig) -> str:
    return "".join(f"{k}={v}\n" for k, v in config_items(config))
