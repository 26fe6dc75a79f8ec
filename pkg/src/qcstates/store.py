"""Run directories: metadata, eigenvalues, raw eigenvectors and observable tables.

Layout of a run directory::

    metadata.txt      flat key=value lines (config echo, version, solver info, timings)
    eigenvalues.csv   index,eigenvalue,residual
    eigenvectors.bin  b"TCV1", u32 rows, u32 cols, u32 reserved, then rows*cols
                      little-endian float64 in column-major order
    *.csv             observable tables
"""

from __future__ import annotations

import csv
import math
import struct
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .config import SECTIONS, RunConfig, dump_config, parse_config
from .eigen import Spectrum

MAGIC = b"TCV1"
HEADER = struct.Struct("<4sIII")


class StoreError(FileNotFoundError):
    pass


def fmt(value: Any) -> str:
    """Shortest round-trip text for floats; everything else via str."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer, np.bool_)):
        return str(value.item())
    return str(value)


def new_run_dir(path: str | Path) -> Path:
    """Create ``path``; if it exists, append a timestamp suffix instead of overwriting."""
    path = Path(path)
    candidate = path
    while candidate.exists():
        stamp = time.strftime("%Y%m%d-%H%M%S")
        candidate = path.with_name(f"{path.name}-{stamp}-{time.perf_counter_ns() % 1_000_000:06d}")
    candidate.mkdir(parents=True)
    return candidate


def write_eigenvectors(path: str | Path, X: np.ndarray) -> None:
    X = np.asarray(X, dtype="<f8")
    rows, cols = X.shape
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, rows, cols, 0))
        fh.write(np.asfortranarray(X).tobytes(order="F"))


def read_eigenvectors(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, rows, cols, _ = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    payload = raw[HEADER.size:]
    if len(payload) != rows * cols * 8:
        raise ValueError(f"{path}: header says {rows}x{cols} but payload holds {len(payload)} bytes")
    return np.frombuffer(payload, dtype="<f8").reshape((rows, cols), order="F").astype(float)


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]],
                comments: Sequence[str] = ()) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def write_metadata(path: str | Path, config: RunConfig, extra: dict[str, Any]) -> None:
    lines = [f"version={__version__}\n", dump_config(config)]
    lines += [f"{k}={fmt(v)}\n" for k, v in extra.items()]
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_metadata(path: str | Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            out[k] = v
    return out


def config_from_metadata(meta: dict[str, str]) -> RunConfig:
    text = "".join(f"{k}={v}\n" for k, v in meta.items() if k.split(".")[0] in SECTIONS)
    return parse_config(text)


def save_spectrum(run_dir: Path, config: RunConfig, spectrum: Spectrum, extra: dict[str, Any]) -> None:
    rows = zip(range(len(spectrum)), spectrum.eigenvalues, spectrum.residual_norms)
    write_table(run_dir / "eigenvalues.csv", ["index", "eigenvalue", "residual"], rows)
    write_eigenvectors(run_dir / "eigenvectors.bin", spectrum.eigenvectors)
    solver = {f"solver.{k}": v for k, v in spectrum.metadata.items() if v is not None}
    write_metadata(run_dir / "metadata.txt", config,
                   {"solver.weight": spectrum.weight, "solver.converged": spectrum.converged, **solver, **extra})


@dataclass(frozen=True, eq=False)
class LoadedRun:
    path: Path
    config: RunConfig
    spectrum: Spectrum
    metadata: dict[str, str]


def load_run(path: str | Path) -> LoadedRun:
    path = Path(path)
    needed = [path / "metadata.txt", path / "eigenvalues.csv", path / "eigenvectors.bin"]
    missing = [p.name for p in needed if not p.exists()]
    if missing:
        raise StoreError(f"{path} is not a result store (missing {', '.join(missing)})")
    meta = read_metadata(path / "metadata.txt")
    config = config_from_metadata(meta)
    with open(path / "eigenvalues.csv", encoding="utf-8") as fh:
        table = list(csv.DictReader(fh))
    values = np.array([float(r["eigenvalue"]) for r in table])
    residuals = np.array([float(r["residual"]) for r in table])
    X = read_eigenvectors(path / "eigenvectors.bin")
    if X.shape[1] != len(values):
        raise ValueError(f"{path}: {X.shape[1]} eigenvectors but {len(values)} eigenvalues")
    weight = float(meta.get("solver.weight", "nan"))
    if math.isnan(weight):
        raise ValueError(f"{path}: metadata lacks solver.weight")
    spectrum = Spectrum(values, X, residuals, weight, meta.get("solver.method", "unknown"),
                        meta.get("solver.converged", "True") == "True",
                        {k[7:]: v for k, v in meta.items() if k.startswith("solver.")})
    return LoadedRun(path, config, spectrum, meta)
