"""Dense and Lanczos eigensolvers returning grid-normalised eigenpairs."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .operator import HamiltonianOperator

log = logging.getLogger(__name__)

DEFAULT_DENSE_LIMIT = 6000
PEAK_TIE = 1e-6


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # (n, k), orthonormal in the grid measure
    residual_norms: np.ndarray
    weight: float = 1.0
    method: str = "dense"
    converged: bool = True
    metadata: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def excitation(self, i) -> np.ndarray | float:
        return self.eigenvalues[i] - self.eigenvalues[0]


@dataclass(frozen=True)
class LanczosOptions:
    max_iter: int = 20000  # total operator applications
    tol: float = 1e-12  # relative Ritz residual in the (transformed) Krylov problem
    seed: int = 12345
    ncv: int | None = None  # basis size; default max(2k + 1, k + 32)
    sigma: float | None = None  # shift for shift-invert; None -> regular mode
    which: str = "SA"  # SA: smallest algebraic, LM: nearest sigma (shift-invert only)


@dataclass(frozen=True)
class VerifyReport:
    residuals: np.ndarray
    gram_deviation: float
    residual_tol: float
    gram_tol: float

    @property
    def failures(self) -> list[str]:
        out = [f"state {i}: residual {r:.3e}" for i, r in enumerate(self.residuals) if not r <= self.residual_tol]
        if not self.gram_deviation <= self.gram_tol:
            out.append(f"gram deviation {self.gram_deviation:.3e}")
        return out

    @property
    def passed(self) -> bool:
        return not self.failures


def _unpack(H) -> tuple[Any, float]:
    if isinstance(H, HamiltonianOperator):
        return H.matrix, H.weight
    if sp.issparse(H):
        return H.tocsr(), 1.0
    return np.asarray(H, dtype=float), 1.0


def residual_norms(A, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """||A v - lambda v|| / (max(|lambda|, 1) ||v||) per column."""
    if vectors.shape[1] == 0:
        return np.zeros(0)
    r = A @ vectors - vectors * values
    scale = np.maximum(np.abs(values), 1.0) * np.linalg.norm(vectors, axis=0)
    return np.linalg.norm(r, axis=0) / scale


def _canonicalise(values: np.ndarray, vectors: np.ndarray, weight: float) -> tuple[np.ndarray, np.ndarray]:
    """Ascending order, largest component positive, unit norm in the grid measure.

    Components within ``PEAK_TIE`` of the largest magnitude count as tied and
    the lowest flat index among them decides the sign.
    """
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    mag = np.abs(vectors)
    # mirror-odd states have exact +- pairs of peaks: take the first near-maximal one
    peak = np.argmax(mag >= (1.0 - PEAK_TIE) * mag.max(axis=0), axis=0)
    signs = np.sign(vectors[peak, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors = vectors * signs
    order = np.argsort(values, kind="stable")
    values, vectors = values[order], vectors[:, order]
    # near-degenerate neighbours: break the tie on the first differing component
    for i in range(len(values) - 1):
        gap = values[i + 1] - values[i]
        if gap < 1e-10 * max(abs(values[i]), 1.0):
            diff = np.nonzero(vectors[:, i] != vectors[:, i + 1])[0]
            if len(diff) and vectors[diff[0], i] < vectors[diff[0], i + 1]:
                vectors[:, [i, i + 1]] = vectors[:, [i + 1, i]]
                values[[i, i + 1]] = values[[i + 1, i]]
    return values, vectors / np.sqrt(weight)


def dense_spectrum(H, dense_limit: int = DEFAULT_DENSE_LIMIT) -> Spectrum:
    A, weight = _unpack(H)
    n = A.shape[0]
    if n > dense_limit:
        raise SolverError(f"dimension {n} exceeds the dense limit {dense_limit}; use lanczos_spectrum")
    t0 = time.perf_counter()
    dense = A.toarray() if sp.issparse(A) else A
    values, vectors = la.eigh(dense)
    values, vectors = _canonicalise(values, vectors, weight)
    res = residual_norms(A, values, vectors)
    meta = {"method": "dense", "n": n, "seconds": time.perf_counter() - t0}
    return Spectrum(values, vectors, res, weight, "dense", True, meta)


def lower_bound_shift(H, margin: float = 1.0) -> float:
    """A shift strictly below the spectrum.

    For an assembled Hamiltonian the kinetic part is positive definite, so the
    smallest potential value bounds the spectrum from below; otherwise the
    Gershgorin bound is used.
    """
    if isinstance(H, HamiltonianOperator):
        floor = float(np.min(H.potential_diag))
    else:
        A, _ = _unpack(H)
        A = sp.csr_matrix(A)
        radius = np.asarray(abs(A).sum(axis=1)).ravel() - np.abs(A.diagonal())
        floor = float(np.min(A.diagonal() - radius))
    return floor - margin


def _thick_restart_lanczos(op, n: int, k: int, opts: LanczosOptions, key):
    """Thick-restart Lanczos with full (twice-iterated) Gram-Schmidt.

    ``op`` is the linear map whose extremal Ritz values are wanted, ``key`` maps
    Ritz values to a sort key (wanted first). Returns (theta, X, info).
    """
    m = min(opts.ncv or max(2 * k + 1, k + 32), n)
    if m <= k:
        raise SolverError(f"basis size {m} must exceed the number of wanted pairs {k}")
    rng = np.random.default_rng(opts.seed)
    V = np.zeros((n, m + 1))
    T = np.zeros((m + 1, m + 1))
    v = rng.standard_normal(n)
    V[:, 0] = v / np.linalg.norm(v)
    kept = 0
    matvecs = 0
    restarts = 0
    breakdowns = 0
    beta = 0.0
    converged = False
    theta = np.zeros(0)
    Y = np.zeros((m, 0))
    while True:
        for j in range(kept, m):
            w = op(V[:, j])
            matvecs += 1
            basis = V[:, : j + 1]
            h = basis.T @ w
            w -= basis @ h
            h2 = basis.T @ w
            w -= basis @ h2
            h += h2
            T[: j + 1, j] = h
            beta = float(np.linalg.norm(w))
            if beta <= 1e-13 * max(float(np.max(np.abs(h))), 1e-300):
                # invariant subspace: continue from a fresh seeded direction
                breakdowns += 1
                w = rng.standard_normal(n)
                for _ in range(2):
                    w -= basis @ (basis.T @ w)
                V[:, j + 1] = w / np.linalg.norm(w)
                beta = 0.0
            else:
                V[:, j + 1] = w / beta
            T[j + 1, j] = beta
        S = np.triu(T[:m, :m])
        S = S + np.triu(S, 1).T
        theta, Y = la.eigh(S)
        order = np.argsort(key(theta), kind="stable")
        theta, Y = theta[order], Y[:, order]
        res = np.abs(beta * Y[m - 1, :])
        good = res[:k] <= opts.tol * np.maximum(np.abs(theta[:k]), 1e-300)
        if np.all(good):
            converged = True
            break
        if matvecs >= opts.max_iter:
            break
        # keep the wanted block plus a buffer of the next Ritz vectors
        kept = min(m - 1, k + (m - k) // 2)
        V[:, :kept] = V[:, :m] @ Y[:, :kept]
        V[:, kept] = V[:, m]
        T[:] = 0.0
        T[np.arange(kept), np.arange(kept)] = theta[:kept]
        restarts += 1
    X = V[:, :m] @ Y[:, :k]
    info = {"matvecs": matvecs, "restarts": restarts, "breakdowns": breakdowns, "ncv": m, "converged": converged}
    return theta[:k], X, info


def lanczos_spectrum(H, k: int, opts: LanczosOptions | None = None) -> Spectrum:
    """The k lowest eigenpairs (or the k nearest ``opts.sigma`` with which='LM').

    With ``opts.sigma`` set the Krylov space is built for (H - sigma)^-1 via a
    sparse LU factorisation. For the lowest states the shift must lie below
    the spectrum; see :func:`lower_bound_shift`.
    """
    opts = opts or LanczosOptions()
    A, weight = _unpack(H)
    n = A.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    t0 = time.perf_counter()
    if opts.sigma is None:
        if opts.which != "SA":
            raise ValueError("which='LM' requires a shift")

        def op(x):
            return A @ x

        theta, X, info = _thick_restart_lanczos(op, n, k, opts, key=lambda t: t)
        values = theta
    else:
        shifted = sp.csc_matrix(A - opts.sigma * sp.identity(n)) if sp.issparse(A) else sp.csc_matrix(
            A - opts.sigma * np.eye(n)
        )
        lu = sla.splu(shifted)
        if opts.which == "SA":
            # sigma below the spectrum: lowest lambda <-> largest positive theta
            key = lambda t: -t  # noqa: E731
        elif opts.which == "LM":
            key = lambda t: -np.abs(t)  # noqa: E731
        else:
            raise ValueError(f"unknown selector {opts.which!r}")
        theta, X, info = _thick_restart_lanczos(lu.solve, n, k, opts, key=key)
        values = opts.sigma + 1.0 / theta
    # Rayleigh quotients on the original operator
    X = X / np.linalg.norm(X, axis=0)
    values = np.einsum("ij,ij->j", X, A @ X)
    values, X = _canonicalise(values, X, weight)
    res = residual_norms(A, values, X)
    meta = {
        "method": "lanczos" if opts.sigma is None else "lanczos-shift-invert",
        "n": n,
        "k": k,
        "seed": opts.seed,
        "tol": opts.tol,
        "sigma": opts.sigma,
        "which": opts.which,
        "seconds": time.perf_counter() - t0,
        **info,
    }
    if not info["converged"]:
        log.warning("Lanczos stopped after %d operator applications without full convergence", info["matvecs"])
    return Spectrum(values, X, res, weight, meta["method"], info["converged"], meta)


def auto_shift(H, opts: LanczosOptions | None = None, gap: float = 1.0) -> float:
    """Shift ``gap`` below the ground state, located by a one-pair shift-invert solve."""
    opts = opts or LanczosOptions()
    floor = lower_bound_shift(H)
    probe = lanczos_spectrum(H, 1, LanczosOptions(opts.max_iter, opts.tol, opts.seed, None, floor, "SA"))
    return probe.ground_energy - gap


def solve(H, k: int, method: str = "auto", opts: LanczosOptions | None = None,
          dense_limit: int = DEFAULT_DENSE_LIMIT) -> Spectrum:
    """Lowest k eigenpairs by the dense solver or shift-invert Lanczos.

    ``auto`` picks dense up to ``dense_limit`` unknowns. When Lanczos runs
    without an explicit shift it is placed one unit below the ground state.
    """
    A, _ = _unpack(H)
    n = A.shape[0]
    if method == "auto":
        method = "dense" if n <= dense_limit else "lanczos"
    if method == "dense":
        full = dense_spectrum(H, dense_limit)
        k = min(k, n)
        return Spectrum(full.eigenvalues[:k], full.eigenvectors[:, :k], full.residual_norms[:k],
                        full.weight, "dense", True, full.metadata | {"k": k})
    if method != "lanczos":
        raise ValueError(f"unknown eigensolver {method!r}")
    opts = opts or LanczosOptions()
    if opts.sigma is None:
        opts = LanczosOptions(opts.max_iter, opts.tol, opts.seed, opts.ncv, auto_shift(H, opts), "SA")
    return lanczos_spectrum(H, k, opts)


def verify(spectrum: Spectrum, H, residual_tol: float = 1e-6, gram_tol: float = 1e-8) -> VerifyReport:
    A, weight = _unpack(H)
    X = spectrum.eigenvectors
    if X.shape[1] == 0:
        return VerifyReport(np.zeros(0), 0.0, residual_tol, gram_tol)
    res = residual_norms(A, spectrum.eigenvalues, X)
    gram = weight * (X.T @ X)
    dev = float(np.max(np.abs(gram - np.eye(X.shape[1]))))
    return VerifyReport(res, dev, residual_tol, gram_tol)
