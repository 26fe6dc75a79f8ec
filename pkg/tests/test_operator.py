import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from qcstates.grid import Grid, GridSpec, build_grid
from qcstates.operator import (
    AssemblyError,
    angular_laplacian,
    apply,
    assemble,
    frozen_r_operator,
    rayleigh_quotient,
    second_difference,
)
from qcstates.potential import PotentialParams
from qcstates.units import ParticleParams, compute_scales

MU = compute_scales(ParticleParams()).mu
FREE = PotentialParams(Z=0.0, q=0.0)


@pytest.fixture(scope="module")
def toy():
    return assemble(build_grid(GridSpec(3, 3, 2)), PotentialParams(), MU)


@pytest.fixture(scope="module")
def small():
    return assemble(build_grid(GridSpec(6, 5, 4)), PotentialParams(), MU)


def test_toy_dimension_and_exact_symmetry(toy):
    assert toy.n == 18
    assert (toy.matrix != toy.matrix.T).nnz == 0


def test_baseline_exact_symmetry():
    H = assemble(build_grid(GridSpec()), PotentialParams(), MU)
    assert (H.matrix != H.matrix.T).nnz == 0
    assert np.all(np.isfinite(H.matrix.diagonal()))


def test_seven_point_stencil(small):
    rows, cols, _ = small.triplets()
    shape = small.grid.shape
    a = np.array(np.unravel_index(rows, shape))
    b = np.array(np.unravel_index(cols, shape))
    steps = np.abs(a - b).sum(axis=0)
    assert set(steps.tolist()) <= {0, 1}


def test_second_difference_kills_linear_functions():
    h = 0.1
    D = second_difference(20, h)
    f = 3.0 + 2.0 * h * np.arange(1, 21)
    interior = (D @ f)[1:-1]
    assert np.max(np.abs(interior)) <= 1e-10


def test_angular_block_annihilates_constants():
    g = build_grid(GridSpec(n_theta=12))
    A = angular_laplacian(g.x_nodes, g.dx)
    assert np.max(np.abs(A @ np.ones(12))) <= 1e-14
    assert (A != A.T).nnz == 0


def _box_levels(n_rho, k=5):
    # the light radial block for the free box, mu -> 0
    h = 5.0 / (n_rho + 1)
    return sla.eigh_tridiagonal(np.full(n_rho, 2 / h**2), np.full(n_rho - 1, -1 / h**2), select="i", select_range=(0, k - 1))[0]


def test_box_limit_matches_operator_block():
    g = build_grid(GridSpec(n_rho=40, n_theta=4))
    block = frozen_r_operator(g, FREE).toarray()
    radial = -second_difference(40, g.drho).toarray()
    lam, vec = np.linalg.eigh(radial)
    for j in range(5):
        u = np.kron(vec[:, j], np.ones(4))
        np.testing.assert_allclose(block @ u, lam[j] * u, atol=1e-10)


def test_box_limit_values_and_order():
    exact = (np.arange(1, 6) * math.pi / 5.0) ** 2
    errs = [np.abs(_box_levels(n) - exact) for n in (100, 200, 400)]
    for e in errs:
        assert np.all(e / exact < 5e-3)
    h = [5.0 / 101, 5.0 / 201, 5.0 / 401]
    for k in range(5):
        for i in range(2):
            order = math.log(errs[i][k] / errs[i + 1][k]) / math.log(h[i] / h[i + 1])
            assert abs(order - 2.0) <= 0.2


def _united_atom_oracle(n_rho, rho_max=5.0):
    h = rho_max / (n_rho + 1)
    rho = h * np.arange(1, n_rho + 1)
    main = 2.0 / h**2 - 2.0 / rho
    off = -np.ones(n_rho - 1) / h**2
    return np.linalg.eigvalsh(np.diag(main) + np.diag(off, 1) + np.diag(off, -1))[0]


@pytest.mark.parametrize("n_rho", [24, 80])
def test_united_atom_oracle(n_rho):
    g = build_grid(GridSpec(n_rho=n_rho, n_theta=4))
    block = frozen_r_operator(g, PotentialParams(), R=1e-6).toarray()
    lowest = np.linalg.eigvalsh(block)[0]
    oracle = _united_atom_oracle(n_rho)
    assert lowest == pytest.approx(oracle, rel=1e-6)


def test_field_never_lowers_levels():
    g = build_grid(GridSpec(5, 5, 4))
    base = np.linalg.eigvalsh(assemble(g, PotentialParams(), MU).matrix.toarray())
    for beta in (0.01, 0.3, 2.5):
        lifted = np.linalg.eigvalsh(assemble(g, PotentialParams(beta=beta), MU).matrix.toarray())
        assert np.all(lifted >= base - 1e-12)


def test_singular_node_is_reported():
    spec = GridSpec(3, 3, 2, r_max=4.0, rho_max=2.0)
    grid = Grid(spec, np.array([1.0, 2.0, 3.0]), np.array([0.5, 1.0, 1.5]), np.array([-0.5, 1.0]), np.ones(2), 1.0, 0.5, 1.0)
    with pytest.raises(AssemblyError, match=r"\(0, 0, 1\)"):
        assemble(grid, PotentialParams(), MU)


def test_mu_must_be_positive():
    with pytest.raises(ValueError):
        assemble(build_grid(GridSpec(3, 3, 2)), PotentialParams(), 0.0)


def test_apply_zero_and_columns(small):
    assert np.all(apply(small, np.zeros(small.n)) == 0)
    dense = small.matrix.toarray()
    for i in (0, 7, small.n - 1):
        e = np.zeros(small.n)
        e[i] = 1.0
        np.testing.assert_array_equal(apply(small, e), dense[:, i])


def test_apply_dimension_mismatch(small):
    with pytest.raises(ValueError, match="dimension"):
        apply(small, np.ones(small.n + 1))


def test_random_symmetry_probes(small):
    rng = np.random.default_rng(7)
    for _ in range(100):
        v, w = rng.standard_normal((2, small.n))
        lhs = v @ apply(small, w)
        rhs = apply(small, v) @ w
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), np.linalg.norm(v) * np.linalg.norm(apply(small, w)))


def test_apply_is_deterministic(small):
    v = np.random.default_rng(3).standard_normal(small.n)
    np.testing.assert_array_equal(apply(small, v), apply(small, v))


def test_rayleigh_quotient_of_eigenvector(small):
    lam, vec = np.linalg.eigh(small.matrix.toarray())
    assert rayleigh_quotient(small, vec[:, 4]) == pytest.approx(lam[4], abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rayleigh_quotient_variational(seed):
    H = assemble(build_grid(GridSpec(4, 4, 2)), PotentialParams(), MU)
    lam0 = np.linalg.eigvalsh(H.matrix.toarray())[0]
    v = np.random.default_rng(seed).standard_normal(H.n)
    assert rayleigh_quotient(H, v) >= lam0 - 1e-12


def test_rayleigh_constant_vector_above_box_bound():
    H = assemble(build_grid(GridSpec(6, 24, 4)), FREE, MU)
    assert rayleigh_quotient(H, np.ones(H.n)) > (math.pi / 5.0) ** 2


def test_rayleigh_zero_vector(small):
    with pytest.raises(ValueError):
        rayleigh_quotient(small, np.zeros(small.n))


def test_heavy_coefficient_scales_r_stencil():
    g = build_grid(GridSpec(4, 3, 2))
    a = assemble(g, PotentialParams(), MU, heavy_kinetic_coeff=8.0).matrix
    b = assemble(g, PotentialParams(), MU, heavy_kinetic_coeff=16.0).matrix
    stride = 3 * 2
    assert b[0, stride] == pytest.approx(2 * a[0, stride], rel=1e-15)
    assert a[0, stride] == pytest.approx(-8 * MU / g.dr**2, rel=1e-15)
