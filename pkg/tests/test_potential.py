import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcstates.grid import GridSpec, build_grid
from qcstates.potential import (
    PotentialParams,
    SingularityError,
    averaged_diamagnetic,
    averaged_potential,
    averaged_potential_closed_form,
    coulomb_potential,
    diamagnetic_term,
    potential_x,
)

P = PotentialParams()
positive = st.floats(min_value=1e-3, max_value=20.0)


def test_potential_hand_value():
    assert coulomb_potential(1.0, 1.0, math.pi / 2, P) == pytest.approx(1 - 2 / math.sqrt(1.25), rel=1e-15)


def test_potential_far_field():
    assert coulomb_potential(2.0, 100.0, 0.0, P) == pytest.approx(0.48, abs=1e-4)


@pytest.mark.parametrize("R, rho, theta", [(1.0, 0.5, 0.0), (1.0, 0.5, math.pi), (0.0, 1.0, 1.0)])
def test_singular_points(R, rho, theta):
    with pytest.raises(SingularityError):
        coulomb_potential(R, rho, theta, P)


def test_singularity_is_not_overflow():
    # a tiny but nonzero distance is fine and finite
    assert math.isfinite(potential_x(1.0, 0.5 + 1e-12, 1.0, P))


@given(positive, positive, st.floats(min_value=-0.999, max_value=0.999))
def test_mirror_symmetry_exact(R, rho, x):
    assert potential_x(R, rho, x, P) == potential_x(R, rho, -x, P)


@given(positive, positive, st.floats(min_value=0.01, max_value=math.pi - 0.01))
def test_mirror_symmetry_in_theta(R, rho, theta):
    a = coulomb_potential(R, rho, theta, P)
    b = coulomb_potential(R, rho, math.pi - theta, P)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@given(st.floats(min_value=0.01, max_value=20.0), st.floats(min_value=-0.999, max_value=0.999))
def test_negative_on_rho_equals_R(R, x):
    assert potential_x(R, R, x, P) < 0


@pytest.mark.parametrize("R, rho, expected", [(2, 2, -0.5), (2, 0.5, -1.5), (4, 1, -0.75), (2, 1, -1.5)])
def test_averaged_examples(R, rho, expected):
    assert averaged_potential(R, rho, P) == pytest.approx(expected, abs=1e-12)
    assert averaged_potential_closed_form(R, rho, P) == pytest.approx(expected, abs=1e-15)


def test_closed_form_continuous_at_shell():
    inside = averaged_potential_closed_form(2.0, 1.0 - 1e-12, P)
    outside = averaged_potential_closed_form(2.0, 1.0 + 1e-12, P)
    assert inside == pytest.approx(outside, abs=1e-10)


@given(st.floats(min_value=0.01, max_value=20.0), st.floats(min_value=0.0, max_value=0.999))
def test_attractive_below_half_line(R, frac):
    rho = max(frac * R / 2, 1e-6)
    assert averaged_potential_closed_form(R, rho, P) < 0
    assert averaged_potential(R, rho, P) < 0


@given(positive, positive)
def test_quadrature_matches_closed_form(R, rho):
    assert averaged_potential(R, rho, P) == pytest.approx(averaged_potential_closed_form(R, rho, P), abs=1e-9)


def _midpoint_error(R, rho, n):
    g = build_grid(GridSpec(n_theta=n))
    approx = averaged_potential(R, rho, P, x_nodes=g.x_nodes, weights=g.theta_weights)
    return abs(approx - averaged_potential_closed_form(R, rho, P))


def _orders(R, rho, ns=(128, 256, 512)):
    e = [_midpoint_error(R, rho, n) for n in ns]
    return [math.log2(e[i] / e[i + 1]) for i in range(len(e) - 1)]


@pytest.mark.parametrize("R, rho", [(4.0, 2.3), (6.0, 2.8), (2.0, 1.2), (1.0, 0.3), (8.0, 1.0)])
def test_grid_quadrature_converges_first_order_near_kink(R, rho):
    assert min(_orders(R, rho)) >= 1.0


@pytest.mark.parametrize("R, rho", [(2.0, 3.5), (1.0, 2.0), (0.5, 4.0), (3.0, 4.9)])
def test_grid_quadrature_second_order_far_from_kink(R, rho):
    assert rho > R / 2 + 1
    # asymptotic midpoint order, reported to two decimals
    assert round(_orders(R, rho)[-1], 2) >= 2.0


def test_diamagnetic_examples():
    assert diamagnetic_term(3.0, 1.0, PotentialParams(beta=0.0)) == 0.0
    assert diamagnetic_term(2.0, math.pi / 2, PotentialParams(beta=1.0)) == pytest.approx(4.0)
    assert diamagnetic_term(2.0, 0.0, PotentialParams(beta=1.0)) == 0.0


@given(st.floats(0, 10), st.floats(0, 10), st.floats(0, math.pi))
def test_diamagnetic_nonnegative(beta, rho, theta):
    assert diamagnetic_term(rho, theta, PotentialParams(beta=beta)) >= 0


def test_diamagnetic_average_is_two_thirds():
    # <sin^2 theta> over the sphere = 2/3
    assert averaged_diamagnetic(1.5, PotentialParams(beta=2.0)) == pytest.approx(2.0 * 1.5**2 * 2 / 3, rel=1e-12)


@pytest.mark.parametrize("kwargs", [{"Z": -1}, {"q": -0.5}, {"beta": -1e-3}])
def test_params_invariants(kwargs):
    with pytest.raises(ValueError):
        PotentialParams(**kwargs)


def test_vectorised_matches_scalar():
    R = np.array([0.5, 1.0, 3.0])
    rho = np.array([2.0, 0.2, 1.7])
    vec = averaged_potential(R, rho, P)
    for i in range(3):
        assert vec[i] == pytest.approx(averaged_potential(R[i], rho[i], P), rel=1e-14)
