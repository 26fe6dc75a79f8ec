import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcstates.config import ConfigError, RunConfig, dump_config, parse_config
from qcstates.units import DEUTERON_MASS, ELECTRON_MASS


def test_empty_gives_defaults():
    c = parse_config("")
    assert c == RunConfig()
    assert (c.particle.Z, c.particle.q) == (1.0, 1.0)
    assert (c.particle.m, c.particle.M) == (ELECTRON_MASS, DEUTERON_MASS)
    assert (c.grid.rho_max, c.grid.r_max) == (5.0, 10.0)
    assert (c.grid.n_r, c.grid.n_rho, c.grid.n_theta) == (24, 24, 16)
    assert c.eigen.k == 400 and c.heavy_kinetic_coeff == 8.0


def test_comments_and_blank_lines():
    c = parse_config("# header\n\ngrid.n_r = 12  # fewer R nodes\n")
    assert c.grid.n_r == 12


def test_negative_count_names_key():
    with pytest.raises(ConfigError, match=r"grid\.n_r.*line 2"):
        parse_config("grid.n_rho=10\ngrid.n_r=-1\n")


def test_beta_enables_field():
    c = parse_config("potential.beta=2.5")
    assert c.potential.beta == 2.5
    assert c.potential_params().beta == 2.5


def test_unknown_key_has_line_number():
    with pytest.raises(ConfigError, match=r"line 3: unknown key 'grid\.n_phi'"):
        parse_config("grid.n_r=4\n\ngrid.n_phi=3\n")


@pytest.mark.parametrize("line", ["grid.n_r=abc", "grid.n_r=2.5", "eigen.tol=nan", "observables.polarization=1,2"])
def test_type_mismatch(line):
    with pytest.raises(ConfigError, match="line 1"):
        parse_config(line)


@pytest.mark.parametrize(
    "line", ["particle.Z=0", "eigen.method=arpack", "observables.eta=rel:-1", "operator.heavy_kinetic_coeff=0",
             "observables.goal=0", "particle.m=1.0"]
)
def test_invariant_violations(line):
    with pytest.raises(ConfigError):
        parse_config(line)


def test_missing_equals_sign():
    with pytest.raises(ConfigError, match="key=value"):
        parse_config("grid.n_r 5")


def test_potential_overrides():
    c = parse_config("potential.q=0\npotential.Z=0")
    p = c.potential_params()
    assert (p.Z, p.q) == (0.0, 0.0)
    assert c.particle.Z == 1.0


def test_echo_of_defaults_round_trips():
    c = RunConfig()
    assert parse_config(dump_config(c)) == c


@settings(max_examples=60)
@given(
    n=st.tuples(st.integers(3, 64), st.integers(3, 64), st.integers(2, 64)),
    extent=st.tuples(st.floats(0.1, 100), st.floats(0.1, 100)),
    beta=st.floats(0, 10),
    k=st.integers(1, 1000),
    seed=st.integers(0, 2**31),
    eta=st.one_of(st.floats(1e-6, 1e3).map(repr), st.floats(0.01, 1).map(lambda f: f"rel:{f!r}")),
    coeff=st.floats(0.5, 32),
)
def test_echo_round_trip(n, extent, beta, k, seed, eta, coeff):
    text = (
        f"grid.n_r={n[0]}\ngrid.n_rho={n[1]}\ngrid.n_theta={n[2]}\n"
        f"grid.r_max={extent[0]!r}\ngrid.rho_max={extent[1]!r}\npotential.beta={beta!r}\n"
        f"eigen.k={k}\neigen.seed={seed}\nobservables.eta={eta}\noperator.heavy_kinetic_coeff={coeff!r}\n"
    )
    c = parse_config(text)
    assert parse_config(dump_config(c)) == c
