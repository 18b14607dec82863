import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixnorm import (
    SystemSpec,
    altered_baker_step,
    baker_step,
    cos1,
    evolve,
    make_field,
    pulsed_diffusion_step,
    sine_flow_period,
    sobolev_norm,
    to_grid,
    to_spectrum,
)
from mixnorm.dynamics import gamma
from mixnorm.errors import (
    ConventionMismatch,
    GridTooSmall,
    NegativeDiffusivity,
    ParameterConstraintViolated,
)

amp = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
fields_1d = st.dictionaries(st.integers(1, 500), amp, min_size=1, max_size=10)


def test_baker_doubles_wavenumbers():
    f = make_field({1: 1.0, 3: 2j})
    g = baker_step(f)
    assert g.to_dict() == {(2,): 1.0, (6,): 2j}


def test_baker_twenty_steps_from_cos1():
    s = evolve(SystemSpec("baker"), cos1(), 20)
    assert len(s) == 21
    assert s.fields[-1].to_dict() == {(2**20,): 1.0}


def test_altered_baker_first_rows():
    a, b = 0.8, 0.6
    f = cos1()
    f = altered_baker_step(f, a, b)
    assert f.to_dict() == {(1,): a, (2,): b}
    f = altered_baker_step(f, a, b)
    assert f.to_dict() == pytest.approx({(1,): a * a, (2,): a * b, (4,): b})


@settings(max_examples=100, deadline=None)
@given(fields_1d, st.floats(0.01, 1.0))
def test_altered_baker_is_an_isometry(fe, a):
    b = math.sqrt(1 - a * a)
    f = make_field(fe)
    g = altered_baker_step(f, a, b)
    assert sobolev_norm(g, 0) == pytest.approx(sobolev_norm(f, 0), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(fields_1d, st.floats(0.0, 1e-2))
def test_pulsed_diffusion_never_increases_energy(fe, kappa):
    f = make_field(fe)
    g = pulsed_diffusion_step(f, math.sqrt(0.5), math.sqrt(0.5), kappa)
    assert sobolev_norm(g, 0) <= sobolev_norm(f, 0) * (1 + 1e-12)


def test_pulsed_diffusion_damps_each_mode():
    a = b = math.sqrt(0.5)
    kappa = 1e-3
    g = pulsed_diffusion_step(cos1(), a, b, kappa)
    assert g[1] == pytest.approx(a * gamma(1, kappa), rel=1e-15)
    assert g[2] == pytest.approx(b * gamma(2, kappa), rel=1e-15)


def test_gamma_underflow_drops_modes():
    assert gamma(10**6, 1e-3) == 0.0
    assert gamma(7, 0.0) == 1.0
    f = make_field({2**200: 1.0})
    assert len(pulsed_diffusion_step(f, 1.0, 0.0, 1e-3)) == 0


@pytest.mark.parametrize("a, b", [(0.8, 0.8), (0.0, 1.0), (1.2, 0.0), (0.6, -0.8)])
def test_parameter_constraints(a, b):
    with pytest.raises(ParameterConstraintViolated):
        altered_baker_step(cos1(), a, b)


def test_negative_kappa():
    with pytest.raises(NegativeDiffusivity):
        pulsed_diffusion_step(cos1(), 0.8, 0.6, -1.0)
    with pytest.raises(NegativeDiffusivity):
        SystemSpec("pulsed_diffusion", kappa=-1.0)


def test_maps_need_one_sided_1d_fields():
    f = make_field({(1, 0): 1.0}, dims=2)
    with pytest.raises(ConventionMismatch):
        baker_step(f)


def test_system_spec_defaults_and_aliases():
    s = SystemSpec("sineflow")
    assert s.kind == "sine_flow" and s.D == 1e-5 and s.N == 128
    assert SystemSpec("altered_baker", a=0.6).b == pytest.approx(0.8)
    with pytest.raises(ValueError):
        SystemSpec("tent")
    with pytest.raises(GridTooSmall):
        SystemSpec("sine_flow", N=100)


# -- sine flow ----------------------------------------------------------------


def test_sine_flow_without_velocity_is_exact_heat_decay():
    f = cos1("sine_flow")
    grid = to_grid(f, 16)
    D = 1e-3
    out = to_spectrum(sine_flow_period(grid, D, 0.3, 1.1, n_sub=4, amplitude=0.0))
    factor = math.exp(-D * (2 * math.pi) ** 2)
    assert abs(out[(1, 0)] - f[(1, 0)] * factor) < 1e-15


def test_sine_flow_zero_diffusion_conserves_l2_of_resolved_field():
    # the initial mode is far from the grid cutoff, so one period loses
    # essentially nothing to truncation
    grid = to_grid(cos1("sine_flow"), 128)
    out = sine_flow_period(grid, 0.0, 0.4, 2.0)
    assert np.mean(out**2) == pytest.approx(np.mean(grid**2), rel=1e-10)
    assert abs(out.mean()) < 1e-14


def test_sine_flow_shear_matches_analytic_displacement():
    # cos(2 pi x) is invariant under the first shear (it moves y only); the
    # second shear displaces x by A sin(2 pi y + psi2) / 2, exactly in any
    # number of substeps
    n, amplitude, psi2 = 64, 0.5, 1.3
    grid = to_grid(cos1("sine_flow"), n)
    out = sine_flow_period(grid, 0.0, 0.2, psi2, n_sub=3, amplitude=amplitude)
    x = np.arange(n) / n
    shift = amplitude * np.sin(2 * np.pi * x[None, :] + psi2) / 2
    expected = math.sqrt(2) * np.cos(2 * np.pi * (x[:, None] - shift))
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_sine_flow_evolve_is_seeded_and_logs_phases():
    spec = SystemSpec("sine_flow", N=16, rng_seed=3)
    s1 = evolve(spec, cos1("sine_flow"), 3)
    s2 = evolve(spec, cos1("sine_flow"), 3)
    assert len(s1) == 4 and len(s1.params["phases"]) == 3
    assert s1.params["phases"] == s2.params["phases"]
    for a, b in zip(s1.fields, s2.fields):
        np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
    other = evolve(SystemSpec("sine_flow", N=16, rng_seed=4), cos1("sine_flow"), 3)
    assert other.params["phases"] != s1.params["phases"]


def test_sine_flow_needs_real_2d_field():
    with pytest.raises(ConventionMismatch):
        evolve(SystemSpec("sine_flow", N=16), cos1(), 1)
    with pytest.raises(GridTooSmall):
        sine_flow_period(np.zeros((12, 12)), 1e-5, 0.0, 0.0)
