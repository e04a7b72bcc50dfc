import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from spin_eraser.core import (
    ComplexGaussian,
    DensityField,
    GridSpec,
    ParamError,
    PhysParams,
    gaussian_eval,
    gaussian_overlap,
    validate_params,
)


def test_validate_accepts_reference_set():
    p = PhysParams(m=1, hbar=1, sigma=1, omega=1, z0=4, beta=0.5, t_i=1, t_e=1, t=10)
    assert validate_params(p) is p


def test_validate_rejects_zero_sigma():
    with pytest.raises(ParamError, match="sigma must be positive"):
        validate_params(PhysParams(sigma=0.0))


def test_validate_rejects_screen_inside_magnet():
    p = PhysParams(t=1.0, t_i=1.0, t_e=1.0)
    with pytest.raises(ParamError, match=r"t < t_i \+ t_e"):
        validate_params(p, magnet=True)
    # without a magnet the timeline is irrelevant
    assert validate_params(p, magnet=False) is p


@pytest.mark.parametrize("name", ["m", "hbar", "omega"])
def test_validate_names_violated_field(name):
    with pytest.raises(ParamError, match=name):
        validate_params(PhysParams(**{name: -1.0}))


@pytest.mark.parametrize("name", ["beta", "b0", "z0", "t"])
def test_validate_rejects_negative(name):
    with pytest.raises(ParamError, match=f"{name} must be non-negative"):
        validate_params(PhysParams(**{name: -0.1}))


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0, 10), st.floats(0, 3))
def test_validate_is_idempotent(sigma, omega, z0, beta):
    p = PhysParams(sigma=sigma, omega=omega, z0=z0, beta=beta)
    assert validate_params(validate_params(p)) == p


def test_gaussian_peak_and_tail():
    g = ComplexGaussian(0.0, 1.0, 0.0, 1.0)
    assert gaussian_eval(g, 0.0) == pytest.approx(1 + 0j, abs=1e-15)
    assert gaussian_eval(g, 2.0) == pytest.approx(math.exp(-1.0), abs=1e-15)


def test_gaussian_complex_width():
    g = ComplexGaussian(0.0, 1 - 1j, 0.0, 1.0)
    value = gaussian_eval(g, 2.0)
    assert value == pytest.approx(cmath.exp(-(1 + 1j) / 2), abs=1e-15)
    assert abs(value) == pytest.approx(math.exp(-0.5), abs=1e-15)


def test_gaussian_rejects_unnormalizable_width():
    with pytest.raises(ValueError):
        ComplexGaussian(0.0, -1 + 1j)


@given(
    st.floats(-5, 5), st.floats(0.2, 4), st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 6),
)
def test_gaussian_magnitude_symmetric_about_center(center, re_w, im_w, k, d):
    g = ComplexGaussian(center, complex(re_w, im_w), k, 0.7 - 0.2j)
    assert abs(g(center + d)) == pytest.approx(abs(g(center - d)), rel=1e-12, abs=1e-300)


def test_prob_width_of_complex_width():
    # |exp(-u^2/(4w))|^2 = exp(-u^2 Re(1/w)/2), so the variance is 1/Re(1/w)
    w = 2.0 + 3.0j
    g = ComplexGaussian(0.0, w)
    assert g.prob_width ** 2 == pytest.approx(1.0 / (1.0 / w).real, rel=1e-14)


@pytest.mark.parametrize(
    "a, b",
    [
        (ComplexGaussian(0.0, 1.0), ComplexGaussian(0.0, 1.0)),
        (ComplexGaussian(1.0, 1 + 0.5j, 0.3, 0.5 + 0.1j), ComplexGaussian(-2.0, 2 - 1j, -0.7, 1.2j)),
        (ComplexGaussian(4.0, 1 + 10j), ComplexGaussian(-4.0, 1 + 10j)),
    ],
)
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_overlap_matches_quadrature(a, b):
    re = quad(lambda u: (np.conj(a(u)) * b(u)).real, -80, 80, limit=400, epsabs=1e-14)[0]
    im = quad(lambda u: (np.conj(a(u)) * b(u)).imag, -80, 80, limit=400, epsabs=1e-14)[0]
    assert gaussian_overlap(a, b) == pytest.approx(complex(re, im), abs=1e-10)


def test_grid_rejects_bad_specs():
    with pytest.raises(ValueError):
        GridSpec(0, 1, 1, 0, 1, 4)
    with pytest.raises(ValueError):
        GridSpec(1, 0, 4, 0, 1, 4)
    g = GridSpec(-1, 1, 5, 0, 2, 3)
    assert g.dx == 0.5 and g.dz == 1.0
    np.testing.assert_allclose(g.x, [-1, -0.5, 0, 0.5, 1])


def test_density_field_rejects_negative_and_wrong_shape():
    g = GridSpec(0, 1, 3, 0, 1, 4)
    with pytest.raises(ValueError):
        DensityField(g, -np.ones((3, 4)))
    with pytest.raises(ValueError):
        DensityField(g, np.ones((4, 3)))
    d = DensityField(g, np.ones((3, 4)))
    assert d.integral() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        d.values[0, 0] = 2.0
