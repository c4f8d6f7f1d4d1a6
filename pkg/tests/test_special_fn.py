import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from fracgreen import special_fn as sf
from fracgreen.errors import GammaOverflowError, GammaPoleError


def off_pole(z):
    return min(abs(z + k) for k in range(0, 40)) >= 0.1


cplx = st.builds(complex, st.floats(-20, 20), st.floats(-20, 20)).filter(lambda z: abs(z) <= 20 and off_pole(z))
# reflection also needs 1 - z off the poles
refl = cplx.filter(lambda z: off_pole(1 - z))


def test_special_values():
    assert abs(sf.gamma(0.5) - math.sqrt(math.pi)) < 1e-14
    assert abs(sf.gamma(5) - 24) < 1e-12
    assert abs(sf.gamma(1 + 1j) - (0.498015668118356 - 0.154949828301811j)) < 1e-13
    assert sf.rgamma(-1) == 0
    assert abs(sf.rgamma(1) - 1) < 1e-15
    assert abs(sf.rgamma(0.5) - 1 / math.sqrt(math.pi)) < 1e-15
    assert abs(sf.log_gamma(1)) < 1e-15
    assert abs(sf.log_gamma(5) - math.log(24)) < 1e-14


def test_log_gamma_against_mpmath():
    z = 10.5 + 3j
    ref = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
    assert abs(sf.log_gamma(z) - ref) < 1e-13


def test_rgamma_zero_at_poles():
    for k in range(31):
        assert sf.rgamma(-k) == 0
        assert sf.is_pole(-k)


def test_gamma_pole_raises():
    with pytest.raises(GammaPoleError):
        sf.gamma(-3)


def test_gamma_overflow_carries_log():
    with pytest.raises(GammaOverflowError) as exc:
        sf.gamma(200)
    assert abs(exc.value.log_value - math.lgamma(200)) < 1e-10


@settings(max_examples=300, deadline=None)
@given(refl)
def test_reflection(z):
    val = sf.gamma(z) * sf.gamma(1 - z) * cmath.sin(math.pi * z) / math.pi
    assert abs(val - 1) < 1e-10


@settings(max_examples=300, deadline=None)
@given(cplx)
def test_recurrence(z):
    a, b = sf.gamma(z + 1), z * sf.gamma(z)
    assert abs(a - b) <= 1e-11 * abs(b)


@settings(max_examples=300, deadline=None)
@given(cplx)
def test_rgamma_inverse_and_log(z):
    g = sf.gamma(z)
    assert abs(sf.rgamma(z) * g - 1) < 1e-12
    assert abs(cmath.exp(sf.log_gamma(z)) - g) <= 1e-10 * abs(g)


@settings(max_examples=100, deadline=None)
@given(cplx)
def test_gamma_matches_mpmath(z):
    ref = complex(mpmath.gamma(mpmath.mpc(z.real, z.imag)))
    assert abs(sf.gamma(z) - ref) <= 1e-12 * abs(ref)
