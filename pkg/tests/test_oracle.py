import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from fracgreen import green, oracle
from fracgreen.errors import MellinStripError, ParameterError

O = green.SpaceTimePoint((0.0, 0.0, 0.0), 0.0)
DP20 = green.DerivedParams.from_nu_gamma(2.0, 0.0)
SETTINGS = [(2.0, 0.0), (2.4, 0.5), (1.875, -0.2)]


def rel(a, b):
    return abs(a - b) / abs(b)


def test_config_validation():
    with pytest.raises(ParameterError):
        oracle.QuadratureConfig(abs_tol=0)
    with pytest.raises(ParameterError, match="rotation outside decay sector"):
        oracle.QuadratureConfig(rotation_angle=1.0).angle(2.0)


def test_quad_I_zero_and_self_consistency():
    assert oracle.quad_I(DP20, 0.0) == 0
    a = oracle.quad_I(DP20, 1.0)
    tight = oracle.QuadratureConfig(abs_tol=5e-14, rel_tol=5e-12)
    assert rel(oracle.quad_I(DP20, 1.0, tight), a) <= 1e-9


def test_slope_at_origin():
    for nu, gam in SETTINGS:
        dp = green.DerivedParams.from_nu_gamma(nu, gam)
        h = 1e-5
        slope = oracle.quad_I(dp, h) / h
        e = (3 - gam) / nu
        expect = math.gamma(e) * cmath.exp(-0.5j * math.pi * e) / nu
        assert rel(slope, expect) <= 1e-5


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SETTINGS), st.floats(0.05, 4.0))
def test_tolerance_convergence(setting, x):
    dp = green.DerivedParams.from_nu_gamma(*setting)
    v, err = oracle.quad_I(dp, x, with_error=True)
    half = oracle.QuadratureConfig(abs_tol=0.5e-13, rel_tol=0.5e-11)
    assert abs(oracle.quad_I(dp, x, half) - v) <= max(err, 1e-15 * abs(v))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SETTINGS), st.floats(0.05, 4.0), st.floats(0.2, 0.8))
def test_rotation_independence(setting, x, frac):
    dp = green.DerivedParams.from_nu_gamma(*setting)
    v1, e1 = oracle.quad_I(dp, x, with_error=True)
    cfg = oracle.QuadratureConfig(rotation_angle=frac * math.pi / (2 * dp.nu))
    v2, e2 = oracle.quad_I(dp, x, cfg, with_error=True)
    assert abs(v1 - v2) <= 10 * (e1 + e2) + 1e-12 * abs(v1)


def test_mellin_decomposition_and_identities():
    for nu, gam in SETTINGS:
        dp = green.DerivedParams.from_nu_gamma(nu, gam)
        for s in (0.3, 0.5 + 0.2j, 0.7):
            i1, i2 = oracle.mellin_I_parts(dp, s)
            assert rel((i1 - 1j * i2) / nu, oracle.mellin_I_closed(dp, s)) <= 1e-10
    g = math.gamma
    for s in (0.2, 0.45, 0.9):
        assert g(s / 2) * g(1 - s / 2) == pytest.approx(math.pi / math.sin(math.pi * s / 2), rel=1e-14)
        w = 0.3 * s
        assert g(0.5 + w) * g(0.5 - w) == pytest.approx(math.pi / math.cos(math.pi * w), rel=1e-14)


def test_mellin_strip():
    for s in (0.0, 1.0, 1.2, -0.1):
        with pytest.raises(MellinStripError):
            oracle.mellin_I_closed(DP20, s)


@pytest.mark.parametrize("setting", SETTINGS)
def test_mellin_numeric_vs_closed(setting):
    dp = green.DerivedParams.from_nu_gamma(*setting)
    for s in (0.3, 0.5, 0.7):
        assert rel(oracle.mellin_I_numeric(dp, s), oracle.mellin_I_closed(dp, s)) <= 1e-4


def test_mellin_strip_edge():
    assert rel(oracle.mellin_I_numeric(DP20, 0.95), oracle.mellin_I_closed(DP20, 0.95)) <= 1e-3


def test_quad_green():
    fp = green.FracParams(2, 1)
    p = green.SpaceTimePoint((4.0, 0.0, 0.0), 1.0)
    assert oracle.quad_green(fp, green.SpaceTimePoint((1.0, 0, 0), -1.0), O) == 0
    assert rel(abs(oracle.quad_green(fp, p, O)), abs(green.standard_propagator(0.5, 1, 4, 1))) <= 1e-6
    for ab in ((1.8, 0.9), (1.5, 0.8)):
        fp = green.FracParams(*ab, dcal=1.3, hbar=0.8)
        for d in (0.3, 1.7):
            p = green.SpaceTimePoint((d, 0.0, 0.0), 0.6)
            assert rel(oracle.quad_green(fp, p, O), green.green_hform(fp, p, O).value) <= 1e-6
