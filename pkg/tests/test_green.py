import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracgreen import green, hfun, oracle
from fracgreen.errors import (
    AsymptoticInapplicableError,
    CausalityError,
    ParameterError,
    SingularPointError,
)

O = green.SpaceTimePoint((0.0, 0.0, 0.0), 0.0)


def pt(d, t):
    return green.SpaceTimePoint((d, 0.0, 0.0), t)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_params_validation():
    for bad in ((1.0, 1.0), (2.1, 1.0), (1.5, 0.0), (1.5, 1.2)):
        with pytest.raises(ParameterError):
            green.FracParams(*bad)
    with pytest.raises(ParameterError):
        green.FracParams(2.0, 1.0, dcal=0.0)


def test_derive_params_examples():
    dp = green.derive_params(green.FracParams(2, 1), 3, 1)
    assert (dp.nu, dp.gamma_exp, dp.xi, dp.x) == (2, 0, 1, 3)
    fp = green.FracParams(1.5, 0.75)
    assert (fp.nu, fp.gamma_exp) == (2, -0.5)
    with pytest.raises(CausalityError):
        green.derive_params(fp, 1, 0)


def test_hbar_rescaling():
    fp1, fp2 = green.FracParams(1.8, 0.9, 1.3, 1.0), green.FracParams(1.8, 0.9, 1.3, 2.0)
    d1, d2 = green.derive_params(fp1, 2.0, 0.7), green.derive_params(fp2, 2.0, 0.7)
    assert d2.xi == pytest.approx(d1.xi / 2, rel=1e-15)
    assert d2.x == pytest.approx(2.0 / (d2.xi ** (1 / fp2.nu) * 2.0), rel=1e-15)
    assert d2.n1 == pytest.approx(d1.n1 / 2, rel=1e-15)
    expect = d2.n1 * d2.xi ** ((fp2.gamma_exp - 2) / fp2.nu) / (2 * math.pi**2 * 4.0)
    assert d2.n == pytest.approx(expect, rel=1e-15)


def test_from_velocity():
    fp = green.FracParams.from_velocity(1.0, 0.5, 2.0, 1.0)
    assert fp.dcal == pytest.approx(1.0)


def test_build_h_examples():
    dp = green.DerivedParams.from_nu_gamma(2, 0)
    h1, h2 = green.build_h1(dp), green.build_h2(dp)
    assert h1.upper == ((0, 1), (0, 1), (0, 0.5))
    assert h1.lower == ((0, 2), (0, 1), (0, 0.5))
    assert h2.upper[:2] == h1.upper[:2] and h2.lower[:2] == h1.lower[:2]
    assert h2.upper[2] == h2.lower[2] == (0.5, 0.5)
    ds = hfun.structural_indices(h1)
    assert ds.delta == 1 and ds.delta_star == 0


def test_eval_I_examples():
    dp = green.DerivedParams.from_nu_gamma(2, 0)
    assert green.eval_I(dp, 0) == 0
    assert rel(green.eval_I(dp, 1.0), oracle.quad_I(dp, 1.0)) <= 1e-6
    dp = green.DerivedParams.from_nu_gamma(2.4, 0.5)
    assert rel(green.eval_I(dp, 0.5), oracle.quad_I(dp, 0.5)) <= 1e-6


def test_hform_examples():
    fp = green.FracParams(2, 1)
    assert green.green_hform(fp, pt(1, -1), O).value == 0
    g = green.green_hform(fp, pt(4, 1), O).value
    ref = green.standard_propagator(0.5, 1.0, 4.0, 1.0)
    assert rel(abs(g), abs(ref)) <= 1e-6
    assert abs(ref) == pytest.approx((1 / (4 * math.pi)) ** 1.5, rel=1e-14)
    assert abs(ref) == pytest.approx(0.0224484, abs=1e-7)
    assert abs(cmath.phase(g / ref)) < 1e-6
    with pytest.raises(SingularPointError):
        green.green_hform(fp, pt(0, 1), O)


@pytest.mark.parametrize("ab", [(2, 1), (1.8, 0.9), (1.5, 0.8)])
def test_series_matches_hform(ab):
    fp = green.FracParams(*ab)
    for x in np.linspace(0.1, 3, 12):
        # x = d at dt = 1 with D = hbar = 1
        s = green.green_series(fp, pt(x, 1), O)
        h = green.green_hform(fp, pt(x, 1), O)
        assert rel(s.value, h.value) <= 1e-9


def test_beta_one_reduction():
    fp = green.FracParams(1.7, 1.0)
    assert fp.gamma_exp == 0
    assert fp.n1 == 1 / 1j


def test_leading_series_term():
    for ab in ((2, 1), (1.8, 0.9)):
        fp = green.FracParams(*ab)
        d = 1e-6
        dp = green.derive_params(fp, d, 1.0)
        g = green.green_series(fp, pt(d, 1), O).value
        lead = g * d * fp.nu / (dp.n * dp.x)
        e = (3 - fp.gamma_exp) / fp.nu
        assert rel(lead, math.gamma(e) * cmath.exp(-1j * e * math.pi / 2)) < 1e-10


def test_asymptotic_standard_limit():
    fp = green.FracParams(2, 1)
    for d in (10.0, 20.0):
        a = green.green_asymptotic(fp, pt(d, 1), O).value
        ref = green.standard_propagator(0.5, 1.0, d, 1.0)
        assert rel(a, ref) < 1e-12
    assert abs(green.green_asymptotic(fp, pt(10, 1), O).value) == pytest.approx((1 / (4 * math.pi)) ** 1.5, rel=1e-13)
    with pytest.raises(AsymptoticInapplicableError):
        green.green_asymptotic(fp, pt(1, 1), O)


def test_phase_exponent_reduces_to_standard():
    # rebuilt phase freq * x^kappa equals m d^2 / (2 hbar dt) when D = 1/(2m)
    m, hbar, dt, d = 0.7, 1.3, 0.9, 2.1
    fp = green.FracParams(2, 1, 1 / (2 * m), hbar)
    ak = green.asymptotic_kernel(2.0, 0.0)
    x = green.derive_params(fp, d, dt).x
    assert ak.freq * x**ak.kappa == pytest.approx(m * d * d / (2 * hbar * dt), rel=1e-14)


def test_asymptotic_ratio_at_50():
    fp = green.FracParams(2, 1)
    a = green.green_asymptotic(fp, pt(50, 1), O).value
    h = green.green_hform(fp, pt(50, 1), O).value
    assert abs(a / h - 1) < 0.05


def test_momentum_kernel():
    fp = green.FracParams(2, 1)
    k = green.momentum_kernel(fp, 1.3, 0.7)
    assert k == pytest.approx(cmath.exp(-1j * 1.3**2 * 0.7) / 1j, rel=1e-15)
    fp = green.FracParams(1.8, 0.9, 1.4, 1.2)
    mags = [abs(green.momentum_kernel(fp, 1.3, t)) for t in (0.3, 1.0, 5.0)]
    expect = 1.3 ** (-fp.gamma_exp) / (fp.hbar * fp.beta * fp.dcal ** ((fp.beta - 1) / fp.beta))
    assert mags == pytest.approx([expect] * 3, rel=1e-14)


def test_residue_equals_bromwich_for_beta_one():
    fp = green.FracParams(1.8, 1.0)
    k = green.momentum_kernel(fp, 1.3, 0.7)
    assert rel(oracle.bromwich_kernel(fp, 1.3, 0.7), k) <= 1e-5


def test_bromwich_gap_is_branch_cut():
    # for beta < 1 the inverse transform also carries the branch-cut integral
    fp = green.FracParams(1.8, 0.9)
    full = oracle.bromwich_kernel(fp, 1.3, 0.7)
    res = green.momentum_kernel(fp, 1.3, 0.7)
    cut = oracle.branch_cut_kernel(fp, 1.3, 0.7)
    assert abs(full - (res + cut)) <= 1e-8 * abs(full)


def test_green_regular_matches_pointwise():
    fp = green.FracParams(1.8, 0.9)
    d = np.array([0.5, 2.0, 8.0, 40.0])
    vals = green.green_regular(fp, d, 1.0)
    for di, v in zip(d, vals):
        ref = green.green_hform(fp, pt(di, 1), O).value if di < 10 else green.green_asymptotic(fp, pt(di, 1), O).value
        assert abs(v - ref) <= 1e-3 * abs(ref)
    assert np.all(green.green_regular(fp, d, -1.0) == 0)


fps = st.sampled_from([(2.0, 1.0), (1.8, 0.9), (1.5, 0.8), (1.6, 1.0)])


@settings(max_examples=40, deadline=None)
@given(fps, st.floats(0.1, 5), st.floats(-5, 0))
def test_causality(ab, d, t):
    fp = green.FracParams(*ab)
    p = pt(d, t)
    assert green.green_hform(fp, p, O).value == 0
    assert green.green_series(fp, p, O).value == 0
    assert green.green_asymptotic(fp, p, O).value == 0


def unit(v):
    v = np.asarray(v)
    return v / np.linalg.norm(v)


@settings(max_examples=40, deadline=None)
@given(
    fps,
    st.floats(0.2, 2.5),
    st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(lambda v: np.linalg.norm(v) > 0.1),
    st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5)),
)
def test_depends_only_on_distance(ab, d, direction, shift):
    fp = green.FracParams(*ab)
    r = unit(direction) * d
    s = np.asarray(shift)
    base = green.green_series(fp, pt(d, 1.0), O).value
    moved = green.green_series(
        fp, green.SpaceTimePoint(tuple(r + s), 1.5), green.SpaceTimePoint(tuple(s), 0.5)
    ).value
    # translation/rotation only move the distance by rounding
    assert abs(moved - base) <= 1e-12 * abs(base)


def test_standard_limit_grid():
    fp = green.FracParams(2, 1)
    for d in (0.5, 1, 2, 4, 8):
        for t in (0.25, 1, 4):
            g = green.green_series(fp, pt(d, t), O).value
            assert rel(abs(g), abs(green.standard_propagator(0.5, 1, d, t))) <= 1e-6
