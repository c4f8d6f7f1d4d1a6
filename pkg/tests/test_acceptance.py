"""Acceptance criteria, one test and one PASS/FAIL line each.

Run directly (``python tests/test_acceptance.py``) or through pytest, where
the lines appear in the terminal summary.
"""
import cmath
import math
import time

import numpy as np

from fracgreen import green, hfun, oracle, scattering as sc, special_fn as sf

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:
    ACCEPTANCE_LINES = []

O = green.SpaceTimePoint((0.0, 0.0, 0.0), 0.0)
ROUNDOFF_FLOOR = 1e-10  # deviations below this are rounding, not asymptotic error


def pt(d, t):
    return green.SpaceTimePoint((d, 0.0, 0.0), t)


def rel(a, b):
    return abs(a - b) / abs(b)


def criterion_1():
    fp = green.FracParams(2, 1)
    t0 = time.perf_counter()
    mag = 0.0
    for d in (0.5, 1, 2, 4, 8):
        for t in (0.25, 1, 4):
            g = green.green_series(fp, pt(d, t), O).value
            mag = max(mag, rel(abs(g), abs(green.standard_propagator(0.5, 1.0, d, t))))
    ph = 0.0
    for d in (4, 8):
        for t in (0.25, 1, 4):
            if green.derive_params(fp, d, t).x < green.asymptotic_threshold_x(fp):
                continue
            g = green.green_asymptotic(fp, pt(d, t), O).value
            # prefactor (1/i)(1/(2 pi i dt))^{3/2} carries the constant phase -5 pi/4
            want = cmath.exp(1j * (0.5 * d * d / (2 * t) - 1.25 * math.pi))
            ph = max(ph, abs(g / abs(g) - want))
    dt = time.perf_counter() - t0
    ok = mag <= 1e-6 and ph <= 1e-6 and dt < 10
    return ok, f"max |G| rel err {mag:.2e}, phase err {ph:.2e}, {dt:.2f}s"


def criterion_2():
    t0 = time.perf_counter()
    hs = hq = sq = 0.0
    for ab in ((2, 1), (1.8, 0.9), (1.5, 0.8)):
        fp = green.FracParams(*ab)
        for x in np.linspace(0.1, 3, 12):
            p = pt(x, 1.0)  # x = dist at D = hbar = dt = 1
            h = green.green_hform(fp, p, O).value
            s = green.green_series(fp, p, O).value
            q = oracle.quad_green(fp, p, O)
            hs, hq, sq = max(hs, rel(h, s)), max(hq, rel(h, q)), max(sq, rel(s, q))
    dt = time.perf_counter() - t0
    ok = hs <= 1e-9 and hq <= 1e-6 and sq <= 1e-6 and dt < 60
    return ok, f"hform/series {hs:.2e}, hform/quad {hq:.2e}, series/quad {sq:.2e}, {dt:.2f}s"


def criterion_3():
    t0 = time.perf_counter()
    worst = 0.0
    for nu, gam in ((2.0, 0.0), (2.4, 0.5), (1.875, -0.2)):
        dp = green.DerivedParams.from_nu_gamma(nu, gam)
        for s in (0.3, 0.5, 0.7):
            worst = max(worst, rel(oracle.mellin_I_numeric(dp, s), oracle.mellin_I_closed(dp, s)))
    dt = time.perf_counter() - t0
    return worst <= 1e-4 and dt < 120, f"max rel err {worst:.2e}, {dt:.2f}s"


def criterion_4():
    rng = np.random.default_rng(2024)
    fails = []
    n1 = n2 = 0
    while n1 < 60:
        nu, gam = rng.uniform(1.2, 3.0), rng.uniform(-1.0, 1.0)
        z, k = rng.uniform(0.1, 2.0), rng.uniform(0.5, 2.5)
        if z**k > 8:
            continue
        h = green.build_h1(green.DerivedParams.from_nu_gamma(nu, gam))
        a = hfun.eval_series(h, z)
        b = hfun.eval_series(hfun.rescale_argument(h, k), z**k)
        if abs(b.value - a.value / k) > a.abs_error_estimate / k + b.abs_error_estimate:
            fails.append(("P1", nu, gam, z, k))
        n1 += 1
    while n2 < 60:
        nu, gam = rng.uniform(1.2, 3.0), rng.uniform(-1.0, 1.0)
        z, sig = rng.uniform(0.1, 3.0), rng.uniform(-1.0, 1.0)
        h = green.build_h2(green.DerivedParams.from_nu_gamma(nu, gam))
        a = hfun.eval_series(h, z)
        c = hfun.eval_series(hfun.power_shift(h, sig), z)
        if abs(c.value - z**sig * a.value) > z**sig * a.abs_error_estimate + c.abs_error_estimate:
            fails.append(("P2", nu, gam, z, sig))
        n2 += 1
    idx_ok = True
    for nu in (1.2, 1.5, 2.0, 2.5, 3.0):
        for build in (green.build_h1, green.build_h2):
            ds = hfun.structural_indices(build(green.DerivedParams.from_nu_gamma(nu, -0.3)))
            idx_ok &= ds.delta == nu - 1 and ds.delta_star == 0
    ok = not fails and idx_ok
    return ok, f"{n1}+{n2} samples, {len(fails)} outside combined error estimate, indices exact: {idx_ok}"


def criterion_5():
    parts = []
    ok = True
    for ab in ((2, 1), (1.8, 0.9)):
        fp = green.FracParams(*ab)
        dev = []
        for x in (20, 50, 100):
            d = x * fp.dcal ** (1 / fp.alpha)  # dt = hbar = 1
            a = green.green_asymptotic(fp, pt(d, 1.0), O).value
            h = green.green_hform(fp, pt(d, 1.0), O).value
            dev.append(abs(a / h - 1))
        eff = [v if v > ROUNDOFF_FLOOR else 0.0 for v in dev]
        mono = all(b < a or (a == 0 and b == 0) for a, b in zip(eff, eff[1:]))
        this = dev[1] <= 0.05 and dev[2] <= 0.02 and mono
        ok &= this
        parts.append(f"{ab}: " + ", ".join(f"{v:.1e}" for v in dev))
    return ok, "; ".join(parts) + f" (floor {ROUNDOFF_FLOOR:g})"


def criterion_6():
    parts = []
    ok = True
    for a, b, p, dt in ((1.8, 0.9, 1.3, 0.7), (1.5, 0.8, 2.0, 1.0), (1.6, 1.0, 0.8, 1.5)):
        fp = green.FracParams(a, b)
        e = rel(green.momentum_kernel(fp, p, dt), oracle.bromwich_kernel(fp, p, dt))
        ok &= e <= 1e-5
        parts.append(f"({a},{b},{p},{dt}) {e:.1e}")
    return ok, "; ".join(parts)


def criterion_7():
    t0 = time.perf_counter()
    fp = green.FracParams(2, 1)
    wv = sc.Wavevector.from_direction(fp, (1, 0, 0), 1.0)
    pulse = sc.gaussian_profile(0.0, 0.5)
    weak = sc.gaussian_potential(0.05, 1.0, (0, 0, 0), pulse)
    grid = sc.SpaceTimeGrid.uniform(-6, 6, 17, -4, 4, 17)
    zero = sc.born_series(fp, sc.gaussian_potential(0.0, 1.0, (0, 0, 0), pulse), wv, grid, 3)
    fixed = all(np.array_equal(f.values, zero.fields[0].values) for f in zero.fields)
    pts = np.array([[20.0, 3.0, -1.0], [0.0, 25.0, 4.0], [-18.0, -6.0, 10.0]])
    s1 = sc.born_first_order_points(fp, weak, wv, pts, 8.0).scattered
    s3 = sc.born_first_order_points(fp, sc.gaussian_potential(0.15, 1.0, (0, 0, 0), pulse), wv, pts, 8.0).scattered
    lin = float(np.max(np.abs(s3 - 3 * s1)) / np.max(np.abs(s3)))
    ax = np.linspace(-4, 4, 16)
    X, Y, Z = np.meshgrid(np.linspace(13, 21, 16), ax, ax, indexing="ij")
    far = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    got = sc.born_first_order_points(fp, weak, wv, far, 8.0).scattered
    ref = sc.standard_born_oracle(fp, weak, wv, far, 8.0)
    orc = float(np.linalg.norm(got - ref) / np.linalg.norm(ref))
    norms = sc.born_series(fp, weak, wv, grid, 3).increment_norms
    dec = all(b < a for a, b in zip(norms, norms[1:]))
    dt = time.perf_counter() - t0
    ok = fixed and lin <= 1e-10 and orc <= 1e-4 and dec and dt < 600
    return ok, (
        f"fixed point {fixed}, linearity {lin:.1e}, 16^3 oracle rel L2 {orc:.1e}, "
        f"increments {', '.join(f'{v:.2e}' for v in norms)}, {dt:.1f}s"
    )


def criterion_8():
    rng = np.random.default_rng(8)
    worst = 0.0
    count = 0
    while count < 1000:
        z = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
        if abs(z) > 20 or min(abs(z + k) for k in range(22)) < 0.1:
            continue
        worst = max(worst, abs(sf.gamma(z) * sf.gamma(1 - z) * cmath.sin(math.pi * z) / math.pi - 1))
        worst = max(worst, rel(sf.gamma(z + 1), z * sf.gamma(z)))
        count += 1
    special = max(
        abs(sf.gamma(0.5) - math.sqrt(math.pi)),
        abs(sf.gamma(5) - 24) / 24,
        abs(sf.gamma(1 + 1j) - (0.498015668118356 - 0.154949828301811j)),
        abs(sf.rgamma(-1)),
        abs(sf.rgamma(1) - 1),
        abs(sf.rgamma(0.5) - 1 / math.sqrt(math.pi)),
        abs(sf.log_gamma(1)),
        abs(sf.log_gamma(5) - math.log(24)),
    )
    return worst <= 1e-10 and special <= 1e-13, f"identities {worst:.1e} on {count} samples, special values {special:.1e}"


def record(n, fn):
    ok, detail = fn()
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, line


def test_criterion_1_standard_limit():
    ok, line = record(1, criterion_1)
    assert ok, line


def test_criterion_2_three_way_agreement():
    ok, line = record(2, criterion_2)
    assert ok, line


def test_criterion_3_mellin_identity():
    ok, line = record(3, criterion_3)
    assert ok, line


def test_criterion_4_h_function_properties():
    ok, line = record(4, criterion_4)
    assert ok, line


def test_criterion_5_asymptotic_crossover():
    ok, line = record(5, criterion_5)
    assert ok, line


def test_criterion_6_residue_kernel():
    ok, line = record(6, criterion_6)
    assert ok, line


def test_criterion_7_born_suite():
    ok, line = record(7, criterion_7)
    assert ok, line


def test_criterion_8_gamma_suite():
    ok, line = record(8, criterion_8)
    assert ok, line


if __name__ == "__main__":
    for i, f in enumerate((criterion_1, criterion_2, criterion_3, criterion_4,
                           criterion_5, criterion_6, criterion_7, criterion_8), start=1):
        record(i, f)
