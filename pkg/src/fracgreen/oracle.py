"""Brute-force verifiers that share no evaluation code with ``hfun``/``green``.

Oscillatory integrals along the positive axis are computed by rotating the
integration ray into the sector where exp(-i p^nu) decays and handing the
resulting smooth integrand to adaptive Gauss-Kronrod quadrature.
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import (
    CausalityError,
    MellinStripError,
    ParameterError,
    QuadratureError,
    SingularPointError,
)

TRUNC = 1e-16  # integrand magnitude at the truncation radius
PHASE_BUDGET = 7.0  # max exponent of transient growth allowed on the e^{+ipx} ray


@dataclass(frozen=True)
class QuadratureConfig:
    rotation_angle: float | None = None  # None: pi/(4 nu)
    max_radius: float | None = None  # None: chosen from the integrand decay
    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ParameterError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ParameterError("max_subdivisions must be >= 1")
        if self.max_radius is not None and not self.max_radius > 0:
            raise ParameterError("max_radius must be positive")

    def angle(self, nu):
        th = math.pi / (4.0 * nu) if self.rotation_angle is None else self.rotation_angle
        if not 0.0 < th < math.pi / (2.0 * nu):
            raise ParameterError("rotation outside decay sector")
        return th


DEFAULT_CONFIG = QuadratureConfig()


def _quad_complex(f, a, b, cfg, points=None, **kw):
    """Adaptive quadrature of a complex integrand; returns (value, error)."""
    out = []
    for part in (lambda t: f(t).real, lambda t: f(t).imag):
        res = integrate.quad(
            part, a, b, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
            limit=cfg.max_subdivisions, points=points, full_output=1, **kw
        )
        val, err = res[0], res[1]
        if len(res) > 3 and err > max(10 * cfg.abs_tol, 1e3 * cfg.rel_tol * abs(val)):
            raise QuadratureError(f"quadrature failed: {res[3].splitlines()[0]}", val, err)
        out.append((val, err))
    return complex(out[0][0], out[1][0]), math.hypot(out[0][1], out[1][1])


def _radius(lam, growth, decay, nu, scale=1.0):
    # smallest r past the integrand maximum with r^lam exp(growth r - decay r^nu) < TRUNC*scale
    def log_mag(r):
        return lam * math.log(r) + growth * r - decay * r**nu

    r = 1.0
    peak = max((growth / (nu * decay)) ** (1.0 / (nu - 1.0)) if growth > 0 else 0.0, 1.0)
    while r < peak or log_mag(r) > math.log(TRUNC * scale):
        r *= 1.25
    return r


def rotated_sine_integral(lam, w, c, nu, cfg=DEFAULT_CONFIG):
    """int_0^inf p^lam sin(w p) exp(-i c p^nu) dp for real w >= 0, c > 0, nu > 1.

    sin(wp) is split into exp(+-iwp)/(2i).  The exp(-iwp) piece is integrated
    on the ray arg p = -theta, the exp(+iwp) piece on arg p = -theta_plus with
    theta_plus small enough that the transient growth of exp(iwp) before the
    stationary point stays bounded.  Returns (value, error).
    """
    if not nu > 1:
        raise ParameterError("nu must exceed 1")
    if not lam > -2:
        raise ParameterError("integrand not integrable at 0")
    if w == 0:
        return 0j, 0.0
    th = cfg.angle(nu)
    pstar = (w / (nu * c)) ** (1.0 / (nu - 1.0))
    th_p = min(th, PHASE_BUDGET / max(pstar * w * (1.0 - 1.0 / nu), 1e-300))

    def ray(theta, sign):
        e = cmath.exp(-1j * theta)
        en = cmath.exp(-1j * nu * theta)
        jac = cmath.exp(-1j * theta * (lam + 1.0))

        def f(r):
            return jac * r**lam * cmath.exp(sign * 1j * w * r * e - 1j * c * r**nu * en)

        growth = w * math.sin(theta) if sign > 0 else -w * math.sin(theta)
        decay = c * math.sin(nu * theta)
        rmax = cfg.max_radius or _radius(lam, growth, decay, nu)
        pts = [pstar] if sign > 0 and pstar < rmax else None
        return _quad_complex(f, 0.0, rmax, cfg, points=pts)

    jp, ep = ray(th_p, +1)
    jm, em = ray(th, -1)
    return (jp - jm) / 2j, 0.5 * (ep + em)


def quad_I(dp, x, cfg=DEFAULT_CONFIG, with_error=False):
    """I(x) = int_0^inf p^(1-gamma) sin(px) exp(-i p^nu) dp by rotated-ray quadrature."""
    if x < 0:
        raise ParameterError("x must be non-negative")
    if not dp.gamma_exp < 2:
        raise ParameterError("gamma must be < 2")
    val, err = rotated_sine_integral(1.0 - dp.gamma_exp, float(x), 1.0, dp.nu, cfg)
    return (val, err) if with_error else val


def quad_green(fp, p1, p0, cfg=DEFAULT_CONFIG, with_error=False):
    """G from the radial momentum integral in physical variables.

    G = N1 / (2 pi^2 hbar^2 d) int_0^inf p^(1-gamma) sin(p d/hbar) exp(-i xi p^nu) dp,
    with no rescaling of p.
    """
    d = math.dist(p1.r, p0.r)
    dt = p1.t - p0.t
    if dt <= 0:
        return (0j, 0.0) if with_error else 0j
    if d == 0:
        raise SingularPointError("singular at r = r'")
    hbar = fp.hbar
    nu = fp.alpha / fp.beta
    gam = fp.alpha * (fp.beta - 1.0) / fp.beta
    xi = fp.dcal ** (1.0 / fp.beta) * dt / hbar
    n1 = 1.0 / (1j * hbar * fp.beta * fp.dcal ** ((fp.beta - 1.0) / fp.beta))
    # the physical integral spans scale xi^{-1/nu}; rescale the truncation tolerance with it
    val, err = rotated_sine_integral(1.0 - gam, d / hbar, xi, nu, cfg)
    pref = n1 / (2.0 * math.pi**2 * hbar**2 * d)
    return (pref * val, abs(pref) * err) if with_error else pref * val


def _check_strip(dp, s):
    s = complex(s)
    if not (0.0 < s.real < 1.0 and (2.0 - dp.gamma_exp - s).real > 0):
        raise MellinStripError(f"outside Mellin strip: s={s}")
    return s


def mellin_I_closed(dp, s):
    """(1/nu) Gamma(s) Gamma((2-gamma-s)/nu) sin(pi s/2) exp(-i pi (2-gamma-s)/(2 nu))."""
    s = _check_strip(dp, s)
    w = (2.0 - dp.gamma_exp - s) / dp.nu
    return special.gamma(s) * special.gamma(w) * cmath.sin(math.pi * s / 2) * cmath.exp(
        -0.5j * math.pi * w
    ) / dp.nu


def mellin_I_parts(dp, s):
    """(I1(s), I2(s)) in gamma-quotient form, with I~(s) = (I1 - i I2)/nu."""
    s = _check_strip(dp, s)
    g = special.gamma
    w = (2.0 - dp.gamma_exp - s) / (2.0 * dp.nu)
    common = math.pi**2 * g(s) * g(2 * w) / (g(s / 2) * g(1 - s / 2))
    return common / (g(0.5 + w) * g(0.5 - w)), common / (g(w) * g(1 - w))


def _ray_profile(dp, t, phi, cfg):
    # J(t) = int_0^inf r^(1-gamma) sin(r t) exp(-i r^nu e^{-i nu phi}) dr, so that
    # I(t e^{i phi}) = e^{-i phi (2-gamma)} J(t)
    lam = 1.0 - dp.gamma_exp
    en = cmath.exp(-1j * dp.nu * phi)
    rmax = cfg.max_radius or _radius(lam, 0.0, math.sin(dp.nu * phi), dp.nu)

    def f(r):
        return r**lam * cmath.exp(-1j * r**dp.nu * en)

    return _quad_complex(f, 0.0, rmax, cfg, weight="sin", wvar=t)


def _ray_tail(dp, s, phi, t0, kmax=6):
    # int_{t0}^inf J(t) t^{s-1} dt from the endpoint expansion of J at large t:
    # J ~ sum_k (-i e^{-i nu phi})^k / k! * Gamma(lam_k) sin(pi lam_k/2) t^{-lam_k},
    # lam_k = 2 - gamma + nu k
    total = 0j
    coef = 1 + 0j
    step = -1j * cmath.exp(-1j * dp.nu * phi)
    for k in range(kmax):
        lk = 2.0 - dp.gamma_exp + dp.nu * k
        ex = s - lk
        term = coef * special.gamma(lk) * math.sin(math.pi * lk / 2) * (-(t0**ex) / ex)
        total += term
        coef *= step / (k + 1)
    return total


def mellin_I_numeric(dp, s, cfg=DEFAULT_CONFIG, t_split=40.0):
    """int_0^inf I(x) x^(s-1) dx by quadrature.

    I(x) is continued to the ray x = t e^{i phi} (phi = the rotation angle),
    where its stationary-phase oscillation turns into exponential decay; there
    I is evaluated by a Fourier-weighted quadrature of the rotated momentum
    integral.  The integral over t in [0, t_split] is done numerically and the
    rest from the large-t endpoint expansion.
    """
    s = _check_strip(dp, s)
    phi = cfg.angle(dp.nu)
    rot = cmath.exp(1j * phi * (s - (2.0 - dp.gamma_exp)))

    def f(t):
        return _ray_profile(dp, t, phi, cfg)[0] * t ** (s - 1.0)

    inner = QuadratureConfig(cfg.rotation_angle, cfg.max_radius, cfg.abs_tol * 1e-2, cfg.rel_tol, cfg.max_subdivisions)
    head, _ = _quad_complex(f, 0.0, t_split, inner)
    return rot * (head + _ray_tail(dp, s, phi, t_split))


def bromwich_kernel(fp, p_mag, dt, c=None):
    """(1/2 pi i) int_{c-i inf}^{c+i inf} e^{s dt} / ((i hbar)^beta s^beta - D p^alpha) ds.

    Evaluated on the vertical line with Fourier-weighted quadrature on the
    half line (principal branch of s^beta).
    """
    if not dt > 0:
        raise CausalityError("causality: require t > t'")
    a = (1j * fp.hbar) ** fp.beta
    b = fp.dcal * p_mag**fp.alpha
    c = 1.0 / dt if c is None else c

    def F(y):
        return 1.0 / (a * complex(c, y) ** fp.beta - b)

    def even(y):
        return F(y) + F(-y)

    def odd(y):
        return F(y) - F(-y)

    parts = []
    for fn, wt in ((even, "cos"), (odd, "sin")):
        for comp in (lambda y, fn=fn: fn(y).real, lambda y, fn=fn: fn(y).imag):
            res = integrate.quad(comp, 0.0, np.inf, weight=wt, wvar=dt, limlst=200, full_output=1)
            parts.append(res[0])
    cos_part = complex(parts[0], parts[1])
    sin_part = complex(parts[2], parts[3])
    return math.exp(c * dt) / (2.0 * math.pi) * (cos_part + 1j * sin_part)


def branch_cut_kernel(fp, p_mag, dt):
    """Contribution of the cut of s^beta along the negative real axis to the Bromwich integral."""
    a = (1j * fp.hbar) ** fp.beta
    b = fp.dcal * p_mag**fp.alpha
    if fp.beta == 1.0:
        return 0j

    def jump(r):
        up = 1.0 / (a * r**fp.beta * cmath.exp(1j * math.pi * fp.beta) - b)
        dn = 1.0 / (a * r**fp.beta * cmath.exp(-1j * math.pi * fp.beta) - b)
        return math.exp(-r * dt) * (dn - up)

    val, _ = _quad_complex(jump, 0.0, np.inf, QuadratureConfig(abs_tol=1e-14, rel_tol=1e-12))
    return val / (2j * math.pi)
