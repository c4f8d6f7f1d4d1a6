"""Green's function of the 3D space-time-fractional Schroedinger equation.

Three forms are available for t > t':

* ``green_hform``: N * pi^2 [H1(x^nu) - i H2(x^nu)] / |r - r'| through the
  general H-function evaluator;
* ``green_series``: the convergent power series in x, summed with working
  precision raised to cover cancellation;
* ``green_asymptotic``: the leading oscillatory term for large x.

Notation: nu = alpha/beta, gamma = alpha (beta - 1)/beta,
xi = D^{1/beta} (t - t')/hbar, x = |r - r'| / (xi^{1/nu} hbar).
"""
import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from . import hfun
from .errors import (
    AsymptoticInapplicableError,
    CausalityError,
    ParameterError,
    SingularPointError,
)
from .special_fn import log_gamma

EPS = 2.220446049250313e-16
SERIES_TOL = 1e-16
SERIES_KMAX = hfun.K_MAX


@dataclass(frozen=True)
class FracParams:
    alpha: float
    beta: float
    dcal: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.alpha <= 2.0:
            raise ParameterError(f"alpha must lie in (1, 2], got {self.alpha}")
        if not 0.0 < self.beta <= 1.0:
            raise ParameterError(f"beta must lie in (0, 1], got {self.beta}")
        if not self.alpha / self.beta > 1.0:
            raise ParameterError("alpha/beta must exceed 1")
        if not (self.dcal > 0 and self.hbar > 0):
            raise ParameterError("dcal and hbar must be positive")

    @classmethod
    def from_velocity(cls, cbar, mass, alpha, beta, hbar=1.0):
        """Build from the characteristic velocity: D_alpha = cbar^(2-alpha) / (alpha m^(alpha-1))."""
        return cls(alpha, beta, cbar ** (2.0 - alpha) / (alpha * mass ** (alpha - 1.0)), hbar)

    @property
    def nu(self):
        return self.alpha / self.beta

    @property
    def gamma_exp(self):
        return self.alpha * (self.beta - 1.0) / self.beta

    @property
    def n1(self):
        return 1.0 / (1j * self.hbar * self.beta * self.dcal ** ((self.beta - 1.0) / self.beta))


@dataclass(frozen=True)
class DerivedParams:
    nu: float
    gamma_exp: float
    xi: float
    x: float
    n1: complex
    n: complex

    @classmethod
    def from_nu_gamma(cls, nu, gamma_exp, x=0.0):
        """Reduced parameters for I(x) studies (xi = hbar = 1, N1 = 1)."""
        if not nu > 1:
            raise ParameterError("asymptotic/series validity requires nu>1")
        return cls(float(nu), float(gamma_exp), 1.0, float(x), 1 + 0j, 1 / (2 * math.pi**2) + 0j)


@dataclass(frozen=True)
class SpaceTimePoint:
    r: tuple
    t: float

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(c) for c in self.r))
        if len(self.r) != 3:
            raise ParameterError("position must be a 3-vector")


@dataclass(frozen=True)
class GreenValue:
    value: complex
    method: str  # hform | series | asymptotic | standard_limit
    error_estimate: float
    converged: bool = True


def derive_params(fp, dist, dt):
    if not dt > 0:
        raise CausalityError("causality: require t > t'")
    if dist < 0:
        raise ParameterError("distance must be non-negative")
    nu, gam, hbar = fp.nu, fp.gamma_exp, fp.hbar
    xi = fp.dcal ** (1.0 / fp.beta) * dt / hbar
    x = dist / (xi ** (1.0 / nu) * hbar)
    n1 = fp.n1
    n = n1 * xi ** ((gam - 2.0) / nu) / (2.0 * math.pi**2 * hbar**2)
    return DerivedParams(nu, gam, xi, x, n1, n)


@lru_cache(maxsize=256)
def _h_pair(nu, gam):
    if not nu > 1:
        raise ParameterError("asymptotic/series validity requires nu>1")
    first = 1.0 - (2.0 - gam) / nu
    c1 = 0.5 - (2.0 - gam) / (2.0 * nu)
    c2 = 1.0 - (2.0 - gam) / (2.0 * nu)
    lower_head = [(0.0, nu), (0.0, nu / 2.0)]
    upper_head = [(first, 1.0), (0.0, nu / 2.0)]
    h1 = hfun.make_hparams(upper_head + [(c1, 0.5)], lower_head + [(c1, 0.5)], 1, 1)
    h2 = hfun.make_hparams(upper_head + [(c2, 0.5)], lower_head + [(c2, 0.5)], 1, 1)
    return h1, h2


def build_h1(dp):
    return _h_pair(dp.nu, dp.gamma_exp)[0]


def build_h2(dp):
    return _h_pair(dp.nu, dp.gamma_exp)[1]


def _eval_I(dp, x):
    if x < 0:
        raise ParameterError("x must be non-negative")
    if x == 0:
        return 0j, 0.0, "series"
    h1, h2 = _h_pair(dp.nu, dp.gamma_exp)
    z = x**dp.nu
    r1 = hfun.eval_auto(h1, z)
    r2 = hfun.eval_auto(h2, z)
    pi2 = math.pi**2
    return pi2 * (r1.value - 1j * r2.value), pi2 * (r1.abs_error_estimate + r2.abs_error_estimate), r1.method


def eval_I(dp, x):
    """I(x) = int_0^inf p^(1-gamma) sin(px) exp(-i p^nu) dp via the H-function form."""
    return _eval_I(dp, x)[0]


def _separation(p1, p0):
    d = math.dist(p1.r, p0.r)
    return d, p1.t - p0.t


def green_hform(fp, p1, p0):
    dist, dt = _separation(p1, p0)
    if dt <= 0:
        return GreenValue(0j, "hform", 0.0)
    if dist == 0:
        raise SingularPointError("singular at r = r'")
    dp = derive_params(fp, dist, dt)
    val, err, _ = _eval_I(dp, dp.x)
    scale = dp.n / dist
    return GreenValue(scale * val, "hform", abs(scale) * err)


@lru_cache(maxsize=256)
def series_coefficients(nu, gam, count=400):
    """c_n = Gamma((2n+3-gamma)/nu) exp(-i(2n+3-gamma)pi/(2nu)) (-1)^n / (2n+1)!."""
    out = np.zeros(count, dtype=complex)
    for k in range(count):
        arg = (2 * k + 3 - gam) / nu
        mag = log_gamma(arg).real - math.lgamma(2 * k + 2.0)
        if mag < -745:
            break
        out[k] = math.exp(mag) * cmath.exp(-0.5j * math.pi * arg) * (-1) ** k
    return out


def _series_double(nu, gam, x, tol):
    x2 = x * x
    total = 0j
    abs_sum = 0.0
    small = 0
    peak = _series_peak(nu, x)
    for k in range(SERIES_KMAX):
        arg = (2 * k + 3 - gam) / nu
        lt = log_gamma(arg).real - math.lgamma(2 * k + 2.0) + (2 * k * math.log(x) if x > 0 else 0.0)
        if x == 0 and k > 0:
            break
        mag = math.exp(lt) if lt < 709 else math.inf
        term = mag * cmath.exp(-0.5j * math.pi * arg) * (-1) ** k
        total += term
        abs_sum += mag
        if mag < tol * abs(total):
            small += 1
        else:
            small = 0
        if k >= peak and small >= 3:
            return total, abs_sum, mag * x2, k + 1, True
    return total, abs_sum, 0.0, SERIES_KMAX, False


def _series_peak(nu, x):
    # terms grow until Gamma((2n+3)/nu) x^{2n} / (2n+1)! peaks, near 2n ~ nu (x/nu)^(nu/(nu-1))
    if x <= 0:
        return 0
    return int(0.5 * nu * (x / nu) ** (nu / (nu - 1.0))) + 3


def _series_mp(nu, gam, x, tol, dps):
    # private context: the global mpmath precision is shared across threads
    ctx = mpmath.MPContext()
    ctx.dps = dps
    nu_m, gam_m, x_m = ctx.mpf(nu), ctx.mpf(gam), ctx.mpf(x)
    x2 = x_m * x_m
    total = ctx.mpc(0)
    abs_sum = ctx.mpf(0)
    power = ctx.mpf(1)
    small = 0
    peak = _series_peak(nu, x)
    fact = ctx.mpf(1)  # (2n+1)!
    for k in range(SERIES_KMAX):
        if k > 0:
            fact *= (2 * k) * (2 * k + 1)
            power *= x2
        arg = (2 * k + 3 - gam_m) / nu_m
        mag = ctx.gamma(arg) * power / fact
        term = mag * ctx.expjpi(-arg / 2) * (-1) ** k
        total += term
        abs_sum += mag
        if mag < tol * abs(total):
            small += 1
        else:
            small = 0
        if k >= peak and small >= 3:
            omitted = float(mag * x2)
            rounding = float(abs_sum) * 10.0 ** (-dps + 2)
            return complex(total), float(abs_sum), omitted + rounding, k + 1, True
    return complex(total), float(abs_sum), 0.0, SERIES_KMAX, False


def series_sum(nu, gam, x, tol=SERIES_TOL):
    """S(x) = sum_n c_n x^(2n), so that I(x) = x S(x) / nu.

    Summed in double precision first; if the term magnitudes exceed the sum by
    more than ~1e3 the sum is redone in mpmath with enough digits to absorb
    the cancellation.  Returns (value, abs_error, terms, converged).
    """
    total, abs_sum, omitted, used, ok = _series_double(nu, gam, x, tol)
    loss = abs_sum / max(abs(total), 1e-300)
    if loss < 1e3 and ok:
        return total, omitted + 32 * EPS * abs_sum, used, ok
    digits = 20 + int(math.ceil(math.log10(max(loss, 1.0))))
    total, abs_sum, err, used, ok = _series_mp(nu, gam, x, tol, digits)
    loss2 = abs_sum / max(abs(total), 1e-300)
    if ok and math.log10(max(loss2, 1.0)) > digits - 18:
        total, abs_sum, err, used, ok = _series_mp(nu, gam, x, tol, 25 + int(math.log10(loss2)))
    return total, err, used, ok


def green_series(fp, p1, p0):
    dist, dt = _separation(p1, p0)
    if dt <= 0:
        return GreenValue(0j, "series", 0.0)
    if dist == 0:
        raise SingularPointError("singular at r = r'")
    dp = derive_params(fp, dist, dt)
    s, err, _, ok = series_sum(dp.nu, dp.gamma_exp, dp.x)
    scale = dp.n * dp.x / (dp.nu * dist)
    return GreenValue(scale * s, "series", abs(scale) * err, ok)


@dataclass(frozen=True)
class AsymptoticKernel:
    """G_lead = pi^2 N / d * x^power * (k_plus e^{i freq x^kappa} + k_minus e^{-i freq x^kappa})."""

    power: float
    kappa: float
    freq: float
    k_plus: complex
    k_minus: complex
    rel_next: float  # relative size of the first omitted order is ~ 10 * x^(-rel_next)


@lru_cache(maxsize=256)
def asymptotic_kernel(nu, gam):
    h1, h2 = _h_pair(nu, gam)
    c1 = hfun.asymptotic_constants(h1)
    c2 = hfun.asymptotic_constants(h2)
    if abs(c1.rho - c2.rho) > 1e-12 or abs(c1.freq - c2.freq) > 1e-12:
        raise AsymptoticInapplicableError("H1 and H2 envelopes differ")
    e1, e2 = cmath.exp(1j * c1.phase0), cmath.exp(1j * c2.phase0)
    kp = c1.amp * c1.c0 * e1 - 1j * c2.amp * c2.c0 * e2
    km = -(c1.amp * c1.d0 / e1 - 1j * c2.amp * c2.d0 / e2)
    return AsymptoticKernel(nu * c1.rho, nu * c1.inv_delta, c1.freq, kp, km, nu * c1.inv_delta)


def asymptotic_threshold_x(fp):
    """Smallest x accepted by ``green_asymptotic`` by default."""
    h1, _ = _h_pair(fp.nu, fp.gamma_exp)
    return hfun.default_threshold(h1) ** (1.0 / fp.nu)


def green_asymptotic(fp, p1, p0, threshold=None):
    """Leading oscillatory term of G for large x (``threshold`` is in x units)."""
    dist, dt = _separation(p1, p0)
    if dt <= 0:
        return GreenValue(0j, "asymptotic", 0.0)
    if dist == 0:
        raise SingularPointError("singular at r = r'")
    dp = derive_params(fp, dist, dt)
    if threshold is None:
        threshold = asymptotic_threshold_x(fp)
    if dp.x < threshold:
        raise AsymptoticInapplicableError(
            f"asymptotic regime not reached: x={dp.x:.6g} < {threshold:.6g}"
        )
    ak = asymptotic_kernel(dp.nu, dp.gamma_exp)
    ph = ak.freq * dp.x**ak.kappa
    bracket = ak.k_plus * cmath.exp(1j * ph) + ak.k_minus * cmath.exp(-1j * ph)
    val = math.pi**2 * dp.n / dist * dp.x**ak.power * bracket
    return GreenValue(val, "asymptotic", 10.0 * abs(val) * dp.x ** (-ak.rel_next))


def standard_propagator(mass, hbar, dist, dt):
    """Free Schroedinger propagator (1/(i hbar)) (m / (2 pi i hbar dt))^{3/2} exp(i m d^2 / (2 hbar dt))."""
    if dt <= 0:
        return 0j
    pref = (mass / (2j * math.pi * hbar * dt)) ** 1.5 / (1j * hbar)
    return pref * cmath.exp(1j * mass * dist * dist / (2.0 * hbar * dt))


def momentum_kernel(fp, p_mag, dt):
    """Residue of exp(s dt) / ((i hbar)^beta s^beta - D p^alpha) at its pole on the principal sheet."""
    if not dt > 0:
        raise CausalityError("causality: require t > t'")
    if p_mag < 0:
        raise ParameterError("momentum magnitude must be non-negative")
    gam = fp.gamma_exp
    if p_mag == 0 and gam > 0:
        raise SingularPointError("kernel singular at p=0")
    phase = cmath.exp(-1j * p_mag**fp.nu * fp.dcal ** (1.0 / fp.beta) * dt / fp.hbar)
    return phase * (p_mag ** (-gam) if p_mag > 0 else float(gam == 0)) * fp.n1


def asymptotic_kernel_params(fp, tau_min=0.0):
    """Parameter tuple consumed by the compiled/pure Born accumulation kernel."""
    ak = asymptotic_kernel(fp.nu, fp.gamma_exp)
    return (
        complex(fp.n1),
        fp.dcal ** (1.0 / fp.beta),
        float(fp.hbar),
        fp.nu,
        fp.gamma_exp,
        ak.power,
        ak.kappa,
        ak.freq,
        complex(ak.k_plus),
        complex(ak.k_minus),
        float(tau_min),
    )


def green_asymptotic_array(fp, dist, tau):
    """Vectorised leading asymptotic G(d, tau) (no threshold check)."""
    dist = np.asarray(dist, dtype=float)
    tau = np.asarray(tau, dtype=float)
    ak = asymptotic_kernel(fp.nu, fp.gamma_exp)
    xi = fp.dcal ** (1.0 / fp.beta) * tau / fp.hbar
    u = 1.0 / (xi ** (1.0 / fp.nu) * fp.hbar)
    n = fp.n1 * xi ** ((fp.gamma_exp - 2.0) / fp.nu) / (2 * math.pi**2 * fp.hbar**2)
    x = dist * u
    ph = ak.freq * x**ak.kappa
    return math.pi**2 * n / dist * x**ak.power * (ak.k_plus * np.exp(1j * ph) + ak.k_minus * np.exp(-1j * ph))


@lru_cache(maxsize=256)
def _switch_x(nu, gam):
    h1, h2 = _h_pair(nu, gam)
    zs = min(hfun.switch_point(h1), hfun.switch_point(h2))
    return zs ** (1.0 / nu)


def green_regular(fp, dist, tau):
    """G(d, tau) on arrays, finite at d = 0 (uses the x-series there).

    Points with x below the series/asymptotic switch use the double-precision
    series; larger x use the full asymptotic form (algebraic + oscillatory).
    ``tau <= 0`` gives 0.
    """
    dist = np.asarray(dist, dtype=float)
    tau = np.asarray(tau, dtype=float)
    out = np.zeros(np.broadcast(dist, tau).shape, dtype=complex)
    dist, tau = np.broadcast_arrays(dist, tau)
    live = tau > 0
    if not live.any():
        return out
    nu, gam, hbar = fp.nu, fp.gamma_exp, fp.hbar
    xi = fp.dcal ** (1.0 / fp.beta) * tau[live] / hbar
    u = 1.0 / (xi ** (1.0 / nu) * hbar)
    n = fp.n1 * xi ** ((gam - 2.0) / nu) / (2 * math.pi**2 * hbar**2)
    d = dist[live]
    x = d * u
    vals = np.empty(x.shape, dtype=complex)
    xs = _switch_x(nu, gam)
    near = x <= xs
    if near.any():
        coef = series_coefficients(nu, gam)
        vals[near] = n[near] * u[near] / nu * np.polynomial.polynomial.polyval(x[near] ** 2, coef)
    far = ~near
    if far.any():
        h1, h2 = _h_pair(nu, gam)
        c1 = hfun.asymptotic_constants(h1)
        c2 = hfun.asymptotic_constants(h2)
        z = x[far] ** nu
        alg = sum(c * z**pw for c, pw in zip(c1.alg_coef, c1.alg_pow)) - 1j * sum(
            c * z**pw for c, pw in zip(c2.alg_coef, c2.alg_pow)
        )
        ak = asymptotic_kernel(nu, gam)
        ph = ak.freq * x[far] ** ak.kappa
        osc = x[far] ** ak.power * (ak.k_plus * np.exp(1j * ph) + ak.k_minus * np.exp(-1j * ph))
        vals[far] = math.pi**2 * n[far] / d[far] * (alg + osc)
    out[live] = vals
    return out
