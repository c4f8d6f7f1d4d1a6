"""Pure-Python implementation of the numerical kernels.

This module mirrors ``_core.pyx`` function for function.  It is used when the
compiled extension is unavailable or when ``FRACGREEN_PURE_PYTHON=1``.
"""
import cmath
import math

import numpy as np

from .errors import GammaOverflowError, GammaPoleError

POLE_TOL = 1e-12

# Godfrey's 15-term Lanczos set, g = 607/128
LANCZOS_G = 607.0 / 128.0
LANCZOS_COEF = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)
MAX_EXP = 709.0

# B_{2j} / (2j (2j-1)) for the Stirling tail
STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)


def pole_index(z):
    """Return k >= 0 if z is within POLE_TOL of -k, else -1."""
    re = z.real
    if re > 0.5 or abs(z.imag) >= POLE_TOL:
        return -1
    k = round(-re)
    if abs(z + k) < POLE_TOL:
        return int(k)
    return -1


def sinpi(z):
    """sin(pi z) with the real part reduced first."""
    n = round(z.real)
    f = complex(z.real - n, z.imag)
    s = cmath.sin(math.pi * f)
    return -s if n % 2 else s


def _lanczos_log(z):
    # log Gamma(z) for Re z >= 0.5 (some branch; exp() of it is Gamma)
    zm = z - 1.0
    acc = LANCZOS_COEF[0]
    for i in range(1, 15):
        acc += LANCZOS_COEF[i] / (zm + i)
    t = zm + LANCZOS_G + 0.5
    return HALF_LOG_2PI + (zm + 0.5) * cmath.log(t) - t + cmath.log(acc)


def gamma(z):
    z = complex(z)
    if pole_index(z) >= 0:
        raise GammaPoleError(z)
    if z.imag == 0.0 and z.real == round(z.real) and 0 < z.real <= 171:
        return complex(math.factorial(int(z.real) - 1))
    if z.real >= 0.5:
        lg = _lanczos_log(z)
        if lg.real > MAX_EXP:
            raise GammaOverflowError(z, log_gamma(z))
        return cmath.exp(lg)
    w = 1.0 - z
    lg = _lanczos_log(w)
    s = sinpi(z)
    if lg.real > MAX_EXP:
        return cmath.exp(LOG_PI - cmath.log(s) - lg)
    return math.pi / (s * cmath.exp(lg))


def rgamma(z):
    z = complex(z)
    if pole_index(z) >= 0:
        return 0j
    if z.real >= 0.5:
        return cmath.exp(-_lanczos_log(z))
    w = 1.0 - z
    lg = _lanczos_log(w)
    s = sinpi(z)
    if lg.real > MAX_EXP:
        return cmath.exp(cmath.log(s) + lg - LOG_PI)
    return s * cmath.exp(lg) / math.pi


def log_gamma(z):
    """Principal branch of log Gamma, continuous off the negative real axis."""
    z = complex(z)
    if pole_index(z) >= 0:
        raise GammaPoleError(z)
    if z.imag == 0.0:
        z = complex(z.real, 0.0)  # normalise -0.0 so the cut is approached from above
    shift = 0
    corr = 0j
    w = z
    if w.real < 10.0:
        shift = int(math.ceil(10.0 - w.real))
        for k in range(shift):
            corr += cmath.log(w + k)
        w = w + shift
    inv = 1.0 / w
    inv2 = inv * inv
    tail = 0j
    p = inv
    for c in STIRLING_COEF:
        tail += c * p
        p *= inv2
    return (w - 0.5) * cmath.log(w) - w + HALF_LOG_2PI + tail - corr


def _lg_any(z):
    # log Gamma on any branch; faster than the principal-branch routine
    if z.imag == 0.0 and z.real > 0.0:
        return complex(math.lgamma(z.real), 0.0)
    if z.real >= 0.5:
        return _lanczos_log(z)
    return LOG_PI - cmath.log(sinpi(z)) - _lanczos_log(1.0 - z)


def h_series(z, m, n, a, A, b, B, tol, kmax, kmin):
    """Residue series of H^{m,n}_{p,q}(z) over the poles of Gamma(b_h + B_h s).

    Returns (sum, abs_sum, first_omitted, terms_used, converged).  A term is a
    structural zero when a reciprocal-gamma factor sits on a pole; runs of such
    zeros are skipped by the stop rule.
    """
    z = complex(z)
    p = len(a)
    q = len(b)
    logz = cmath.log(z)
    total = 0j
    abs_sum = 0.0
    first_omitted = 0.0
    terms_used = 0
    converged = True
    for h in range(m):
        bh = b[h]
        Bh = B[h]
        small_run = 0
        zero_run = 0
        last_nonzero = 0.0
        done = False
        for k in range(kmax + 1):
            s = (bh + k) / Bh
            lt = -math.lgamma(k + 1.0) + s * logz - math.log(Bh)
            zero = False
            for j in range(q):
                if j == h:
                    continue
                if j < m:
                    arg = complex(b[j] - B[j] * s)
                    if pole_index(arg) >= 0:
                        raise GammaPoleError(arg)
                    lt += _lg_any(arg)
                else:
                    arg = complex(1.0 - b[j] + B[j] * s)
                    if pole_index(arg) >= 0:
                        zero = True
                        break
                    lt -= _lg_any(arg)
            if not zero:
                for i in range(p):
                    if i < n:
                        arg = complex(1.0 - a[i] + A[i] * s)
                        if pole_index(arg) >= 0:
                            raise GammaPoleError(arg)
                        lt += _lg_any(arg)
                    else:
                        arg = complex(a[i] - A[i] * s)
                        if pole_index(arg) >= 0:
                            zero = True
                            break
                        lt -= _lg_any(arg)
            if zero:
                term = 0j
            else:
                term = cmath.exp(lt)
                if k % 2:
                    term = -term
            mag = abs(term)
            total += term
            abs_sum += mag
            terms_used += 1
            if zero:
                zero_run += 1
            else:
                zero_run = 0
                last_nonzero = mag
                tot = abs(total)
                if mag < tol * tot or (tot < tol and mag < tol):
                    small_run += 1
                else:
                    small_run = 0
            if k >= kmin and (small_run >= 3 or zero_run >= 50):
                first_omitted = _next_term_mag(z, h, k + 1, m, n, a, A, b, B, logz, last_nonzero)
                done = True
                break
        if not done:
            converged = False
            first_omitted = last_nonzero
    return total, abs_sum, first_omitted, terms_used, converged


def _next_term_mag(z, h, k, m, n, a, A, b, B, logz, fallback):
    # magnitude of the first omitted nonzero term (searching a few ahead)
    p = len(a)
    q = len(b)
    for kk in range(k, k + 8):
        s = (b[h] + kk) / B[h]
        lt = -math.lgamma(kk + 1.0) + (s * logz).real - math.log(B[h])
        zero = False
        for j in range(q):
            if j == h:
                continue
            if j < m:
                arg = complex(b[j] - B[j] * s)
                lt += _lg_any(arg).real
            else:
                arg = complex(1.0 - b[j] + B[j] * s)
                if pole_index(arg) >= 0:
                    zero = True
                    break
                lt -= _lg_any(arg).real
        if zero:
            continue
        for i in range(p):
            if i < n:
                lt += _lg_any(complex(1.0 - a[i] + A[i] * s)).real
            else:
                arg = complex(a[i] - A[i] * s)
                if pole_index(arg) >= 0:
                    zero = True
                    break
                lt -= _lg_any(arg).real
        if not zero:
            return math.exp(lt) if lt < MAX_EXP else math.inf
    return 0.0 if fallback == 0.0 else fallback


def born_accumulate(targets, t_targets, src, src_t, weights, params, far_field=False):
    """Sum asymptotic-Green contributions from space-time sources to targets.

    targets (Nt, 3), t_targets (Nt,), src (Ns, 3), src_t (Nts,),
    weights (Nts, Ns) complex.  ``params`` is the tuple built by
    ``green.asymptotic_kernel_params``.
    """
    (n1, dpow, hbar, nu, gam, q, kappa, cc, kp, km, tau_min) = params
    targets = np.asarray(targets, dtype=float)
    src = np.asarray(src, dtype=float)
    src_t = np.asarray(src_t, dtype=float)
    weights = np.asarray(weights, dtype=complex)
    out = np.zeros(len(targets), dtype=complex)
    two_pi2_h2 = 2.0 * math.pi**2 * hbar**2
    for it in range(len(targets)):
        r = targets[it]
        if far_field:
            d = np.full(len(src), math.sqrt(float(r @ r)))
        else:
            diff = src - r
            d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        lnd = np.log(d)
        amp = np.exp((q - 1.0) * lnd)
        dk = np.exp(kappa * lnd)
        acc = 0j
        for l in range(len(src_t)):
            tau = t_targets[it] - src_t[l]
            if tau < tau_min:
                continue
            xi = dpow * tau / hbar
            u = 1.0 / (xi ** (1.0 / nu) * hbar)
            big_n = n1 * xi ** ((gam - 2.0) / nu) / two_pi2_h2
            pre = math.pi**2 * big_n * u**q
            cu = cc * u**kappa
            ph = cu * dk
            g = amp * (kp * np.exp(1j * ph) + km * np.exp(-1j * ph))
            acc += pre * np.dot(g, weights[l])
        out[it] = acc
    return out
