# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; ``_core_py`` holds the pure-Python twin of every function."""
import numpy as np

cimport cython
from libc.math cimport M_PI, ceil, cos, exp, fabs, floor, lgamma, log, round, sin, sqrt, pow

from .errors import GammaOverflowError, GammaPoleError

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double complex csin(double complex)
    double complex cpow(double complex, double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

DEF NCOEF = 15
DEF NSTIR = 8

cdef double POLE_TOL_C = 1e-12
cdef double LANCZOS_G_C = 607.0 / 128.0
cdef double HALF_LOG_2PI_C = 0.91893853320467274178
cdef double LOG_PI_C = 1.1447298858494001741
cdef double MAX_EXP_C = 709.0
cdef double LANCZOS[NCOEF]
cdef double STIRLING[NSTIR]

LANCZOS[:] = [
    0.99999999999999709182, 57.156235665862923517, -59.597960355475491248,
    14.136097974741747174, -0.49191381609762019978, 0.33994649984811888699e-4,
    0.46523628927048575665e-4, -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4, -0.26190838401581408670e-4, 0.36899182659531622704e-5,
]
STIRLING[:] = [
    1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0,
    -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0,
]

POLE_TOL = POLE_TOL_C


cdef inline double complex mkc(double re, double im) nogil:
    cdef double complex z = re + 1j * im
    return z


cdef int c_pole_index(double complex z) nogil:
    cdef double re = creal(z)
    cdef double k
    if re > 0.5 or fabs(cimag(z)) >= POLE_TOL_C:
        return -1
    k = round(-re)
    if cabs(z + k) < POLE_TOL_C:
        return <int>k
    return -1


cdef double complex c_sinpi(double complex z) nogil:
    cdef double n = round(creal(z))
    cdef double complex f = mkc(creal(z) - n, cimag(z))
    cdef double complex s = csin(M_PI * f)
    if (<long>n) % 2:
        return -s
    return s


cdef double complex c_lanczos_log(double complex z) nogil:
    cdef double complex zm = z - 1.0
    cdef double complex acc = LANCZOS[0]
    cdef double complex t
    cdef int i
    for i in range(1, NCOEF):
        acc = acc + LANCZOS[i] / (zm + i)
    t = zm + LANCZOS_G_C + 0.5
    return HALF_LOG_2PI_C + (zm + 0.5) * clog(t) - t + clog(acc)


cdef double complex c_lg_any(double complex z) nogil:
    if cimag(z) == 0.0 and creal(z) > 0.0:
        return mkc(lgamma(creal(z)), 0.0)
    if creal(z) >= 0.5:
        return c_lanczos_log(z)
    return LOG_PI_C - clog(c_sinpi(z)) - c_lanczos_log(1.0 - z)


cdef double complex c_log_gamma(double complex z) nogil:
    cdef int shift, k
    cdef double complex corr = 0, w = z, inv, inv2, tail = 0, p
    if cimag(w) == 0.0:
        w = mkc(creal(w), 0.0)
    if creal(w) < 10.0:
        shift = <int>ceil(10.0 - creal(w))
        for k in range(shift):
            corr = corr + clog(w + k)
        w = w + shift
    inv = 1.0 / w
    inv2 = inv * inv
    p = inv
    for k in range(NSTIR):
        tail = tail + STIRLING[k] * p
        p = p * inv2
    return (w - 0.5) * clog(w) - w + HALF_LOG_2PI_C + tail - corr


def pole_index(z):
    return c_pole_index(complex(z))


def sinpi(z):
    return complex(c_sinpi(complex(z)))


def log_gamma(z):
    cdef double complex zc = complex(z)
    if c_pole_index(zc) >= 0:
        raise GammaPoleError(complex(z))
    return complex(c_log_gamma(zc))


def gamma(z):
    cdef double complex zc = complex(z)
    cdef double complex lg, s, w
    cdef long n, k
    cdef double f
    if c_pole_index(zc) >= 0:
        raise GammaPoleError(complex(z))
    if cimag(zc) == 0.0 and creal(zc) == floor(creal(zc)) and 0 < creal(zc) <= 171:
        n = <long>creal(zc)
        f = 1.0
        for k in range(2, n):
            f *= k
        return complex(f)
    if creal(zc) >= 0.5:
        lg = c_lanczos_log(zc)
        if creal(lg) > MAX_EXP_C:
            raise GammaOverflowError(complex(z), complex(c_log_gamma(zc)))
        return complex(cexp(lg))
    w = 1.0 - zc
    lg = c_lanczos_log(w)
    s = c_sinpi(zc)
    if creal(lg) > MAX_EXP_C:
        return complex(cexp(LOG_PI_C - clog(s) - lg))
    return complex(M_PI / (s * cexp(lg)))


def rgamma(z):
    cdef double complex zc = complex(z)
    cdef double complex lg, s
    if c_pole_index(zc) >= 0:
        return 0j
    if creal(zc) >= 0.5:
        return complex(cexp(-c_lanczos_log(zc)))
    lg = c_lanczos_log(1.0 - zc)
    s = c_sinpi(zc)
    if creal(lg) > MAX_EXP_C:
        return complex(cexp(clog(s) + lg - LOG_PI_C))
    return complex(s * cexp(lg) / M_PI)


def _lg_any(z):
    return complex(c_lg_any(complex(z)))


cdef int term_log(double complex logz, int h, int k, int m, int n, int p, int q,
                  double* a, double* A, double* b, double* B,
                  double complex* out, double complex* bad) nogil:
    # 0: ok (out = log of |term| with phase), 1: structural zero, 2: numerator pole (bad = arg)
    cdef double s = (b[h] + k) / B[h]
    cdef double complex lt = -lgamma(k + 1.0) + s * logz - log(B[h])
    cdef double complex arg
    cdef int j, i
    for j in range(q):
        if j == h:
            continue
        if j < m:
            arg = mkc(b[j] - B[j] * s, 0.0)
            if c_pole_index(arg) >= 0:
                bad[0] = arg
                return 2
            lt = lt + c_lg_any(arg)
        else:
            arg = mkc(1.0 - b[j] + B[j] * s, 0.0)
            if c_pole_index(arg) >= 0:
                return 1
            lt = lt - c_lg_any(arg)
    for i in range(p):
        if i < n:
            arg = mkc(1.0 - a[i] + A[i] * s, 0.0)
            if c_pole_index(arg) >= 0:
                bad[0] = arg
                return 2
            lt = lt + c_lg_any(arg)
        else:
            arg = mkc(a[i] - A[i] * s, 0.0)
            if c_pole_index(arg) >= 0:
                return 1
            lt = lt - c_lg_any(arg)
    out[0] = lt
    return 0


cdef double next_term_mag(double complex logz, int h, int k, int m, int n, int p, int q,
                          double* a, double* A, double* b, double* B, double fallback) nogil:
    cdef int kk, st
    cdef double complex lt, bad
    for kk in range(k, k + 8):
        st = term_log(logz, h, kk, m, n, p, q, a, A, b, B, &lt, &bad)
        if st == 0:
            if creal(lt) < MAX_EXP_C:
                return exp(creal(lt))
            return 1e308 * 10
        if st == 2:
            continue
    return fallback


def h_series(z, int m, int n, a, A, b, B, double tol, int kmax, int kmin):
    """Residue series of H^{m,n}_{p,q}(z); see ``_core_py.h_series``."""
    cdef double complex zc = complex(z)
    cdef double complex logz = clog(zc)
    cdef int p = len(a), q = len(b)
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef double* pa = &av[0] if p > 0 else NULL
    cdef double* pA = &Av[0] if p > 0 else NULL
    cdef double* pb = &bv[0]
    cdef double* pB = &Bv[0]
    cdef double complex total = 0, term, lt, bad = 0
    cdef double abs_sum = 0, first_omitted = 0, mag, tot, last_nonzero
    cdef long terms_used = 0
    cdef bint converged = True, done, zero
    cdef int h, k, st, small_run, zero_run
    for h in range(m):
        small_run = 0
        zero_run = 0
        last_nonzero = 0.0
        done = False
        for k in range(kmax + 1):
            st = term_log(logz, h, k, m, n, p, q, pa, pA, pb, pB, &lt, &bad)
            if st == 2:
                raise GammaPoleError(complex(bad))
            zero = st == 1
            if zero:
                term = 0
            else:
                term = cexp(lt)
                if k % 2:
                    term = -term
            mag = cabs(term)
            total = total + term
            abs_sum += mag
            terms_used += 1
            if zero:
                zero_run += 1
            else:
                zero_run = 0
                last_nonzero = mag
                tot = cabs(total)
                if mag < tol * tot or (tot < tol and mag < tol):
                    small_run += 1
                else:
                    small_run = 0
            if k >= kmin and (small_run >= 3 or zero_run >= 50):
                first_omitted = next_term_mag(logz, h, k + 1, m, n, p, q, pa, pA, pb, pB, last_nonzero)
                done = True
                break
        if not done:
            converged = False
            first_omitted = last_nonzero
    return complex(total), abs_sum, first_omitted, terms_used, converged


def born_accumulate(targets, t_targets, src, src_t, weights, params, bint far_field=False):
    """Sum asymptotic-Green contributions from space-time sources; see ``_core_py``."""
    cdef double complex n1 = params[0]
    cdef double dpow = params[1], hbar = params[2], nu = params[3], gam = params[4]
    cdef double qq = params[5], kappa = params[6], cc = params[7]
    cdef double complex kp = params[8], km = params[9]
    cdef double tau_min = params[10]
    cdef double[:, ::1] tg = np.ascontiguousarray(targets, dtype=np.float64)
    cdef double[::1] tt = np.ascontiguousarray(t_targets, dtype=np.float64)
    cdef double[:, ::1] sr = np.ascontiguousarray(src, dtype=np.float64)
    cdef double[::1] st = np.ascontiguousarray(src_t, dtype=np.float64)
    cdef double complex[:, ::1] w = np.ascontiguousarray(weights, dtype=np.complex128)
    cdef Py_ssize_t nt = tg.shape[0], ns = sr.shape[0], nts = st.shape[0]
    out_arr = np.zeros(nt, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double[::1] dq = np.empty(ns, dtype=np.float64)
    cdef double[::1] dk = np.empty(ns, dtype=np.float64)
    cdef Py_ssize_t it, s, l
    cdef double dx, dy, dz, d, lnd, tau, xi, u, ph, cu, c, sn
    cdef double two_pi2_h2 = 2.0 * M_PI * M_PI * hbar * hbar
    cdef double complex acc, inner, big_n, pre
    cdef double kpr = creal(kp), kpi = cimag(kp), kmr = creal(km), kmi = cimag(km)
    cdef double ir, ii, wr, wi, gr, gi
    with nogil:
        for it in range(nt):
            for s in range(ns):
                if far_field:
                    d = sqrt(tg[it, 0] * tg[it, 0] + tg[it, 1] * tg[it, 1] + tg[it, 2] * tg[it, 2])
                else:
                    dx = sr[s, 0] - tg[it, 0]
                    dy = sr[s, 1] - tg[it, 1]
                    dz = sr[s, 2] - tg[it, 2]
                    d = sqrt(dx * dx + dy * dy + dz * dz)
                lnd = log(d)
                dq[s] = exp((qq - 1.0) * lnd)
                dk[s] = exp(kappa * lnd)
            acc = 0
            for l in range(nts):
                tau = tt[it] - st[l]
                if tau < tau_min:
                    continue
                xi = dpow * tau / hbar
                u = 1.0 / (pow(xi, 1.0 / nu) * hbar)
                big_n = n1 * pow(xi, (gam - 2.0) / nu) / two_pi2_h2
                pre = M_PI * M_PI * big_n * pow(u, qq)
                cu = cc * pow(u, kappa)
                ir = 0.0
                ii = 0.0
                for s in range(ns):
                    ph = cu * dk[s]
                    c = cos(ph)
                    sn = sin(ph)
                    # kp e^{i ph} + km e^{-i ph}
                    gr = (kpr + kmr) * c - (kpi - kmi) * sn
                    gi = (kpi + kmi) * c + (kpr - kmr) * sn
                    wr = creal(w[l, s]) * dq[s]
                    wi = cimag(w[l, s]) * dq[s]
                    ir = ir + gr * wr - gi * wi
                    ii = ii + gr * wi + gi * wr
                inner = mkc(ir, ii)
                acc = acc + pre * inner
            out[it] = acc
    return out_arr
