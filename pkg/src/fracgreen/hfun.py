"""Fox H-function parameters, structural indices and evaluation.

Two evaluation routes are provided: the residue power series over the poles of
Gamma(b_j + B_j s) (valid for Delta > 0, or Delta = 0 inside |z| < delta) and
the leading asymptotic expansion at infinity for Delta > 0, Delta* = 0.
``eval_auto`` picks between them with a per-parameter switch point.
"""
import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from ._backend import core
from .errors import (
    AsymptoticInapplicableError,
    HParamsError,
    NoEvaluationMethodError,
    ParameterError,
    SeriesConditionError,
    SeriesConvergenceError,
)
from .special_fn import log_gamma

K_MAX = 2000
SERIES_TOL = 1e-16
ASYMPTOTIC_SAFETY = 10.0
CONDITION_SCAN = 100
CONDITION_TOL = 1e-9
DELTA_STAR_TOL = 1e-12
EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class HParams:
    m: int
    n: int
    upper: tuple  # ((a_1, A_1), ..., (a_p, A_p))
    lower: tuple  # ((b_1, B_1), ..., (b_q, B_q))

    @property
    def p(self):
        return len(self.upper)

    @property
    def q(self):
        return len(self.lower)

    @property
    def a(self):
        return tuple(pair[0] for pair in self.upper)

    @property
    def A(self):
        return tuple(pair[1] for pair in self.upper)

    @property
    def b(self):
        return tuple(pair[0] for pair in self.lower)

    @property
    def B(self):
        return tuple(pair[1] for pair in self.lower)


@dataclass(frozen=True)
class DeltaSet:
    delta: float
    delta_star: float
    small_delta: float
    mu: float


@dataclass(frozen=True)
class EvalResult:
    value: complex
    abs_error_estimate: float
    terms_used: int
    method: str  # "series" | "asymptotic"


@dataclass(frozen=True)
class SeriesConditions:
    pole_separation: bool
    lower_simple: bool
    upper_simple: bool

    @property
    def series_ok(self):
        return self.pole_separation and self.lower_simple

    @property
    def asymptotic_ok(self):
        return self.pole_separation and self.upper_simple


def make_hparams(upper, lower, m, n):
    upper = tuple((float(a), float(A)) for a, A in upper)
    lower = tuple((float(b), float(B)) for b, B in lower)
    p, q = len(upper), len(lower)
    if not (0 <= n <= p and 0 <= m <= q):
        raise HParamsError(f"invalid H-function orders: m={m}, n={n}, p={p}, q={q}")
    for _, c in upper + lower:
        if not c > 0 or not math.isfinite(c):
            raise HParamsError(f"invalid coefficient: {c} (A_i, B_j must be positive)")
    for v, _ in upper + lower:
        if not math.isfinite(v):
            raise HParamsError(f"invalid coefficient: {v}")
    return HParams(int(m), int(n), upper, lower)


def structural_indices(h):
    A, B, a, b = h.A, h.B, h.a, h.b
    # single fsum over signed terms so exact cancellations stay exact
    delta = math.fsum(list(B) + [-x for x in A])
    delta_star = math.fsum(
        list(A[: h.n]) + [-x for x in A[h.n :]] + list(B[: h.m]) + [-x for x in B[h.m :]]
    )
    log_small = -math.fsum(x * math.log(x) for x in A) + math.fsum(x * math.log(x) for x in B)
    mu = math.fsum(b) - math.fsum(a) + (h.p - h.q) / 2.0
    return DeltaSet(delta, delta_star, math.exp(log_small), mu)


def rescale_argument(h, k):
    """Parameters of H[z^k] such that eval(new, z**k) == eval(old, z) / k."""
    if not k > 0:
        raise ParameterError(f"invalid scale k={k}")
    return HParams(
        h.m,
        h.n,
        tuple((a, k * A) for a, A in h.upper),
        tuple((b, k * B) for b, B in h.lower),
    )


def power_shift(h, sigma):
    """Parameters such that eval(new, z) == z**sigma * eval(old, z)."""
    return HParams(
        h.m,
        h.n,
        tuple((a + sigma * A, A) for a, A in h.upper),
        tuple((b + sigma * B, B) for b, B in h.lower),
    )


def check_series_conditions(h, kmax=CONDITION_SCAN, tol=CONDITION_TOL):
    a, A, b, B = h.a, h.A, h.b, h.B
    rng = range(kmax + 1)
    sep = True
    for i in range(h.n):
        for j in range(h.m):
            for k in rng:
                rhs = B[j] * (a[i] - k - 1)
                if any(abs(A[i] * (b[j] + l) - rhs) < tol for l in rng):
                    sep = False
                    break
            if not sep:
                break
        if not sep:
            break
    lower = _pairwise_simple(b, B, h.m, rng, tol)
    # upper poles: A_i (1 - a_j + l) != A_j (1 - a_i + k)
    upper = _pairwise_simple([1.0 - x for x in a], A, h.n, rng, tol)
    return SeriesConditions(sep, lower, upper)


def _pairwise_simple(c, C, count, rng, tol):
    for i in range(count):
        for j in range(count):
            if i == j:
                continue
            for k in rng:
                rhs = C[j] * (c[i] + k)
                for l in rng:
                    if abs(C[i] * (c[j] + l) - rhs) < tol:
                        return False
    return True


@lru_cache(maxsize=512)
def _conditions(h):
    return check_series_conditions(h)


@lru_cache(maxsize=512)
def _indices(h):
    return structural_indices(h)


def _series_applicable(h, z):
    ds = _indices(h)
    if ds.delta > 0:
        return True
    if ds.delta == 0 and abs(z) < ds.small_delta:
        return True
    return False


def _peak_index(h, z):
    ds = _indices(h)
    if ds.delta <= 0:
        return 3
    s_peak = (abs(z) / ds.small_delta) ** (1.0 / ds.delta)
    return int(min(K_MAX, max(B * s_peak for B in h.B[: h.m]))) + 3


def eval_series(h, z, tol=SERIES_TOL):
    z = complex(z)
    if z == 0:
        raise ParameterError("series evaluation needs z != 0")
    if not _series_applicable(h, z):
        raise SeriesConditionError(
            "series conditions violated: need Delta > 0, or Delta = 0 with |z| < delta"
        )
    cond = _conditions(h)
    if not cond.series_ok:
        raise SeriesConditionError(f"series conditions violated: {cond}")
    total, abs_sum, omitted, used, ok = core.h_series(
        z, h.m, h.n, h.a, h.A, h.b, h.B, tol, K_MAX, _peak_index(h, z)
    )
    if not ok:
        raise SeriesConvergenceError("series did not converge", total, used)
    # log-space assembly costs ~|log term| ulps per term
    err = omitted + 32.0 * EPS * abs_sum
    total = complex(total)
    if z.imag == 0 and z.real > 0:
        total = complex(total.real, 0.0)  # every term is real on the positive axis
    return EvalResult(total, float(err), int(used), "series")


def _gamma_ratio(num, den):
    """prod Gamma(num) / prod Gamma(den), assembled in log space."""
    acc = 0j
    for x in den:
        if core.pole_index(complex(x)) >= 0:
            return 0j
        acc -= log_gamma(x)
    for x in num:
        acc += log_gamma(x)
    return cmath.exp(acc)


@dataclass(frozen=True)
class AsymptoticConstants:
    rho: float  # power (mu + 1/2) / Delta of the oscillatory envelope
    inv_delta: float
    amp: complex  # A of the expansion
    phase0: float  # B
    freq: float  # C
    c0: complex
    d0: complex
    alg_coef: tuple  # h_i
    alg_pow: tuple  # (a_i - 1) / A_i
    alg_step: tuple  # 1 / A_i, relative order of the next algebraic term


@lru_cache(maxsize=512)
def asymptotic_constants(h):
    ds = _indices(h)
    if ds.delta <= 0 or abs(ds.delta_star) > DELTA_STAR_TOL:
        raise AsymptoticInapplicableError(
            f"asymptotic expansion inapplicable: Delta={ds.delta}, Delta*={ds.delta_star}"
        )
    cond = _conditions(h)
    if not cond.asymptotic_ok:
        raise AsymptoticInapplicableError(f"asymptotic expansion inapplicable: {cond}")
    a, A, b, B = h.a, h.A, h.b, h.B
    m, n, p, q = h.m, h.n, h.p, h.q
    delta, mu = ds.delta, ds.mu
    coefs, pows, steps = [], [], []
    for i in range(n):
        s = (a[i] - 1.0) / A[i]
        num = [b[j] - B[j] * s for j in range(m)]
        num += [1.0 - a[j] + A[j] * s for j in range(n) if j != i]
        den = [a[j] - A[j] * s for j in range(n, p)]
        den += [1.0 - b[j] + B[j] * s for j in range(m, q)]
        coefs.append(_gamma_ratio(num, den) / A[i])
        pows.append(s)
        steps.append(1.0 / A[i])
    log_a0 = (
        0.5 * (p - q + 1) * math.log(2 * math.pi)
        - mu * math.log(delta)
        + math.fsum((0.5 - a[i]) * math.log(A[i]) for i in range(p))
        + math.fsum((b[j] - 0.5) * math.log(B[j]) for j in range(q))
    )
    ratio = delta * math.log(delta) - math.log(ds.small_delta)  # log(Delta^Delta / delta)
    rho = (mu + 0.5) / delta
    amp = math.exp(log_a0 + rho * ratio) / (2j * math.pi * delta)
    phase0 = (2 * mu + 1) * math.pi / 4
    freq = math.exp(ratio / delta)
    shift = math.fsum(a[n:]) - math.fsum(b[:m])
    c0 = (2j * math.pi) ** (m + n - p) * cmath.exp(1j * math.pi * shift)
    d0 = (-2j * math.pi) ** (m + n - p) * cmath.exp(-1j * math.pi * shift)
    return AsymptoticConstants(
        rho, 1.0 / delta, amp, phase0, freq, c0, d0, tuple(coefs), tuple(pows), tuple(steps)
    )


def default_threshold(h):
    """|z| beyond which the first omitted oscillatory order is below the leading one."""
    return ASYMPTOTIC_SAFETY ** _indices(h).delta


@dataclass(frozen=True)
class AsymptoticParts:
    algebraic: complex
    oscillatory: complex
    algebraic_err: float
    oscillatory_err: float


def asymptotic_parts(h, z):
    c = asymptotic_constants(h)
    z = complex(z)
    logz = cmath.log(z)
    alg = 0j
    alg_err = 0.0
    for coef, pw, step in zip(c.alg_coef, c.alg_pow, c.alg_step):
        t = coef * cmath.exp(pw * logz)
        alg += t
        alg_err += ASYMPTOTIC_SAFETY * abs(t) * abs(z) ** (-step)
    w = cmath.exp(c.inv_delta * logz)
    ph = c.phase0 + c.freq * w
    env = c.amp * cmath.exp(c.rho * logz)
    osc = env * (c.c0 * cmath.exp(1j * ph) - c.d0 * cmath.exp(-1j * ph))
    scale = abs(env) * (abs(c.c0 * cmath.exp(1j * ph)) + abs(c.d0 * cmath.exp(-1j * ph)))
    osc_err = ASYMPTOTIC_SAFETY * scale * abs(w) ** -1.0
    return AsymptoticParts(alg, osc, alg_err, osc_err)


def eval_asymptotic(h, z, threshold=None):
    """Leading asymptotic expansion at infinity (Delta > 0, Delta* = 0).

    The error estimate is the safety factor times the first omitted order of
    each retained scale; pass ``threshold=0`` to evaluate at any |z|.
    """
    asymptotic_constants(h)  # raises when inapplicable
    if threshold is None:
        threshold = default_threshold(h)
    if abs(z) < threshold:
        raise AsymptoticInapplicableError(
            f"asymptotic regime not reached: |z|={abs(z)} < threshold {threshold}"
        )
    parts = asymptotic_parts(h, z)
    return EvalResult(
        parts.algebraic + parts.oscillatory,
        parts.algebraic_err + parts.oscillatory_err,
        len(asymptotic_constants(h).alg_coef) + 2,
        "asymptotic",
    )


def _try_series(h, z):
    try:
        return eval_series(h, z)
    except (SeriesConvergenceError, OverflowError):
        return None


@lru_cache(maxsize=512)
def switch_point(h):
    """|z| above which ``eval_auto`` prefers the asymptotic expansion."""
    try:
        asymptotic_constants(h)
        asym_ok = True
    except AsymptoticInapplicableError:
        asym_ok = False
    ds = _indices(h)
    series_ok = _conditions(h).series_ok and ds.delta >= 0
    if not series_ok and not asym_ok:
        return None
    if not asym_ok:
        return math.inf
    if not series_ok or ds.delta == 0:
        return 0.0

    def series_worse(z):
        r = _try_series(h, z)
        if r is None or r.terms_used > 400:
            return True
        return r.abs_error_estimate > eval_asymptotic(h, z, threshold=0).abs_error_estimate

    grid = [10 ** (j / 10.0) for j in range(-10, 121)]
    prev = grid[0]
    if series_worse(prev):
        return prev
    for z in grid[1:]:
        if series_worse(z):
            lo, hi = math.log(prev), math.log(z)
            for _ in range(30):
                mid = 0.5 * (lo + hi)
                if series_worse(math.exp(mid)):
                    hi = mid
                else:
                    lo = mid
            return math.exp(lo)
        prev = z
    return grid[-1]


def eval_auto(h, z):
    z = complex(z)
    zs = switch_point(h)
    if zs is None:
        raise NoEvaluationMethodError("no evaluation method: series and asymptotic both inapplicable")
    if abs(z) <= zs:
        r = _try_series(h, z)
        if r is not None:
            return r
    if zs == math.inf:
        return eval_series(h, z)
    return eval_asymptotic(h, z, threshold=0)
