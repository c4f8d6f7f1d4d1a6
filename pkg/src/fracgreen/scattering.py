"""Born-approximation scattering with the fractional Green's function.

psi = psi0 + D * int int G(r, t; r', t') V(r', t') psi(r', t') d^3r' dt'

* ``born_first_order``: psi0 substituted for psi, G replaced by its leading
  large-distance form; tensor Gauss rules over the potential support.
* ``born_iterate`` / ``born_series``: repeated substitution on a space-time
  lattice with the full (regular) G.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy import fft as sfft
from scipy import integrate

from . import green
from ._backend import core
from .errors import FarFieldError, GridError, ParameterError

SUPPORT_CUT = 1e-12  # V below this fraction of V0 is treated as zero
SUPPORT_WIDTH = math.sqrt(-2.0 * math.log(SUPPORT_CUT))  # ~7.434 sigma
FAR_FIELD_MARGIN = 5.0  # in units of the potential length scale


@dataclass(frozen=True)
class TimeProfile:
    kind: str  # constant | gaussian
    t_on: float = 0.0
    t_off: float = 0.0
    t0: float = 0.0
    sigma_t: float = 1.0

    def __post_init__(self):
        if self.kind == "constant":
            if not (math.isfinite(self.t_on) and math.isfinite(self.t_off) and self.t_off > self.t_on):
                raise ParameterError("constant profile needs finite t_on < t_off")
        elif self.kind == "gaussian":
            if not self.sigma_t > 0:
                raise ParameterError("sigma_t must be positive")
        else:
            raise ParameterError(f"unknown time profile {self.kind!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return ((t >= self.t_on) & (t <= self.t_off)).astype(float)
        u = (t - self.t0) / self.sigma_t
        return np.where(np.abs(u) <= SUPPORT_WIDTH, np.exp(-0.5 * u * u), 0.0)

    def support(self):
        if self.kind == "constant":
            return self.t_on, self.t_off
        return self.t0 - SUPPORT_WIDTH * self.sigma_t, self.t0 + SUPPORT_WIDTH * self.sigma_t


def constant_profile(t_on, t_off):
    return TimeProfile("constant", t_on=t_on, t_off=t_off)


def gaussian_profile(t0, sigma_t):
    return TimeProfile("gaussian", t0=t0, sigma_t=sigma_t)


@dataclass(frozen=True, eq=False)
class SpaceTimeGrid:
    """Uniform spatial lattice (x, y, z axes) and uniform time samples."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        for name in ("x", "y", "z", "t"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim != 1 or len(a) < 1:
                raise GridError(f"axis {name} must be a non-empty 1-D array")
            if len(a) > 1:
                d = np.diff(a)
                if not (d > 0).all() or np.ptp(d) > 1e-9 * d[0]:
                    raise GridError(f"axis {name} must be uniform and increasing")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def uniform(cls, lo, hi, n, t_lo, t_hi, nt):
        ax = np.linspace(lo, hi, n)
        return cls(ax, ax.copy(), ax.copy(), np.linspace(t_lo, t_hi, nt))

    @property
    def shape(self):
        return (len(self.t), len(self.x), len(self.y), len(self.z))

    @property
    def spacing(self):
        return tuple(a[1] - a[0] if len(a) > 1 else 1.0 for a in (self.x, self.y, self.z))

    @property
    def dt(self):
        return self.t[1] - self.t[0] if len(self.t) > 1 else 1.0

    def same_as(self, other):
        return all(
            len(a) == len(b) and np.allclose(a, b, rtol=0, atol=1e-12)
            for a, b in zip((self.x, self.y, self.z, self.t), (other.x, other.y, other.z, other.t))
        )

    def mesh(self):
        return np.meshgrid(self.x, self.y, self.z, indexing="ij")


@dataclass(frozen=True, eq=False)
class Potential:
    kind: str  # gaussian_separable | grid_sampled
    v0: float = 0.0
    sigma_r: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)
    profile: TimeProfile | None = None
    grid: SpaceTimeGrid | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "gaussian_separable":
            if not self.sigma_r > 0:
                raise ParameterError("sigma_r must be positive")
            if self.profile is None:
                raise ParameterError("gaussian potential needs a time profile")
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        elif self.kind == "grid_sampled":
            if self.grid is None or self.values is None:
                raise ParameterError("grid potential needs grid and values")
            v = np.asarray(self.values, dtype=float)
            if v.shape != self.grid.shape:
                raise GridError("potential values do not match the grid shape")
            object.__setattr__(self, "values", v)
        else:
            raise ParameterError(f"unknown potential kind {self.kind!r}")

    @property
    def peak(self):
        if self.kind == "gaussian_separable":
            return abs(self.v0)
        return float(np.abs(self.values).max())

    def spatial(self, pts):
        """Spatial factor at points (..., 3), cut to zero outside the support box."""
        d = (np.asarray(pts, dtype=float) - np.asarray(self.center)) / self.sigma_r
        inside = (np.abs(d) <= SUPPORT_WIDTH).all(axis=-1)
        return np.where(inside, np.exp(-0.5 * (d * d).sum(axis=-1)), 0.0)

    def on_grid(self, grid):
        """V sampled on every node of ``grid`` as an array (nt, nx, ny, nz)."""
        if self.kind == "grid_sampled":
            if not grid.same_as(self.grid):
                raise GridError("incompatible grids")
            return self.values
        X, Y, Z = grid.mesh()
        s = self.spatial(np.stack([X, Y, Z], axis=-1))
        return self.v0 * self.profile(grid.t)[:, None, None, None] * s[None]

    def bounding_box(self):
        if self.kind == "gaussian_separable":
            c = np.asarray(self.center)
            w = SUPPORT_WIDTH * self.sigma_r
            return c - w, c + w
        mask = (np.abs(self.values) >= SUPPORT_CUT * self.peak).any(axis=0)
        if not mask.any():
            c = np.array([self.grid.x.mean(), self.grid.y.mean(), self.grid.z.mean()])
            return c, c
        idx = [np.flatnonzero(mask.any(axis=tuple(j for j in range(3) if j != i))) for i in range(3)]
        axes = (self.grid.x, self.grid.y, self.grid.z)
        return (np.array([a[i[0]] for a, i in zip(axes, idx)]), np.array([a[i[-1]] for a, i in zip(axes, idx)]))

    def length_scale(self):
        if self.kind == "gaussian_separable":
            return self.sigma_r
        lo, hi = self.bounding_box()
        return max(float(np.max(hi - lo)) / (2.0 * SUPPORT_WIDTH), max(self.grid.spacing))

    def time_support(self):
        if self.kind == "gaussian_separable":
            return self.profile.support()
        live = np.flatnonzero((np.abs(self.values) >= SUPPORT_CUT * max(self.peak, 1e-300)).any(axis=(1, 2, 3)))
        if len(live) == 0:
            return self.grid.t[0], self.grid.t[0]
        return self.grid.t[live[0]], self.grid.t[live[-1]]


def gaussian_potential(v0, sigma_r, center=(0.0, 0.0, 0.0), profile=None):
    return Potential("gaussian_separable", float(v0), float(sigma_r), center, profile)


def grid_potential(grid, values):
    return Potential("grid_sampled", grid=grid, values=values)


@dataclass(frozen=True)
class Wavevector:
    """Incident momentum k (same units as p, so the phase is k.r/hbar) and energy E."""

    k: tuple
    energy: float

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(float(c) for c in self.k))
        if len(self.k) != 3:
            raise ParameterError("wavevector must be 3-D")

    @classmethod
    def from_direction(cls, fp, direction, energy):
        d = np.asarray(direction, dtype=float)
        n = np.linalg.norm(d)
        if not energy > 0 or n == 0:
            raise ParameterError("need positive energy and a nonzero direction")
        return cls(tuple((energy / fp.dcal) ** (1.0 / fp.alpha) * d / n), energy)

    def check(self, fp, rtol=1e-10):
        kmag = math.sqrt(sum(c * c for c in self.k))
        want = (self.energy / fp.dcal) ** (1.0 / fp.alpha) if self.energy > 0 else 0.0
        if abs(kmag - want) > rtol * max(want, 1e-300):
            raise ParameterError(f"k/E inconsistent: |k|={kmag:.12g}, (E/D)^(1/alpha)={want:.12g}")


def plane_wave(fp, wv, p):
    wv.check(fp)
    kr = sum(a * b for a, b in zip(wv.k, p.r))
    return complex(np.exp(1j * (kr - wv.energy * p.t) / fp.hbar))


def plane_wave_array(fp, wv, pts, t):
    pts = np.asarray(pts, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.exp(1j * (pts @ np.asarray(wv.k) - wv.energy * t) / fp.hbar)


@dataclass(frozen=True)
class BornConfig:
    spatial_nodes: int = 16
    max_spatial_nodes: int = 32
    time_nodes: int = 16
    time_panels: int = 4
    rel_tol: float = 1e-7
    far_field: bool = False  # use |r - r'| ~ |r - center| in G
    tau_min: float = 0.0
    check_far_field: bool = True
    threads: int = 1
    # lattice iteration
    slab_steps: int | None = None  # short-lag steps handled spectrally; None: automatic
    probes: np.ndarray | None = None  # (P, 3) off-grid points for order >= 1
    probe_times: np.ndarray | None = None

    def __post_init__(self):
        if not (1 <= self.spatial_nodes <= self.max_spatial_nodes):
            raise ParameterError("need 1 <= spatial_nodes <= max_spatial_nodes")
        if self.time_nodes < 1 or self.time_panels < 1:
            raise ParameterError("time quadrature sizes must be >= 1")
        if not self.rel_tol > 0:
            raise ParameterError("rel_tol must be positive")


@dataclass(frozen=True)
class BornResult:
    incident: np.ndarray
    scattered: np.ndarray
    error_estimate: np.ndarray
    spatial_nodes: int

    @property
    def total(self):
        return self.incident + self.scattered


def _spatial_rule(pot, n):
    u, w = hermgauss(n)
    c = np.asarray(pot.center)
    s2 = math.sqrt(2.0) * pot.sigma_r
    nodes = c[None, :] + s2 * np.stack(np.meshgrid(u, u, u, indexing="ij"), axis=-1).reshape(-1, 3)
    wts = (s2**3) * np.einsum("i,j,k->ijk", w, w, w).reshape(-1)
    return nodes, wts


def _time_rule(profile, t_hi, n, panels):
    # nodes/weights for int f(t') T(t') dt' over the profile support cut at t_hi
    lo, hi = profile.support()
    if profile.kind == "gaussian" and hi <= t_hi:
        u, w = hermgauss(n)
        s2 = math.sqrt(2.0) * profile.sigma_t
        return profile.t0 + s2 * u, s2 * w
    hi = min(hi, t_hi)
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    x, w = leggauss(n)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    wts = (half[:, None] * w[None, :]).reshape(-1) * profile(nodes)
    return nodes, wts


def _box_distance(pts, lo, hi):
    gap = np.maximum(np.maximum(lo - pts, pts - hi), 0.0)
    return np.sqrt((gap * gap).sum(axis=-1))


def _first_order_pass(fp, pot, wv, targets, times, cfg, n_space, n_time, panels):
    params = green.asymptotic_kernel_params(fp, cfg.tau_min)
    nodes, ws = _spatial_rule(pot, n_space)
    c = np.asarray(pot.center)
    out = np.zeros(len(targets), dtype=complex)
    psi_space = np.exp(1j * (nodes @ np.asarray(wv.k)) / fp.hbar) * ws
    for t in np.unique(times):
        sel = times == t
        tn, tw = _time_rule(pot.profile, t - cfg.tau_min, n_time, panels)
        if len(tn) == 0:
            continue
        weights = fp.dcal * pot.v0 * (tw * np.exp(-1j * wv.energy * tn / fp.hbar))[:, None] * psi_space[None, :]
        tg = targets[sel] - c if cfg.far_field else targets[sel]
        src = nodes - c if cfg.far_field else nodes
        out[sel] = core.born_accumulate(
            np.ascontiguousarray(tg), np.full(sel.sum(), float(t)), np.ascontiguousarray(src),
            tn, np.ascontiguousarray(weights), params, cfg.far_field,
        )
    return out


def born_first_order_points(fp, pot, wv, targets, times, cfg=BornConfig()):
    """First-order Born field at many targets; returns a BornResult of arrays.

    Quadrature is refined (more Gauss-Hermite nodes per axis, more time
    panels) until two successive passes agree to ``cfg.rel_tol`` or the node
    cap is reached; ``error_estimate`` is the last pass difference.
    """
    wv.check(fp)
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    times = np.broadcast_to(np.asarray(times, dtype=float), (len(targets),)).copy()
    incident = plane_wave_array(fp, wv, targets, times)
    if pot.kind == "grid_sampled":
        return _first_order_grid(fp, pot, wv, targets, times, cfg, incident)
    lo, hi = pot.bounding_box()
    if cfg.check_far_field:
        gap = _box_distance(targets, lo, hi)
        if (gap < FAR_FIELD_MARGIN * pot.length_scale()).any():
            raise FarFieldError("evaluation point inside potential region")
    if pot.v0 == 0:
        zero = np.zeros(len(targets), dtype=complex)
        return BornResult(incident, zero, np.zeros(len(targets)), 0)
    n = cfg.spatial_nodes
    panels = cfg.time_panels
    prev = _first_order_pass(fp, pot, wv, targets, times, cfg, n, cfg.time_nodes, panels)
    while True:
        n_next = min(n + 8, cfg.max_spatial_nodes)
        panels *= 2
        cur = _first_order_pass(fp, pot, wv, targets, times, cfg, n_next, cfg.time_nodes + 8, panels)
        err = np.abs(cur - prev)
        n = n_next
        if np.linalg.norm(err) <= cfg.rel_tol * np.linalg.norm(cur) or n >= cfg.max_spatial_nodes:
            return BornResult(incident, cur, err, n)
        prev = cur


def _first_order_grid(fp, pot, wv, targets, times, cfg, incident):
    grid = pot.grid
    lo, hi = pot.bounding_box()
    if cfg.check_far_field:
        gap = _box_distance(targets, lo, hi)
        if (gap < FAR_FIELD_MARGIN * pot.length_scale()).any():
            raise FarFieldError("evaluation point inside potential region")
    X, Y, Z = grid.mesh()
    pts = np.stack([X, Y, Z], axis=-1).reshape(-1, 3)
    hx, hy, hz = grid.spacing
    vals = pot.values.reshape(len(grid.t), -1)
    live = np.abs(vals).max(axis=0) >= SUPPORT_CUT * max(pot.peak, 1e-300)
    params = green.asymptotic_kernel_params(fp, cfg.tau_min)

    def run(stride):
        src = pts[live][::stride]
        v = vals[:, live][:, ::stride]
        out = np.zeros(len(targets), dtype=complex)
        for t in np.unique(times):
            sel = times == t
            tmask = grid.t <= t - cfg.tau_min
            if tmask.sum() == 0:
                continue
            tw = np.full(tmask.sum(), grid.dt)
            tw[0] *= 0.5
            tw[-1] *= 0.5
            tt = grid.t[tmask]
            psi0 = np.exp(1j * ((src @ np.asarray(wv.k))[None, :] - wv.energy * tt[:, None]) / fp.hbar)
            w = fp.dcal * hx * hy * hz * stride * tw[:, None] * v[tmask] * psi0
            out[sel] = core.born_accumulate(targets[sel], np.full(sel.sum(), float(t)), src, tt, w, params, cfg.far_field)
        return out

    fine = run(1)
    coarse = run(2)
    return BornResult(incident, fine, np.abs(fine - coarse), 0)


def born_first_order(fp, pot, wv, p, cfg=BornConfig()):
    r = born_first_order_points(fp, pot, wv, [p.r], [p.t], cfg)
    return BornResult(r.incident[0], r.scattered[0], r.error_estimate[0], r.spatial_nodes)


def standard_born_oracle(fp, pot, wv, targets, times, epsrel=1e-11):
    """Independent first-order Born integral for alpha=2, beta=1.

    Uses the free propagator (1/(i hbar)) (m/(2 pi i hbar tau))^{3/2} exp(i m d^2/(2 hbar tau))
    with m = 1/(2D); the Gaussian spatial integral is done in closed form,
    the time integral by adaptive vector quadrature.
    """
    if not (fp.alpha == 2.0 and fp.beta == 1.0):
        raise ParameterError("standard oracle needs alpha=2, beta=1")
    if pot.kind != "gaussian_separable":
        raise ParameterError("standard oracle needs a gaussian_separable potential")
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    times = np.broadcast_to(np.asarray(times, dtype=float), (len(targets),))
    hbar, m = fp.hbar, 0.5 / fp.dcal
    c = np.asarray(pot.center)
    k = np.asarray(wv.k)
    sig2 = pot.sigma_r**2
    out = np.zeros(len(targets), dtype=complex)
    lo, hi = pot.profile.support()
    for t in np.unique(times):
        sel = times == t
        X = targets[sel]

        def f(tp):
            tau = t - tp
            a = m / (2.0 * hbar * tau)
            P = 1.0 / (2 * sig2) - 1j * a
            Q = c / sig2 + 1j * k / hbar - 2j * a * X
            R = -(c * c) / (2 * sig2) + 1j * a * X * X
            per_dim = np.sqrt(math.pi / P) * np.exp(Q * Q / (4 * P) + R)
            g_pref = (m / (2j * math.pi * hbar * tau)) ** 1.5 / (1j * hbar)
            val = g_pref * per_dim.prod(axis=1) * np.exp(-1j * wv.energy * tp / hbar)
            val = fp.dcal * pot.v0 * pot.profile(tp) * val
            return np.concatenate([val.real, val.imag])

        top = min(hi, t)
        if top <= lo:
            continue
        res, _ = integrate.quad_vec(f, lo, top, epsrel=epsrel, epsabs=0.0, limit=2000)
        nsel = sel.sum()
        out[sel] = res[:nsel] + 1j * res[nsel:]
    return out


@dataclass(eq=False)
class WaveField:
    grid: SpaceTimeGrid
    values: np.ndarray  # (nt, nx, ny, nz) complex
    order: int
    wavevector: Wavevector
    flags: np.ndarray | None = None  # True where the node value is unreliable
    probes: np.ndarray | None = None
    probe_times: np.ndarray | None = None
    probe_values: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise GridError("field values do not match the grid shape")
        if self.flags is None:
            self.flags = np.zeros(self.grid.shape, dtype=bool)


def plane_wave_field(fp, wv, grid, cfg=BornConfig()):
    wv.check(fp)
    k = np.asarray(wv.k) / fp.hbar
    ph = [np.exp(1j * k[i] * a) for i, a in enumerate((grid.x, grid.y, grid.z))]
    pt = np.exp(-1j * wv.energy * grid.t / fp.hbar)
    values = np.einsum("t,i,j,k->tijk", pt, *ph)
    pv = None
    if cfg.probes is not None:
        pv = plane_wave_array(fp, wv, cfg.probes, cfg.probe_times)
    return WaveField(grid, values, 0, wv, probes=cfg.probes, probe_times=cfg.probe_times, probe_values=pv)


def _slab_weights(fp, pgrid, dt, steps):
    # product-integration weights over lags [l dt, (l+1) dt], l < steps, for a source
    # linear in time: coefficients of s(t - l dt) and s(t - (l+1) dt)
    gam = fp.gamma_exp
    xi1 = fp.dcal ** (1.0 / fp.beta) / fp.hbar
    if gam == 0:
        amp = np.full(pgrid.shape, 1.0)
    else:
        with np.errstate(divide="ignore"):
            amp = np.where(pgrid > 0, pgrid ** (-gam), 0.0 if gam < 0 else np.inf)
    amp = fp.n1 * amp
    z = -1j * xi1 * pgrid**fp.nu * dt
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    ez = np.exp(zs)
    phi0 = np.where(small, 0.5 + z / 6 + z * z / 24 + z**3 / 120, (ez - 1 - zs) / (zs * zs))
    phi1 = np.where(small, 0.5 + z / 3 + z * z / 8 + z**3 / 30, ((zs - 1) * ez + 1) / (zs * zs))
    w_near = []
    w_far = []
    e = np.ones_like(z)
    step = np.exp(z)
    for _ in range(steps):
        w_near.append(amp * dt * e * phi0)
        w_far.append(amp * dt * e * phi1)
        e = e * step
    return w_near, w_far


def _resolution_ok(fp, d, tau, h):
    # the chirp of G(d, tau) is resolved on spacing h when its local wavenumber < pi/h
    ak = green.asymptotic_kernel(fp.nu, fp.gamma_exp)
    xi = fp.dcal ** (1.0 / fp.beta) * tau / fp.hbar
    u = 1.0 / (xi ** (1.0 / fp.nu) * fp.hbar)
    kloc = ak.freq * ak.kappa * (d * u) ** (ak.kappa - 1.0) * u
    return kloc * h < math.pi


def born_iterate(fp, pot, prev, cfg=BornConfig()):
    """One substitution step psi^(n) = psi0 + D int int G V psi^(n-1) on the lattice.

    Time lags shorter than ``slab_steps * dt`` are integrated in momentum space
    with the exact lag integral of the momentum kernel (the lattice cannot
    resolve the spatial chirp of G there); longer lags use a zero-padded FFT
    convolution with lattice samples of G and the trapezoid rule in time.
    Nodes whose convolution still includes an under-resolved lag are flagged.
    """
    grid = prev.grid
    if pot.kind == "grid_sampled" and not grid.same_as(pot.grid):
        raise GridError("incompatible grids")
    wv = prev.wavevector
    psi0 = plane_wave_field(fp, wv, grid, cfg)
    vals = pot.on_grid(grid)
    src = vals * prev.values
    nt, nx, ny, nz = grid.shape
    h = grid.spacing
    dt = grid.dt
    flags = np.zeros(grid.shape, dtype=bool)
    info = {}
    if not np.any(vals):
        out = WaveField(grid, psi0.values.copy(), prev.order + 1, wv, flags, prev.probes, prev.probe_times,
                        None if psi0.probe_values is None else psi0.probe_values.copy(), info)
        return out
    if np.abs(vals[0]).max() >= SUPPORT_CUT * pot.peak:
        flags[:] = True  # source already on before the first time sample
        info["truncated_source"] = True
    shape = (2 * nx, 2 * ny, 2 * nz)
    cell = h[0] * h[1] * h[2]
    workers = max(1, int(cfg.threads))

    # short lags: spectral
    diag = math.sqrt(sum((n * hh) ** 2 for n, hh in zip((nx, ny, nz), h)))
    steps = cfg.slab_steps
    if steps is None:
        steps = 1
        while steps < nt and not _resolution_ok(fp, diag, steps * dt, max(h)):
            steps += 1
    steps = max(1, min(steps, nt))
    info["slab_steps"] = steps
    freqs = [2 * math.pi * fp.hbar * sfft.fftfreq(n, hh) for n, hh in zip(shape, h)]
    PX, PY, PZ = np.meshgrid(*freqs, indexing="ij")
    pgrid = np.sqrt(PX**2 + PY**2 + PZ**2)
    w_near, w_far = _slab_weights(fp, pgrid, dt, steps)
    del PX, PY, PZ
    live_t = [j for j in range(nt) if np.any(src[j])]
    s_hat = {}
    for j in live_t:
        buf = np.zeros(shape, dtype=complex)
        buf[:nx, :ny, :nz] = src[j]
        s_hat[j] = sfft.fftn(buf, workers=workers)
    # run-level hint: fast source components may outrun the zero padding
    pmax = math.sqrt(sum(c * c for c in wv.k)) + 3.0 / pot.length_scale()
    spread = fp.nu * fp.dcal ** (1.0 / fp.beta) / fp.hbar * pmax ** (fp.nu - 1.0) * steps * dt
    info["slab_aliasing"] = bool(spread > min(n * hh for n, hh in zip((nx, ny, nz), h)))

    # long lags: G tables on lattice offsets
    offs = [np.concatenate([np.arange(n), np.arange(-n, 0)]) * hh for n, hh in zip((nx, ny, nz), h)]
    OX, OY, OZ = np.meshgrid(*offs, indexing="ij")
    dist = np.sqrt(OX**2 + OY**2 + OZ**2)
    del OX, OY, OZ
    acc = {}
    for i in range(nt):
        tot = np.zeros(shape, dtype=complex)
        used = False
        for l in range(steps):
            if i - l in s_hat:
                tot += w_near[l] * s_hat[i - l]
                used = True
            if i - l - 1 in s_hat:
                tot += w_far[l] * s_hat[i - l - 1]
                used = True
        if used:
            acc[i] = tot
    for l in range(steps, nt):
        targets_i = [i for i in range(l, nt) if i - l in s_hat]
        if not targets_i:
            continue
        g = green.green_regular(fp, dist, l * dt) * cell
        g_hat = sfft.fftn(g, workers=workers)
        if not _resolution_ok(fp, diag, l * dt, max(h)):
            for i in targets_i:
                flags[i] = True
        for i in targets_i:
            j = i - l
            wt = 0.5 * dt if (l == steps or j == 0) else dt
            acc.setdefault(i, np.zeros(shape, dtype=complex))
            acc[i] += wt * g_hat * s_hat[j]
    new = psi0.values.copy()
    for i, a in acc.items():
        new[i] += fp.dcal * sfft.ifftn(a, workers=workers)[:nx, :ny, :nz]

    probe_values = None
    if prev.probes is not None:
        probe_values = psi0.probe_values + _probe_sum(fp, grid, src, prev.probes, prev.probe_times, cfg)
    return WaveField(grid, new, prev.order + 1, wv, flags, prev.probes, prev.probe_times, probe_values, info)


def _probe_sum(fp, grid, src, probes, ptimes, cfg):
    X, Y, Z = grid.mesh()
    pts = np.stack([X, Y, Z], axis=-1).reshape(-1, 3)
    s = src.reshape(len(grid.t), -1)
    live = np.abs(s).max(axis=0) > 0
    pts = pts[live]
    s = s[:, live]
    cell = np.prod(grid.spacing)
    out = np.zeros(len(probes), dtype=complex)
    for q, (r, t) in enumerate(zip(np.asarray(probes, float), np.asarray(ptimes, float))):
        d = np.sqrt(((pts - r) ** 2).sum(axis=1))
        tmask = np.flatnonzero(grid.t < t - cfg.tau_min)
        if len(tmask) == 0:
            continue
        acc = 0j
        for n_, j in enumerate(tmask):
            if not np.any(s[j]):
                continue
            wt = 0.5 * grid.dt if (n_ == 0 or n_ == len(tmask) - 1) else grid.dt
            acc += wt * np.dot(green.green_regular(fp, d, t - grid.t[j]), s[j])
        out[q] = fp.dcal * cell * acc
    return out


@dataclass(eq=False)
class BornSeries:
    fields: list
    increment_norms: list  # ||psi^(n) - psi^(n-1)|| for n = 1..n_max


def field_norm(grid, values):
    cell = np.prod(grid.spacing) * grid.dt
    return float(np.sqrt(cell * np.sum(np.abs(values) ** 2)))


def born_series(fp, pot, wv, grid, n_max, cfg=BornConfig()):
    if n_max < 0:
        raise ParameterError("n_max must be >= 0")
    fields = [plane_wave_field(fp, wv, grid, cfg)]
    norms = []
    for _ in range(n_max):
        nxt = born_iterate(fp, pot, fields[-1], cfg)
        norms.append(field_norm(grid, nxt.values - fields[-1].values))
        fields.append(nxt)
    return BornSeries(fields, norms)
