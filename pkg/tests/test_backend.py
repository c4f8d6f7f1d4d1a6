import numpy as np
import pytest

from fracgreen import _backend, _core_py, green

_core = pytest.importorskip("fracgreen._core")


def test_backend_reports_compiled():
    assert _backend.backend_name() in ("cython", "python")
    assert _backend.COMPILED == (_backend.backend_name() == "cython")


def test_gamma_parity():
    rng = np.random.default_rng(3)
    for _ in range(500):
        z = complex(rng.uniform(-30, 30), rng.uniform(-10, 10))
        a, b = _core.gamma(z), _core_py.gamma(z)
        assert abs(a - b) <= 1e-13 * abs(b)
        assert abs(_core.log_gamma(z) - _core_py.log_gamma(z)) <= 1e-13 * max(1, abs(_core_py.log_gamma(z)))


def test_h_series_parity():
    for nu, gam in ((2.0, 0.0), (2.4, 0.5), (1.875, -0.2)):
        h = green.build_h2(green.DerivedParams.from_nu_gamma(nu, gam))
        for z in (0.1, 1.0, 3.0):
            args = (z, h.m, h.n, h.a, h.A, h.b, h.B, 1e-16, 2000, 0)
            a, b = _core.h_series(*args), _core_py.h_series(*args)
            assert abs(a[0] - b[0]) <= 1e-13 * abs(b[0])
            assert a[3] == b[3]


def test_born_accumulate_parity():
    rng = np.random.default_rng(0)
    params = green.asymptotic_kernel_params(green.FracParams(1.8, 0.9), 0.0)
    targets = rng.uniform(15, 25, (20, 3))
    src = rng.normal(size=(50, 3))
    tt = np.linspace(-2, 2, 5)
    w = rng.normal(size=(5, 50)) + 1j * rng.normal(size=(5, 50))
    tg = np.full(20, 8.0)
    for ff in (False, True):
        a = _core.born_accumulate(targets, tg, src, tt, w, params, ff)
        b = _core_py.born_accumulate(targets, tg, src, tt, w, params, ff)
        assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


def test_pure_python_selected_by_env(monkeypatch):
    import importlib

    monkeypatch.setenv("FRACGREEN_PURE_PYTHON", "1")
    mod = importlib.reload(_backend)
    try:
        assert mod.backend_name() == "python"
    finally:
        monkeypatch.delenv("FRACGREEN_PURE_PYTHON")
        importlib.reload(_backend)
