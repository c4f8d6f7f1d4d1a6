"""Time the compiled kernels against their pure-Python twins.

    python benchmarks/bench_core.py [--repeat N]
"""
import argparse
import sys
import timeit

import numpy as np

from fracgreen import _core_py, green

try:
    from fracgreen import _core
except ImportError:
    _core = None


def gamma_case(mod):
    zs = [complex(x, y) for x in np.linspace(-30, 30, 40) for y in np.linspace(-5, 5, 10) if abs(y) > 1e-9]
    return lambda: [mod.gamma(z) for z in zs]


def h_series_case(mod):
    h = green.build_h1(green.DerivedParams.from_nu_gamma(1.8 / 0.9, 1.8 * (0.9 - 1) / 0.9))
    zs = np.linspace(0.1, 3.0, 50)
    return lambda: [mod.h_series(z, h.m, h.n, h.a, h.A, h.b, h.B, 1e-16, 2000, 0) for z in zs]


def born_case(mod):
    rng = np.random.default_rng(0)
    fp = green.FracParams(2.0, 1.0)
    params = green.asymptotic_kernel_params(fp, 0.0)
    targets = rng.uniform(15, 25, (200, 3))
    src = rng.normal(size=(4000, 3))
    tt = np.linspace(-2, 2, 16)
    w = rng.normal(size=(16, 4000)) + 1j * rng.normal(size=(16, 4000))
    tg = np.full(len(targets), 8.0)
    return lambda: mod.born_accumulate(targets, tg, src, tt, w, params, False)


CASES = {"gamma": gamma_case, "h_series": h_series_case, "born_accumulate": born_case}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled core not built; only the Python twin is available", file=sys.stderr)
    print(f"{'kernel':<16}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, make in CASES.items():
        tp = min(timeit.repeat(make(_core_py), number=1, repeat=args.repeat))
        if _core is None:
            print(f"{name:<16}{tp:>12.4f}{'-':>12}{'-':>10}")
            continue
        tc = min(timeit.repeat(make(_core), number=1, repeat=args.repeat))
        print(f"{name:<16}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
