"""Command-line front end.

Commands read an optional flat ``key = value`` config file (``#`` comments),
then ``--set key=value`` overrides.  Ranges are written ``lo:hi:n`` (linear)
or as comma-separated lists.  Output is CSV (header row, reals with 17
significant digits) or JSON.

Exit codes: 0 success (per-row failures are reported as warnings), 1 I/O or
total evaluation failure / failed validation, 2 usage error.
"""
import argparse
import configparser
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import green, hfun, oracle, scattering
from .errors import FracGreenError

USAGE_ERROR = 2


class UsageError(Exception):
    pass


def _floats(text):
    text = text.strip()
    if not text:
        raise UsageError("empty range")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad range {text!r}; expected lo:hi:n")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise UsageError(f"range count must be >= 1 in {text!r}")
        return [float(v) for v in np.linspace(lo, hi, n)]
    vals = [float(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise UsageError("empty range")
    return vals


def _vec3(text):
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 3:
        raise UsageError(f"expected 3 components, got {text!r}")
    return tuple(vals)


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def _positive(text):
    v = float(text)
    if not v > 0:
        raise UsageError(f"expected a positive number, got {text!r}")
    return v


def _tol_override(text):
    return None if text.strip().lower() == "auto" else _positive(text)


def _forms(text):
    forms = [f.strip() for f in text.split(",") if f.strip()]
    bad = set(forms) - {"hform", "series", "asymptotic", "quad"}
    if bad or not forms:
        raise UsageError(f"unknown form(s) {sorted(bad)}")
    return forms


# key: (parser, default, description)
SCHEMAS = {
    "green": {
        "alpha": (float, "2", "Levy index, 1 < alpha <= 2"),
        "beta": (float, "1", "time order, 0 < beta <= 1"),
        "dcal": (_positive, "1", "coupling D"),
        "hbar": (_positive, "1", "reduced Planck constant"),
        "dist": (_floats, "4", "|r - r'| values"),
        "dt": (_floats, "1", "t - t' values"),
        "forms": (_forms, "series", "comma list of hform, series, asymptotic, quad"),
    },
    "hfun": {
        "nu": (float, "2", "nu = alpha/beta"),
        "gamma": (float, "0", "gamma exponent"),
        "which": (str, "h1", "h1 or h2"),
        "z": (_floats, "0.5:10:20", "arguments"),
        "method": (str, "auto", "auto, series or asymptotic"),
    },
    "oracle": {
        "nu": (float, "2", "nu = alpha/beta"),
        "gamma": (float, "0", "gamma exponent"),
        "x": (_floats, "0.1:3:12", "x values"),
        "abs_tol": (_positive, "1e-13", "quadrature absolute tolerance"),
        "rel_tol": (_positive, "1e-11", "quadrature relative tolerance"),
    },
    "validate": {
        "tolerance_scale": (_positive, "1", "multiplies every suite tolerance"),
        "tolerance": (_tol_override, "auto", "replaces every suite tolerance when set"),
    },
    "born": {
        "alpha": (float, "2", "Levy index"),
        "beta": (float, "1", "time order"),
        "dcal": (_positive, "1", "coupling D"),
        "hbar": (_positive, "1", "reduced Planck constant"),
        "v0": (float, "0.05", "potential amplitude"),
        "sigma_r": (_positive, "1", "potential width"),
        "center": (_vec3, "0,0,0", "potential centre"),
        "profile": (str, "gaussian", "gaussian or constant"),
        "t0": (float, "0", "pulse centre"),
        "sigma_t": (_positive, "0.5", "pulse width"),
        "t_on": (float, "0", "constant profile start"),
        "t_off": (float, "1", "constant profile end"),
        "direction": (_vec3, "1,0,0", "incident direction"),
        "energy": (_positive, "1", "incident energy"),
        "lo": (float, "-6", "spatial grid start (all axes)"),
        "hi": (float, "6", "spatial grid end"),
        "n": (int, "17", "nodes per axis"),
        "t_lo": (float, "-4", "first time sample"),
        "t_hi": (float, "4", "last time sample"),
        "nt": (int, "17", "time samples"),
        "n_max": (int, "2", "highest Born order"),
        "slab_steps": (int, "0", "short-lag spectral steps (0: automatic)"),
        "oracle": (_bool, "true", "compare order 1 with the standard-QM oracle when alpha=2, beta=1"),
        "oracle_tol": (_positive, "2e-2", "agreement threshold for that comparison"),
    },
}


def load_config(command, path, overrides):
    schema = SCHEMAS[command]
    raw = {k: v[1] for k, v in schema.items()}
    if path:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
        try:
            with open(path) as fh:
                cp.read_string("[run]\n" + fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        except configparser.Error as exc:
            raise UsageError(f"malformed config: {exc}") from exc
        raw.update(dict(cp["run"]))
    for item in overrides or []:
        if "=" not in item:
            raise UsageError(f"override must be key=value, got {item!r}")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    unknown = set(raw) - set(schema)
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    cfg = {}
    for k, (conv, _, _) in schema.items():
        try:
            cfg[k] = conv(raw[k])
        except UsageError:
            raise
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {k}: {raw[k]!r} ({exc})") from exc
    return cfg


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def write_table(columns, rows, fmt, out, meta=None):
    if fmt == "json":
        doc = {"columns": columns, "rows": [dict(zip(columns, r)) for r in rows]}
        if meta:
            doc.update(meta)
        text = json.dumps(doc, indent=1, default=_json_default) + "\n"
    else:
        lines = [",".join(columns)] + [",".join(_fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(type(v))


def _threads(args):
    if args.threads is not None:
        n = args.threads
    else:
        env = os.environ.get("FRACGREEN_THREADS", "")
        try:
            n = int(env) if env else 1
        except ValueError:
            raise UsageError(f"FRACGREEN_THREADS must be an integer, got {env!r}")
    if n < 1:
        raise UsageError("thread count must be >= 1")
    return n


def _pmap(fn, items, threads):
    if threads == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def cmd_green(cfg, threads):
    try:
        fp = green.FracParams(cfg["alpha"], cfg["beta"], cfg["dcal"], cfg["hbar"])
    except FracGreenError as exc:
        raise UsageError(str(exc)) from exc
    origin = green.SpaceTimePoint((0.0, 0.0, 0.0), 0.0)
    funcs = {
        "hform": green.green_hform,
        "series": green.green_series,
        "asymptotic": green.green_asymptotic,
    }
    jobs = [(form, d, t) for form in cfg["forms"] for d in cfg["dist"] for t in cfg["dt"]]

    def run(job):
        form, d, t = job
        p1 = green.SpaceTimePoint((d, 0.0, 0.0), t)
        x = green.derive_params(fp, d, t).x if t > 0 else math.nan
        try:
            if form == "quad":
                val, err = oracle.quad_green(fp, p1, origin, with_error=True)
                method = "quad"
            else:
                gv = funcs[form](fp, p1, origin)
                val, err, method = gv.value, gv.error_estimate, gv.method
            return (fp.alpha, fp.beta, d, t, x, val.real, val.imag, method, err), None
        except FracGreenError as exc:
            return (fp.alpha, fp.beta, d, t, x, math.nan, math.nan, "error", math.nan), f"{form} dist={d} dt={t}: {exc}"

    results = _pmap(run, jobs, threads)
    rows = [r for r, _ in results]
    warnings = [w for _, w in results if w]
    cols = ["alpha", "beta", "dist", "dt", "x", "re_G", "im_G", "method", "err_est"]
    return cols, rows, warnings


def cmd_hfun(cfg, threads):
    if cfg["which"] not in ("h1", "h2") or cfg["method"] not in ("auto", "series", "asymptotic"):
        raise UsageError("which must be h1|h2 and method auto|series|asymptotic")
    try:
        dp = green.DerivedParams.from_nu_gamma(cfg["nu"], cfg["gamma"])
    except FracGreenError as exc:
        raise UsageError(str(exc)) from exc
    h = green.build_h1(dp) if cfg["which"] == "h1" else green.build_h2(dp)
    ev = {"auto": hfun.eval_auto, "series": hfun.eval_series, "asymptotic": hfun.eval_asymptotic}[cfg["method"]]

    def run(z):
        try:
            r = ev(h, z)
            return (z, r.value.real, r.value.imag, r.method, r.abs_error_estimate, r.terms_used), None
        except FracGreenError as exc:
            return (z, math.nan, math.nan, "error", math.nan, 0), f"z={z}: {exc}"

    results = _pmap(run, cfg["z"], threads)
    cols = ["z", "re_H", "im_H", "method", "err_est", "terms"]
    return cols, [r for r, _ in results], [w for _, w in results if w]


def cmd_oracle(cfg, threads):
    try:
        dp = green.DerivedParams.from_nu_gamma(cfg["nu"], cfg["gamma"])
        qc = oracle.QuadratureConfig(abs_tol=cfg["abs_tol"], rel_tol=cfg["rel_tol"])
    except FracGreenError as exc:
        raise UsageError(str(exc)) from exc

    def run(x):
        try:
            s = green.eval_I(dp, x)
            q, err = oracle.quad_I(dp, x, qc, with_error=True)
            rel = abs(s - q) / abs(q) if q != 0 else abs(s - q)
            return (x, s.real, s.imag, q.real, q.imag, rel, err), None
        except FracGreenError as exc:
            return (x, math.nan, math.nan, math.nan, math.nan, math.nan, math.nan), f"x={x}: {exc}"

    results = _pmap(run, cfg["x"], threads)
    cols = ["x", "re_I_series", "im_I_series", "re_I_quad", "im_I_quad", "rel_err", "quad_err"]
    return cols, [r for r, _ in results], [w for _, w in results if w]


def _rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def _suite_gamma(scale):
    from . import special_fn as sf

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        z = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
        if abs(z.imag) < 0.1:
            z += 0.2j
        refl = sf.gamma(z) * sf.gamma(1 - z) * np.sin(np.pi * z) / np.pi
        rec = _rel(sf.gamma(z + 1), z * sf.gamma(z))
        worst = max(worst, abs(refl - 1), rec)
    return worst, 1e-10 * scale


def _suite_hfun(scale):
    worst = 0.0
    for nu, gam in ((2.0, 0.0), (2.4, 0.5)):
        h1 = green.build_h1(green.DerivedParams.from_nu_gamma(nu, gam))
        for z in (0.25, 0.7, 2.0):
            k, sig = 2.0, 0.3
            a = hfun.eval_series(h1, z)
            b = hfun.eval_series(hfun.rescale_argument(h1, k), z**k)
            worst = max(worst, _rel(b.value, a.value / k))
            c = hfun.eval_series(hfun.power_shift(h1, sig), z)
            worst = max(worst, _rel(c.value, z**sig * a.value))
    return worst, 1e-10 * scale


def _suite_green(scale):
    worst = 0.0
    o = green.SpaceTimePoint((0.0, 0.0, 0.0), 0.0)
    for a, b in ((2.0, 1.0), (1.8, 0.9), (1.5, 0.8)):
        fp = green.FracParams(a, b)
        for d in (0.3, 1.5, 2.8):
            p = green.SpaceTimePoint((d, 0.0, 0.0), 1.0)
            worst = max(worst, _rel(green.green_series(fp, p, o).value, green.green_hform(fp, p, o).value))
    return worst, 1e-9 * scale


def _suite_oracle(scale):
    worst = 0.0
    o = green.SpaceTimePoint((0.0, 0.0, 0.0), 0.0)
    for a, b in ((2.0, 1.0), (1.8, 0.9)):
        fp = green.FracParams(a, b)
        for d in (0.5, 2.0):
            p = green.SpaceTimePoint((d, 0.0, 0.0), 1.0)
            worst = max(worst, _rel(oracle.quad_green(fp, p, o), green.green_hform(fp, p, o).value))
    return worst, 1e-6 * scale


def _suite_mellin(scale):
    worst = 0.0
    for nu, gam in ((2.0, 0.0), (2.4, 0.5), (1.875, -0.2)):
        dp = green.DerivedParams.from_nu_gamma(nu, gam)
        for s in (0.3, 0.5, 0.7):
            worst = max(worst, _rel(oracle.mellin_I_numeric(dp, s), oracle.mellin_I_closed(dp, s)))
    return worst, 1e-4 * scale


def _suite_asymptotic(scale):
    worst = 0.0
    o = green.SpaceTimePoint((0.0, 0.0, 0.0), 0.0)
    for a, b in ((2.0, 1.0), (1.8, 0.9)):
        fp = green.FracParams(a, b)
        p = green.SpaceTimePoint((100.0, 0.0, 0.0), 1.0)
        asym = green.green_asymptotic(fp, p, o).value
        worst = max(worst, _rel(asym, green.green_hform(fp, p, o).value))
    return worst, 0.02 * scale


SUITES = {
    "gamma": _suite_gamma,
    "hfun": _suite_hfun,
    "green": _suite_green,
    "oracle": _suite_oracle,
    "mellin": _suite_mellin,
    "asymptotic": _suite_asymptotic,
}


def cmd_validate(cfg, suite):
    names = list(SUITES) if suite in (None, "all") else [suite]
    for n in names:
        if n not in SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    rows = []
    for n in names:
        try:
            err, tol = SUITES[n](cfg["tolerance_scale"])
            if cfg["tolerance"] is not None:
                tol = cfg["tolerance"]
            ok = err <= tol
        except FracGreenError as exc:
            err, tol, ok = math.nan, math.nan, False
            print(f"warning: suite {n}: {exc}", file=sys.stderr)
        rows.append((n, "pass" if ok else "fail", err, tol))
    return ["suite", "status", "max_rel_err", "tolerance"], rows


def _born_setup(cfg):
    try:
        fp = green.FracParams(cfg["alpha"], cfg["beta"], cfg["dcal"], cfg["hbar"])
        if cfg["profile"] == "gaussian":
            prof = scattering.gaussian_profile(cfg["t0"], cfg["sigma_t"])
        elif cfg["profile"] == "constant":
            prof = scattering.constant_profile(cfg["t_on"], cfg["t_off"])
        else:
            raise UsageError("profile must be gaussian or constant")
        pot = scattering.gaussian_potential(cfg["v0"], cfg["sigma_r"], cfg["center"], prof)
        wv = scattering.Wavevector.from_direction(fp, cfg["direction"], cfg["energy"])
        if cfg["n"] < 1 or cfg["nt"] < 1 or cfg["n_max"] < 0:
            raise UsageError("grid counts must be >= 1 and n_max >= 0")
        grid = scattering.SpaceTimeGrid.uniform(cfg["lo"], cfg["hi"], cfg["n"], cfg["t_lo"], cfg["t_hi"], cfg["nt"])
    except FracGreenError as exc:
        raise UsageError(str(exc)) from exc
    return fp, pot, wv, grid


def cmd_born(cfg, threads, out, fmt):
    fp, pot, wv, grid = _born_setup(cfg)
    bc = scattering.BornConfig(threads=threads, slab_steps=cfg["slab_steps"] or None)
    series = scattering.born_series(fp, pot, wv, grid, cfg["n_max"], bc)
    X, Y, Z = grid.mesh()
    base = "born" if out in (None, "-") else out
    ext = "json" if fmt == "json" else "csv"
    cols = ["t", "x", "y", "z", "re_psi", "im_psi", "flag"]
    for f in series.fields:
        rows = []
        for it, t in enumerate(grid.t):
            v = f.values[it].reshape(-1)
            fl = f.flags[it].reshape(-1)
            for x, y, z, val, flag in zip(X.reshape(-1), Y.reshape(-1), Z.reshape(-1), v, fl):
                rows.append((float(t), float(x), float(y), float(z), float(val.real), float(val.imag), bool(flag)))
        write_table(cols, rows, fmt, f"{base}_order{f.order}.{ext}")
    summary = []
    oracle_err = math.nan
    if cfg["oracle"] and cfg["v0"] != 0 and fp.alpha == 2.0 and fp.beta == 1.0 and len(series.fields) > 1:
        pts = np.stack([X, Y, Z], axis=-1).reshape(-1, 3)
        it = len(grid.t) - 1
        ref = scattering.standard_born_oracle(fp, pot, wv, pts, grid.t[it])
        got = (series.fields[1].values[it] - series.fields[0].values[it]).reshape(-1)
        norm = np.linalg.norm(ref)
        oracle_err = float(np.linalg.norm(got - ref) / norm) if norm > 0 else float(np.linalg.norm(got))
    for n, inc in enumerate(series.increment_norms, start=1):
        flagged = float(series.fields[n].flags.mean())
        summary.append((n, inc, flagged))
    meta = {
        "oracle_rel_err": oracle_err,
        "oracle_agreement": bool(oracle_err <= cfg["oracle_tol"]) if not math.isnan(oracle_err) else None,
        "increments_decreasing": bool(all(b < a for a, b in zip(series.increment_norms, series.increment_norms[1:]))),
    }
    if fmt == "json":
        write_table(["order", "increment_norm", "flagged_fraction"], summary, fmt, f"{base}_summary.json", meta)
    else:
        rows = [(o, inc, fl) for o, inc, fl in summary]
        write_table(["order", "increment_norm", "flagged_fraction"], rows, fmt, f"{base}_summary.csv")
        with open(f"{base}_summary.csv", "a") as fh:
            for k, v in meta.items():
                fh.write(f"# {k}={_fmt(v) if v is not None else 'na'}\n")
    return meta


def build_parser():
    ap = argparse.ArgumentParser(prog="fracgreen", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value run configuration")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout; born: file prefix)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=None, help="worker threads (env FRACGREEN_THREADS)")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("green", parents=[common], help="evaluate G over a (dist, dt) grid")
    sub.add_parser("hfun", parents=[common], help="evaluate H1 or H2 over z")
    sub.add_parser("oracle", parents=[common], help="I(x): H-function route vs quadrature")
    v = sub.add_parser("validate", parents=[common], help="run cross-validation suites")
    v.add_argument("--suite", default="all", help="suite name or 'all' (" + ", ".join(SUITES) + ")")
    sub.add_parser("validate-hfun", parents=[common], help="alias for validate --suite hfun")
    sub.add_parser("born", parents=[common], help="Born series on a lattice")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        threads = _threads(args)
        command = "validate" if args.command == "validate-hfun" else args.command
        cfg = load_config(command, args.config, args.set)
        if command == "validate":
            suite = "hfun" if args.command == "validate-hfun" else args.suite
            cols, rows = cmd_validate(cfg, suite)
            write_table(cols, rows, args.format, args.out)
            return 0 if all(r[1] == "pass" for r in rows) else 1
        if command == "born":
            cmd_born(cfg, threads, args.out, args.format)
            return 0
        fn = {"green": cmd_green, "hfun": cmd_hfun, "oracle": cmd_oracle}[command]
        cols, rows, warnings = fn(cfg, threads)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    try:
        write_table(cols, rows, args.format, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if rows and len(warnings) == len(rows):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
