"""Command line: ``fracsemigroup constants | run <cfg> | audit <symbol>``.

Exit codes: 0 all verdicts as expected, 1 a verdict failed, 2 usage or
configuration error, 3 numerical failure.  ``FRACSEMIGROUP_THREADS`` caps the
number of numba threads.

Config files are flat ``key = value`` text with ``#`` comments; see
:data:`CONFIG_KEYS` for the schema.  Unknown keys are rejected.
"""
import argparse
import json
import math
import os
import sys
import tempfile
from importlib import resources

import numpy as np
from scipy import integrate

from . import _accel
from .errors import DomainError, FracSemigroupError, NumericalError, StructuralError
from .experiments import (
    run_bessel_characterization,
    run_fourier_identity,
    run_theorem_main,
    run_theorem_rate,
    save_report,
)
from .fields import Grid, test_field
from .operators import riesz_constant
from .special import sphere_area
from .symbols import mikhlin_audit, riesz_symbols, symbol_by_name
from .varlp import exponent_family

EXPERIMENTS = ("theorem_main", "theorem_rate", "bessel_characterization", "fourier_identity")

# key -> (parser, default); None default means required
CONFIG_KEYS = {
    "experiment": (str, None),
    "n": (int, 1),
    "alpha": (float, None),
    "ell": (int, 2),
    "eps": ("eps", None),
    "L": (float, 20.0),
    "points": (int, 4096),
    "field": (str, "gaussian"),
    "field_sigma": (float, None),
    "field_seed": (int, None),
    "field_cutoff": (float, None),
    "field_t": (float, None),
    "field_radius": (float, None),
    "fields_count": (int, 5),
    "exponent": (str, "constant"),
    "p": (float, 2.0),
    "p_inf": (float, 2.0),
    "a": (float, 1.0),
    "threshold": (float, 1e-3),
    "expected_negative": ("bool", False),
    "kernel_mass": ("bool", False),
    "seed": (int, 0),
    "output_json": (str, None),
    "output_csv": (str, None),
}


class ConfigError(Exception):
    pass


def _parse_eps(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.startswith("2^"):
            out.append(2.0 ** float(tok[2:]))
        else:
            out.append(float(tok))
    if not out:
        raise ValueError("empty eps list")
    return out


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text):
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {k!r}")
        if k in raw:
            raise ConfigError(f"line {lineno}: duplicate key {k!r}")
        raw[k] = v
    cfg = {}
    for k, (kind, default) in CONFIG_KEYS.items():
        if k not in raw:
            if default is None and k in ("experiment", "alpha", "eps"):
                raise ConfigError(f"missing required key {k!r}")
            cfg[k] = default
            continue
        try:
            cfg[k] = {"eps": _parse_eps, "bool": _parse_bool}.get(kind, kind)(raw[k])
        except ValueError as exc:
            raise ConfigError(f"key {k!r}: {exc}") from None
    if cfg["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {cfg['experiment']!r}")
    return cfg


def validate_config(cfg):
    """Module preconditions, checked before anything is computed."""
    a, ell, n = cfg["alpha"], cfg["ell"], cfg["n"]
    if ell < 2 or ell % 2:
        raise ConfigError(f"precondition violated: ell must be an even integer >= 2 (got {ell})")
    if not 0 < a < ell:
        raise ConfigError(f"precondition violated: alpha < ell is required (alpha={a}, ell={ell})")
    eps = cfg["eps"]
    if any(e <= 0 for e in eps) or any(y >= x for x, y in zip(eps, eps[1:])):
        raise ConfigError("precondition violated: eps must be positive and strictly decreasing")
    if cfg["experiment"] == "bessel_characterization" and not a < n:
        raise ConfigError(f"precondition violated: alpha < n is required (alpha={a}, n={n})")
    try:
        Grid(n, cfg["L"], cfg["points"])
    except StructuralError as exc:
        raise ConfigError(f"precondition violated: {exc}") from None


def _field_from_config(cfg, grid, seed_offset=0):
    params = {}
    for k in ("sigma", "cutoff", "t", "radius"):
        if cfg[f"field_{k}"] is not None:
            params[k] = cfg[f"field_{k}"]
    if cfg["field"] in ("band_limited", "white_noise"):
        params["seed"] = (cfg["field_seed"] if cfg["field_seed"] is not None else cfg["seed"]) + seed_offset
    return test_field(cfg["field"], grid, **params)


def _exponent_from_config(cfg, grid):
    if cfg["exponent"] == "constant":
        return exponent_family("constant", grid, p=cfg["p"])
    return exponent_family(cfg["exponent"], grid, p_inf=cfg["p_inf"], a=cfg["a"])


def execute(cfg):
    grid = Grid(cfg["n"], cfg["L"], cfg["points"])
    exp = cfg["experiment"]
    f = _field_from_config(cfg, grid)
    p = _exponent_from_config(cfg, grid)
    if exp == "theorem_main":
        return run_theorem_main(f, cfg["alpha"], cfg["ell"], cfg["eps"], p, threshold=cfg["threshold"])
    if exp == "theorem_rate":
        return run_theorem_rate(f, cfg["alpha"], cfg["eps"], p, expected_negative=cfg["expected_negative"],
                                ell=cfg["ell"])
    if exp == "bessel_characterization":
        return run_bessel_characterization(f, cfg["alpha"], p, eps_list=cfg["eps"])
    fields = [_field_from_config(cfg, grid, i) for i in range(cfg["fields_count"])]
    return run_fourier_identity(fields, cfg["alpha"], cfg["ell"], cfg["eps"], mass=cfg["kernel_mass"],
                                mass_n=max(cfg["n"], 2))


def outcome_ok(report):
    if report.params.get("expected_negative"):
        return bool(report.checks.get("as_expected"))
    return bool(report.verdict)


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_constants(args, out=None):
    out = out or sys.stdout
    n, ell, alpha = args.n, args.ell, args.alpha
    S = riesz_symbols(n, ell, alpha)
    V = S.V
    # quadrature oracle for lambda: |S^{n-1}| times the mean of sin^ell over a period
    mean, _ = integrate.quad(lambda t: math.sin(t) ** ell, 0.0, 2.0 * math.pi, epsabs=1e-14, epsrel=1e-14)
    lam_quad = sphere_area(n) * mean / (2.0 * math.pi)
    rows = [
        ("n", n), ("ell", ell), ("alpha", alpha),
        ("gamma_n(alpha)", riesz_constant(n, alpha) if 0 < alpha < n else float("nan")),
        ("d_{n,ell}(alpha)", S.d),
        ("W0", S.W0),
        ("lambda (series constant)", V.lam),
        ("lambda (quadrature)", lam_quad),
        ("lambda (closed form, competing)", V.lam_competing),
        ("lambda discrepancy factor", V.lam_competing / lam_quad),
        ("B(inf) = lambda / (alpha W0)", S.B_infinity),
        ("A(inf)", S.A_infinity),
    ]
    if (n, ell, alpha) == (1, 2, 0.5):
        rows.append(("d closed form -8 sqrt(pi)", -8.0 * math.sqrt(math.pi)))
    for i, (c, li) in enumerate(zip(V.C, V.ell_i)):
        rows.append((f"C_{i} (frequency {li})", c))
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v!r}" if isinstance(v, int) else f"{k:<{width}}  {v:.15g}", file=out)
    return 0


def cmd_run(args, out=None):
    out = out or sys.stdout
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        validate_config(cfg)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    base = os.path.splitext(os.path.basename(args.config))[0]
    out_dir = args.out_dir or os.getcwd()
    json_path = cfg["output_json"] or os.path.join(out_dir, base + ".json")
    csv_path = cfg["output_csv"] or os.path.join(out_dir, base + ".csv")
    try:
        report = execute(cfg)
    except DomainError as exc:
        print(f"config error: precondition violated: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, FracSemigroupError, FloatingPointError) as exc:
        diag = getattr(exc, "diagnostics", {})
        print(f"numerical error: {exc} {json.dumps(diag, default=str)}", file=sys.stderr)
        return 3
    save_report(report, json_path, csv_path)
    print(report.table(), file=out)
    return 0 if outcome_ok(report) else 1


def cmd_audit(args, out=None):
    out = out or sys.stdout
    try:
        sym = symbol_by_name(args.symbol, args.n, args.ell, args.alpha)
    except KeyError:
        print(f"unknown symbol {args.symbol!r}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        audit = mikhlin_audit(sym, args.k_max, r_min=args.r_min, r_max=args.r_max, per_decade=args.per_decade)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    doc = {"symbol": args.symbol, "n": args.n, "ell": args.ell, "alpha": args.alpha,
           "finite": audit.finite, "records": audit.records()}
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.json:
        _atomic_write(args.json, text + "\n")
    print(text, file=out)
    return 0 if audit.finite else 1


def bundled_config(name="theorem_main_1d.cfg"):
    return resources.files("fracsemigroup").joinpath("configs", name)


def _apply_threads():
    val = os.environ.get("FRACSEMIGROUP_THREADS")
    if not val or not _accel.USING_NUMBA:
        return
    import numba
    numba.set_num_threads(max(1, min(int(val), numba.config.NUMBA_NUM_THREADS)))


def build_parser():
    ap = argparse.ArgumentParser(prog="fracsemigroup")
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("constants", help="print gamma_n, d_{n,ell}, lambda and C_i")
    c.add_argument("--n", type=int, default=1)
    c.add_argument("--ell", type=int, default=2)
    c.add_argument("--alpha", type=float, default=0.5)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--out-dir", default=None)
    a = sub.add_parser("audit", help="Mikhlin audit of a radial symbol")
    a.add_argument("symbol")
    a.add_argument("--n", type=int, default=2)
    a.add_argument("--ell", type=int, default=2)
    a.add_argument("--alpha", type=float, default=0.5)
    a.add_argument("--k-max", type=int, default=2)
    a.add_argument("--r-min", type=float, default=1e-4)
    a.add_argument("--r-max", type=float, default=1e4)
    a.add_argument("--per-decade", type=int, default=400)
    a.add_argument("--json", default=None)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    _apply_threads()
    np.seterr(all="ignore")
    try:
        if args.command == "constants":
            return cmd_constants(args)
        if args.command == "run":
            return cmd_run(args)
        return cmd_audit(args)
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
