"""Command line front end: ``arakelov periods|invariants|verify|table1``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import hyperelliptic as hy
from . import invariants as inv
from . import verify as V
from .numerics import AllCensored, NotPositiveDefinite
from .theta import PeriodMatrix

EXIT_FAIL, EXIT_INVALID, EXIT_CENSORED, EXIT_MARGIN = 1, 2, 3, 4


def _version():
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


# ---------------------------------------------------------------- output

def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return repr(float(x))
    return format(x, ".17g")


def dumps(obj, indent=0):
    """JSON with every float written to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return json.dumps(str(obj))


def write_atomic(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_csv(rows, fields):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow(["" if r.get(f) is None else
                    (format(r[f], ".17g") if isinstance(r[f], float) else r[f]) for f in fields])
    return buf.getvalue()


# ---------------------------------------------------------------- input

class InputError(ValueError):
    pass


def load_input(spec):
    """Curve preset ``xn+1:<n>``, curve JSON or period JSON.

    Returns ``(curve or None, omega or None)``.
    """
    if spec.startswith("xn+1:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad preset {spec!r}") from None
        return hy.xn_plus_one(n), None
    try:
        with open(spec) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {spec}: {e}") from None
    if "branch_points" in data:
        return hy.HyperellipticCurve.from_json(data), None
    if "omega_re" in data:
        om = np.array(data["omega_re"], float) + 1j * np.array(data["omega_im"], float)
        if om.shape != (data.get("genus", om.shape[0]),) * 2:
            raise InputError("omega shape does not match genus")
        return None, om
    raise InputError("expected branch_points or omega_re/omega_im")


def _config(args):
    return V.RunConfig(eps=args.eps, samples=args.samples, mc_samples=args.mc_samples,
                       seed=args.seed, quad_order=args.quad_order, kind=args.kind)


def _config_dict(cfg, args):
    return {"eps": cfg.eps, "samples": cfg.samples, "mc_samples": cfg.mc_samples,
            "seed": cfg.seed, "quad_order": cfg.quad_order, "kind": cfg.kind,
            "format": args.format, "version": _version()}


VALIDATION_ERRORS = (hy.DuplicateBranchPoint, hy.EvenCount, hy.NonSymmetric, hy.CalibrationError,
                     hy.VanishingEvenThetaConstant, NotPositiveDefinite, InputError)


# ---------------------------------------------------------------- commands

def cmd_periods(args, cfg):
    curve, omega = load_input(args.input)
    if curve is None:
        raise InputError("periods needs a curve")
    pm = hy.period_matrix(curve, cfg.quad_order)
    validation = {
        "symmetry_residual": float(np.max(np.abs(pm.omega - pm.omega.T))),
        "min_eig_im": float(np.linalg.eigvalsh(pm.Y).min()),
        "odd_constant_ratio": hy.odd_constant_ratio(pm, cfg.eps),
        "riemann_constant": str(pm.K),
    }
    ok = (validation["symmetry_residual"] < 1e-10 and validation["min_eig_im"] > 0
          and validation["odd_constant_ratio"] < 1e-8)
    out = {"genus": pm.g, "omega_re": pm.omega.real.tolist(), "omega_im": pm.omega.imag.tolist(),
           "label": curve.label, "validation": validation, "config": _config_dict(cfg, args)}
    if args.format == "csv":
        rows = [{"i": i, "j": j, "re": float(pm.omega[i, j].real), "im": float(pm.omega[i, j].imag)}
                for i in range(pm.g) for j in range(pm.g)]
        text = to_csv(rows, ["i", "j", "re", "im"])
    else:
        text = dumps(out) + "\n"
    if not ok:
        _diagnostic("ValidationFailure", validation)
        return EXIT_INVALID
    write_atomic(args.out, text)
    return 0


def cmd_invariants(args, cfg):
    curve, omega = load_input(args.input)
    if curve is not None:
        pm = hy.period_matrix(curve, cfg.quad_order)
    else:
        pm = PeriodMatrix(omega)
    rep = inv.full_report(curve, pm, cfg.mc(), h_samples=cfg.samples, kind=cfg.kind,
                          green_pairs=args.green_pairs)
    rep.config.update(_config_dict(cfg, args))
    if args.format == "csv":
        rows = [{"name": k, "value": e.value, "stderr": e.stderr, "provenance": e.provenance}
                for k, e in rep.entries.items()]
        rows += [{"name": "margin: " + b.name, "value": b.margin, "stderr": None,
                  "provenance": "bound"} for b in rep.bounds]
        text = to_csv(rows, ["name", "value", "stderr", "provenance"])
    else:
        text = dumps(rep.as_dict()) + "\n"
    write_atomic(args.out, text)
    return EXIT_MARGIN if any(not b.ok for b in rep.bounds) else 0


def _run_suite(name, args, cfg):
    if name == "theta":
        return V.theta_suite(cfg)
    if name == "periods":
        return V.periods_suite(cfg, args.genus or 2, args.trials or 5)
    if name in ("rosenhain", "deterministic"):
        return V.deterministic_suite(cfg, args.genus, args.trials)
    if name == "identities":
        curve, _ = load_input(args.curve)
        if curve is None:
            raise InputError("identities needs a curve")
        return V.identities_suite(curve, cfg)
    if name == "combinatorics":
        return V.combinatorics_suite(cfg)
    if name == "bounds":
        curve = load_input(args.curve)[0] if args.curve else None
        return V.bounds_suite(cfg, curve)
    if name == "genus1":
        return V.genus_one_suite(cfg)
    raise InputError(f"unknown suite {name}")


def cmd_verify(args, cfg):
    names = V.SUITES if args.suite == "all" else (args.suite,)
    if args.suite == "all":
        names = tuple(n for n in names if n != "rosenhain")
    results = {}
    for n in names:
        results[n] = [c.as_dict() for c in _run_suite(n, args, cfg)]
    ok = all(c["pass"] for r in results.values() for c in r)
    if args.format == "csv":
        rows = [dict(c, suite=s) for s, r in results.items() for c in r]
        text = to_csv(rows, ["suite", "name", "value", "tolerance", "pass", "detail"])
    else:
        text = dumps({"pass": ok, "suites": results, "config": _config_dict(cfg, args)}) + "\n"
    write_atomic(args.out, text)
    return 0 if ok else EXIT_FAIL


def cmd_table1(args, cfg):
    rows = V.table1_rows(cfg, tuple(int(r) for r in args.rows.split(",")))
    flat = [{"n": r["n"], "genus": r["genus"], "log_delta": r["log_delta"], "H": r["H"],
             "H_stderr": r["H_stderr"], "delta": r["delta"], "phi": r["phi"],
             "ref_log_delta": r["reference"]["log_delta"], "ref_H": r["reference"]["H"],
             "ref_delta": r["reference"]["delta"], "ref_phi": r["reference"]["phi"],
             "pass": "pass" if r["pass"] else "fail"} for r in rows]
    if args.format == "json":
        text = dumps({"rows": flat, "config": _config_dict(cfg, args)}) + "\n"
    else:
        text = to_csv(flat, list(flat[0]))
    write_atomic(args.out, text)
    return 0 if all(r["pass"] for r in rows) else EXIT_FAIL


def _diagnostic(kind, detail):
    sys.stderr.write(dumps({"error": kind, "detail": detail}) + "\n")


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", type=float, default=1e-10, help="theta truncation error")
    common.add_argument("--samples", type=int, default=200_000, help="torus samples for H")
    common.add_argument("--mc-samples", type=int, default=40_000,
                        help="samples for curve integrals (S_k, B, Lambda, Green)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--quad-order", type=int, default=128)
    common.add_argument("--kind", choices=("pseudo", "low-discrepancy"), default="low-discrepancy")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="default csv for table1, json otherwise")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="arakelov", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("periods", parents=[common], help="period matrix of a curve")
    s.add_argument("input", help="curve JSON or preset xn+1:<n>")
    s = sub.add_parser("invariants", parents=[common], help="invariant report")
    s.add_argument("input", help="curve JSON, period JSON or preset xn+1:<n>")
    s.add_argument("--green-pairs", type=int, default=0,
                   help="random pairs for the Green sup bound")
    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=V.SUITES + ("all",))
    s.add_argument("--genus", type=int, default=None)
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--curve", default="xn+1:5")
    s = sub.add_parser("table1", parents=[common], help="delta and phi of y^2 = x^n + 1")
    s.add_argument("--rows", default="5,6,7,8")
    return p


COMMANDS = {"periods": cmd_periods, "invariants": cmd_invariants, "verify": cmd_verify,
            "table1": cmd_table1}


def main(argv=None):
    p = build_parser()
    args = p.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "table1" else "json"
    cfg = _config(args)
    if min(cfg.eps, cfg.samples, cfg.mc_samples, cfg.quad_order) <= 0:
        _diagnostic("InvalidConfig", "eps, samples and quad-order must be positive")
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args, cfg)
    except VALIDATION_ERRORS as e:
        _diagnostic(type(e).__name__, str(e))
        return EXIT_INVALID
    except AllCensored as e:
        _diagnostic("AllCensored", str(e))
        return EXIT_CENSORED


if __name__ == "__main__":
    sys.exit(main())
