"""Command-line front end.

Every command builds a report envelope ``{schema, tool, version, command,
inputs, summary, rows, provenance, convergence}`` and writes it as JSON,
CSV (the ``rows`` table with a header) or an aligned text table.

Exit codes: 0 success, 1 failed inequality check, 2 usage error,
3 inconclusive (mesh-convergence flag), 4 I/O error.
"""
import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, is_dataclass
from fractions import Fraction

import numpy as np

from . import __version__, kernels
from .bochner import fuzz
from .errors import ConespecError
from .estimates import (
    admissibility,
    gap_bound_multi,
    gap_bound_single,
    taming_crossing,
    taming_thresholds,
    verify_chain,
)
from .eigen import spindle_lambda1, spindle_spectrum_modes
from .hardy import cap_domain, verify_hardy, weight_for_cap
from .modelio import dumps as dump_model
from .modelio import load as load_model
from .models import CATALOG_NAMES, Spindle, catalog_model, ricci_bound_cone
from .radial import Grid
from .scalar import R_ell

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization


def _plain(x):
    """Convert report values to JSON-ready objects; non-finite floats become strings."""
    if is_dataclass(x) and not isinstance(x, type):
        return _plain(asdict(x))
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return _plain(float(x)) if x.denominator != 1 else int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if x is None or isinstance(x, str):
        return x
    return str(x)


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render(envelope, fmt):
    env = _plain(envelope)
    if fmt == "json":
        return json.dumps(env, sort_keys=True, indent=2) + "\n"
    rows = env.get("rows") or [env.get("summary", {})]
    keys = []
    for r in rows:
        for k in r:
            if k not in keys:
                keys.append(k)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([_cell(r.get(k)) for k in keys])
        return buf.getvalue()
    table = [keys] + [[_cell(r.get(k)) for k in keys] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(keys))]
    lines = ["  ".join(c.ljust(wd) for c, wd in zip(row, widths)).rstrip() for row in table]
    head = f"# {env['command']}  status={env['summary'].get('status', 'ok')}"
    return "\n".join([head] + lines) + "\n"


# ---------------------------------------------------------------------------
# argument handling


def _rho(text):
    if text == "auto":
        return "auto"
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("rho must be positive")
    return v


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _add_output(p):
    p.add_argument("--format", choices=("json", "csv", "table"), default="json", help="output format (default json)")
    p.add_argument("--out", help="write the report to this path instead of stdout")


def _add_model(p, default="round-sphere"):
    p.add_argument("--model", default=default, help=f"catalog name ({', '.join(CATALOG_NAMES)}); default {default}")
    p.add_argument("--model-file", help="model file (overrides --model)")
    p.add_argument("--n", type=int, default=3, help="ambient dimension (default 3)")
    p.add_argument("--R", type=float, default=None, help="radius of the sphere cross-section")
    p.add_argument("--ell", type=float, default=None, help="model curvature ell")
    p.add_argument("--rho", type=_rho, default=None, help="cap radius, or 'auto' for R_ell")


def build_parser():
    parser = argparse.ArgumentParser(prog="conespec", description="Spectral gaps and Hardy weights on conical spaces.")
    parser.add_argument("--version", action="version", version=f"conespec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("models", help="list catalog models or echo a model file")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--model-file", help="parse a model file and echo it")
    _add_output(p)

    p = sub.add_parser("ricci", help="cone Ricci lower bound on a radius sweep")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--ell", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--r", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    _add_output(p)

    p = sub.add_parser("hardy-check", help="verify the cone Hardy weight numerically")
    _add_model(p, "large-sphere-cone")
    p.add_argument("--L", type=float, default=None, help="clamp curvature (default: minimal admissible)")
    p.add_argument("--r-out", type=float, default=None, help="outer radius of the cap domain")
    p.add_argument("--cells", type=_positive_int, default=4000)
    p.add_argument("--modes", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-6)
    _add_output(p)

    p = sub.add_parser("eig", help="per-mode radial eigenvalues and the spectral gap")
    _add_model(p)
    p.add_argument("--cells", type=_positive_int, default=4000)
    p.add_argument("--modes", type=int, default=3, help="number of cross-section modes to list")
    p.add_argument("--count", type=_positive_int, default=3, help="eigenvalues per mode")
    p.add_argument("--rescale", action="store_true", help="solve with ell = 1 and map results back")
    _add_output(p)

    p = sub.add_parser("gap-bound", help="closed-form spectral-gap lower bound")
    p.add_argument("--model", default=None, help="catalog model (otherwise use the scalar options)")
    p.add_argument("--model-file")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--K", type=float, default=math.inf)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--rho", type=_rho, default="auto")
    p.add_argument("--R", type=float, default=None)
    _add_output(p)

    p = sub.add_parser("verify", help="numeric verification chain on a closed spindle")
    _add_model(p)
    p.add_argument("--cells", type=_positive_int, default=4000)
    p.add_argument("--t", type=float, nargs="*", default=[], help="extra couplings for the diagnostic sweep")
    p.add_argument("--rescale", action="store_true", help="solve with ell = 1 and map results back")
    _add_output(p)

    p = sub.add_parser("bochner-fuzz", help="randomized check of the pointwise Bochner inequality")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--N", type=float, default=None)
    p.add_argument("--samples", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--violate", action="store_true", help="sample R not >= kI (expect violations)")
    _add_output(p)

    p = sub.add_parser("thresholds", help="taming radii of the large-sphere cone")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--numeric", action="store_true", help="also locate the crossings by form-bound bisection")
    p.add_argument("--cells", type=_positive_int, default=4000)
    _add_output(p)
    return parser


def _resolve_model(args):
    if getattr(args, "model_file", None):
        return load_model(args.model_file)
    if args.model is None:
        return None
    rho = args.rho
    ell = args.ell
    if rho == "auto":
        rho = R_ell(ell if ell is not None else 1.0)
        if math.isinf(rho):
            raise UsageError("--rho auto needs ell > 0")
    return catalog_model(args.model, n=args.n, R=args.R, ell=ell, rho=rho).model


def _rescaled(sp):
    """Spindle with ell = 1 and the factor mapping its eigenvalues back.

    The cross-section data (kappa, mu_m) are unchanged by the rescaling.
    """
    if sp.ell <= 0:
        raise UsageError("--rescale needs ell > 0")
    return Spindle(sp.total_length * math.sqrt(sp.ell), sp.section, 1.0, sp.outer_bc), sp.ell


def _envelope(command, inputs, summary, rows, provenance, convergence=None):
    return {
        "schema": SCHEMA,
        "tool": "conespec",
        "version": __version__,
        "backend": kernels.BACKEND,
        "command": command,
        "inputs": inputs,
        "summary": summary,
        "rows": rows,
        "provenance": list(provenance),
        "convergence": convergence or {},
    }


# ---------------------------------------------------------------------------
# commands


def cmd_models(args):
    if args.model_file:
        m = load_model(args.model_file)
        rows = [{"name": m.name, "n": m.n, "K": m.bulkK, "caps": len(m.caps), "computable": m.computable}]
        summary = {"status": "ok", "model_file": dump_model(m)}
    else:
        rows = []
        for name in CATALOG_NAMES:
            e = catalog_model(name, n=args.n)
            m = e.model
            rows.append(
                {
                    "name": name,
                    "n": m.n,
                    "K": m.bulkK,
                    "kappa": m.caps[0].kappa if m.caps else (m.spindle.section.kappa if m.spindle else None),
                    "caps": len(m.caps),
                    "computable": m.computable,
                    "notes": " | ".join(e.notes),
                }
            )
        summary = {"status": "ok", "count": len(rows)}
    return _envelope("models", vars_clean(args), summary, rows, ["example catalog of conical spaces"]), EXIT_OK


def cmd_ricci(args):
    rows = [{"r": r, "k": ricci_bound_cone(args.n, args.ell, args.kappa, r)} for r in args.r]
    summary = {"status": "ok", "min_k": min(row["k"] for row in rows)}
    prov = ["cone Ricci bound (n-1) ell - (n-2)(1-kappa)^+ / sin_ell(r)^2"]
    return _envelope("ricci", vars_clean(args), summary, rows, prov), EXIT_OK


def cmd_hardy(args):
    model = _resolve_model(args)
    if not model.caps:
        raise UsageError("model has no conical point")
    cap = model.caps[0]
    w = weight_for_cap(cap, args.L)
    dom = cap_domain(cap, args.r_out)
    grid = Grid.uniform(0.0, dom.total_length, args.cells)
    res = verify_hardy(w, dom, grid, modes=args.modes, tol=args.tol)
    rows = [{"mode": m, "min_eig": v} for m, v in sorted(res.per_mode.items())]
    passed = res.passed and res.binding_mode == 0
    summary = {
        "status": "pass" if passed else "fail",
        "min_eig": res.min_eig,
        "normalized": res.normalized,
        "binding_mode": res.binding_mode,
        "L": w.L,
        "r_out": dom.total_length,
        "scale": res.scale,
    }
    prov = [
        "Hardy weight ((n-2)/2)^2 / utan_L(r)^2 - (n-2) L / 2 on r < R_L at a conical point",
        "admissible clamp L >= max(ell, (pi/(2 rho))^2)",
    ]
    return _envelope("hardy-check", vars_clean(args), summary, rows, prov), EXIT_OK if passed else EXIT_FAIL


def _spindle_of(model):
    if model.spindle is not None:
        return model.spindle
    if model.caps:
        return cap_domain(model.caps[0])
    raise UsageError("model has no computable part")


def cmd_eig(args):
    model = _resolve_model(args)
    sp = _spindle_of(model)
    factor = 1.0
    if args.rescale:
        sp, factor = _rescaled(sp)
    grid = Grid.uniform(0.0, sp.total_length, args.cells)
    rows = []
    for m in range(args.modes):
        if sp.section.max_index is not None and m > sp.section.max_index:
            break
        r = spindle_spectrum_modes(sp, grid, m, args.count)
        for j, (lam, res) in enumerate(zip(r.eigenvalues, r.residuals)):
            rows.append({"mode": m, "mu": sp.section.eigenvalue(m), "index": j, "eigenvalue": factor * lam, "residual": res})
    gap = spindle_lambda1(sp, grid)
    summary = {
        "status": "ok",
        "lambda1": factor * gap.lambda1,
        "binding_mode": gap.binding_mode,
        "modes_scanned": gap.modes_scanned,
        "cells": grid.cells,
        "rescaled_by": factor,
    }
    prov = ["separation of variables into radial problems with potential mu_m / sin_ell^2 and weight sin_ell^(n-1)"]
    return _envelope("eig", vars_clean(args), summary, rows, prov), EXIT_OK


def cmd_gap_bound(args):
    if args.model or args.model_file:
        model = _resolve_model(args)
        K = args.K if math.isfinite(args.K) else model.bulkK
        if len(model.caps) == 1:
            cap = model.caps[0]
            rep = gap_bound_single(model.n, K, cap.kappa, cap.ell, cap.rho)
        else:
            rep = gap_bound_multi(model.n, K, model.caps)
        n, kappa = model.n, (min(c.kappa for c in model.caps) if model.caps else 1.0)
    else:
        n, kappa = args.n, args.kappa
        if args.R is not None:
            kappa = 1.0 / args.R**2
        rho = R_ell(args.ell) if args.rho == "auto" else args.rho
        if math.isinf(rho):
            raise UsageError("--rho auto needs ell > 0")
        rep = gap_bound_single(n, args.K, kappa, args.ell, rho)
    verdict = admissibility(n, kappa)
    summary = {
        "status": "ok",
        "bound": rep.bound,
        "alpha": rep.alpha,
        "t": rep.t,
        "branch": rep.branch,
        "intermediate_bound": rep.intermediate_bound,
        "corollary_bound": rep.corollary_bound,
        "threshold": verdict.threshold,
        "closed_form_form_bound": verdict.closed_form_bound,
        "inputs_echo": rep.inputs,
    }
    rows = [{k: summary[k] for k in ("bound", "alpha", "t", "branch", "intermediate_bound", "corollary_bound")}]
    prov = [
        "t = (1-kappa)^+ 4(n-1)/(n(n-2)), alpha_t = N/(N-1) [1 + (t/(1-t))/(N-1)^2]^-1",
        "bound alpha_t min{K, (n-1) ell - n (1-kappa)^+ (pi/(2 rho))^2}",
        "admissibility threshold kappa > (n(6-n)-4)/(4(n-1))",
    ]
    return _envelope("gap-bound", vars_clean(args), summary, rows, prov), EXIT_OK


def cmd_verify(args):
    model = _resolve_model(args)
    sp = model.spindle
    if sp is None or not sp.is_closed:
        raise UsageError("verify needs a closed spindle model (round-sphere or spindle)")
    factor = 1.0
    if args.rescale:
        sp, factor = _rescaled(sp)
    rep = verify_chain(sp, cells=args.cells, extra_t=args.t)
    rows = []
    for key in rep.ground:
        rows.append({"t": float(key), "alpha_t": rep.alpha[key], "ground": factor * rep.ground[key], "alpha_t_ground": factor * rep.chain[key]})
    summary = {
        "status": rep.status,
        "lambda1": factor * rep.lambda1,
        "lambda1_kind": rep.lambda1_kind,
        "binding_mode": rep.binding_mode,
        "bound": factor * rep.bound,
        "corollary_bound": None if rep.corollary_bound is None else factor * rep.corollary_bound,
        "tol": factor * rep.tol,
        "failures": rep.failures,
        "admissible": rep.admissibility.admissible,
        "ketterer_ok": rep.admissibility.ketterer_ok,
        "cells": rep.cells,
        "rescaled_by": factor,
    }
    prov = [
        "lambda_1 >= alpha_t * bottom of spectrum of (-t n/(n-1) Delta + k)",
        "k = cone Ricci bound, Hardy weight at each tip with L = ell",
        "bound alpha_t (n kappa - 1) ell for rho = R_ell",
    ]
    code = {"pass": EXIT_OK, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[rep.status]
    return _envelope("verify", vars_clean(args), summary, rows, prov, rep.mesh), code


def cmd_bochner(args):
    s = fuzz(args.n, args.samples, args.seed, args.N, psd=not args.violate)
    ok = s.violations == 0
    status = ("pass" if ok else "fail") if not args.violate else ("pass" if not ok else "fail")
    summary = {"status": status, "violations": s.violations, "min_normalized_slack": s.min_normalized_slack}
    rows = [{"n": s.n, "N": s.N, "samples": s.samples, "seed": s.seed, "violations": s.violations}]
    prov = ["pointwise self-improved Bochner inequality with a = Hg/|g|, D = tr H"]
    return _envelope("bochner-fuzz", vars_clean(args), summary, rows, prov), EXIT_OK if status == "pass" else EXIT_FAIL


def cmd_thresholds(args):
    names = ("R_sharp", "R_natural", "R_flat")
    bounds = (args.n / (args.n - 1), 1.0, 0.5)
    radii = taming_thresholds(args.n)
    rows = []
    grid = Grid.geometric_span(1.0, args.cells, 60.0) if args.numeric else None
    for name, b, R in zip(names, bounds, radii):
        row = {"name": name, "form_bound": b, "R": R}
        if args.numeric:
            Rn = taming_crossing(b, args.n, grid)
            row["R_numeric"] = Rn
            row["rel_error"] = abs(Rn - R) / R
        rows.append(row)
    summary = {"status": "ok", **{name: R for name, R in zip(names, radii)}}
    prov = ["form bound of k^- on the cone over S^{n-1}_R equals 4(1 - 1/R^2)/(n-2)"]
    return _envelope("thresholds", vars_clean(args), summary, rows, prov), EXIT_OK


COMMANDS = {
    "models": cmd_models,
    "ricci": cmd_ricci,
    "hardy-check": cmd_hardy,
    "eig": cmd_eig,
    "gap-bound": cmd_gap_bound,
    "verify": cmd_verify,
    "bochner-fuzz": cmd_bochner,
    "thresholds": cmd_thresholds,
}


def vars_clean(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("format", "out")}


def parse(argv=None):
    return build_parser().parse_args(argv)


def execute(args):
    """Run a parsed command; returns (rendered text, exit code)."""
    env, code = COMMANDS[args.command](args)
    return render(env, args.format), code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = execute(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ConespecError as exc:
        print(f"conespec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"conespec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"conespec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
