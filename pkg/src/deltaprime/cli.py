"""Command line interface: ``deltaprime <command> [options]``.

Exit codes: 0 success, 2 bad arguments or violated preconditions, 3 a result
outside its acceptance window (fitted rate, failed expansion check).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import convergence, series, spectra
from .delta_arrays import ArrayResolvent, CouplingConfig
from .errors import DeltaPrimeError
from .kernels import DeltaPrimeResolvent, DirichletResolvent, FreeResolvent
from .potentials import ScaledPotential, c_of_a, parse_shape, tau, tau_alpha
from .schrodinger import PotentialResolvent

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_WINDOW = 3

MODELS = ("free", "delta-prime", "dirichlet", "triple", "potential")


class UsageError(Exception):
    pass


def _finite(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def _float_list(text):
    return [_finite(t) for t in text.split(",") if t.strip()]


def _fmt(v):
    return format(float(v), ".17g")


def _write(args, text):
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(args, header, rows, config):
    if args.format == "json":
        doc = {"rows": [dict(zip(header, r)) for r in rows], "config": config}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m for m in missing))


def _shapes(args):
    specs = args.shape or ["box:h=0.5"]
    shapes = [parse_shape(s) for s in specs]
    if len(shapes) == 1:
        shapes *= 3
    if len(shapes) != 3:
        raise UsageError("give --shape once or three times (V-1, V0, V+1)")
    return tuple(shapes)


# commands -----------------------------------------------------------------

def _kernel_model(args):
    k = args.kappa
    m = args.model
    if m == "free":
        return FreeResolvent(k)
    if m == "delta-prime":
        _need(args, "beta")
        return DeltaPrimeResolvent(args.beta, k, args.y)
    if m == "dirichlet":
        return DirichletResolvent(k, args.y)
    _need(args, "beta", "a")
    cfg = CouplingConfig(args.beta, args.a, args.alpha, args.y)
    if m == "triple":
        return ArrayResolvent.cheon_shigehara(cfg, k)
    _need(args, "epsilon")
    sp = ScaledPotential(cfg, args.epsilon, _shapes(args))
    return PotentialResolvent.from_scaled(sp, k, args.cells_per_bump)


def cmd_kernel(args):
    _need(args, "kappa", "x")
    xs = args.x
    xps = args.xprime if args.xprime is not None else xs
    model = _kernel_model(args)
    rows = []
    for x in xs:
        for xp in xps:
            rows.append((x, xp, float(model(x, xp))))
    config = {k: v for k, v in vars(args).items() if k not in ("func", "output")}
    _write(args, _table(args, ["x", "xprime", "value"], rows, config))
    return EXIT_OK


def cmd_spectrum(args):
    _need(args, "beta", "a")
    cfg = CouplingConfig(args.beta, args.a, args.alpha, args.y)
    states = spectra.find_bound_states(cfg, args.kappa_max)
    rows = [(b.kappa_star, b.energy, b.branch) for b in states]
    config = {"beta": args.beta, "a": args.a, "alpha": args.alpha, "kappa_max": args.kappa_max}
    _write(args, _table(args, ["kappa_star", "energy", "branch"], rows, config))
    return EXIT_OK


def cmd_series_verify(args):
    tid = series.ExpansionId.parse(args.id)
    params = {"kappa": args.kappa, "beta": args.beta, "alpha": args.alpha}
    rep = series.verify_expansion(tid, params, args.order)
    if args.format == "json":
        doc = {
            "id": tid.value,
            "params": rep.params,
            "order": rep.order,
            "passed": rep.passed,
            "rows": [
                {"entry": list(r.entry), "power": r.order, "computed": r.computed,
                 "expected": r.expected, "abs_err": r.abs_err, "rel_err": r.rel_err}
                for r in rep.rows
            ],
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        header = ["entry", "power", "computed", "expected", "abs_err", "rel_err"]
        rows = [("" if not r.entry else f"{r.entry[0]}{r.entry[1]}", r.order, r.computed,
                 r.expected, r.abs_err, r.rel_err) for r in rep.rows]
        text = _table(args, header, rows, {}) + f"# {'PASS' if rep.passed else 'FAIL'}\n"
    _write(args, text)
    return EXIT_OK if rep.passed else EXIT_WINDOW


def cmd_converge(args):
    sid = convergence.StudyId(args.study)
    params = {}
    for name in ("beta", "kappa", "alpha", "n", "L"):
        v = getattr(args, name)
        if v is not None:
            params[name] = v
    params["y"] = args.y
    if args.a_grid is not None:
        params["a_grid"] = args.a_grid
    if args.eps_grid is not None:
        params["eps_grid"] = args.eps_grid
    if args.rule is not None:
        params["rule_nu"] = convergence.parse_rule(args.rule)
    if args.shape:
        params["shapes"] = list(_shapes(args))
    if args.cells_per_bump is not None:
        params["cells_per_bump"] = args.cells_per_bump
    if args.c_gamma is not None:
        params["c_gamma"] = args.c_gamma
    rep = convergence.study(sid, params)
    lo, hi = convergence.DEFAULT_RATE_WINDOWS[sid]
    lo = args.rate_min if args.rate_min is not None else lo
    hi = args.rate_max if args.rate_max is not None else hi
    rep.config["rate_window"] = [lo, hi]
    _write(args, rep.to_json() if args.format == "json" else rep.to_csv())
    if not rep.rate_ok((lo, hi)):
        print(f"fitted rate {rep.fitted_rate:.4g} outside [{lo}, {hi}]", file=sys.stderr)
        return EXIT_WINDOW
    return EXIT_OK


def cmd_tau(args):
    _need(args, "beta", "kappa", "epsilon")
    eps = args.epsilon
    if args.a is None and args.rule is None:
        raise UsageError("give --a or --rule")
    a = args.a if args.a is not None else eps ** convergence.parse_rule(args.rule)
    shapes = _shapes(args)
    cg = args.c_gamma
    if cg is None:
        cg = convergence.measure_c_gamma(args.beta, args.alpha, args.kappa, [a])
    if args.alpha == 1:
        t, power = tau(eps, a, args.kappa, args.beta, shapes, cg), 2
    else:
        t, power = tau_alpha(eps, a, args.kappa, args.beta, shapes, cg), 1
    bound = 2 * cg * t / (a**power * (1 - t)) if t < 1 else math.inf
    row = (eps, a, c_of_a(args.beta, a, shapes), cg, t, bound)
    header = ["epsilon", "a", "c_of_a", "c_gamma", "tau", "neumann_bound"]
    config = {"beta": args.beta, "kappa": args.kappa, "alpha": args.alpha,
              "shapes": [s.spec for s in shapes]}
    _write(args, _table(args, header, [row], config))
    return EXIT_OK


# parser -------------------------------------------------------------------

def _common(p):
    p.add_argument("--beta", type=_finite, help="delta-prime strength")
    p.add_argument("--kappa", type=_finite, help="spectral parameter, energy -kappa^2")
    p.add_argument("--alpha", type=_finite, default=None,
                   help="coupling disbalance (default 1; 2 for the Dirichlet studies)")
    p.add_argument("--a", type=_finite, help="spacing of the three centers")
    p.add_argument("--epsilon", type=_finite, help="width scale of the potential bumps")
    p.add_argument("--y", type=_finite, default=0.0, help="interaction point (default 0)")
    p.add_argument("--shape", action="append",
                   help="bump profile, e.g. box:h=0.5, gauss:sigma=0.2, triangle:h=0.5; "
                        "once for all bumps or three times")
    p.add_argument("--cells-per-bump", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="write here instead of stdout")
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for compatibility; computations run in one thread")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="deltaprime",
        description="Resolvent kernels, spectra and convergence studies for delta-prime "
                    "approximations by three delta interactions and squeezed potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="evaluate a resolvent kernel on (x, x') pairs")
    _common(p)
    p.add_argument("--model", choices=MODELS, default="free")
    p.add_argument("--x", type=_float_list, help="comma separated x values (use --x=-1,0,1 when the first is negative)")
    p.add_argument("--xprime", type=_float_list, help="comma separated x' values (default: x)")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("spectrum", help="bound states of the three-center array")
    _common(p)
    p.add_argument("--kappa-max", type=_finite, default=10.0,
                   help="search window (1e-3, kappa_max] (default 10)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("series-verify", help="check an expansion identity with jets")
    _common(p)
    p.add_argument("--id", required=True,
                   help="one of " + ", ".join(m.value for m in series.ExpansionId))
    p.add_argument("--order", type=int, default=series.DEFAULT_ORDER)
    p.set_defaults(func=cmd_series_verify)

    p = sub.add_parser("converge", help="run a convergence study")
    _common(p)
    p.add_argument("--study", required=True, choices=[s.value for s in convergence.StudyId])
    p.add_argument("--a-grid", type=_float_list)
    p.add_argument("--eps-grid", type=_float_list)
    p.add_argument("--rule", help="spacing rule for potential studies, e.g. a=eps^0.0625")
    p.add_argument("--n", type=int, help="quadrature nodes per axis")
    p.add_argument("--L", type=_finite, help="quadrature half-width")
    p.add_argument("--c-gamma", type=_finite, help="override the measured Krein constant")
    p.add_argument("--rate-min", type=_finite)
    p.add_argument("--rate-max", type=_finite)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("tau", help="Neumann-series parameter tau and the resulting bound")
    _common(p)
    p.add_argument("--rule", help="a=eps^<nu> instead of --a")
    p.add_argument("--c-gamma", type=_finite)
    p.set_defaults(func=cmd_tau)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "converge":
        if args.cells_per_bump is None:
            args.cells_per_bump = 64
        if args.alpha is None:
            args.alpha = 1.0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (DeltaPrimeError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
