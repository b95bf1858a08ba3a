"""
Command-line interface.

Data goes to stdout, diagnostics to stderr. Exit codes: 0 success, 1 failed
verification, 2 invalid weight or parameter, 3 enumeration cap exceeded,
4 invalid n list.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from collections import Counter

import numpy as np

from . import asymptotics as asy
from .boundary import boundary_from_acoords, sup_distance
from .limitshape import LimitShape, limit_shape
from .measure import (
    dimension,
    dimension_by_roots,
    format_float,
    log_probability,
    multiplicity,
    normalization_check,
    oracle_mismatches,
    plancherel_probability,
    write_measure_csv,
)
from .sampler import (
    convergence_experiment,
    exact_sample,
    mcmc_sample,
    mode_search,
    mode_uniqueness,
    resolve_threads,
    trend_ok,
    validate_n_list,
)
from .svg import line_plot
from .weights import (
    ACoordinates,
    AlgebraConfig,
    DynkinLabels,
    EnumerationCapError,
    WeightError,
    acoords_to_dynkin,
    check_config_match,
    dynkin_to_acoords,
    enumerate_support,
    parse_int_list,
    weight_to_json,
)

EXIT_VERIFY = 1
EXIT_INVALID = 2
EXIT_CAP = 3
EXIT_NLIST = 4


class BadNList(ValueError):
    pass


def _err(msg: str):
    print(msg, file=sys.stderr)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def _fl(x):
    """Floats rounded to 9 significant digits for stable output."""
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None if x is None else str(x)
    return float(format_float(float(x)))


def _config(args, need_N: bool = True) -> AlgebraConfig:
    N = getattr(args, "N", None)
    if N is None:
        if need_N:
            raise WeightError("--N is required")
        N = 1
    return AlgebraConfig(args.n, N)


def _weight(args, config: AlgebraConfig, *, parity: bool = True) -> ACoordinates:
    if args.a is not None:
        a = ACoordinates(parse_int_list(args.a))
    elif args.dynkin is not None:
        a = dynkin_to_acoords(DynkinLabels(parse_int_list(args.dynkin)), config)
    else:
        raise WeightError("give exactly one of --a or --dynkin (or --table)")
    check_config_match(a, config, parity=parity)
    return a


# -- subcommands ---------------------------------------------------------------


def cmd_mult(args, out) -> int:
    config = _config(args)
    if args.table:
        write_measure_csv(config, out)
        return 0
    out.write(f"{multiplicity(config, _weight(args, config))}\n")
    return 0


def cmd_dim(args, out) -> int:
    if args.table:
        write_measure_csv(_config(args), out)
        return 0
    if args.N is None:
        # the dimension does not involve N
        config = AlgebraConfig(args.n, 1)
        a = _weight(args, config, parity=False)
    else:
        config = _config(args)
        a = _weight(args, config, parity=False)
    d = dimension(config, a)
    d2 = dimension_by_roots(config, acoords_to_dynkin(a, config))
    if d != d2:
        _err(f"dimension forms disagree: {d} vs {d2}")
        return EXIT_VERIFY
    out.write(f"{d}\n")
    return 0


def cmd_measure(args, out) -> int:
    config = _config(args)
    if args.table:
        write_measure_csv(config, out)
        return 0
    a = _weight(args, config)
    mv = plancherel_probability(config, a)
    rec = weight_to_json(a, config)
    rec.update({
        "multiplicity": multiplicity(config, a),
        "dimension": dimension(config, a),
        "probability": f"{mv.exact.numerator}/{mv.exact.denominator}",
        "log_probability": _fl(mv.log_value),
    })
    out.write(_dump(rec) + "\n")
    return 0


def _check_c_arg(c: float):
    if c is None or not math.isfinite(c) or c < 2.0:
        raise WeightError(f"c must be at least 2, got {c}")


def _shape_svg(shape: LimitShape, grid: int) -> str:
    xs = np.linspace(-shape.half_width - 0.5, shape.half_width + 0.5, max(grid, 401))
    return line_plot(
        [("density rho(x)", xs, shape.density(xs)), ("shape f(x)", xs, shape.shape(xs))],
        title=f"limit density and shape, c = {shape.c:g}",
    )


def cmd_limitshape(args, out) -> int:
    _check_c_arg(args.c)
    if args.grid < 2:
        raise WeightError("grid must be at least 2")
    shape = LimitShape(args.c)
    if args.format == "svg":
        out.write(_shape_svg(shape, args.grid))
        return 0
    if args.format == "json":
        xs = np.linspace(-shape.half_width, shape.half_width, args.grid)
        for x, r, f in zip(xs, shape.density(xs), shape.shape(xs)):
            out.write(_dump({"x": _fl(x), "rho": _fl(r), "f": _fl(f)}) + "\n")
    else:
        shape.write_csv(out, args.grid)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(_shape_svg(shape, args.grid))
        _err(f"wrote {args.svg}")
    return 0


def cmd_quadfunc(args, out) -> int:
    if args.n is None:
        _check_c_arg(args.c)
        if args.c <= 2.0:
            raise WeightError("c must exceed 2 for J")
        shape = LimitShape(args.c)
        j = asy.functional_J(shape)
        out.write(_dump({"c": _fl(shape.c), "J": _fl(j.J), "Q": _fl(j.Q_part),
                         "C": _fl(j.C_part)}) + "\n")
        return 0
    config = _config(args)
    if args.mode:
        a = mode_search(config)
    else:
        a = _weight(args, config)
    b = boundary_from_acoords(a, config)
    shape = limit_shape(config.c)
    rec = weight_to_json(a, config)
    lp = log_probability(config, a)
    jn = asy.functional_J(b)
    rec.update({"c_n": _fl(config.c), "J": _fl(jn.J), "Q": _fl(jn.Q_part),
                "C": _fl(jn.C_part), "log_prob": _fl(lp),
                "gap": _fl(abs(-lp / (2 * config.n) ** 2 - jn.J))})
    if not b.overflows:
        d = asy.decompose(b, shape)
        rec.update({"J_shape": _fl(d.J_shape), "Q_delta": _fl(d.Q_delta),
                    "L_delta": _fl(d.L_part), "residual": _fl(d.residual)})
    if a.a[0] < config.cone:
        rec["log_asymptotic"] = _fl(asy.log_weight_asymptotic(config, a))
        rec["stirling_bound"] = _fl(asy.stirling_remainder_bound(config, a))
    out.write(_dump(rec) + "\n")
    return 0


def _verify_functional(config: AlgebraConfig, count: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    shape = limit_shape(config.c)
    vals = np.arange(2 - config.parity, config.cone, 2)
    worst, min_l = 0.0, math.inf
    for _ in range(count):
        a = tuple(int(v) for v in sorted(rng.choice(vals, config.n, replace=False), reverse=True))
        d = asy.decompose(boundary_from_acoords(a, config), shape)
        worst = max(worst, d.residual)
        min_l = min(min_l, d.L_part)
    return {"pass": worst <= 1e-8 and min_l >= -1e-10, "max_residual": _fl(worst),
            "min_L": _fl(min_l), "diagrams": count}


def cmd_verify(args, out) -> int:
    checks = {}
    selected = [k for k in ("normalization", "oracle", "equilibrium", "crossform", "functional")
                if getattr(args, k)]
    if not selected:
        raise WeightError("select at least one check")
    if {"normalization", "oracle", "functional"} & set(selected):
        config = _config(args)
    if "normalization" in selected:
        r = normalization_check(config)
        checks["normalization"] = {"pass": r == 1, "ratio": f"{r.numerator}/{r.denominator}"}
    if "oracle" in selected:
        bad = oracle_mismatches(config)
        total = sum(1 for _ in enumerate_support(config))
        checks["oracle"] = {"pass": not bad, "weights": total, "mismatches": len(bad),
                            "agreement": _fl(1.0 - len(bad) / max(total, 1))}
    if "equilibrium" in selected or "crossform" in selected:
        _check_c_arg(args.c)
        shape = LimitShape(args.c)
    if "equilibrium" in selected:
        rep = shape.equilibrium_residuals(args.grid)
        checks["equilibrium"] = {
            "pass": rep.max_residual_on_support <= 1e-4 and rep.min_slack_off_support >= -1e-6,
            "ell": _fl(rep.ell_estimate), "max_residual": _fl(rep.max_residual_on_support),
            "min_slack": _fl(rep.min_slack_off_support), "grid": rep.grid,
        }
    if "crossform" in selected:
        a = shape.endpoint_a
        xs = np.linspace(-a, a, 103)[1:-1]
        err = max(abs(float(shape.density(x)) - shape.density_integral_form(x)) for x in xs)
        checks["crossform"] = {"pass": err <= 1e-6, "max_abs_diff": _fl(err), "points": len(xs)}
    if "functional" in selected:
        checks["functional"] = _verify_functional(config, args.count, args.seed)
    ok = all(v["pass"] for v in checks.values())
    out.write(_dump({"pass": ok, "checks": checks}) + "\n")
    for name, v in checks.items():
        _err(f"{name}: {'pass' if v['pass'] else 'FAIL'}")
    return 0 if ok else EXIT_VERIFY


def cmd_sample(args, out) -> int:
    config = _config(args)
    if args.exact:
        rep = exact_sample(config, args.seed, args.count)
    else:
        rep = mcmc_sample(config, args.seed, chains=args.chains, burnin=args.burnin,
                          sweeps=args.sweeps, thin=args.thin, threads=args.threads)
    for a, lp in zip(rep.samples, rep.log_probs):
        rec = weight_to_json(a, config)
        rec["log_prob"] = _fl(lp)
        out.write(_dump(rec) + "\n")
    freq = Counter(a.a for a in rep.samples)
    total = max(len(rep.samples), 1)
    _err(f"{len(rep.samples)} samples; acceptance rate {rep.acceptance_rate:.4f}")
    for t in sorted(freq):
        p = plancherel_probability(config, t).exact if args.exact else None
        extra = f"  exact {float(p):.6f}" if p is not None else ""
        _err(f"  {t}: {freq[t] / total:.6f}{extra}")
    return 0


def cmd_mode(args, out) -> int:
    config = _config(args)
    a = mode_search(config, order=args.order)
    c = float(config.c_n) if args.c is None else args.c
    _check_c_arg(c)
    shape = limit_shape(c)
    b = boundary_from_acoords(a, config)
    rec = weight_to_json(a, config)
    rec.update({"log_prob": _fl(log_probability(config, a)), "c_n": _fl(config.c),
                "c_caption": _fl(config.c_caption), "shape_c": _fl(c),
                "sup_dist": _fl(sup_distance(b, shape))})
    flags = mode_uniqueness(config, a)
    rec["mode_check"] = {k: ([list(t) for t in v] if k == "tied_neighbours" else v)
                         for k, v in flags.items()}
    if flags["unique"] is False or flags["tied_neighbours"]:
        _err("warning: the most probable diagram is not unique")
    out.write(_dump(rec) + "\n")
    if args.overlay:
        h = max(float(b.edges[-1]), shape.half_width) + 0.5
        xs = np.linspace(-h, h, 2001)
        bx = np.concatenate(([-h], b.edges, [h]))
        svg = line_plot([(f"most probable diagram, n={config.n}, N={config.N}", bx, b(bx)),
                         (f"limit shape, c={c:g}", xs, shape.shape(xs))],
                        title=f"rotated and scaled diagram for B_{config.n}")
        with open(args.overlay, "w") as fh:
            fh.write(svg)
        _err(f"wrote {args.overlay}")
    return 0


def cmd_converge(args, out) -> int:
    try:
        ns = validate_n_list(parse_int_list(args.n_list))
    except (ValueError, WeightError) as exc:
        raise BadNList(str(exc)) from exc
    _check_c_arg(args.c)
    rows = convergence_experiment(args.c, ns, args.seed, sweeps=args.sweeps, chains=args.chains,
                                  burnin=args.burnin, threads=args.threads)
    writer = csv.writer(out, lineterminator="\n")
    cols = ["n", "N", "c_n", "mean_sup_dist", "q90_sup_dist", "acceptance_rate"]
    writer.writerow(cols)
    for r in rows:
        writer.writerow([r["n"], r["N"], format_float(r["c_n"]), format_float(r["mean_sup_dist"]),
                         format_float(r["q90_sup_dist"]), format_float(r["acceptance_rate"])])
    if len(rows) > 1:
        means = [r["mean_sup_dist"] for r in rows]
        _err("trend: " + ("non-increasing" if trend_ok(means) else "NOT non-increasing"))
    return 0


# -- parser -------------------------------------------------------------------------


def _add_weight(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--a", help="a-coordinates, comma separated")
    g.add_argument("--dynkin", help="Dynkin labels, comma separated")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitlab",
        description="Spinor tensor-power measure of so(2n+1): exact values, limit shapes, sampling.",
    )
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads (LIMITLAB_THREADS overrides)")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, need_n in (("mult", cmd_mult, True), ("dim", cmd_dim, False),
                             ("measure", cmd_measure, True)):
        p = sub.add_parser(name)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--N", type=int, required=need_n)
        _add_weight(p)
        p.add_argument("--table", action="store_true", help="CSV of the whole support")
        p.set_defaults(func=fn)

    p = sub.add_parser("limitshape")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--grid", type=int, default=201)
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--svg", help="also write an SVG of density and shape to this path")
    p.set_defaults(func=cmd_limitshape)

    p = sub.add_parser("quadfunc")
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--c", type=float)
    _add_weight(p)
    p.add_argument("--mode", action="store_true", help="use the most probable diagram")
    p.set_defaults(func=cmd_quadfunc)

    p = sub.add_parser("verify")
    for k in ("normalization", "oracle", "equilibrium", "crossform", "functional"):
        p.add_argument(f"--{k}", action="store_true")
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--count", type=int, default=10, help="random diagrams for --functional")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=4)
    p.add_argument("--burnin", type=int, default=1000)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--thin", type=int, default=10)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("mode")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--c", type=float, help="limit-shape parameter (default c_n)")
    p.add_argument("--order", choices=("steepest", "sweep"), default="steepest")
    p.add_argument("--overlay", help="write an SVG overlay of the diagram and limit shape")
    p.set_defaults(func=cmd_mode)

    p = sub.add_parser("converge")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--n", dest="n_list", required=True, help="comma-separated ranks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweeps", type=int, default=500)
    p.add_argument("--chains", type=int, default=4)
    p.add_argument("--burnin", type=int, default=None)
    p.set_defaults(func=cmd_converge)
    return parser


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = resolve_threads(args.threads)
    out = sys.stdout if out is None else out
    try:
        return args.func(args, out)
    except BadNList as exc:
        _err(f"error: {exc}")
        return EXIT_NLIST
    except EnumerationCapError as exc:
        _err(f"error: {exc}")
        return EXIT_CAP
    except (WeightError, ValueError) as exc:
        _err(f"error: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
