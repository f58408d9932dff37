"""Command-line workbench: ``outlawldc <group> <command> [options]``.

Reports are JSON (or flat CSV) written to ``--out`` or standard output, and a
one-line summary goes to standard error. Exit status is 0 when every
certificate in the report passes, 1 on a certified failure and 2 on usage or
capacity errors. Identical arguments give byte-identical reports; wall-clock
timings are only embedded with ``--timing``.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from pathlib import Path

from . import __version__
from .codes import (
    CodeParams,
    certify_ldc,
    certify_smooth_code,
    hadamard_code,
    identity_code,
    query_distribution,
)
from .config import BudgetExceeded, CapacityError, DegradedError, VerificationError
from .formats import (
    code_to_dict,
    decoders_to_dict,
    distribution_to_dict,
    dumps,
    load_code,
    load_decoders,
    load_distribution,
    load_function,
    load_partition,
    load_point_set,
    point_set_to_dict,
    spectrum_to_dict,
    to_csv,
)
from .fourier import (
    character,
    derivative_norms,
    fourier_transform,
    identity_checks,
    spectral_norm,
    sup_norm,
    smoothness,
)
from .geometry import (
    construct_avoiding_set,
    geometry_outlaw,
    interpolate_homogeneous,
    level_sets,
    line_count_in_set,
)
from .jenga import (
    f2_connectivity_check,
    f2_partition,
    fp_line_partition,
    jenga_outlaw,
    jenga_test,
    pseudorandom_deviation,
)
from .outlaw import deviation, dictator_distribution, kappa_scan, point_mass
from .transforms import avg_to_ldc, ldc_to_outlaw, outlaw_to_ldc_pipeline

HADAMARD_SMOOTH = {"q": 2, "c": 2.0, "eta": 0.5}
HADAMARD_LDC = {"q": 2, "delta": 0.125, "eta": 0.5}


class UsageError(Exception):
    pass


def _builtin(name: str, prefix: str) -> int | None:
    m = re.fullmatch(prefix + r"(\d+)", name)
    return int(m.group(1)) if m else None


def resolve_code(args):
    """(code, decoders, is_hadamard) from a builtin name or a pair of files."""
    k = _builtin(args.code, "hadamard")
    if k is not None:
        code, dec = hadamard_code(k)
        return code, dec, True
    k = _builtin(args.code, "identity")
    if k is not None:
        code, dec = identity_code(k)
        return code, dec, False
    if not Path(args.code).exists():
        raise UsageError(f"no such code file or builtin: {args.code}")
    if not getattr(args, "dec", None):
        raise UsageError("--dec is required with a code file")
    return load_code(args.code), load_decoders(args.dec), False


def resolve_distribution(spec: str):
    n = _builtin(spec, "dictator")
    if n is not None:
        return dictator_distribution(n)
    n = _builtin(spec, "point")
    if n is not None:
        return point_mass(character(n, [0]) * (1.0 / n))
    k = _builtin(spec, "hadamard")
    if k is not None:
        code, dec = hadamard_code(k)
        mu, _ = ldc_to_outlaw(code, dec, CodeParams(**HADAMARD_LDC), trials=2)
        return mu
    if not Path(spec).exists():
        raise UsageError(f"no such distribution file or builtin: {spec}")
    return load_distribution(spec)


def _params(args, hadamard: bool, defaults: dict, fields) -> CodeParams:
    vals = {}
    for f in fields:
        v = getattr(args, f, None)
        if v is None and hadamard:
            v = defaults.get(f)
        if v is None:
            raise UsageError(f"--{f} is required for this code")
        vals[f] = v
    return CodeParams(**vals)


# ---------------------------------------------------------------- commands


def cmd_fourier_analyze(args):
    f = load_function(args.f)
    spec = fourier_transform(f)
    return True, {
        "spectrum": spectrum_to_dict(spec),
        "degree": spec.degree(),
        "spectral_norm": spectral_norm(spec),
        "sup_norm": sup_norm(f),
        "smoothness": smoothness(spec),
        "derivative_norms": derivative_norms(spec).tolist(),
    }


def cmd_fourier_suite(args):
    res = [identity_checks(n, args.trials, args.seed, args.tolerance) for n in args.n]
    return all(r["passed"] for r in res), {"checks": res}


def cmd_ldc_audit(args):
    code, dec, had = resolve_code(args)
    params = _params(args, had, HADAMARD_SMOOTH, ["q", "c", "eta"])
    rep = certify_smooth_code(code, dec, params, args.tolerance)
    loads = [query_distribution(dec, i, code.n).tolist() for i in range(code.k)]
    out = {"code": args.code, "k": code.k, "n": code.n, "params": params, "smooth": rep, "loads": loads}
    passed = rep.passed
    if args.delta is not None:
        ldc = certify_ldc(code, dec, CodeParams(q=params.q, eta=args.ldc_eta or params.eta / 2, delta=args.delta),
                          mode=args.mode, budget=args.budget, seed=args.seed, tol=args.tolerance)
        out["ldc"] = ldc
        passed = passed and ldc.passed
    return passed, out


def cmd_ldc_adversary(args):
    code, dec, _ = resolve_code(args)
    eta = args.eta if args.eta is not None else 1e-12
    rep = certify_ldc(code, dec, CodeParams(q=dec.q, eta=eta, delta=args.delta), mode=args.mode,
                      budget=args.budget, restarts=args.restarts, seed=args.seed, tol=args.tolerance)
    return rep.passed, {"code": args.code, "delta": args.delta, "eta": eta, "report": rep}


def cmd_outlaw_deviation(args):
    mu = resolve_distribution(args.mu)
    est = deviation(mu, args.k, args.trials, args.seed)
    return True, {"mu": args.mu, "estimate": est}


def cmd_outlaw_kappa(args):
    mu = resolve_distribution(args.mu)
    scan = kappa_scan(mu, args.epsilon, args.trials, args.seed, args.k_max)
    return True, {"mu": args.mu, "kappa": scan.conservative, "scan": scan}


def cmd_pipeline_outlaw_to_ldc(args):
    mu = resolve_distribution(args.mu)
    rep = outlaw_to_ldc_pipeline(mu, args.epsilon, seed=args.seed, k=args.k, k_max=args.k_max,
                             trials=args.trials, verify=args.mode)
    return rep.passed, {"mu": args.mu, "report": rep}


def cmd_pipeline_ldc_to_outlaw(args):
    code, dec, had = resolve_code(args)
    params = _params(args, had, HADAMARD_LDC, ["q", "delta", "eta"])
    mu, wit = ldc_to_outlaw(code, dec, params, args.trials, args.seed, args.tolerance)
    out = {"code": args.code, "params": params, "witness": wit}
    if args.mu_out:
        Path(args.mu_out).write_text(dumps(distribution_to_dict(mu)))
    return wit.passed, out


def cmd_pipeline_avg_to_ldc(args):
    code, dec, had = resolve_code(args)
    params = _params(args, had, HADAMARD_SMOOTH, ["q", "c", "eta"])
    res = avg_to_ldc(code, dec, params, w=args.w, verify=args.mode, seed=args.seed, tol=args.tolerance)
    if args.code_out:
        Path(args.code_out).write_text(dumps(code_to_dict(res.code)))
    if args.dec_out:
        Path(args.dec_out).write_text(dumps(decoders_to_dict(res.decoders)))
    return res.ldc_report.passed, {"code": args.code, "result": res}


def cmd_geom_interpolate(args):
    p, n, pts = load_point_set(args.points)
    d = args.d if args.d is not None else p - 2
    f = interpolate_homogeneous(p, n, pts, d)
    counts = level_sets(f)
    return True, {"poly": f, "level_counts": counts.tolist()}


def cmd_geom_avoid(args):
    if args.A:
        p, n, pts = load_point_set(args.A)
        if (args.p, args.n) != (None, None) and (args.p, args.n) != (p, n):
            raise UsageError("--p/--n disagree with the point-set file")
    else:
        if args.p is None or args.n is None:
            raise UsageError("give --A or both --p and --n")
        p, n, pts = args.p, args.n, []
    av = construct_avoiding_set(p, n, pts)
    out = {"result": av, "B_points": point_set_to_dict(p, n, av.B),
           "lines_inside_B": line_count_in_set(p, n, av.B, unordered=True)}
    return av.certified, out


def cmd_geom_outlaw(args):
    rep = geometry_outlaw(args.p, args.n, args.k, args.trials, args.seed)
    return not rep.flagged, {"report": rep}


def _partition(args):
    if args.graph:
        return load_partition(args.graph), {"graph": args.graph}
    if args.fp:
        return fp_line_partition(*args.fp), {"fp": list(args.fp)}
    return f2_partition(args.f2), {"f2": args.f2}


def cmd_jenga_test(args):
    part, src = _partition(args)
    res = jenga_test(part, args.k, args.epsilon, args.trials, args.seed)
    return res.is_jenga, {"source": src, "result": res}


def cmd_jenga_f2(args):
    part = f2_partition(args.m)
    conn = f2_connectivity_check(args.m, None if args.m <= 4 else args.m - 1)
    k = max(args.m - 1, 1)
    dev = pseudorandom_deviation(part.union(range(k)), part.base, seed=args.seed)
    _, wit = jenga_outlaw(part, k, args.seed, draws=tuple(range(k)))
    out = {"m": args.m, "vertices": part.base.v, "matchings": len(part.matchings),
           "connectivity": conn, "first_matchings_deviation": dev, "outlaw_witness": wit}
    if args.graph_out:
        Path(args.graph_out).write_text(dumps(part.to_dict()))
    passed = conn["passed"] and dev.value >= 0.25 - args.tolerance and wit.smoothness <= 4 + args.tolerance
    return passed, out


def cmd_jenga_fp(args):
    part = fp_line_partition(args.p, args.m)
    lines = line_count_in_set(args.p, args.m, range(args.p ** args.m), unordered=True)
    sizes = [len(m) for m in part.matchings]
    out = {"p": args.p, "m": args.m, "vertices": part.base.v, "matchings": len(part.matchings),
           "matching_sizes": sizes, "edges": len(part.base.edges), "unordered_lines": lines}
    if args.graph_out:
        Path(args.graph_out).write_text(dumps(part.to_dict()))
    passed = lines == len(part.base.edges) and all(s == args.p ** (args.m - 1) for s in sizes)
    return passed, out


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed")
    c.add_argument("--trials", type=int, default=1000)
    c.add_argument("--budget", type=int, default=None, help="exhaustive enumeration budget")
    c.add_argument("--tolerance", type=float, default=1e-9)
    c.add_argument("--out", default=None, help="report path (default: stdout)")
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.add_argument("--timing", action="store_true", help="embed wall-clock seconds in the report")
    return c


def _code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--code", default="hadamard3", help="hadamardK, identityK or a code file")
    p.add_argument("--dec", default=None, help="decoder file (with a code file)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="outlawldc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True)

    def group(name, help_):
        g = groups.add_parser(name, help=help_)
        return g.add_subparsers(dest="command", required=True)

    def cmd(sub, name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    g = group("fourier", "Boolean-cube Fourier analysis")
    p = cmd(g, "analyze", cmd_fourier_analyze, "spectrum, norms and smoothness of a function file")
    p.add_argument("--f", required=True)
    p = cmd(g, "suite", cmd_fourier_suite, "identity checks on random functions")
    p.add_argument("--n", type=int, nargs="+", default=[4, 8, 12])

    g = group("ldc", "codes, decoders and adversaries")
    p = cmd(g, "audit", cmd_ldc_audit, "smooth-code certificate (plus LDC check with --delta)")
    _code_args(p)
    p.add_argument("--q", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--ldc-eta", type=float, default=None)
    p.add_argument("--mode", choices=["exhaustive", "greedy"], default="exhaustive")
    p = cmd(g, "adversary", cmd_ldc_adversary, "worst-case decoding under delta-fraction corruption")
    _code_args(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eta", type=float, default=None, help="required advantage over 1/2 (default: none)")
    p.add_argument("--mode", choices=["exhaustive", "greedy"], default="exhaustive")
    p.add_argument("--restarts", type=int, default=8)

    g = group("outlaw", "deviation and kappa estimates")
    p = cmd(g, "deviation", cmd_outlaw_deviation, "Monte Carlo deviation at k")
    p.add_argument("--mu", default="hadamard3", help="distribution file or dictatorN, pointN, hadamardK")
    p.add_argument("--k", type=int, required=True)
    p = cmd(g, "kappa", cmd_outlaw_kappa, "largest k with deviation >= epsilon")
    p.add_argument("--mu", default="hadamard3")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--k-max", type=int, default=32)

    g = group("pipeline", "end-to-end conversions")
    p = cmd(g, "outlaw-to-ldc", cmd_pipeline_outlaw_to_ldc, "outlaw -> average-case code -> LDC")
    p.add_argument("--mu", default="hadamard3")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--mode", choices=["exhaustive", "greedy"], default="exhaustive")
    p = cmd(g, "ldc-to-outlaw", cmd_pipeline_ldc_to_outlaw, "expected decoders of an LDC as an outlaw")
    _code_args(p)
    p.add_argument("--q", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--mu-out", default=None, help="write the distribution file here")
    p = cmd(g, "avg-to-ldc", cmd_pipeline_avg_to_ldc, "average-case smooth code -> LDC on a cube structure")
    _code_args(p)
    p.add_argument("--q", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--w", type=float, default=None)
    p.add_argument("--mode", choices=["exhaustive", "greedy"], default="exhaustive")
    p.add_argument("--code-out", default=None)
    p.add_argument("--dec-out", default=None)

    g = group("geom", "finite-field incidence geometry")
    p = cmd(g, "interpolate", cmd_geom_interpolate, "homogeneous polynomial vanishing on a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--d", type=int, default=None, help="degree (default p-2)")
    p = cmd(g, "avoid", cmd_geom_avoid, "large set meeting every line through A in <= p-2 points")
    p.add_argument("--p", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--A", default=None)
    p = cmd(g, "outlaw", cmd_geom_outlaw, "line-density deviation witness")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    g = group("jenga", "matching-partitioned hypergraphs")
    p = cmd(g, "test", cmd_jenga_test, "probability that k random matchings are not pseudorandom")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graph", default=None)
    src.add_argument("--f2", type=int, default=3)
    src.add_argument("--fp", type=int, nargs=2, metavar=("P", "M"), default=None)
    p = cmd(g, "f2", cmd_jenga_f2, "matchings {x, x+y} of F_2^m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--graph-out", default=None)
    p = cmd(g, "fp", cmd_jenga_fp, "lines of F_p^m by direction")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--graph-out", default=None)
    return parser


CONFIG_KEYS = ("seed", "trials", "budget", "tolerance", "format")


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0 <= args.seed < 1 << 64:
        parser.error("--seed must be an unsigned 64-bit integer")
    command = f"{args.group} {args.command}"
    config = {k: v for k, v in vars(args).items() if k not in ("func", "group", "command", "out", "timing")}
    start = time.perf_counter()
    try:
        passed, result = args.func(args)
    except (UsageError, CapacityError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegradedError, VerificationError) as exc:
        passed, result = False, {"error": str(exc)}
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - start
    report = {"command": command, "config": config, "version": __version__, "passed": bool(passed),
              "result": result}
    if args.timing:
        report["wall_clock_seconds"] = elapsed
    text = to_csv(report) if args.format == "csv" else dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"{'PASS' if passed else 'FAIL'} {command} ({elapsed:.2f}s)", file=sys.stderr)
    return 0 if passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
