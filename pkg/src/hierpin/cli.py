"""Command-line front end.

    hierpin annealed --b 2 --s 2 --h 1
    hierpin quenched --beta 1 --h 1 --pool 100000 --levels 25 --seed 42 --out q.csv
    hierpin scan --beta-values 0,1 --h-values 0,0.25,0.5,1 --out grid.csv
    hierpin scan --bisect --h-lo 0 --h-hi 1 --threshold 1e-6
    hierpin walkprob --s 2 --n 3
    hierpin certify --beta 1 --h 0.5
    hierpin oracle-check --b 3 --s 2 --n 3
    hierpin fit-singularity --s 2 --eps-lo 0.03 --eps-hi 0.15

Exit codes: 0 success, 1 domain / bracket / convergence / IO error, 2 usage.
Any flag may also come from a JSON object passed with ``--config``; flags on
the command line win.
"""

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from . import annealed as ann
from . import certificate as cert
from . import lattice
from . import population as popmod
from . import records
from .errors import PinningError
from .model import ModelParams, law_descriptor, parse_law
from .walks import build_q_table

logger = logging.getLogger("hierpin")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _model_flags(p, beta=True, law=True):
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    if beta:
        p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--h", type=float, default=0.0)
    if law:
        p.add_argument("--law", default="gaussian", help="gaussian | signs | discrete:v1,..:p1,..")


def _mc_flags(p, pool=100000, levels=25):
    p.add_argument("--pool", type=int, default=pool)
    p.add_argument("--levels", type=int, default=levels)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default flag values")
    common.add_argument("--out", help="output file (CSV or JSON by suffix); stdout if omitted")
    common.add_argument("--format", choices=["csv", "json"], help="override the output format")
    common.add_argument("--threads", type=int, default=1, help="worker threads (never changes results)")

    parser = argparse.ArgumentParser(prog="hierpin", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annealed", parents=[common], help="annealed free energy F(0, h)")
    _model_flags(p, beta=False, law=False)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-levels", type=int, default=ann.DEFAULT_MAX_LEVELS)

    p = sub.add_parser("quenched", parents=[common], help="population-dynamics estimate of F_N")
    _model_flags(p)
    _mc_flags(p)

    p = sub.add_parser("scan", parents=[common], help="quenched estimates on a grid, or bisection")
    _model_flags(p)
    _mc_flags(p)
    p.add_argument("--beta-values", type=_floats)
    p.add_argument("--h-values", type=_floats)
    p.add_argument("--bisect", action="store_true")
    p.add_argument("--h-lo", type=float, default=0.0)
    p.add_argument("--h-hi", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=1e-6)

    p = sub.add_parser("walkprob", parents=[common], help="table of q_n")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--b", type=int)
    p.add_argument("--n", type=int, default=10)

    p = sub.add_parser("certify", parents=[common], help="good-diamond lower bound")
    _model_flags(p)
    p.add_argument("--pool", type=int, default=100000)
    p.add_argument("--trials", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--conservative", action=argparse.BooleanOptionalAction, default=True)

    p = sub.add_parser("oracle-check", parents=[common], help="lattice enumeration vs recursion")
    _model_flags(p, law=False)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fit-singularity", parents=[common], help="fit -log F vs 1/eps")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--eps-lo", type=float, default=0.03)
    p.add_argument("--eps-hi", type=float, default=0.15)
    p.add_argument("--points", type=int, default=13)
    return parser


class UsageError(Exception):
    pass


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise UsageError("config must be a JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(config) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


def _require(cond, message):
    if not cond:
        raise PinningError(message)


def _base(args, **extra):
    rec = {"command": args.command, "version": __version__}
    rec.update(extra)
    return rec


def _cmd_annealed(args):
    params = ModelParams(args.b, args.s, 0.0, args.h)
    _require(args.tol > 0, "tol must be positive")
    _require(args.max_levels >= 1, "max-levels must be >= 1")
    fe = ann.annealed_free_energy(params, args.tol, args.max_levels)
    return [
        _base(
            args,
            b=args.b,
            s=args.s,
            h=args.h,
            tol=args.tol,
            free_energy=fe.value,
            log_free_energy=fe.log_value,
            phase=fe.phase,
            levels_used=fe.levels_used,
            tail_bound=fe.tail_bound,
        )
    ]


def _check_mc(args):
    _require(args.pool >= 2, "pool must be >= 2")
    _require(args.levels >= 1, "levels must be >= 1")
    _require(0 <= args.seed < 2**64, "seed must be an unsigned 64-bit integer")


def _quenched_record(args, params, law):
    est = popmod.quenched_free_energy(params, law, args.pool, args.levels, args.seed, args.threads)
    return _base(
        args,
        b=params.b,
        s=params.s,
        beta=params.beta,
        h=params.h,
        law=law_descriptor(law),
        pool=args.pool,
        levels=args.levels,
        seed=args.seed,
        mean=est.mean,
        std_err=est.std_err,
        annealed_fn=ann.annealed_partial(params, args.levels),
    )


def _cmd_quenched(args):
    params = ModelParams(args.b, args.s, args.beta, args.h)
    law = parse_law(args.law)
    _check_mc(args)
    return [_quenched_record(args, params, law)]


def _cmd_scan(args):
    law = parse_law(args.law)
    _check_mc(args)
    betas = sorted(args.beta_values) if args.beta_values else [args.beta]
    if args.bisect:
        _require(args.h_lo < args.h_hi, "need h-lo < h-hi")
        _require(args.threshold > 0, "threshold must be positive")
        grid = [ModelParams(args.b, args.s, beta, args.h_lo) for beta in betas]
        out = []
        for params in grid:
            hc = popmod.critical_point_scan(
                params, law, args.pool, args.levels, args.seed,
                args.h_lo, args.h_hi, args.threshold, args.threads,
            )
            out.append(
                _base(
                    args, b=params.b, s=params.s, beta=params.beta, law=law_descriptor(law),
                    pool=args.pool, levels=args.levels, seed=args.seed, h_lo=args.h_lo,
                    h_hi=args.h_hi, threshold=args.threshold, pseudo_critical_h=hc,
                )
            )
        return out
    _require(bool(args.h_values), "scan needs --h-values (or --bisect)")
    grid = [ModelParams(args.b, args.s, beta, h) for beta in betas for h in sorted(args.h_values)]
    return [_quenched_record(args, params, law) for params in grid]


def _cmd_walkprob(args):
    _require(args.n >= 0, "n must be >= 0")
    tables = build_q_table(args.s, args.n, args.b)
    rows = []
    for m, q in enumerate(tables.q):
        rows.append(
            _base(
                args, s=tables.s, b=tables.b, n=m, q=float(q), one_minus_q=float(1.0 - q),
                scaled=float(m * (1.0 - q) * (tables.s - 1) / 2.0) if tables.b == tables.s else math.nan,
            )
        )
    return rows


def _cmd_certify(args):
    params = ModelParams(args.b, args.s, args.beta, args.h)
    params.require_equal("certify")
    law = parse_law(args.law)
    _require(args.pool >= cert.MIN_VARIANCE_POOL, f"pool must be >= {cert.MIN_VARIANCE_POOL}")
    _require(args.trials >= 1, "trials must be >= 1")
    if (args.k is None) != (args.n is None):
        raise UsageError("give both --k and --n, or neither")
    if args.k is not None:
        _require(1 <= args.k < args.n, "need 1 <= k < n")
        c = cert.lower_bound(params, law, args.k, args.n, args.pool, args.seed, args.trials, args.conservative)
        return [_base(args, certified=c.cond15_ok and c.bound > 0, **c.as_record())]
    result = cert.search_certificate(params, law, args.pool, args.seed, args.trials, args.conservative)
    rows = []
    for c in result.tried:
        rows.append(_base(args, certified=c is result.found, **c.as_record()))
    if result.found is None:
        logger.warning("no certifying (k, n) found in the search window")
    return rows


def _cmd_oracle(args):
    _require(args.draws >= 1, "draws must be >= 1")
    lat = lattice.build_lattice(args.b, args.s, args.n)
    params = ModelParams(args.b, args.s, args.beta, args.h)
    gen = np.random.Generator(np.random.Philox(args.seed))
    worst = 0.0
    for _ in range(args.draws):
        x = params.beta * gen.standard_normal(lat.n_wall_bonds) + params.h - 0.5 * params.beta**2
        brute = lattice.enumerate_partition_from_energies(lat, x)
        rec = lattice.recursion_log_partition(x, args.b, args.s)
        # a log difference is the relative error of R itself
        worst = max(worst, abs(brute - rec))
    esc = lattice.enumerate_escape_probability(lat)
    q = float(build_q_table(args.s, args.n, args.b).q[args.n])
    return [
        _base(
            args, b=args.b, s=args.s, n=args.n, beta=args.beta, h=args.h, draws=args.draws,
            seed=args.seed, trajectories=len(lat.paths), max_rel_error=worst,
            escape_enumerated=esc, escape_recursion=q,
        )
    ]


def _cmd_fit(args):
    _require(0 < args.eps_lo < args.eps_hi, "need 0 < eps-lo < eps-hi")
    _require(args.points >= 2, "points must be >= 2")
    params = ModelParams(args.s, args.s)
    grid = np.linspace(args.eps_lo, args.eps_hi, args.points)
    slope, intercept, resid = ann.fit_singularity(params, grid)
    return [
        _base(
            args, s=args.s, eps_lo=args.eps_lo, eps_hi=args.eps_hi, points=args.points,
            slope=slope, intercept=intercept, max_rel_residual=resid,
            predicted_slope=2.0 * math.log(args.s) / (args.s - 1),
        )
    ]


COMMANDS = {
    "annealed": _cmd_annealed,
    "quenched": _cmd_quenched,
    "scan": _cmd_scan,
    "walkprob": _cmd_walkprob,
    "certify": _cmd_certify,
    "oracle-check": _cmd_oracle,
    "fit-singularity": _cmd_fit,
}


def _emit(rows, args):
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.out and args.out.endswith(".json") else "csv"
    text = records.json_text(rows) if fmt == "json" else records.csv_text(rows)
    if args.out:
        path = records.resolve_path(args.out)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_command(argv=None):
    """Run one subcommand and return its exit code."""
    try:
        args = _parse(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"hierpin: {exc}", file=sys.stderr)
        return 2
    try:
        _require(args.threads >= 1, "threads must be >= 1")
        rows = COMMANDS[args.command](args)
        _emit(rows, args)
    except UsageError as exc:
        print(f"hierpin: {exc}", file=sys.stderr)
        return 2
    except (PinningError, ValueError, OSError) as exc:
        print(f"hierpin: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run_command())


if __name__ == "__main__":
    main()
