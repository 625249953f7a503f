"""Command line entry point: dirichlet-zeros <command> [options].

Exit codes: 0 success, 1 input error, 2 numerical non-convergence.
Structured output goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .characters import enumerate_characters, root_number
from .density import CSV_COLUMNS, empirical_density_sweep
from .lfun import DEFAULT_CONFIG, LEvalConfig, count_density_report, zero_counts
from .specfun import ConvergenceError, ShiftPair

SCHEMA = 1

CSV_HELP = """CSV output: one header row, then one row per record.  Table commands
(characters, zeros, density, verify) emit their rows; the others emit
key,value pairs of the flattened result.  Every row carries the
manifest_hash column.  density columns: """ + ",".join(CSV_COLUMNS)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


# ---------------------------------------------------------------- manifest


@dataclass
class RunManifest:
    command: str
    params: dict
    version: str = __version__
    seeds: list[int] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def hash(self) -> str:
        # wall time is excluded so that identical runs share a hash
        body = json.dumps(
            {"command": self.command, "params": self.params, "version": self.version, "seeds": self.seeds},
            sort_keys=True,
        )
        return hashlib.sha256(body.encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "version": self.version,
            "seeds": self.seeds,
            "wall_time_s": self.wall_time_s,
            "hash": self.hash,
        }


def _clean(x):
    """Make a result JSON-safe: complex -> [re, im], numpy scalars -> python, inf/nan -> str."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return _clean(z.real) if z.imag == 0 else [_clean(z.real), _clean(z.imag)]
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    return x


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            continue
        else:
            out[key] = json.dumps(v) if isinstance(v, list) else v
    return out


def _emit(result: dict, manifest: RunManifest, args, rows: list[dict] | None = None) -> None:
    result = _clean(result)
    if args.json:
        doc = {"schema": SCHEMA, "manifest": manifest.to_dict(), "result": result}
        sys.stdout.write(json.dumps(doc, ensure_ascii=False, allow_nan=False) + "\n")
    elif args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if rows is not None:
            rows = [_flatten(_clean(r)) for r in rows]
            cols = list(rows[0]) if rows else []
            w.writerow(cols + ["manifest_hash"])
            for r in rows:
                w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols] + [manifest.hash])
        else:
            w.writerow(["key", "value", "manifest_hash"])
            for k, v in _flatten(result).items():
                w.writerow([k, repr(v) if isinstance(v, float) else v, manifest.hash])
        sys.stdout.write(buf.getvalue())
    else:
        for k, v in _flatten(result).items():
            sys.stdout.write(f"{k}: {v}\n")
        if rows:
            for r in rows:
                sys.stdout.write(json.dumps(_clean(r)) + "\n")
        sys.stdout.write(f"manifest: {manifest.hash}\n")


def _params(args) -> dict:
    skip = {"json", "csv", "threads", "func", "command"}
    return _clean({k: v for k, v in sorted(vars(args).items()) if k not in skip})


def _lcfg(args) -> LEvalConfig:
    if args.tol is None:
        return DEFAULT_CONFIG
    return LEvalConfig(tol=args.tol)


# ---------------------------------------------------------------- commands


def cmd_characters(args):
    grp = enumerate_characters(args.q)
    chars = grp.primitive() if args.primitive_only else list(grp)
    rows = []
    for chi in chars:
        d = chi.to_dict()
        if chi.is_primitive:
            d["root_number"] = root_number(chi)
        rows.append(d)
    result = {"q": args.q, "order": len(grp), "primitive": len(grp.primitive()), "characters": rows}
    return result, rows, []


def _zero_row(chi, T, sigma, lcfg):
    zc = zero_counts(T, chi, lcfg)
    if sigma is not None:
        zc.rectangle_count = count_density_report(sigma, T, chi, lcfg).rectangle_count
        zc.sigma = sigma
    d = zc.to_dict()
    d["parity"] = "odd" if chi.parity else "even"
    return d


def cmd_zeros(args):
    if args.T <= 0:
        raise InputError("--T must be positive")
    if args.sigma is not None and not 0.5 < args.sigma <= 1.0:
        raise InputError("--sigma must lie in (1/2, 1]")
    chars = enumerate_characters(args.q).primitive()
    lcfg = _lcfg(args)
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        rows = list(pool.map(lambda c: _zero_row(c, args.T, args.sigma, lcfg), chars))
    N = sum(r["N"] for r in rows)
    N0 = sum(r["N0"] for r in rows)
    result = {"q": args.q, "T": args.T, "N": N, "N0": N0, "ratio": (N0 / N if N else None), "records": rows}
    return result, rows, []


def cmd_moment(args):
    from .moments import MomentConfig, Mollifier, moment_report

    q, T = args.q, args.T
    if q < 1 or T <= 0:
        raise InputError("need --q >= 1 and --T > 0")
    X = (q * T) ** args.kappa
    if args.mollifier == "none":
        moll = Mollifier.unmollified()
    elif args.mollifier == "v":
        moll = Mollifier.density(X, args.sigma if args.sigma is not None else 0.5)
    else:
        moll = Mollifier.levinson(X)
    kw = {"threads": args.threads}
    if args.tol is not None:
        kw["tol"] = args.tol
    cfg = MomentConfig(q, T, args.alpha, args.beta, args.parity, moll, **kw)
    ShiftPair(args.alpha, args.beta, math.log(max(q * T, 3.0))).check()
    rep = moment_report(cfg)
    return rep.to_dict(), None, []


def cmd_levinson(args):
    from .levinson import REF_Q_SLOPE, REF_R, optimize

    q_degree = 1 if args.q_linear else args.q_degree
    res = optimize(args.kappa, degree=args.degree, n_starts=args.starts, q_degree=q_degree, threads=args.threads)
    out = res.to_dict()
    seeds = [s.seed for s in res.starts]
    if not args.no_fixed:
        fixed = optimize(args.kappa, degree=args.degree, n_starts=args.starts, fixed_RQ=(REF_R, REF_Q_SLOPE),
                         threads=args.threads, family=False)
        out["fixed_RQ"] = {"R": REF_R, "Q_slope": REF_Q_SLOPE, "P": list(fixed.config.P), "c": fixed.c,
                           "proportion": fixed.proportion, "converged": fixed.converged}
    return out, None, seeds


def _parse_sigmas(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad --sigmas list {text!r}") from exc
    if not vals:
        raise InputError("--sigmas is empty")
    return vals


def cmd_density(args):
    sigmas = _parse_sigmas(args.sigmas) if args.sigmas else [args.sigma if args.sigma is not None else 0.75]
    rows = empirical_density_sweep(args.q, args.T, sigmas, args.kappa, _lcfg(args), threads=args.threads)
    rows = [r.to_dict() for r in rows]
    return {"q": args.q, "T": args.T, "kappa": args.kappa, "rows": rows}, rows, []


def cmd_verify(args):
    from .verify import run_suite

    suites = ["zeta", "H", "oddH", "A", "S"] if args.suite == "all" else [args.suite]
    results = {}
    rows = []
    for name in suites:
        out = run_suite(name, threads=args.threads)
        results[name] = out
        rows.extend({"suite": name, **p} for p in out["points"])
    passed = all(r["passed"] for r in results.values())
    summary = {name: {"passed": r["passed"], "points": len(r["points"]), "failures": r["failures"]} for name, r in results.items()}
    return {"passed": passed, "summary": summary, "suites": results}, rows, [0]


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser):
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit one JSON document")
    fmt.add_argument("--csv", action="store_true", help="emit CSV (see top-level help)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads (default: logical cores)")
    p.add_argument("--tol", type=float, default=None, help="numerical tolerance override")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dirichlet-zeros", description=__doc__.splitlines()[0], epilog=CSV_HELP,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("characters", help="list the characters mod q")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--primitive-only", action="store_true")
    _common(c)
    c.set_defaults(func=cmd_characters)

    z = sub.add_parser("zeros", help="N(T) and N0(T) for each primitive character mod q")
    z.add_argument("--q", type=int, required=True)
    z.add_argument("--T", type=float, required=True)
    z.add_argument("--sigma", type=float, default=None, help="also count zeros with real part >= sigma")
    _common(z)
    z.set_defaults(func=cmd_zeros)

    m = sub.add_parser("moment", help="brute-force twisted second moment against its main terms")
    m.add_argument("--q", type=int, required=True)
    m.add_argument("--T", type=float, required=True)
    m.add_argument("--kappa", type=float, default=0.51, help="mollifier length exponent, X = (qT)^kappa")
    m.add_argument("--alpha", type=complex, default=0.0)
    m.add_argument("--beta", type=complex, default=0.0)
    m.add_argument("--mollifier", choices=["none", "v", "levinson"], default="none")
    m.add_argument("--parity", choices=["even", "odd"], default="even")
    m.add_argument("--sigma", type=float, default=None, help="sigma of the v(n) mollifier")
    _common(m)
    m.set_defaults(func=cmd_moment)

    v = sub.add_parser("verify", help="identity oracle suites")
    v.add_argument("--suite", choices=["zeta", "H", "oddH", "A", "S", "all"], default="all")
    _common(v)
    v.set_defaults(func=cmd_verify)

    lv = sub.add_parser("levinson", help="optimise the Levinson proportion")
    lv.add_argument("--kappa", type=float, default=0.5 + 5 / 128)
    lv.add_argument("--degree", type=int, default=8)
    lv.add_argument("--q-linear", action="store_true", default=True, help="linear Q (default)")
    lv.add_argument("--q-degree", type=int, default=1,
                    help="degree of Q; above 1 the bound covers zeros on the line, not simple zeros")
    lv.add_argument("--starts", type=int, default=20, help="number of deterministic starts")
    lv.add_argument("--no-fixed", action="store_true", help="skip the run at fixed R = 1.179, Q_slope = -1.035")
    _common(lv)
    lv.set_defaults(func=cmd_levinson)

    d = sub.add_parser("density", help="empirical zero density against the bound shapes")
    d.add_argument("--q", type=int, required=True)
    d.add_argument("--T", type=float, required=True)
    d.add_argument("--sigmas", type=str, default=None, help="comma separated sigma values")
    d.add_argument("--sigma", type=float, default=None)
    d.add_argument("--kappa", type=float, default=0.53)
    _common(d)
    d.set_defaults(func=cmd_density)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    if getattr(args, "q_degree", 1) > 1:
        args.q_linear = False
    if args.threads < 1:
        sys.stderr.write("error: --threads must be >= 1\n")
        return 1
    t0 = time.perf_counter()
    try:
        result, rows, seeds = args.func(args)
    except (InputError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ConvergenceError as exc:
        sys.stderr.write(f"non-convergence: {exc} {getattr(exc, 'diagnostics', {})}\n")
        return 2
    manifest = RunManifest(args.command, _params(args), seeds=seeds)
    manifest.wall_time_s = round(time.perf_counter() - t0, 3)
    sys.stderr.write(f"{args.command}: {manifest.wall_time_s:.2f}s with {args.threads} thread(s)\n")
    _emit(result, manifest, args, rows)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
