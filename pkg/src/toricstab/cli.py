"""Command line front end.

Exit status 0 on success, 1 on a domain error (reported as
``{"error": {"code": ..., "message": ...}}``), 2 on a usage error.
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import catalog, verify
from .errors import ToricStabError
from .kahler import GridSpec, abreu_scalar_batch, energy_M, guillemin, potential_from_json, ray_energy
from .kahler.curvature import grid_points
from .plconvex import from_json as pl_from_json
from .polytope import DelzantPolytope, check_delzant, mean_scalar
from .rational import qstr
from .stability import build_test_config, delta_scan, donaldson_L, futaki_character, j_norm, stability_ratio


class UsageError(Exception):
    pass


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def load_polytope(arg):
    """Catalog names win over file names unless the argument starts with ``./``."""
    if not arg.startswith("./"):
        entry = catalog.lookup(arg)
        if entry is not None:
            return entry.polytope
    data = _read_json(arg)
    try:
        return DelzantPolytope.from_json(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{arg} is not a polytope description") from exc


def load_function(arg):
    if not arg.startswith("./"):
        f = catalog.pl_lookup(arg)
        if f is not None:
            return f
    data = _read_json(arg)
    try:
        return pl_from_json(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{arg} is not a PL function description") from exc


def _grid(args):
    kwargs = {}
    for flag, name in (("margin", "margin"), ("spacing", "spacing"), ("fd_step", "fd_step"), ("grade", "quadrature"), ("order", "order")):
        value = getattr(args, flag, None)
        if value is not None:
            kwargs[name] = value
    try:
        return GridSpec(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("TORICSTAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError("TORICSTAB_THREADS must be an integer") from exc
    return 1


def _json(obj):
    return json.dumps(obj, separators=(",", ":"))


def _csv(rows, header):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- commands ------------------------------------------------------------------


def cmd_check(args):
    return _json(check_delzant(load_polytope(args.polytope)).to_json())


def cmd_futaki(args):
    return _json(futaki_character(load_polytope(args.polytope)).to_json())


def cmd_lf(args):
    return _json(qstr(donaldson_L(load_polytope(args.polytope), load_function(args.function))))


def cmd_jnorm(args):
    return _json(qstr(j_norm(load_polytope(args.polytope), load_function(args.function))))


def cmd_ratio(args):
    return _json(qstr(stability_ratio(load_polytope(args.polytope), load_function(args.function))))


def cmd_delta(args):
    P = load_polytope(args.polytope)
    return _json(delta_scan(P, args.max_depth, workers=_threads(args)).to_json())


def cmd_testconfig(args):
    return _json(build_test_config(load_polytope(args.polytope), load_function(args.function)).to_json())


def _potential(args, P):
    if args.potential in (None, "guillemin"):
        return guillemin(P)
    return potential_from_json(_read_json(args.potential), P)


def cmd_energy(args):
    P = load_polytope(args.polytope)
    report = energy_M(P, _potential(args, P), _grid(args), workers=_threads(args))
    return _json(report.to_json())


def cmd_scal(args):
    P = load_polytope(args.polytope)
    grid = _grid(args)
    pts = grid_points(P, grid.spacing, grid.margin)
    if len(pts) == 0:
        raise UsageError("no grid point lies inside the margin band; lower --spacing or --margin")
    S = abreu_scalar_batch(_potential(args, P), pts, grid)
    names = [f"x{i + 1}" for i in range(P.dim)]
    body = _csv([[repr(float(c)) for c in x] + [repr(float(s))] for x, s in zip(pts, S)], names + ["S"])
    summary = f"# min={float(S.min())!r} max={float(S.max())!r} mean={float(np.mean(S))!r} S_hat={float(mean_scalar(P))!r}\n"
    return body + summary


def cmd_ray(args):
    P = load_polytope(args.polytope)
    f = load_function(args.function)
    try:
        ts = [float(t) for t in args.t.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError("--t expects a comma separated list of numbers") from exc
    res = ray_energy(P, _potential(args, P), f, ts, _grid(args), workers=_threads(args))
    body = _csv([[repr(t), repr(m)] for t, m in res.rows], ["t", "M"])
    return body + f"# slope={res.slope!r} L={qstr(res.L)}\n"


def cmd_catalog(args):
    if args.emit:
        entry = catalog.lookup(args.emit)
        if entry is None:
            raise UsageError(f"unknown catalog entry {args.emit!r}")
        return _json(entry.polytope.to_json())
    listing = [
        {"name": e.name, "dim": e.polytope.dim, "valid": e.valid, "notes": e.notes} for e in catalog.entries()
    ]
    listing.append({"pl_functions": sorted(catalog.PL_FUNCTIONS)})
    return _json(listing)


def cmd_verify(args):
    lines = []
    ok = verify.run(seed=args.seed, fast=args.fast, out=lines.append)
    return "\n".join(lines), 0 if ok else 1


def _grid_flags(p):
    p.add_argument("--potential", help="potential JSON file or 'guillemin' (default)")
    p.add_argument("--margin", type=float)
    p.add_argument("--spacing", type=float)
    p.add_argument("--fd-step", dest="fd_step", type=float)
    p.add_argument("--grade", type=int, help="graded quadrature depth")
    p.add_argument("--order", type=int, help="Gauss points per graded interval")


def build_parser():
    parser = argparse.ArgumentParser(prog="toricstab", description="Toric K-stability and K-energy computations.")
    parser.add_argument("--out", help="write the result to this file instead of standard output")
    parser.add_argument("--threads", type=int, help="worker count (default: $TORICSTAB_THREADS or 1)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomised checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, *positional, help=None):
        p = sub.add_parser(name, help=help)
        for arg in positional:
            p.add_argument(arg)
        p.set_defaults(fn=fn)
        return p

    add("check", cmd_check, "polytope", help="Delzant report")
    add("futaki", cmd_futaki, "polytope", help="Futaki character")
    add("lf", cmd_lf, "polytope", "function", help="Donaldson functional L(f)")
    add("jnorm", cmd_jnorm, "polytope", "function", help="J-norm of a convex PL function")
    add("ratio", cmd_ratio, "polytope", "function", help="L(f) / ||f||_J")
    p = add("delta", cmd_delta, "polytope", help="stability threshold on nested subdivisions")
    p.add_argument("--max-depth", dest="max_depth", type=int, required=True)
    add("testconfig", cmd_testconfig, "polytope", "function", help="big polytope of a test configuration")
    _grid_flags(add("energy", cmd_energy, "polytope", help="energy report of a potential"))
    _grid_flags(add("scal", cmd_scal, "polytope", help="scalar curvature on a grid (CSV)"))
    p = add("ray", cmd_ray, "polytope", "function", help="K-energy along a ray (CSV)")
    p.add_argument("--t", default="0,1,2,4")
    _grid_flags(p)
    p = add("catalog", cmd_catalog, help="list or emit built-in polytopes")
    p.add_argument("--emit")
    p = add("verify", cmd_verify, help="run the invariant suite")
    p.add_argument("--fast", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None:
        args.seed = 0
    try:
        result = args.fn(args)
        code = 0
        if isinstance(result, tuple):
            result, code = result
    except UsageError as exc:
        print(_json({"error": {"code": "usage", "message": str(exc)}}), file=sys.stderr)
        return 2
    except ToricStabError as exc:
        print(_json(exc.to_json()))
        return 1
    text = result if result.endswith("\n") else result + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
