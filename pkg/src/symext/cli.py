"""Command-line front end.

Results go to stdout as ``key: value`` lines; errors go to stderr.  Exit
codes: 0 for a conclusive run, 2 for bad input, 3 when the solver does not
converge or the verdict is inconclusive.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import bounds, dps, sdp
from .states import FAMILIES, StateFormatError, InvariantError, load_state, make_family, save_state, save_witness

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3


class UsageError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (tuple, list)):
        return ",".join(_fmt(v) for v in x)
    return str(x)


def _emit(stream, /, **pairs) -> None:
    for key, val in pairs.items():
        stream.write(f"{key}: {_fmt(val)}\n")


def int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def parse_cut(text: str, n_parties: int) -> frozenset[int]:
    """``1:23`` or ``1,2:3`` -> 0-based factor set on the left of the colon."""
    left, sep, right = text.partition(":")
    if not sep:
        raise UsageError(f"PPT cut {text!r} must look like 1:23")

    def side(s: str) -> set[int]:
        parts = s.split(",") if "," in s else list(s)
        try:
            return {int(p) - 1 for p in parts if p}
        except ValueError:
            raise UsageError(f"bad factor list {s!r} in PPT cut {text!r}")

    a, b = side(left), side(right)
    if not a or not b or a & b or a | b != set(range(n_parties)):
        raise UsageError(f"PPT cut {text!r} is not a bipartition of factors 1..{n_parties}")
    return frozenset(a)


# --- subcommands ------------------------------------------------------------------


def _family_params(args) -> dict:
    params = {}
    if args.dims:
        params["dims"] = args.dims
        params["d"] = args.dims[0]
        params["n"] = len(args.dims)
    if args.param is not None:
        params["F" if args.family == "isotropic" else "p"] = args.param
    return params


def cmd_make_state(args, out) -> int:
    rho = make_family(args.family, _family_params(args))
    note = args.family if args.param is None else f"{args.family} {args.param!r}"
    save_state(rho, args.out, comment=note)
    _emit(out, family=args.family, dims=rho.dims, out=args.out)
    return EXIT_OK


def _spec(args, n_parties: int) -> dps.ExtensionSpec:
    if len(args.levels) != n_parties:
        raise UsageError(f"{len(args.levels)} levels given for a state with {n_parties} parties")
    cuts = tuple(parse_cut(c, n_parties) for c in args.ppt or ())
    return dps.ExtensionSpec(args.levels, cuts, tol=args.tol)


def cmd_check(args, out) -> int:
    rho = load_state(args.state, repair_invalid=args.repair)
    spec = _spec(args, rho.n_parties)
    v = dps.check_extendible(rho, spec)
    d = v.diagnostics
    _emit(
        out,
        verdict=v.status,
        **{"lambda": v.lambda_star},
        levels=spec.levels,
        ppt_cuts=" ".join(args.ppt) if args.ppt else "none",
        sdp_status=d["sdp_status"],
        iterations=d["iterations"],
        primal_residual=float(d["primal_residual"]),
        dual_residual=float(d["dual_residual"]),
        gap=float(d["gap"]),
    )
    if v.witness is not None:
        w = v.witness
        _emit(out, witness_value=w.value_on_state, witness_lifted_min_eig=w.lifted_min_eig,
              witness_valid=w.valid)
        if args.witness_out:
            save_witness(rho.dims, w.operator, args.witness_out,
                         comment=f"levels {_fmt(spec.levels)}")
            _emit(out, witness_out=args.witness_out)
    elif args.witness_out:
        print("no witness: state not certified entangled at these levels", file=sys.stderr)
    if d["sdp_status"] != sdp.OPTIMAL:
        print(f"solver stopped with status {d['sdp_status']}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_SOLVER if v.status == dps.INCONCLUSIVE else EXIT_OK


def cmd_threshold(args, out) -> int:
    probe = make_family(args.family, _family_params(args))
    spec = _spec(args, probe.n_parties)
    lo, hi = args.range

    def family(t: float):
        args.param = t
        return make_family(args.family, _family_params(args))

    try:
        t = dps.threshold_scan(family, (lo, hi), spec, width=args.width)
    except RuntimeError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SOLVER
    _emit(out, family=args.family, levels=spec.levels, threshold=t, width=args.width)
    return EXIT_OK


def _report(out, rep: bounds.BoundReport) -> None:
    _emit(out, norm=rep.norm, value=rep.value, terms=[float(t) for t in rep.terms],
          levels=rep.levels, dimension_count=rep.dimension_count, log2_runtime=rep.log2_runtime)
    for note in rep.caveats:
        _emit(out, caveat=note)


def cmd_bound(args, out) -> int:
    norm = bounds.normalize_norm(args.norm)
    if norm in (bounds.TRACE, bounds.TRACE_PPT):
        if args.levels is None:
            raise UsageError(f"--norm {args.norm} takes --levels")
        rep = bounds.multiparty_bound_levels(args.dims, args.levels, norm)
    else:
        ells = args.ells if args.ells is not None else bounds.ells_from_levels(args.levels)
        rep = bounds.multiparty_bound_schedule(args.dims, ells, norm, convention=args.convention)
    _report(out, rep)
    return EXIT_OK


def cmd_definetti(args, out) -> int:
    val = bounds.definetti_bound(args.dim, args.n, args.bigN, args.k, args.norm)
    _emit(out, norm=bounds.normalize_norm(args.norm), value=val)
    if bounds.normalize_norm(args.norm) != bounds.TRACE:
        _emit(out, caveat=bounds.LOG_BASE_NOTE)
    return EXIT_OK


def cmd_ell_for_error(args, out) -> int:
    ells = bounds.ell_for_error(args.dims, args.bigN, args.eps, args.norm, args.convention)
    dims = args.dims * args.bigN if len(args.dims) == 1 else args.dims
    rep = bounds.multiparty_bound_schedule(dims, ells, args.norm, convention=args.convention)
    _emit(out, ells=ells, levels=rep.levels, bound=rep.value, eps=args.eps)
    return EXIT_OK


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symext", description="Symmetric-extension separability tests.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("make-state", help="write a named state to a QSTATE file")
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--param", type=float)
    s.add_argument("--dims", type=int_list)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_make_state)

    s = sub.add_parser("check", help="test a state for symmetric extendibility")
    s.add_argument("--state", required=True)
    s.add_argument("--levels", required=True, type=int_list)
    s.add_argument("--ppt", nargs="+", metavar="CUT", help="PPT cuts such as 1:23 (1-based factors)")
    s.add_argument("--tol", type=float, default=1e-5)
    s.add_argument("--witness-out")
    s.add_argument("--repair", action="store_true", help="project an invalid input onto the state space")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("threshold", help="bisect the entanglement threshold of a family")
    s.add_argument("--family", required=True, choices=("isotropic", "werner"))
    s.add_argument("--dims", type=int_list, default=(2, 2))
    s.add_argument("--levels", required=True, type=int_list)
    s.add_argument("--ppt", nargs="+", metavar="CUT")
    s.add_argument("--tol", type=float, default=1e-5)
    s.add_argument("--range", nargs=2, type=float, default=(0.0, 1.0), metavar=("LO", "HI"))
    s.add_argument("--width", type=float, default=1e-3)
    s.set_defaults(func=cmd_threshold, param=None)

    s = sub.add_parser("bound", help="multiparty distance bound")
    s.add_argument("--norm", required=True, choices=("trace", "trace-ppt", "locc", "frobenius"))
    s.add_argument("--dims", required=True, type=int_list)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--levels", type=int_list)
    g.add_argument("--ells", type=int_list)
    s.add_argument("--convention", choices=("next", "same"), default="next")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("definetti", help="de Finetti-type bound")
    s.add_argument("--dim", required=True, type=int)
    s.add_argument("--n", required=True, type=float)
    s.add_argument("--bigN", required=True, type=float)
    s.add_argument("--k", required=True, type=float)
    s.add_argument("--norm", default="locc", choices=("locc", "frobenius"))
    s.set_defaults(func=cmd_definetti)

    s = sub.add_parser("ell-for-error", help="product schedule reaching a target error")
    s.add_argument("--dims", required=True, type=int_list)
    s.add_argument("--bigN", required=True, type=int)
    s.add_argument("--eps", required=True, type=float)
    s.add_argument("--norm", default="locc", choices=("locc", "frobenius"))
    s.add_argument("--convention", choices=("next", "same"), default="next")
    s.set_defaults(func=cmd_ell_for_error)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, ValueError, OSError, StateFormatError, InvariantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


run = main

if __name__ == "__main__":
    sys.exit(main())
