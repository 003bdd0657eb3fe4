"""Command-line front end: figure data, entanglement reports, spectra and self-checks."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import matrix_io
from .checks import run_suite
from .commutative_states import (ConsistencyError, Pair1D, Pair2D, log_negativity, nu_ppt_1d, nu_ppt_2d,
                                 variance_1d_pair, variance_2d_pair)
from .figures import COLUMNS, DEFAULT_GRIDS, FigureRequest, fmt, gnuplot_script, rows_to_csv, run_figure
from .nc_bipartite import NCPair, effective_variance, nc_pair_report
from .nc_kinematics import WavePacket, single_particle_ppt
from .oracle_integrals import ConvergenceError
from .symplectic_core import BasisError, SpectrumError, StandardFormError, partial_transpose, symplectic_spectrum

EXIT_OK, EXIT_ENTANGLED, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 10, 2, 3, 4
FAMILIES = ("1d-commutative", "2d-commutative", "nc-single", "nc-pair")


class UsageError(Exception):
    pass


def _rounded(obj):
    """Round every float in a JSON-ready structure to 12 significant digits."""
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(float(obj)))
    return obj


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.family} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _simple_report(family: str, params: dict, nu_x: float, nu_y: float) -> dict:
    nu = min(nu_x, nu_y)
    margin = 1.0 - nu ** 2
    return {"family": family, "params": params, "nu_tilde": {"x": nu_x, "y": nu_y}, "nu_min": 1.0,
            "margin": margin, "entangled": margin > 1e-9, "log_negativity": log_negativity(nu)}


def build_report(args) -> tuple[dict, object]:
    """Report dict plus the variance matrix it was computed from (for --export)."""
    fam = args.family
    try:
        if fam == "1d-commutative":
            _need(args, "eta", "zeta")
            pair = Pair1D.from_reduced(args.eta, args.zeta)
            nu = nu_ppt_1d(pair)
            return (_simple_report(fam, {"eta": args.eta, "zeta": args.zeta}, nu, nu), variance_1d_pair(pair))
        if fam == "2d-commutative":
            _need(args, "alpha", "a1")
            pair = Pair2D(args.alpha, args.a1)
            nu_x, nu_y = nu_ppt_2d(pair)
            return (_simple_report(fam, {"alpha": args.alpha, "a1": args.a1}, nu_x, nu_y), variance_2d_pair(pair))
        if fam == "nc-single":
            _need(args, "alpha")
            packet = WavePacket(args.alpha, (args.a1 or 0.0, 0.0), (args.p0x or 0.0, args.p0y or 0.0), args.theta)
            nu = single_particle_ppt(packet)
            rep = _simple_report(fam, {"alpha": args.alpha, "theta": args.theta}, nu, nu)
            return rep, None
        _need(args, "alpha")
        if args.b1 is not None and args.a1 is not None:
            raise UsageError("give either --b1 or --a1, not both")
        pair = NCPair(args.alpha, args.theta, (args.b1 if args.b1 is not None else (args.a1 or 0.0), 0.0),
                      (args.p0x or 0.0, args.p0y or 0.0))
        if not pair.in_figure_regime:
            raise UsageError("nc-pair reports need p0 = 0 (static packets separated along one axis)")
        return nc_pair_report(pair), effective_variance(pair)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, (ConsistencyError,)):
            raise
        raise UsageError(str(exc)) from exc


def cmd_report(args) -> int:
    rep, V = build_report(args)
    print(json.dumps(_rounded(rep)))
    if args.export:
        if V is None:
            raise UsageError(f"{args.family} has no variance matrix to export")
        matrix_io.save(V, args.export)
    return EXIT_ENTANGLED if rep["entangled"] else EXIT_OK


def _grids(args) -> tuple:
    lo, hi, st = args.grid_min or [], args.grid_max or [], args.steps or []
    if not (lo or hi or st):
        return ()
    need = len(DEFAULT_GRIDS[args.fig])
    if not (len(lo) == len(hi) == len(st) == need):
        raise UsageError(f"figure {args.fig} takes {need} grid(s): repeat --grid-min/--grid-max/--steps")
    return tuple(zip(lo, hi, st))


def cmd_fig(args) -> int:
    try:
        req = FigureRequest(args.fig, _grids(args), args.mode, args.theta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = run_figure(req)
    if args.format == "json":
        cols = COLUMNS[args.fig]
        text = json.dumps({"figure": args.fig, "mode": args.mode, "theta": args.theta,
                           "rows": [dict(zip(cols, _rounded(list(r)))) for r in rows]}) + "\n"
    else:
        text = rows_to_csv(args.fig, rows)
    _emit(text, args.out)
    if args.gnuplot:
        Path(args.gnuplot).write_text(gnuplot_script(args.fig, args.out or "data.csv"))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    V = matrix_io.load(args.path)
    if args.pt:
        if len(V.basis.particles) < 2:
            raise matrix_io.ParseError("partial transpose needs labels for two particles")
        V = partial_transpose(V, max(V.basis.particles))
    nu = symplectic_spectrum(V)
    margin = float(nu.min() - 1.0)
    if args.format == "json":
        print(json.dumps(_rounded({"nu": list(nu), "margin": margin})))
    else:
        print(f"nu: {', '.join(fmt(v) for v in nu)}; margin: {fmt(margin)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite)
    ok = all(r[1] for r in results)
    print(json.dumps({"suite": args.suite, "passed": ok,
                      "checks": [{"name": n, "passed": bool(p), "detail": d} for n, p, d in results]}, indent=1))
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncent", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fig", help="emit the data series behind a figure")
    f.add_argument("--fig", type=int, required=True, choices=sorted(COLUMNS))
    f.add_argument("--grid-min", type=float, action="append")
    f.add_argument("--grid-max", type=float, action="append")
    f.add_argument("--steps", type=int, action="append")
    f.add_argument("--mode", choices=("computed", "figure"), default="computed")
    f.add_argument("--theta", type=float, default=1.0)
    f.add_argument("--format", choices=("csv", "json"), default="csv")
    f.add_argument("--out")
    f.add_argument("--gnuplot", help="also write a gnuplot script to this path")
    f.set_defaults(func=cmd_fig)

    r = sub.add_parser("report", help="entanglement report for one parameter point")
    r.add_argument("--family", required=True, choices=FAMILIES)
    for name in ("eta", "zeta", "alpha", "a1", "b1", "p0x", "p0y"):
        r.add_argument("--" + name.replace("_", "-"), type=float)
    r.add_argument("--theta", type=float, default=1.0)
    r.add_argument("--export", help="write the variance matrix (CSV, or JSON by suffix)")
    r.set_defaults(func=cmd_report)

    s = sub.add_parser("spectrum", help="symplectic spectrum of a stored variance matrix")
    s.add_argument("path")
    s.add_argument("--pt", action="store_true", help="partially transpose the last particle first")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="run a self-check battery")
    v.add_argument("--suite", choices=("core", "oracle", "reductions", "all"), default="core")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ncent: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (matrix_io.ParseError, BasisError) as exc:
        print(f"ncent: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConsistencyError, SpectrumError, StandardFormError, ConvergenceError, RuntimeError, ValueError,
            np.linalg.LinAlgError) as exc:
        print(f"ncent: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
