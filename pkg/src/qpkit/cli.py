"""``qpkit`` command line front end.

Exit status: 0 on success, 1 when a check comes out negative or a numerical
procedure fails, 2 on usage errors (bad flags, unreadable or malformed input).
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import (
    HolderMode,
    SobolevMode,
    hausdorff_young_check,
    parent_regularity_verdict,
)
from .errors import ConvergenceError, DomainError, GridError, PreconditionError, QPKitError
from .independence import ergodicity_report
from .io import UsageError, csv_text, dumps, emit, read_json
from .meyer import (
    Window,
    enumerate_band,
    golden_comparability,
    meyer_density_check,
    pathology_report,
)
from .number_field import FrequencyMatrix
from .qp import (
    ParentSpectrum,
    TrigPolynomial,
    besicovitch_norm,
    lift,
    project,
    sup_norm,
    wiener_inverse,
    wiener_norm,
)
from .selftest import run_selftest
from .torus import equidistribution_table, orbit_segment


def _exponent(text: str) -> float:
    """argparse type for exponents: decimals, fractions such as ``4/3``, or ``inf``."""
    t = text.strip().lower()
    if t in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid exponent {text!r}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _load(path: str, reader):
    obj = read_json(path)
    try:
        return reader(obj)
    except (QPKitError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _matrix(path: str) -> FrequencyMatrix:
    return _load(path, FrequencyMatrix.from_json)


def _poly(path: str) -> TrigPolynomial:
    return _load(path, TrigPolynomial.from_json)


def _parent(path: str) -> ParentSpectrum:
    return _load(path, ParentSpectrum.from_json)


def _write_json(args, obj) -> None:
    emit(dumps(obj), args.output)


# ------------------------------------------------------------------ commands


def cmd_ergodicity(args) -> int:
    _write_json(args, ergodicity_report(_matrix(args.matrix)).to_json())
    return 0


def cmd_weyl(args) -> int:
    P = _matrix(args.matrix)
    F = _parent(args.parent)
    y = _floats(args.y) if args.y else [0.0] * P.n
    if len(y) != P.n or F.n != P.n:
        raise UsageError(f"P has n={P.n}; parent has n={F.n}, y has {len(y)} entries")
    T_list = [int(t) if t.is_integer() else t for t in _floats(args.T)]
    if args.discrete and not all(isinstance(t, int) for t in T_list):
        raise UsageError("--discrete needs integer T values")
    rows = equidistribution_table(F, P, y, T_list, discrete=args.discrete)
    if args.format == "json":
        _write_json(args, {"discrete": args.discrete, "mean": F.mean(), "rows": rows})
    else:
        emit(csv_text(["T", "re", "im", "abs_error", "bound"],
                      ([r["T"], r["value"].real, r["value"].imag, r["abs_error"], r["bound"]] for r in rows)),
             args.output)
    return 0


def cmd_orbit(args) -> int:
    P = _matrix(args.matrix)
    try:
        lo, hi = (float(v) for v in args.range.split(":"))
    except ValueError as exc:
        raise UsageError(f"--range must look like a:b, got {args.range!r}") from exc
    y = _floats(args.y) if args.y else [0.0] * P.n
    pts = orbit_segment(P, y, lo, hi, args.samples)
    xs = np.linspace(lo, hi, args.samples)
    header = ["x"] + [f"y{j + 1}" for j in range(P.n)]
    if args.format == "json":
        _write_json(args, {"header": header, "points": [[x, *p.coords] for x, p in zip(xs.tolist(), pts)]})
    else:
        emit(csv_text(header, ([x, *p.coords] for x, p in zip(xs.tolist(), pts))), args.output)
    return 0


def cmd_lift(args) -> int:
    f = _poly(args.poly)
    try:
        F = lift(f)
    except PreconditionError as exc:
        _write_json(args, {"error": str(exc), "witness": list(exc.witness) if exc.witness else None})
        return 1
    _write_json(args, F.to_json())
    return 0


def cmd_project(args) -> int:
    F = _parent(args.parent)
    P = _matrix(args.matrix)
    if F.n != P.n:
        raise UsageError(f"parent lives on T^{F.n}, P has n={P.n}")
    _write_json(args, project(F, P).to_json())
    return 0


def cmd_norm(args) -> int:
    f = _poly(args.poly)
    F = lift(f)
    out = {
        "q": args.q,
        "besicovitch": besicovitch_norm(f, args.q, args.grid, args.method),
        "wiener": wiener_norm(f),
        "sup": sup_norm(F, args.grid).to_json(),
    }
    _write_json(args, out)
    return 0


def cmd_invert(args) -> int:
    f = _poly(args.poly)
    try:
        res = wiener_inverse(f, args.grid, args.tol, args.max_residual)
    except (DomainError, ConvergenceError) as exc:
        _write_json(args, {"error": str(exc)})
        return 1
    _write_json(args, res.to_json())
    return 0


def cmd_hy(args) -> int:
    rep = hausdorff_young_check(_poly(args.poly), args.q, args.grid)
    _write_json(args, rep.to_json())
    return 0 if rep.holds else 1


def cmd_regularity(args) -> int:
    f = _poly(args.poly)
    if args.mode == "holder":
        if args.r is None or args.eta is None:
            raise UsageError("--mode holder needs --r and --eta")
        mode = HolderMode(args.r, args.eta)
    else:
        if args.s is None or args.q is None:
            raise UsageError("--mode sobolev needs --s and --q")
        mode = SobolevMode(args.s, args.q)
    _write_json(args, parent_regularity_verdict(f, mode).to_json())
    return 0


def cmd_meyer(args) -> int:
    W = Window.parse(args.window)
    B = enumerate_band(W, args.radius)
    table = csv_text(["m", "n", "physical", "internal"],
                     zip(B.m.tolist(), B.n.tolist(), B.physical().tolist(), B.internal().tolist()))
    if args.emit is None:
        emit(table, args.output)
        return 0
    emit(table, args.emit)
    summary = {"window": str(W), "radius": args.radius, "points": len(B)}
    summary["comparability"] = list(golden_comparability(B))
    try:
        summary["density"] = meyer_density_check(B, args.L).to_json()
    except PreconditionError as exc:
        summary["density"] = {"error": str(exc)}
    _write_json(args, summary)
    return 0


def cmd_pathology(args) -> int:
    if args.radii:
        radii = _floats(args.radii)
    else:
        radii = [args.radius / 100, args.radius / 10, args.radius]
        radii = [r for r in radii if r >= 10] or [args.radius]
    orders = _ints(args.probe_orders)
    W = Window.parse(args.window)
    _write_json(args, pathology_report(radii, orders, W).to_json())
    return 0


def cmd_selftest(args) -> int:
    rep = run_selftest(args.seed, args.scale)
    _write_json(args, rep)
    return 0 if rep["passed"] else 1


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpkit", description="Quasi-periodic functions and their torus parents.")
    p.add_argument("--version", action="version", version=f"qpkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--output", "-o", default=None, help="write here instead of stdout")
        sp.set_defaults(func=func)
        return sp

    sp = add("ergodicity", cmd_ergodicity, "unique ergodicity of the R^d- and Z^d-actions")
    sp.add_argument("--matrix", required=True)

    sp = add("weyl", cmd_weyl, "closed-form Weyl averages of a parent along the orbit")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--parent", required=True)
    sp.add_argument("--T", default="10,100,1000")
    sp.add_argument("--y", default=None)
    sp.add_argument("--discrete", action="store_true", help="average over Z^d instead of R^d")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = add("orbit", cmd_orbit, "sample the line orbit x -> y + P^T x on the torus")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--range", default="0:40")
    sp.add_argument("--samples", type=int, default=4000)
    sp.add_argument("--y", default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = add("lift", cmd_lift, "parent spectrum of a polynomial")
    sp.add_argument("--poly", required=True)

    sp = add("project", cmd_project, "polynomial of a parent spectrum under P")
    sp.add_argument("--parent", required=True)
    sp.add_argument("--matrix", required=True)

    sp = add("norm", cmd_norm, "Besicovitch, Wiener and sup norms")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--q", type=_exponent, default=2.0)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--method", choices=("auto", "grid", "convolution"), default="auto")

    sp = add("invert", cmd_invert, "inverse in the Wiener algebra")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-12, help="drop coefficients below this")
    sp.add_argument("--max-residual", type=float, default=1e-8)

    sp = add("hy", cmd_hy, "Hausdorff-Young comparison")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--q", type=_exponent, required=True)
    sp.add_argument("--grid", type=int, default=None)

    sp = add("regularity", cmd_regularity, "regularity guaranteed for the parent")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--mode", choices=("holder", "sobolev"), required=True)
    sp.add_argument("--r", type=int, default=None)
    sp.add_argument("--eta", type=float, default=None)
    sp.add_argument("--s", type=float, default=None)
    sp.add_argument("--q", type=_exponent, default=None)

    sp = add("meyer", cmd_meyer, "enumerate the golden-ratio band")
    sp.add_argument("--window", default="-1/2:1/2")
    sp.add_argument("--radius", type=float, default=1000.0)
    sp.add_argument("--emit", default=None, help="CSV path for the points; summary JSON goes to --output")
    sp.add_argument("--L", type=float, default=10.0, help="window length for the density check")

    sp = add("pathology", cmd_pathology, "certificate series of the band parent")
    sp.add_argument("--radius", type=float, default=10000.0)
    sp.add_argument("--radii", default=None, help="explicit comma-separated radii")
    sp.add_argument("--probe-orders", default="0,1")
    sp.add_argument("--window", default="-1/2:1/2")

    sp = add("selftest", cmd_selftest, "seeded property suite")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--scale", type=float, default=1.0, help="multiplier on instance counts")
    return p


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    # "--window -0.5:0.5" would otherwise be read as an unknown flag
    out = list(argv)
    i = 0
    while i < len(out) - 1:
        if out[i] in ("--window", "--range", "--y") and out[i + 1].startswith("-") and len(out[i + 1]) > 1 \
                and (out[i + 1][1].isdigit() or out[i + 1][1] == "."):
            out[i:i + 2] = [f"{out[i]}={out[i + 1]}"]
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qpkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, GridError) as exc:
        print(f"qpkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, DomainError) as exc:
        print(f"qpkit {args.command}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"qpkit {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
