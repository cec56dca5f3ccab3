"""Command line entry point: ``kakeya <command> ...``.

Exit codes: 0 success, 1 a verified condition failed, 2 usage error (argparse),
3 malformed fraction, 4 missing input file, 5 computation refused as too large.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import assembly, dimension, moran, projections, render, schedule, sticky
from .grid import IntervalUnion, frac_str, parse_fraction

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_FRACTION = 3
EXIT_MISSING = 4
EXIT_TOO_LARGE = 5


class MalformedFraction(Exception):
    # deliberately not a ValueError, so argparse lets it through
    pass


def fraction_arg(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ValueError:
        raise MalformedFraction(f"malformed fraction {text!r}; expected p/q") from None


def fraction_list(text: str) -> list[Fraction]:
    return [fraction_arg(part) for part in text.split(",") if part]


def _emit(text: str | bytes, out: str | None) -> None:
    if out is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
        else:
            sys.stdout.write(text)
        return
    path = Path(out)
    if isinstance(text, bytes):
        path.write_bytes(text)
    else:
        path.write_text(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read(path: str) -> str:
    return Path(path).read_text()


def _pattern(args) -> moran.RoundPattern:
    if getattr(args, "source", "default") == "drawn":
        return moran.drawn_pattern()
    return moran.make_round_pattern(args.n, args.n_even, seed=args.seed)


def _state_from_args(args) -> moran.StageState:
    if args.input:
        state = moran.parse_snapshot(_read(args.input))
        if not state.history and args.n:
            k = state.exponent // (2 * args.n)
            state = moran.StageState(state.cells, (("odd", args.n), ("even", args.n)) * k)
        return state
    pattern = _pattern(args)
    state = moran.StageState.initial()
    for _ in range(args.rounds):
        state = moran.apply_round(state, pattern)
    return state


def _chain_from_args(args) -> list:
    if args.input:
        return [_state_from_args(args)]
    pattern = _pattern(args)
    states = [moran.StageState.initial()]
    for _ in range(args.rounds):
        states.append(moran.apply_round(states[-1], pattern))
    return states


# -- commands -------------------------------------------------------------


def cmd_build(args) -> int:
    _emit(moran.format_snapshot(_state_from_args(args)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    state = _state_from_args(args)
    report = moran.verify_conditions(state)
    _emit(_dumps(report.as_dict()), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_schedule(args) -> int:
    if args.input:
        sched = schedule.parse_schedule(_read(args.input))
        problems = sched.check()
        _emit(_dumps({"passed": not problems, "problems": problems}), args.out)
        return EXIT_OK if not problems else EXIT_FAILED
    sched = schedule.build_schedule(args.depth, args.epsilon, extra_m=args.extra_m, extra_n=args.extra_n)
    _emit(schedule.format_schedule(sched), args.out)
    return EXIT_OK


def cmd_project(args) -> int:
    spec = projections.ProjectionSpec.parse(args.projection)
    states = _chain_from_args(args)
    profile = projections.measure_profile(states, spec)
    start = 0 if not args.input else len(states[0].rounds)
    _emit(projections.format_profile(profile, start), args.out)
    return EXIT_OK


def cmd_dims(args) -> int:
    if args.c0 is not None:
        counts = sticky.c0_dimension_counts(args.c0, args.d)
    elif args.schedule:
        sched = schedule.parse_schedule(_read(args.schedule))
        counts = dimension.CubeCounts.from_rounds(sched, half_stage=args.half_stage)
    elif args.input:
        counts = dimension.CubeCounts.from_state(_state_from_args(args))
    else:
        rounds = [(args.n, args.n_even or args.n, args.rounds)] if args.rounds else []
        counts = dimension.CubeCounts.from_rounds(rounds, half_stage=args.half_stage)
    total = counts.stages
    stages = range(1, total + 1) if total <= 256 else sorted({1, 2, total - 1, total})
    _emit(dimension.format_report(counts, stages), args.out)
    return EXIT_OK


def _union_lines(union) -> str:
    return "".join(f"{a} {b}\n" for a, b in union.to_pairs())


def cmd_slice(args) -> int:
    base = _state_from_args(args).cells
    family = assembly.ParamFamily(base, args.lift, args.d, args.swap)
    if args.area:
        report = assembly.area_report(family, args.area)
        _emit(
            _dumps(
                {
                    "resolution": report.resolution,
                    "estimate": frac_str(report.estimate),
                    "upper_bound": frac_str(report.upper_bound),
                }
            ),
            args.out,
        )
        return EXIT_OK
    chunks = []
    for t in args.t:
        piece = assembly.slice_at(family, t)
        if isinstance(piece, IntervalUnion):
            chunks.append(f"# t={frac_str(t)} measure={frac_str(piece.measure)}\n" + _union_lines(piece))
        else:
            chunks.append(f"# t={frac_str(t)} measure={frac_str(piece.measure)} factors={piece.dim}\n")
            for i, factor in enumerate(piece.factors):
                chunks.append(f"# factor {i}\n" + _union_lines(factor))
    _emit("".join(chunks), args.out)
    return EXIT_OK


def cmd_sticky(args) -> int:
    c0 = sticky.c0_stage(args.k)
    check = sticky.sticky_param_product_check(args.k, args.d)
    slices = []
    for lam in args.lam:
        s = sticky.sticky_slice(lam, args.k, args.d)
        slices.append(
            {
                "lambda": frac_str(s.lam),
                "t": frac_str(s.t),
                "coefficient": frac_str(s.coefficient),
                "factor": s.factor.to_pairs(),
                "measure": frac_str(s.measure),
            }
        )
    out = {
        "k": args.k,
        "d": args.d,
        "c0": c0.intervals.to_pairs(),
        "direction_box": sticky.direction_box_certified(args.k, args.d),
        "param_product": {"passed": check.passed, "witness": [frac_str(x) for x in check.witness or ()]},
        "slices": slices,
    }
    _emit(_dumps(out), args.out)
    return EXIT_OK if check.passed and out["direction_box"] else EXIT_FAILED


def cmd_render(args) -> int:
    kw = {"places": args.precision}
    if args.figure == "stages":
        doc = render.render_stage_figure(args.source, args.rounds, panel=args.size, **kw)
    elif args.figure == "fan-nonsticky":
        doc = render.nonsticky_fan(args.source, size=args.size, slice_t=args.slice_t, **kw)
    elif args.figure == "fan-sticky":
        doc = render.sticky_fan(args.k, size=args.size, slice_t=args.slice_t, **kw)
    elif args.figure == "plates":
        doc = render.render_plates(args.k, args.lam, size=args.size, **kw)
    else:
        family = assembly.ParamFamily(moran.build_state([1] * args.rounds).cells)
        doc = render.slice_raster(family, args.size, max(args.size // 2, 1))
    _emit(doc, args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _add_state_args(p, rounds_default: int = 1) -> None:
    p.add_argument("--input", help="stage snapshot file instead of building")
    p.add_argument("--n", type=int, default=1, help="odd-stage exponent per round")
    p.add_argument("--n-even", type=int, default=None, help="even-stage exponent (default: n)")
    p.add_argument("--rounds", type=int, default=rounds_default)
    p.add_argument("--seed", type=int, default=None, help="random valid pattern instead of the staircase")
    p.add_argument("--source", choices=["default", "drawn"], default="default", help="'drawn' uses the transcribed reference pattern")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kakeya", description="Exact finite-stage Kakeya constructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a stage snapshot")
    _add_state_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check the construction conditions of a snapshot")
    p.add_argument("input", help="stage snapshot file")
    p.add_argument("--n", type=int, default=None, help="round size if the snapshot has no rounds= line")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("schedule", help="synthesize or check a parameter schedule")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--epsilon", type=fraction_arg, default=schedule.DEFAULT_EPSILON)
    p.add_argument("--extra-m", type=int, default=0)
    p.add_argument("--extra-n", type=int, default=0)
    p.add_argument("--input", help="schedule file to re-check instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("project", help="exact projection measure per stage")
    _add_state_args(p, rounds_default=3)
    p.add_argument("--projection", default="diag_plus", help="diag_plus, diag_minus or slope:p/q")
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("dims", help="dimension ratios as JSON")
    _add_state_args(p, rounds_default=0)
    p.add_argument("--schedule", help="schedule file")
    p.add_argument("--half-stage", type=int, default=None, help="append an odd stage with this n")
    p.add_argument("--c0", type=int, default=None, help="digit-{0,3} Cantor counts to this stage")
    p.add_argument("--d", type=int, default=1, help="power of the Cantor set for --c0")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("slice", help="slices of the line family")
    _add_state_args(p)
    p.add_argument("--t", type=fraction_list, default=[Fraction(1, 2)], help="comma-separated p/q heights")
    p.add_argument("--lift", choices=["none", "box", "power"], default="none")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--swap", action="store_true", help="read cell columns as v")
    p.add_argument("--area", type=int, default=None, help="report area on this many t midpoints")
    p.add_argument("--out")
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("sticky", help="plate-construction certificates")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--lam", type=fraction_list, default=[Fraction(2, 3)], help="comma-separated p/q heights")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sticky)

    p = sub.add_parser("render", help="SVG figures and PGM rasters")
    p.add_argument("--figure", choices=render.FIGURES, default="stages")
    p.add_argument("--rounds", type=int, default=2, help="panels for 'stages', rounds for 'slices'")
    p.add_argument("--source", choices=["default", "drawn"], default="default")
    p.add_argument("--k", type=int, default=2, help="Cantor stage for sticky figures")
    p.add_argument("--lam", type=fraction_arg, default=Fraction(2, 3))
    p.add_argument("--slice-t", type=fraction_arg, default=None)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--precision", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        if args.command == "verify":
            args.rounds, args.seed, args.n_even = 0, None, None
        return args.func(args)
    except MalformedFraction as exc:
        print(f"kakeya: error: {exc}", file=sys.stderr)
        return EXIT_FRACTION
    except FileNotFoundError as exc:
        print(f"kakeya: error: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_MISSING
    except schedule.ScheduleTooLarge as exc:
        print(f"kakeya: error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except render.CellCapExceeded as exc:
        print(f"kakeya: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"kakeya: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
