"""Command-line front end.

Exit codes: 0 success, 2 input or usage error, 3 infeasible input (empty
frontier, degenerate calibration).
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import io as csvio
from .calibration import CalibrationParams, calibrate
from .core import CandidateSet, DomainError, InputError, Strategy, UtopiaAssignment
from .dominance import pareto_frontier
from .strategies import (
    DEFAULT_SEED,
    DEFAULT_WEIGHT_SAMPLES,
    Distance,
    StrategyParams,
    select,
)

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _add_inputs(p):
    p.add_argument("--schema", required=True, help="objective schema CSV")
    p.add_argument("--solutions", required=True, help="solutions CSV (one row per candidate)")


def _add_strategy_flags(p):
    p.add_argument("--samples", help="per-sample objective values CSV (PDU/C-PDU)")
    p.add_argument("--utopia", help="global utopia point, comma separated (e.g. 1,0)")
    p.add_argument("--utopia-file", help="utopia CSV: one '*' row or one row per sample")
    p.add_argument("--reference", help="hypervolume reference point, comma separated")
    p.add_argument("--weights", help="weighted-mean weights, comma separated")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED,
                   help=f"U-KP random seed (default {DEFAULT_SEED})")
    p.add_argument("--weight-samples", type=_positive_int, default=DEFAULT_WEIGHT_SAMPLES,
                   help=f"U-KP number of weight vectors (default {DEFAULT_WEIGHT_SAMPLES})")
    p.add_argument("--distance", choices=[d.value for d in Distance], default="euclidean",
                   help="PDU error function")
    p.add_argument("--normalize", action="store_true",
                   help="min-max normalize objectives before scoring")
    p.add_argument("--fit-on-frontier", action="store_true",
                   help="fit the normalization on frontier members only")
    p.add_argument("--targets-normalized", action="store_true",
                   help="utopia/reference are given in normalized units")
    scope = p.add_mutually_exclusive_group()
    scope.add_argument("--all", dest="scope", action="store_const", const="all",
                       help="also score dominated candidates (diagnostics)")
    scope.add_argument("--frontier-only", dest="scope", action="store_const", const="frontier",
                       help="score frontier members only (default)")
    p.set_defaults(scope="frontier")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="paretoselect",
                     description="Pareto frontier extraction and best-solution selection.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("frontier", help="list the non-dominated solutions")
    _add_inputs(p)
    p.add_argument("--method", choices=["naive", "sweep"], default="naive")
    p.add_argument("--out", help="write frontier members to this CSV")

    p = sub.add_parser("select", help="choose one solution with a strategy")
    _add_inputs(p)
    p.add_argument("--strategy", required=True, choices=[s.value for s in Strategy])
    _add_strategy_flags(p)
    p.add_argument("--out", help="write per-solution scores to this CSV")

    p = sub.add_parser("calibrate", help="per-user APLT utopia points from interactions")
    p.add_argument("--interactions", required=True, help="user_id,item_id CSV")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--T", type=_positive_int, dest="T",
                   help="anchor set size (default: mean interactions per user, rounded)")
    p.add_argument("--accuracy-utopia", type=float, default=1.0)
    p.add_argument("--anchor-agg", choices=["musigma", "mean"], default="musigma")
    p.add_argument("--objectives", default="accuracy,aplt",
                   help="column names for the utopia file (default accuracy,aplt)")
    p.add_argument("--out", required=True, help="utopia CSV to write")

    p = sub.add_parser("report", help="side-by-side scores of several strategies")
    _add_inputs(p)
    p.add_argument("--strategies", required=True, help="comma separated, e.g. ed,wm,hv")
    _add_strategy_flags(p)
    p.add_argument("--plot", help="also write plot-ready CSV here")
    p.add_argument("--out", required=True, help="report CSV to write")
    return parser


# -- parameter resolution ------------------------------------------------------------

def _schema_vector(cset: CandidateSet, attr: str):
    vals = [getattr(s, attr) for s in cset.specs]
    return None if any(v is None for v in vals) else tuple(vals)


def _global_utopia(args, cset):
    if args.utopia:
        return UtopiaAssignment.global_(csvio.parse_vector(args.utopia, "--utopia"))
    fallback = _schema_vector(cset, "utopia_component")
    return UtopiaAssignment.global_(fallback) if fallback else None


def _utopia_for(strategy: Strategy, args, cset, utopia_file) -> Optional[UtopiaAssignment]:
    inline = _global_utopia(args, cset)
    if strategy is Strategy.ED:
        if args.utopia or utopia_file is None or not utopia_file.is_global:
            return inline
        return utopia_file
    if strategy is Strategy.CPDU:
        return utopia_file or inline
    if strategy is Strategy.PDU:
        return inline or utopia_file
    return inline


def _params_for(strategy: Strategy, args, cset: CandidateSet, utopia_file) -> StrategyParams:
    utopia = _utopia_for(strategy, args, cset, utopia_file)
    reference = (csvio.parse_vector(args.reference, "--reference") if args.reference
                 else _schema_vector(cset, "reference_component"))
    weights = (csvio.parse_vector(args.weights, "--weights") if args.weights
               else _schema_vector(cset, "weight"))
    if strategy is Strategy.ED and utopia is None:
        raise InputError("strategy ed requires --utopia")
    if strategy is Strategy.HV and reference is None:
        raise InputError("strategy hv requires --reference")
    if strategy is Strategy.WM and weights is None:
        raise InputError("strategy wm requires --weights")
    if strategy in (Strategy.PDU, Strategy.CPDU):
        if not args.samples:
            raise InputError(f"strategy {strategy.value} requires --samples")
        if utopia is None:
            raise InputError(f"strategy {strategy.value} requires --utopia or --utopia-file")
    if strategy is Strategy.AKP and cset.k != 2:
        raise InputError(f"strategy akp requires exactly 2 objectives, schema has {cset.k}")
    return StrategyParams(
        utopia=utopia, reference=reference, weights=weights,
        m_weight_samples=args.weight_samples, seed=args.seed,
        distance_kind=Distance(args.distance), normalize_first=args.normalize,
        fit_on_frontier=args.fit_on_frontier, targets_normalized=args.targets_normalized)


def _load_common(args):
    specs = csvio.load_schema(args.schema)
    return csvio.load_solutions(args.solutions, specs)


def _load_extras(args, cset, needs_samples: bool):
    utopia_file = csvio.load_utopia(args.utopia_file, cset.specs) if args.utopia_file else None
    populations = None
    if needs_samples and args.samples:
        populations = csvio.load_samples(args.samples, cset.specs)
        if utopia_file is not None:
            csvio.check_utopia_covers(utopia_file, populations)
    return utopia_file, populations


# -- subcommands ----------------------------------------------------------------------

def cmd_frontier(args) -> int:
    cset = _load_common(args)
    frontier = pareto_frontier(cset, method=args.method)
    if len(frontier) == 0:
        raise DomainError("Pareto frontier is empty")
    members = frontier.members()
    print(f"frontier: {len(frontier)} of {len(cset.solutions)} solutions")
    for sid in frontier.member_ids:
        print(f"  {sid}")
    if args.out:
        csvio.write_solutions(members, args.out)
    return EXIT_OK


def cmd_select(args) -> int:
    cset = _load_common(args)
    strategy = Strategy(args.strategy)
    needs_samples = strategy in (Strategy.PDU, Strategy.CPDU)
    if needs_samples and not args.samples:
        raise InputError(f"strategy {strategy.value} requires --samples")
    utopia_file, populations = _load_extras(args, cset, needs_samples)
    params = _params_for(strategy, args, cset, utopia_file)
    result = select(strategy, cset, populations, params, scope=args.scope)
    print(f"strategy: {strategy.value}")
    print(f"chosen: {result.chosen_id}")
    print(f"score: {csvio.format_6g(result.best_score)}")
    print(f"ties: {', '.join(result.tie_ids)}")
    if strategy is Strategy.UKP:
        print(f"seed: {params.seed}  weight samples: {params.m_weight_samples}")
    if args.out:
        csvio.write_selection(result, args.out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    log = csvio.load_interactions(args.interactions)
    names = [n.strip() for n in args.objectives.split(",")]
    if len(names) != 2 or not all(names) or names[0] == names[1]:
        raise InputError("--objectives must name two distinct columns")
    params = CalibrationParams(alpha=args.alpha, beta=args.beta, T_override=args.T,
                               accuracy_utopia=args.accuracy_utopia, anchor_agg=args.anchor_agg)
    table = calibrate(log, params)
    csvio.write_utopia(UtopiaAssignment.from_table(table.rows), names, args.out)
    print(f"users: {len(table.rows)}  T: {table.T}")
    print(f"anchors: tail {table.pop_tail:.6g}  head {table.pop_head:.6g}")
    print(f"mean aplt utopia: {table.mean_aplt_utopia:.6g}")
    print(f"clamped: {table.clamp_count}")
    return EXIT_OK


def cmd_report(args) -> int:
    names = [s.strip() for s in args.strategies.split(",") if s.strip()]
    if not names:
        raise InputError("--strategies is empty")
    strategies = [Strategy.parse(n) for n in names]
    if len(set(strategies)) != len(strategies):
        raise InputError("--strategies lists a strategy twice")
    cset = _load_common(args)
    if args.plot and cset.k not in (2, 3):
        raise InputError(f"--plot needs 2 or 3 objectives, schema has {cset.k}")
    needs_samples = any(s in (Strategy.PDU, Strategy.CPDU) for s in strategies)
    if needs_samples and not args.samples:
        raise InputError("strategies pdu/cpdu require --samples")
    utopia_file, populations = _load_extras(args, cset, needs_samples)
    plan = [(s, _params_for(s, args, cset, utopia_file)) for s in strategies]

    frontier = pareto_frontier(cset)
    results = [select(s, cset, populations, p, scope=args.scope, frontier=frontier)
               for s, p in plan]
    _, table = csvio.write_report(results, cset, frontier, args.out)
    if args.plot:
        csvio.emit_plot_data(cset, frontier, results, args.plot)
    sys.stdout.write(table)
    for res in results:
        print(f"{res.strategy.value}: {res.chosen_id}")
    return EXIT_OK


COMMANDS = {
    "frontier": cmd_frontier,
    "select": cmd_select,
    "calibrate": cmd_calibrate,
    "report": cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
