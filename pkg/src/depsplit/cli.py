"""Command-line interface.

Subcommands: check, classify, reduce, mtdf-sat, witness, coherence, gen,
bench.  ``check`` (and ``mtdf-sat``) exit 0 when satisfied, 1 when not, and
2 on errors; everything else exits 0 on success and 2 on errors.  ``--json``
switches to machine-readable reports.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .bench import SUITES, bench, render_records
from .classifier import FormulaPattern, classify, dispatch
from .coherence import (
    CoherenceWitness,
    counterexample_team,
    family_formula,
    incoherence_family,
    search_coherence_level,
    verify_incoherence_witness,
)
from .core import Team, verify_split
from .engines import check_via_2sat
from .errors import DepsplitError
from .generate import GeneratorConfig, generate_team
from .reductions import (
    chain_formula,
    disjoint_formula,
    mtdf_to_team,
    mutual_formula,
    parse_dimacs,
    shared_target_formula,
    solve_mtdf,
    team_to_mtdf,
    twosat_to_team_chain,
    twosat_to_team_disjoint,
    twosat_to_team_shared_target,
    ufa_complement_to_team,
)
from .report import build_report, team_digest
from .teamio import (
    load_mtdf,
    load_team_detailed,
    load_ufa,
    mtdf_to_json_obj,
    parse_formula,
    save_team,
    team_to_csv_text,
    team_to_json_obj,
)

REDUCE_KINDS = ("2sat-shared", "2sat-chain", "2sat-disjoint", "ufa", "mtdf-to-team", "team-to-mtdf")

FAMILY_PATTERNS = {
    "mutual": FormulaPattern.MUTUAL_UNARY,
    "chain": FormulaPattern.CHAIN_UNARY,
    "shared-target": FormulaPattern.SHARED_TARGET_UNARY,
}
STORED_PATTERNS = {
    "same-source": FormulaPattern.SAME_SOURCE_UNARY,
    "constancy-pair": FormulaPattern.CONSTANCY_PAIR,
    "constancy-mix-b": FormulaPattern.CONSTANCY_MIX_DISJOINT,
    "constancy-mix-c": FormulaPattern.CONSTANCY_MIX_DETERMINER,
    "constancy-mix-d": FormulaPattern.CONSTANCY_MIX_TARGET,
    "identical": FormulaPattern.IDENTICAL_ATOMS,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="depsplit",
        description="Decide whether a team splits into two parts, each satisfying a dependence atom.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide a team against a two-atom disjunction")
    c.add_argument("team", help="team file (CSV or JSON)")
    c.add_argument("formula", help='e.g. "dep(x,y) | dep(y,x)"')
    c.add_argument("--engine", choices=("auto", "brute", "2sat", "graph", "coherent"), default="auto")
    c.add_argument("--verify", action="store_true", help="cross-check against the 2SAT engine")
    c.add_argument("--format", choices=("csv", "json"), default=None, help="team file format override")
    c.add_argument("--json", action="store_true")

    c = sub.add_parser("classify", help="complexity/coherence classification of a formula")
    c.add_argument("formula")
    c.add_argument("--json", action="store_true")

    c = sub.add_parser("reduce", help="run a constructive reduction")
    c.add_argument("kind", choices=REDUCE_KINDS)
    c.add_argument("instance", help="DIMACS 2CNF, ufa JSON, mtdf JSON, or team file")
    c.add_argument("--out", help="output path (default: stdout)")
    c.add_argument("--json", action="store_true")

    c = sub.add_parser("mtdf-sat", help="solve a monotone/transitive/dual-free 2CNF instance")
    c.add_argument("instance", help="mtdf JSON file")
    c.add_argument("--json", action="store_true")

    c = sub.add_parser("witness", help="emit a coherence counterexample or incoherence-family team")
    c.add_argument("pattern", choices=sorted(FAMILY_PATTERNS) + sorted(STORED_PATTERNS))
    c.add_argument("--n", type=int, default=6, help="family size parameter (even, >= 4)")
    c.add_argument("--out", help="output path (default: stdout)")
    c.add_argument("--json", action="store_true")

    c = sub.add_parser("coherence", help="bounded coherence-level search for a formula")
    c.add_argument("formula")
    c.add_argument("--max-rows", type=int, default=7)
    c.add_argument("--max-range", type=int, default=4)
    c.add_argument("--json", action="store_true")

    c = sub.add_parser("gen", help="generate a reproducible team from a JSON config")
    c.add_argument("config", help="JSON file with rows/columns/ranges/seed/mode")
    c.add_argument("--out", help="output path (default: stdout)")

    c = sub.add_parser("bench", help="run a benchmark suite")
    c.add_argument("suite", choices=SUITES)
    c.add_argument("--sizes", help="comma-separated instance sizes")
    c.add_argument("--json", action="store_true")
    return p


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_check(args) -> int:
    team, stats = load_team_detailed(args.team, args.format)
    formula = parse_formula(args.formula)
    cls = classify(formula)
    t0 = time.perf_counter()
    verdict = dispatch(team, formula, engine=args.engine)
    elapsed = time.perf_counter() - t0
    timings = {"check_seconds": round(elapsed, 6)}
    if verdict.satisfied and not verify_split(team, verdict.certificate, formula):
        print("error: produced certificate failed verification", file=sys.stderr)
        return 2
    if args.verify:
        t0 = time.perf_counter()
        other = check_via_2sat(team, formula)
        timings["verify_seconds"] = round(time.perf_counter() - t0, 6)
        if other.satisfied != verdict.satisfied:
            print(
                f"error: engine disagreement: {verdict.engine} says "
                f"{verdict.satisfied}, 2sat says {other.satisfied}",
                file=sys.stderr,
            )
            return 2
    report = build_report(formula, team, cls, verdict, stats.dedup_dropped, timings)
    if args.json:
        sys.stdout.write(report.to_json_text())
    else:
        print(f"formula:    {formula}")
        print(f"pattern:    {cls.describe()}")
        dropped = f" ({stats.dedup_dropped} duplicate rows dropped)" if stats.dedup_dropped else ""
        print(f"team:       {len(team)} rows{dropped}, digest {team_digest(team)[:12]}")
        print(f"engine:     {verdict.engine}")
        print(f"satisfied:  {'yes' if verdict.satisfied else 'no'}")
        if verdict.certificate is not None:
            print(f"split:      {verdict.certificate.render(team)}")
        if args.verify:
            print("verified:   2SAT cross-check agrees")
    return 0 if verdict.satisfied else 1


def _cmd_classify(args) -> int:
    cls = classify(parse_formula(args.formula))
    if args.json:
        from .report import classification_to_obj

        sys.stdout.write(json.dumps(classification_to_obj(cls), indent=2) + "\n")
    else:
        print(cls.describe())
    return 0


def _team_payload(team: Team, formula, args) -> int:
    if args.json:
        obj = {"team": team_to_json_obj(team), "formula": str(formula)}
        _emit(json.dumps(obj, indent=2) + "\n", args.out)
    else:
        if formula is not None:
            print(f"target formula: {formula}", file=sys.stderr)
        _emit(team_to_csv_text(team), args.out)
    return 0


def _cmd_reduce(args) -> int:
    kind = args.kind
    if kind.startswith("2sat-"):
        inst = parse_dimacs(Path(args.instance).read_text())
        build, formula = {
            "2sat-shared": (twosat_to_team_shared_target, shared_target_formula()),
            "2sat-chain": (twosat_to_team_chain, chain_formula()),
            "2sat-disjoint": (twosat_to_team_disjoint, disjoint_formula()),
        }[kind]
        return _team_payload(build(inst), formula, args)
    if kind == "ufa":
        team = ufa_complement_to_team(load_ufa(args.instance))
        return _team_payload(team, mutual_formula(), args)
    if kind == "mtdf-to-team":
        team = mtdf_to_team(load_mtdf(args.instance))
        return _team_payload(team, mutual_formula(), args)
    if kind == "team-to-mtdf":
        team, _ = load_team_detailed(args.instance)
        inst = team_to_mtdf(team)
        _emit(json.dumps(mtdf_to_json_obj(inst), indent=2) + "\n", args.out)
        return 0
    raise DepsplitError(f"unhandled reduction kind {kind!r}")  # pragma: no cover


def _cmd_mtdf_sat(args) -> int:
    sol = solve_mtdf(load_mtdf(args.instance))
    if args.json:
        obj = {
            "satisfiable": sol.satisfiable,
            "assignment": list(sol.assignment) if sol.assignment else None,
        }
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")
    else:
        print("satisfiable" if sol.satisfiable else "unsatisfiable")
        if sol.assignment:
            true_vars = [i for i, v in enumerate(sol.assignment) if v]
            print(f"true variables: {true_vars}")
    return 0 if sol.satisfiable else 1


def _cmd_witness(args) -> int:
    if args.pattern in FAMILY_PATTERNS:
        pattern = FAMILY_PATTERNS[args.pattern]
        team = incoherence_family(pattern, args.n)
        formula = family_formula(pattern)
        k = args.n
    else:
        w = counterexample_team(STORED_PATTERNS[args.pattern])
        team, formula, k = w.team, w.formula, w.k
    if not verify_incoherence_witness(CoherenceWitness(team, formula, k)):
        print("error: witness failed self-verification", file=sys.stderr)  # pragma: no cover
        return 2  # pragma: no cover
    if args.json:
        obj = {"team": team_to_json_obj(team), "formula": str(formula), "k": k}
        _emit(json.dumps(obj, indent=2) + "\n", args.out)
    else:
        print(f"refutes {k}-coherence of {formula}", file=sys.stderr)
        _emit(team_to_csv_text(team), args.out)
    return 0


def _cmd_coherence(args) -> int:
    result = search_coherence_level(
        parse_formula(args.formula), max_rows=args.max_rows, max_range=args.max_range
    )
    if args.json:
        obj = {
            "formula": result.formula,
            "max_rows": result.max_rows,
            "max_range": result.max_range,
            "incoherent_up_to_bound": result.incoherent_up_to_bound,
            "level": result.level,
            "minimal_refutation_sizes": list(result.minimal_refutation_sizes),
        }
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")
    else:
        print(result.describe())
    return 0


def _cmd_gen(args) -> int:
    obj = json.loads(Path(args.config).read_text())
    team = generate_team(GeneratorConfig.from_json_obj(obj))
    _emit(team_to_csv_text(team), args.out)
    return 0


def _cmd_bench(args) -> int:
    sizes = None
    if args.sizes:
        sizes = tuple(int(s) for s in args.sizes.split(","))
    records = bench(args.suite, sizes=sizes)
    if args.json:
        sys.stdout.write(json.dumps(records, indent=2) + "\n")
    else:
        print(render_records(records))
    return 0


_HANDLERS = {
    "check": _cmd_check,
    "classify": _cmd_classify,
    "reduce": _cmd_reduce,
    "mtdf-sat": _cmd_mtdf_sat,
    "witness": _cmd_witness,
    "coherence": _cmd_coherence,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        return _HANDLERS[args.command](args)
    except DepsplitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as e:
        print(f"error: invalid JSON: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
