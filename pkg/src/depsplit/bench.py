"""Benchmark suites exercising the complexity separation empirically.

- mutual-scaling: the near-linear graph engine on planted two-column teams
  at doubling sizes (defaults reach a million rows).
- 2sat-scaling: the universal quadratic-reduction engine on uniform teams in
  the hundreds-to-thousands range, recording clause counts.
- coherent-scaling: the bounded-subteam engine against the 2SAT engine on a
  same-source (level 4) pattern.
"""

from __future__ import annotations

import time

from .classifier import dispatch
from .core import atom, disjunction
from .engines import check_coherent_case, check_mutual_unary, check_via_2sat
from .errors import ConfigError
from .generate import GeneratorConfig, generate_team
from .reductions import mutual_formula

SUITES = ("mutual-scaling", "2sat-scaling", "coherent-scaling")

MUTUAL_SIZES = (125_000, 250_000, 500_000, 1_000_000)
TWO_SAT_SIZES = (100, 200, 400, 800, 1_600, 3_000)
COHERENT_SIZES = (200, 400, 800, 1_600)


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def bench(suite: str, sizes=None, seed: int = 20240801) -> list:
    """Run a suite and return one record per instance size."""
    if suite == "mutual-scaling":
        sizes = tuple(sizes or MUTUAL_SIZES)
        f = mutual_formula()
        records = []
        prev = None
        for n in sizes:
            team = generate_team(GeneratorConfig(rows=n, mode="planted-satisfiable", seed=seed))
            verdict, seconds = _timed(check_mutual_unary, team, f)
            rec = {
                "suite": suite,
                "rows": n,
                "seconds": round(seconds, 4),
                "satisfied": verdict.satisfied,
                "components": verdict.stats.get("components"),
                "ratio": round(seconds / prev, 2) if prev else None,
            }
            prev = seconds
            records.append(rec)
        return records
    if suite == "2sat-scaling":
        sizes = tuple(sizes or TWO_SAT_SIZES)
        f = disjunction(atom("x", "z"), atom("y", "z"))
        records = []
        for n in sizes:
            team = generate_team(
                GeneratorConfig(rows=n, columns=3, ranges=(16, 16, 16), seed=seed)
            )
            verdict, seconds = _timed(check_via_2sat, team, f)
            records.append(
                {
                    "suite": suite,
                    "rows": n,
                    "seconds": round(seconds, 4),
                    "satisfied": verdict.satisfied,
                    "clauses": verdict.stats.get("clauses"),
                }
            )
        return records
    if suite == "coherent-scaling":
        sizes = tuple(sizes or COHERENT_SIZES)
        f = disjunction(atom("x", "y"), atom("x", "z"))
        records = []
        for n in sizes:
            team = generate_team(
                GeneratorConfig(rows=n, columns=3, ranges=(max(4, n // 8), 4, 4), seed=seed)
            )
            vc, sec_coherent = _timed(check_coherent_case, team, f, 4)
            vs, sec_2sat = _timed(check_via_2sat, team, f)
            if vc.satisfied != vs.satisfied:
                raise ConfigError("engine disagreement in benchmark (this is a bug)")
            records.append(
                {
                    "suite": suite,
                    "rows": n,
                    "seconds": round(sec_coherent, 4),
                    "seconds_2sat": round(sec_2sat, 4),
                    "satisfied": vc.satisfied,
                    "subteams_checked": vc.stats.get("subteams_checked"),
                }
            )
        return records
    raise ConfigError(f"unknown bench suite {suite!r}; choose from {SUITES}")


def render_records(records) -> str:
    if not records:
        return "(no records)"
    keys = list(records[0])
    widths = {k: max(len(str(k)), max(len(str(r.get(k))) for r in records)) for k in keys}
    lines = ["  ".join(str(k).ljust(widths[k]) for k in keys)]
    for r in records:
        lines.append("  ".join(str(r.get(k)).ljust(widths[k]) for k in keys))
    return "\n".join(lines)


def cross_check(team, f) -> bool:
    """Convenience: dispatch and the 2SAT engine must agree."""
    return dispatch(team, f).satisfied == check_via_2sat(team, f).satisfied
