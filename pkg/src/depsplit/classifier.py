"""Pattern classification of two-atom disjunctions and engine dispatch.

Every disjunction of two dependence atoms lands in exactly one pattern after
swapping/renaming, and each pattern carries a model-checking complexity
label, a coherence verdict, and a recommended engine:

========================  ==============  ===========  ==========
pattern                   complexity      coherence    engine
========================  ==============  ===========  ==========
dep(x,y) | dep(z,u)       NL-complete     incoherent   2sat
dep(x,z) | dep(y,z)       NL-complete     incoherent   2sat
dep(x,y) | dep(y,z)       NL-complete     incoherent   2sat
dep(x,y) | dep(y,x)       L-complete      incoherent   graph
dep(x,y) | dep(x,y)       FO-definable    level 3      coherent
dep(x,y) | dep(x,z)       FO-definable    level 4      coherent
dep(y) | dep(z)           FO-definable    level 4      coherent
dep(x) | dep(x,y)         FO-definable    level 4      coherent
dep(x) | dep(y,z)         FO-definable    level 6      coherent
dep(y) | dep(x,y)         FO-definable    level 6      coherent
========================  ==============  ===========  ==========

The two level-6 rows are often quoted as level 4, but the 6-row teams whose
conflict structure forms a triangle over three value classes fail while all
their 5-row subteams pass; exhaustive bounded search plus a covering
argument pin the level at exactly 6 (see the test suite).

Higher-arity atoms: incomparable determiner sets are NL-complete; nested
determiner sets are FO-definable through tupling normalization — level 4
when the determiner sets are equal (same-source shape), level 6 for proper
containment (whose tupled form is a constancy mix), level 3 when the atoms
are identical.  When one atom's target occurs among the other atom's
determiners and neither of those results applies, the formula is labeled
Unsupported: the 2SAT engine still decides it soundly, but no complexity or
coherence label is claimed.
"""

from __future__ import annotations

import enum
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    DependenceAtom,
    DisjunctionFormula,
    SplitCertificate,
    Team,
    restrict,
)
from .engines import (
    Verdict,
    check_bruteforce,
    check_coherent_case,
    check_mutual_unary,
    check_via_2sat,
    _lift_certificate,
)
from .errors import ClassificationError, DomainMismatchError, FormulaShapeError


class FormulaPattern(enum.Enum):
    DISJOINT_UNARY = "disjoint-unary"
    SHARED_TARGET_UNARY = "shared-target-unary"
    CHAIN_UNARY = "chain-unary"
    MUTUAL_UNARY = "mutual-unary"
    SAME_SOURCE_UNARY = "same-source-unary"
    IDENTICAL_ATOMS = "identical-atoms"
    CONSTANCY_PAIR = "constancy-pair"
    CONSTANCY_MIX_DISJOINT = "constancy-mix-disjoint"
    CONSTANCY_MIX_DETERMINER = "constancy-mix-determiner"
    CONSTANCY_MIX_TARGET = "constancy-mix-target"
    HIGHER_ARITY_INCOMPARABLE = "higher-arity-incomparable"
    HIGHER_ARITY_CONTAINED = "higher-arity-contained"
    UNSUPPORTED = "unsupported"


CONSTANCY_MIX_PATTERNS = frozenset(
    {
        FormulaPattern.CONSTANCY_MIX_DISJOINT,
        FormulaPattern.CONSTANCY_MIX_DETERMINER,
        FormulaPattern.CONSTANCY_MIX_TARGET,
    }
)

INCOHERENT = "incoherent"
UNKNOWN = "unknown"

NL_COMPLETE = "NL-complete"
L_COMPLETE = "L-complete"
FO_DEFINABLE = "FO-definable"


@dataclass(frozen=True)
class Classification:
    pattern: FormulaPattern
    complexity: str
    coherence: object  # an int level, "incoherent", or "unknown"
    engine: str
    derived_extension: bool = False
    notes: tuple = ()

    def __post_init__(self):
        if self.complexity == FO_DEFINABLE and not isinstance(self.coherence, int):
            raise ClassificationError("FO-definable patterns carry a finite level")
        if self.complexity in (NL_COMPLETE, L_COMPLETE) and self.coherence != INCOHERENT:
            raise ClassificationError("NL/L-complete patterns are incoherent")

    @property
    def coherence_label(self) -> str:
        if isinstance(self.coherence, int):
            return f"coherent (level {self.coherence})"
        return str(self.coherence)

    def describe(self) -> str:
        tag = " [derived extension]" if self.derived_extension else ""
        return (
            f"{self.pattern.value}: {self.complexity}, "
            f"{self.coherence_label}, engine={self.engine}{tag}"
        )


def _classify_unary(f: DisjunctionFormula) -> Classification:
    la, ra = f.left, f.right
    # Present constancy-vs-unary mixes with the constancy atom first; the
    # labels of mirrored patterns are identical.
    if ra.is_constancy and not la.is_constancy:
        la, ra = ra, la
    if la.is_constancy and ra.is_constancy:
        if la.target == ra.target:
            return Classification(
                FormulaPattern.IDENTICAL_ATOMS,
                FO_DEFINABLE,
                3,
                "coherent",
                derived_extension=True,
                notes=("identical constancy atoms; level found by bounded search",),
            )
        return Classification(FormulaPattern.CONSTANCY_PAIR, FO_DEFINABLE, 4, "coherent")
    if la.is_constancy:
        w = la.target
        src, tgt = ra.determiners[0], ra.target
        if w == src:
            pat = FormulaPattern.CONSTANCY_MIX_DETERMINER
        elif w == tgt:
            # Published as level 4, but the 6-row team whose x-groups pair up
            # the y-values {0,1},{0,2},{1,2} fails while every 5-row subteam
            # passes; minimal failing teams top out at 6 rows.
            return Classification(
                FormulaPattern.CONSTANCY_MIX_TARGET,
                FO_DEFINABLE,
                6,
                "coherent",
                derived_extension=True,
                notes=(
                    "level 6 established by bounded exhaustive search and an "
                    "explicit 6-row refutation of 5-coherence",
                ),
            )
        else:
            # Same triangle refutation as the target-sharing mix: often
            # quoted as level 4, really level 6.
            return Classification(
                FormulaPattern.CONSTANCY_MIX_DISJOINT,
                FO_DEFINABLE,
                6,
                "coherent",
                derived_extension=True,
                notes=(
                    "level 6 established by bounded exhaustive search and an "
                    "explicit 6-row refutation of 5-coherence",
                ),
            )
        return Classification(pat, FO_DEFINABLE, 4, "coherent")
    a, b = la.determiners[0], la.target
    c, d = ra.determiners[0], ra.target
    if b == d:
        if a == c:
            return Classification(FormulaPattern.IDENTICAL_ATOMS, FO_DEFINABLE, 3, "coherent")
        return Classification(FormulaPattern.SHARED_TARGET_UNARY, NL_COMPLETE, INCOHERENT, "2sat")
    if b == c and a == d:
        return Classification(FormulaPattern.MUTUAL_UNARY, L_COMPLETE, INCOHERENT, "graph")
    if b == c or a == d:
        return Classification(FormulaPattern.CHAIN_UNARY, NL_COMPLETE, INCOHERENT, "2sat")
    if a == c:
        return Classification(FormulaPattern.SAME_SOURCE_UNARY, FO_DEFINABLE, 4, "coherent")
    return Classification(FormulaPattern.DISJOINT_UNARY, NL_COMPLETE, INCOHERENT, "2sat")


def classify(f: DisjunctionFormula) -> Classification:
    """Place the formula in the classification ledger and pick an engine.

    Determiner lists are treated as sets (their order is immaterial), and
    swapping the two disjuncts yields the same labels.
    """
    la, ra = f.left, f.right
    if max(la.arity, ra.arity) <= 1:
        return _classify_unary(f)
    d1, d2 = frozenset(la.determiners), frozenset(ra.determiners)
    if la.target in d2 or ra.target in d1:
        return Classification(
            FormulaPattern.UNSUPPORTED,
            UNKNOWN,
            UNKNOWN,
            "2sat",
            notes=(
                "one atom's target occurs among the other atom's determiners; "
                "no certified complexity class, decided soundly via 2SAT",
            ),
        )
    if d1 <= d2 or d2 <= d1:
        if d1 == d2 and la.target == ra.target:
            return Classification(
                FormulaPattern.IDENTICAL_ATOMS,
                FO_DEFINABLE,
                3,
                "coherent",
                derived_extension=True,
                notes=("identical higher-arity atoms reduce to identical unary atoms",),
            )
        if d1 == d2:
            # tupling turns equal determiner sets into the same-source shape
            return Classification(
                FormulaPattern.HIGHER_ARITY_CONTAINED, FO_DEFINABLE, 4, "coherent"
            )
        # proper containment tuples down to a constancy mix, level 6
        return Classification(
            FormulaPattern.HIGHER_ARITY_CONTAINED,
            FO_DEFINABLE,
            6,
            "coherent",
            derived_extension=True,
            notes=(
                "tupled form is a constancy mix, whose level is 6 "
                "(bounded search plus an explicit 6-row refutation)",
            ),
        )
    return Classification(
        FormulaPattern.HIGHER_ARITY_INCOMPARABLE, NL_COMPLETE, INCOHERENT, "2sat"
    )


# ---------------------------------------------------------------------------
# Tupling normalization for higher-arity atoms
# ---------------------------------------------------------------------------


def _fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def _plan_tuples(f: DisjunctionFormula):
    """Decide which determiner groups get merged into fresh tuple variables.

    In the nested case the shared determiners form one group used by both
    atoms (so the result matches a unary or mixed base pattern); otherwise
    each atom's determiners are merged independently.
    """
    la, ra = f.left, f.right
    d1, d2 = frozenset(la.determiners), frozenset(ra.determiners)
    groups = []  # (ordered variable tuple) to merge when length >= 2
    if d1 <= d2 or d2 <= d1:
        small, big = (la, ra) if d1 <= d2 else (ra, la)
        shared = tuple(small.determiners)
        extras = tuple(v for v in big.determiners if v not in set(shared))
        if len(shared) >= 2:
            groups.append(shared)
        if len(extras) >= 2:
            groups.append(extras)
        new_small_dets = [shared] if shared else []
        new_big_dets = ([shared] if shared else []) + ([extras] if extras else [])
        plan = {
            small: new_small_dets,
            big: new_big_dets,
        }
    else:
        if la.arity >= 2:
            groups.append(tuple(la.determiners))
        if ra.arity >= 2:
            groups.append(tuple(ra.determiners))
        plan = {
            la: [tuple(la.determiners)] if la.determiners else [],
            ra: [tuple(ra.determiners)] if ra.determiners else [],
        }
    return plan, groups


def _normalize_with_mapping(f: DisjunctionFormula, team: Team):
    """Tupling normalization returning (formula, team, row index mapping)."""
    plan, groups = _plan_tuples(f)
    taken = set(team.vars)
    fresh = {}
    for grp in groups:
        if grp not in fresh:
            name = _fresh_name("(" + ",".join(grp) + ")", taken)
            fresh[grp] = name
            taken.add(name)

    def new_atom(old: DependenceAtom) -> DependenceAtom:
        dets = []
        for part in plan[old]:
            if len(part) >= 2:
                dets.append(fresh[part])
            else:
                dets.append(part[0])
        return DependenceAtom(tuple(dets), old.target)

    f2 = DisjunctionFormula(new_atom(f.left), new_atom(f.right))

    merged_away = {v for grp in fresh for v in grp}
    first_of = {grp[0]: grp for grp in fresh}
    new_vars = []
    for v in team.vars:
        if v in first_of:
            new_vars.append(fresh[first_of[v]])
        elif v not in merged_away:
            new_vars.append(v)
    positions = {v: team.var_position(v) for v in team.vars}

    def transform(row):
        out = []
        for v in team.vars:
            if v in first_of:
                grp = first_of[v]
                out.append(tuple(row[positions[g]] for g in grp))
            elif v not in merged_away:
                out.append(row[positions[v]])
        return tuple(out)

    images = [transform(row) for row in team.rows]
    team2 = Team(new_vars, images)
    index = {row: i for i, row in enumerate(team2.rows)}
    mapping = [index[img] for img in images]
    return f2, team2, mapping


def normalize_higher_arity(f: DisjunctionFormula, team: Team):
    """Replace multi-variable determiner sets by fresh tuple-valued variables.

    Satisfaction is preserved in both directions: grouping rows by a
    determiner list is the same as grouping them by the tuple of its values.
    In the nested case the shared determiners become one variable used by
    both atoms, so the result matches a unary or mixed base pattern.
    Returns (formula, team); a no-op (with a warning) on all-unary formulas.
    """
    if max(f.left.arity, f.right.arity) <= 1:
        warnings.warn("normalize_higher_arity called on an all-unary formula", stacklevel=2)
        return f, team
    for v in f.free_variables():
        if v not in team._var_index:
            raise DomainMismatchError(f"formula variable {v!r} not in team domain")
    f2, team2, _ = _normalize_with_mapping(f, team)
    return f2, team2


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

ENGINE_NAMES = ("auto", "brute", "2sat", "graph", "coherent")


def dispatch(team: Team, f: DisjunctionFormula, engine: str = "auto") -> Verdict:
    """Classify, normalize when needed, and run the recommended engine.

    The verdict's stats record the pattern and classification labels; the
    certificate always refers to rows of the team passed in.  ``engine``
    forces a specific engine ("brute", "2sat", "graph", "coherent") instead
    of the classifier's choice; engine errors propagate.
    """
    if engine not in ENGINE_NAMES:
        raise FormulaShapeError(f"unknown engine {engine!r}; choose from {ENGINE_NAMES}")
    for v in f.free_variables():
        if v not in team._var_index:
            raise DomainMismatchError(
                f"formula variable {v!r} not in team domain {team.vars!r}"
            )
    cls = classify(f)
    t0 = time.perf_counter()
    free = [v for v in team.vars if v in set(f.free_variables())]
    local = restrict(team, free) if len(free) != len(team.vars) else team

    chosen = cls.engine if engine == "auto" else engine
    if chosen == "brute":
        verdict = check_bruteforce(local, f)
    elif chosen == "graph":
        verdict = check_mutual_unary(local, f)
    elif chosen == "2sat":
        verdict = check_via_2sat(local, f)
    elif chosen == "coherent":
        if not isinstance(cls.coherence, int):
            raise ClassificationError(
                f"coherent engine requires a coherent formula, got {cls.describe()}"
            )
        k = cls.coherence
        if max(f.left.arity, f.right.arity) > 1:
            f2, local2, mapping = _normalize_with_mapping(f, local)
            inner = check_coherent_case(local2, f2, k)
            verdict = _denormalize_verdict(inner, mapping)
        else:
            verdict = check_coherent_case(local, f, k)
    else:  # pragma: no cover
        raise FormulaShapeError(f"unhandled engine {chosen!r}")

    if local is not team and verdict.certificate is not None:
        positions = tuple(team.var_position(v) for v in local.vars)
        cert = _lift_certificate(verdict.certificate, local, team, positions)
        verdict = Verdict(verdict.satisfied, cert, verdict.engine, verdict.stats)

    stats = dict(verdict.stats)
    stats.update(
        {
            "pattern": cls.pattern.value,
            "complexity": cls.complexity,
            "coherence": cls.coherence,
            "dispatch_seconds": round(time.perf_counter() - t0, 6),
        }
    )
    return Verdict(verdict.satisfied, verdict.certificate, verdict.engine, stats)


def _denormalize_verdict(inner: Verdict, mapping) -> Verdict:
    if inner.certificate is None:
        return inner
    left = frozenset(i for i, j in enumerate(mapping) if j in inner.certificate.left_rows)
    right = frozenset(i for i, j in enumerate(mapping) if j in inner.certificate.right_rows)
    return Verdict(inner.satisfied, SplitCertificate(left, right), inner.engine, inner.stats)
