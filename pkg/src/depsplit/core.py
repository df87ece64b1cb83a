"""Team-semantics data model and the atomic satisfaction relation.

A team is a set of assignments over a fixed variable list, stored here as a
duplicate-free, canonically ordered tuple of value tuples.  Values are opaque
symbols compared only by equality; the canonical row order (used for stable
certificates) is lexicographic and carries no semantic weight.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

from .errors import CertificateError, DomainMismatchError, FormulaError

Value = Hashable
Row = tuple


def value_sort_key(v):
    """Ordering key for opaque values: strings first, tuples recursively."""
    if isinstance(v, tuple):
        return (1, tuple(value_sort_key(x) for x in v))
    return (0, str(v))


def row_sort_key(row):
    return tuple(value_sort_key(v) for v in row)


class Team:
    """An immutable team: variable names plus a set of rows.

    Rows are deduplicated and kept in canonical (lexicographic) order, so row
    indices are stable identifiers usable in certificates.  ``provenance``
    optionally attaches a display label to each input row; after dedup the
    first label given for a row wins.
    """

    __slots__ = ("vars", "rows", "provenance", "_var_index")

    def __init__(
        self,
        vars: Sequence[str],
        rows: Iterable[Sequence[Value]],
        provenance: Optional[Sequence[str]] = None,
    ):
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise DomainMismatchError(f"duplicate variable names in {vars!r}")
        width = len(vars)
        seen = {}
        in_rows = list(rows)
        if provenance is not None and len(provenance) != len(in_rows):
            raise DomainMismatchError("provenance labels must match the input rows one-to-one")
        for pos, raw in enumerate(in_rows):
            row = tuple(sys.intern(v) if type(v) is str else v for v in raw)
            if len(row) != width:
                raise DomainMismatchError(
                    f"row {pos} has {len(row)} values, expected {width}"
                )
            if row not in seen:
                seen[row] = provenance[pos] if provenance is not None else None
        ordered = sorted(seen, key=row_sort_key)
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "rows", tuple(ordered))
        if provenance is None:
            object.__setattr__(self, "provenance", None)
        else:
            object.__setattr__(self, "provenance", tuple(seen[r] for r in ordered))
        object.__setattr__(self, "_var_index", {v: i for i, v in enumerate(vars)})

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("Team is immutable")

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, Team)
            and self.vars == other.vars
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.vars, self.rows))

    def __repr__(self):
        return f"Team(vars={self.vars!r}, rows={len(self.rows)})"

    def var_position(self, name: str) -> int:
        try:
            return self._var_index[name]
        except KeyError:
            raise DomainMismatchError(
                f"variable {name!r} not in team domain {self.vars!r}"
            ) from None

    def column(self, name: str) -> tuple:
        i = self.var_position(name)
        return tuple(row[i] for row in self.rows)

    def label(self, index: int) -> str:
        """Display label of a row: its provenance label or ``r<index>``."""
        if self.provenance is not None and self.provenance[index] is not None:
            return self.provenance[index]
        return f"r{index}"

    def subteam(self, indices: Iterable[int]) -> "Team":
        """The team consisting of the given rows (canonical order is preserved)."""
        idx = sorted(set(indices))
        rows = [self.rows[i] for i in idx]
        prov = None
        if self.provenance is not None:
            prov = [self.provenance[i] for i in idx]
        return Team(self.vars, rows, prov)


@dataclass(frozen=True)
class DependenceAtom:
    """dep(determiners..., target): the target is a function of the determiners.

    An empty determiner list is the constancy atom dep(target).
    """

    determiners: tuple[str, ...]
    target: str

    def __post_init__(self):
        dets = tuple(self.determiners)
        object.__setattr__(self, "determiners", dets)
        names = dets + (self.target,)
        if len(set(names)) != len(names):
            raise FormulaError(
                f"atom variables must be distinct, got dep({', '.join(names)})"
            )

    @property
    def arity(self) -> int:
        return len(self.determiners)

    @property
    def is_constancy(self) -> bool:
        return not self.determiners

    def variables(self) -> tuple[str, ...]:
        return self.determiners + (self.target,)

    def __str__(self):
        return f"dep({', '.join(self.variables())})"


@dataclass(frozen=True)
class DisjunctionFormula:
    """A pair of dependence atoms joined by team-splitting disjunction."""

    left: DependenceAtom
    right: DependenceAtom

    def free_variables(self) -> tuple[str, ...]:
        out = []
        for v in self.left.variables() + self.right.variables():
            if v not in out:
                out.append(v)
        return tuple(out)

    def __str__(self):
        return f"{self.left} | {self.right}"


def atom(*names: str) -> DependenceAtom:
    """Shorthand: ``atom('x', 'y')`` is dep(x, y); ``atom('z')`` is dep(z)."""
    if not names:
        raise FormulaError("an atom needs at least a target variable")
    return DependenceAtom(tuple(names[:-1]), names[-1])


def disjunction(left: DependenceAtom, right: DependenceAtom) -> DisjunctionFormula:
    return DisjunctionFormula(left, right)


@dataclass(frozen=True)
class SplitCertificate:
    """A two-part cover of a team's rows witnessing a disjunction.

    Row references are indices into the canonical row order of the certified
    team.  Overlap between the two sides is permitted: the semantics asks for
    a union, not a partition.
    """

    left_rows: frozenset = field(default_factory=frozenset)
    right_rows: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "left_rows", frozenset(self.left_rows))
        object.__setattr__(self, "right_rows", frozenset(self.right_rows))

    def render(self, team: Team) -> str:
        left = ", ".join(team.label(i) for i in sorted(self.left_rows))
        right = ", ".join(team.label(i) for i in sorted(self.right_rows))
        return f"({{{left}}}, {{{right}}})"


def _check_atom_domain(team: Team, a: DependenceAtom) -> None:
    for v in a.variables():
        if v not in team._var_index:
            raise DomainMismatchError(
                f"atom variable {v!r} not in team domain {team.vars!r}"
            )


def satisfies_atom(team: Team, a: DependenceAtom) -> bool:
    """Does every pair of rows that agrees on the determiners agree on the target?

    Constancy atoms degenerate to "the target column holds at most one value".
    Runs in expected O(|team|) time via hashing on determiner projections.
    """
    _check_atom_domain(team, a)
    tpos = team.var_position(a.target)
    if a.is_constancy:
        return len({row[tpos] for row in team.rows}) <= 1
    dpos = tuple(team.var_position(v) for v in a.determiners)
    seen = {}
    for row in team.rows:
        key = tuple(row[i] for i in dpos)
        val = row[tpos]
        prev = seen.setdefault(key, val)
        if prev != val:
            return False
    return True


def restrict(team: Team, variables: Iterable[str]) -> Team:
    """The team projected onto ``variables`` (deduplicated; set semantics).

    Column order follows the original team's variable order.
    """
    wanted = set(variables)
    missing = wanted - set(team.vars)
    if missing:
        raise DomainMismatchError(
            f"cannot restrict to {sorted(missing)!r}: not in domain {team.vars!r}"
        )
    keep = [i for i, v in enumerate(team.vars) if v in wanted]
    if len(keep) == len(team.vars):
        return team
    new_vars = [team.vars[i] for i in keep]
    new_rows = [tuple(row[i] for i in keep) for row in team.rows]
    return Team(new_vars, new_rows)


def column_range(team: Team, variable: str) -> frozenset:
    """The set of values the given column takes."""
    return frozenset(team.column(variable))


def verify_split(team: Team, cert: SplitCertificate, f: DisjunctionFormula) -> bool:
    """Check a certificate: the two sides must cover the team and each side
    must satisfy its respective atom."""
    n = len(team)
    for i in cert.left_rows | cert.right_rows:
        if not isinstance(i, int) or not (0 <= i < n):
            raise CertificateError(f"certificate references row {i!r}, team has {n} rows")
    if cert.left_rows | cert.right_rows != frozenset(range(n)):
        return False
    left = team.subteam(cert.left_rows)
    right = team.subteam(cert.right_rows)
    return satisfies_atom(left, f.left) and satisfies_atom(right, f.right)
