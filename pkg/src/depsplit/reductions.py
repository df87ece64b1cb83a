"""Constructive reductions: 2SAT instances to teams (three variants), the
undirected-forest-accessibility complement to the mutual pattern, and the
round trip between two-column teams and monotone/transitive/dual-free 2CNF.

Reduction outputs use tagged value namespaces (proposition names, clause
indices, per-proposition truth symbols, fresh top/bottom markers) so the
constructions' disjointness assumptions hold for any input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .core import DependenceAtom, DisjunctionFormula, Team, atom, disjunction
from .engines import Verdict, check_mutual_unary
from .errors import (
    DomainMismatchError,
    InvalidInstanceError,
    MtdfValidationError,
    ParseError,
)


def shared_target_formula() -> DisjunctionFormula:
    return disjunction(atom("x", "z"), atom("y", "z"))


def chain_formula() -> DisjunctionFormula:
    return disjunction(atom("x", "y"), atom("y", "z"))


def disjoint_formula() -> DisjunctionFormula:
    return disjunction(atom("x", "y"), atom("z", "w"))


def mutual_formula() -> DisjunctionFormula:
    return disjunction(atom("x", "y"), atom("y", "x"))


# ---------------------------------------------------------------------------
# 2CNF instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CnfInstance:
    """A 2CNF over propositions p_1..p_m, clause order significant.

    Literals are DIMACS-signed: ``k`` for p_k, ``-k`` for its negation
    (1-based).  Unlike :class:`~depsplit.engines.TwoCnf`, clauses keep their
    input order and duplicates: the reductions index rows by clause position.
    """

    num_props: int
    clauses: tuple

    def __post_init__(self):
        for cl in self.clauses:
            if len(cl) != 2:
                raise InvalidInstanceError(f"clause {cl!r} does not have 2 literals")
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_props:
                    raise InvalidInstanceError(f"literal {lit} out of range")
        object.__setattr__(self, "clauses", tuple(tuple(cl) for cl in self.clauses))


def parse_dimacs(text: str) -> CnfInstance:
    """DIMACS-style 2CNF: header ``p cnf <props> <clauses>``, two literals
    per clause, 0-terminated; ``c`` lines are comments."""
    num_props = None
    declared = None
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: bad header {line!r}")
            try:
                num_props, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: bad header numbers in {line!r}")
            continue
        if num_props is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                tokens.append(int(tok))
            except ValueError:
                raise ParseError(f"line {lineno}: not a literal: {tok!r}")
    if num_props is None:
        raise ParseError("missing 'p cnf' header")
    clauses = []
    current = []
    for lit in tokens:
        if lit == 0:
            if len(current) != 2:
                raise ParseError(
                    f"clause {len(clauses) + 1} has {len(current)} literals, expected 2"
                )
            clauses.append(tuple(current))
            current = []
        else:
            current.append(lit)
    if current:
        raise ParseError("trailing literals without a terminating 0")
    if declared is not None and declared != len(clauses):
        raise ParseError(
            f"header declares {declared} clauses, found {len(clauses)}"
        )
    return CnfInstance(num_props, tuple(clauses))


def format_dimacs(inst: CnfInstance) -> str:
    lines = [f"p cnf {inst.num_props} {len(inst.clauses)}"]
    for a, b in inst.clauses:
        lines.append(f"{a} {b} 0")
    return "\n".join(lines) + "\n"


def split_degenerate_clauses(inst: CnfInstance) -> CnfInstance:
    """Rewrite every clause (l | l) into (l | q), (l | -q) with a fresh q.

    The team constructions below encode each clause as two distinct rows, so
    a repeated literal would collapse a clause into a single row and break
    the gadget; the rewrite preserves satisfiability.
    """
    if all(a != b for a, b in inst.clauses):
        return inst
    num = inst.num_props
    out = []
    for a, b in inst.clauses:
        if a == b:
            num += 1
            out.append((a, num))
            out.append((a, -num))
        else:
            out.append((a, b))
    return CnfInstance(num, tuple(out))


def _clause_value(i: int) -> str:
    return f"c{i + 1}"


def _prop_value(lit: int) -> str:
    return f"p{abs(lit)}"


def _truth_symbol(lit: int) -> str:
    # each proposition has its own pair of truth symbols
    return f"{1 if lit > 0 else 0}@p{abs(lit)}"


def twosat_to_team_shared_target(inst: CnfInstance) -> Team:
    """Team over {x, y, z} satisfying dep(x,z) | dep(y,z) iff the 2CNF is
    satisfiable: x names the proposition, y the clause, z the per-proposition
    truth symbol the literal asserts."""
    inst = split_degenerate_clauses(inst)
    rows = []
    for i, clause in enumerate(inst.clauses):
        for lit in clause:
            rows.append((_prop_value(lit), _clause_value(i), _truth_symbol(lit)))
    return Team(("x", "y", "z"), rows)


def twosat_to_team_chain(inst: CnfInstance) -> Team:
    """Team over {x, y, z} satisfying dep(x,y) | dep(y,z) iff satisfiable:
    x names the clause, y the proposition, z the asserted truth value."""
    inst = split_degenerate_clauses(inst)
    rows = []
    for i, clause in enumerate(inst.clauses):
        for lit in clause:
            rows.append((_clause_value(i), _prop_value(lit), "1" if lit > 0 else "0"))
    return Team(("x", "y", "z"), rows)


def twosat_to_team_disjoint(inst: CnfInstance) -> Team:
    """Team over {x, y, z, w} satisfying dep(x,y) | dep(z,w) iff satisfiable:
    x/y encode the literal (proposition, asserted value), z names the clause
    and w the literal's position within it."""
    inst = split_degenerate_clauses(inst)
    rows = []
    for i, clause in enumerate(inst.clauses):
        for pos, lit in enumerate(clause):
            rows.append(
                (_prop_value(lit), "1" if lit > 0 else "0", _clause_value(i), str(pos))
            )
    return Team(("x", "y", "z", "w"), rows)


# ---------------------------------------------------------------------------
# Undirected forest accessibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UfaInstance:
    """An acyclic undirected graph with two distinguished nodes."""

    nodes: frozenset
    edges: tuple  # canonically ordered (a, b) string pairs, a < b
    u: str
    v: str

    def __post_init__(self):
        nodes = frozenset(self.nodes)
        canon = set()
        for e in self.edges:
            a, b = e
            if a == b:
                raise InvalidInstanceError(f"self-loop {e!r} makes the graph cyclic")
            if a not in nodes or b not in nodes:
                raise InvalidInstanceError(f"edge {e!r} uses an unknown node")
            canon.add((a, b) if a < b else (b, a))
        if self.u == self.v:
            raise InvalidInstanceError("the two distinguished nodes must differ")
        if self.u not in nodes or self.v not in nodes:
            raise InvalidInstanceError("distinguished nodes must belong to the graph")
        parent = {n: n for n in nodes}

        def find(n):
            while parent[n] != n:
                parent[n] = parent[parent[n]]
                n = parent[n]
            return n

        for a, b in sorted(canon):
            ra, rb = find(a), find(b)
            if ra == rb:
                raise InvalidInstanceError(f"graph is not acyclic: edge {a!r}-{b!r} closes a cycle")
            parent[ra] = rb
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    def connected(self, a: str, b: str) -> bool:
        adj = {}
        for p, q in self.edges:
            adj.setdefault(p, []).append(q)
            adj.setdefault(q, []).append(p)
        seen = {a}
        stack = [a]
        while stack:
            n = stack.pop()
            if n == b:
                return True
            for m in adj.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return a == b


def _fresh_marker(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def ufa_complement_to_team(g: UfaInstance) -> Team:
    """Team over {x, y} satisfying dep(x,y) | dep(y,x) iff u and v lie in
    different components: two mirrored rows per edge, plus eight rows pairing
    fresh top/bottom markers with u and v both ways."""
    top = _fresh_marker("⊤", g.nodes)
    bot = _fresh_marker("⊥", g.nodes | {top})
    rows = []
    for a, b in g.edges:
        rows.append((a, b))
        rows.append((b, a))
    for marker in (top, bot):
        for node in (g.u, g.v):
            rows.append((marker, node))
            rows.append((node, marker))
    return Team(("x", "y"), rows)


# ---------------------------------------------------------------------------
# Monotone transitive dual-free 2CNF
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MtdfInstance:
    """Clique representation of a monotone, transitive, dual-free 2CNF.

    Each variable sits in at most one positive and at most one negative
    clique; a clique {v1..vk} stands for all clauses (v_i | v_j) (positive)
    or (-v_i | -v_j) (negative) over its pairs.  Cliques have at least two
    members, and no pair of variables shares both a positive and a negative
    clique.
    """

    num_vars: int
    pos_cliques: tuple = ()
    neg_cliques: tuple = ()

    def __post_init__(self):
        pos = tuple(sorted((frozenset(c) for c in self.pos_cliques), key=sorted))
        neg = tuple(sorted((frozenset(c) for c in self.neg_cliques), key=sorted))
        for sign, cliques in (("positive", pos), ("negative", neg)):
            seen = set()
            for c in cliques:
                if len(c) < 2:
                    raise InvalidInstanceError(f"{sign} clique {sorted(c)} has fewer than 2 members")
                for v in c:
                    if not isinstance(v, int) or not (0 <= v < self.num_vars):
                        raise InvalidInstanceError(f"variable {v!r} out of range")
                    if v in seen:
                        raise InvalidInstanceError(
                            f"variable {v} occurs in two {sign} cliques"
                        )
                    seen.add(v)
        pos_pairs = {frozenset(p) for c in pos for p in combinations(sorted(c), 2)}
        for c in neg:
            for p in combinations(sorted(c), 2):
                if frozenset(p) in pos_pairs:
                    i, j = sorted(p)
                    raise InvalidInstanceError(
                        f"dual clauses: variables {i},{j} share a positive and a negative clique"
                    )
        object.__setattr__(self, "pos_cliques", pos)
        object.__setattr__(self, "neg_cliques", neg)

    def expand_clauses(self) -> CnfInstance:
        """The explicit clause list the clique representation stands for."""
        clauses = []
        for c in self.pos_cliques:
            for i, j in combinations(sorted(c), 2):
                clauses.append((i + 1, j + 1))
        for c in self.neg_cliques:
            for i, j in combinations(sorted(c), 2):
                clauses.append((-(i + 1), -(j + 1)))
        return CnfInstance(self.num_vars, tuple(clauses))


def team_to_mtdf(team: Team) -> MtdfInstance:
    """Variables are row indices; rows sharing a first-column value form a
    positive clique, rows sharing a second-column value a negative clique
    (cliques of size one are dropped)."""
    if len(team.vars) != 2:
        raise DomainMismatchError(
            f"mtdf extraction needs a two-column team, got domain {team.vars!r}"
        )
    by_x = {}
    by_y = {}
    for i, (a, b) in enumerate(team.rows):
        by_x.setdefault(a, []).append(i)
        by_y.setdefault(b, []).append(i)
    pos = [frozenset(g) for g in by_x.values() if len(g) >= 2]
    neg = [frozenset(g) for g in by_y.values() if len(g) >= 2]
    return MtdfInstance(len(team), tuple(pos), tuple(neg))


def mtdf_to_team(m: MtdfInstance) -> Team:
    """One row per variable: the first column holds its positive clique id
    (fresh singleton otherwise), the second its negative clique id.  Row
    labels record the variable indices."""
    pos_of = {}
    for j, c in enumerate(m.pos_cliques):
        for v in c:
            pos_of[v] = f"P{j}"
    neg_of = {}
    for j, c in enumerate(m.neg_cliques):
        for v in c:
            neg_of[v] = f"N{j}"
    rows = []
    labels = []
    for i in range(m.num_vars):
        rows.append((pos_of.get(i, f"xp{i}"), neg_of.get(i, f"xn{i}")))
        labels.append(f"s{i}")
    return Team(("x", "y"), rows, labels)


@dataclass(frozen=True)
class MtdfSolution:
    satisfiable: bool
    assignment: Optional[tuple]
    verdict: Verdict


def solve_mtdf(m: MtdfInstance) -> MtdfSolution:
    """Satisfiability through the team route: build the instance's team,
    decide dep(x,y) | dep(y,x) with the graph engine, and decode a truth
    assignment from the split (a variable is true iff its row lands on the
    dep(y,x) side; overlap rows count as left, hence false)."""
    team = mtdf_to_team(m)
    verdict = check_mutual_unary(team, mutual_formula())
    if not verdict.satisfied:
        return MtdfSolution(False, None, verdict)
    # team rows are canonically sorted; provenance labels recover variables
    row_of_var = {}
    for idx in range(len(team)):
        row_of_var[int(team.label(idx)[1:])] = idx
    assignment = []
    for i in range(m.num_vars):
        idx = row_of_var[i]
        assignment.append(idx not in verdict.certificate.left_rows)
    return MtdfSolution(True, tuple(assignment), verdict)


@dataclass(frozen=True)
class MtdfViolation:
    condition: str  # "monotone", "dual-free", "transitive", "degenerate"
    clauses: tuple
    detail: str

    def __str__(self):
        return f"{self.condition}: {self.detail} (witness {self.clauses})"


def mtdf_violations(inst: CnfInstance) -> list:
    """All ways the clause list fails to be monotone/transitive/dual-free."""
    violations = []
    pos_adj = {}
    neg_adj = {}
    pos_clause = {}
    neg_clause = {}
    for cl in inst.clauses:
        a, b = cl
        if a == -b or a == b:
            violations.append(
                MtdfViolation(
                    "degenerate",
                    (cl,),
                    "clauses must relate two distinct variables",
                )
            )
            continue
        if (a > 0) != (b > 0):
            violations.append(
                MtdfViolation("monotone", (cl,), "mixed-sign clause is not monotone")
            )
            continue
        i, j = sorted((abs(a), abs(b)))
        adj, store = (pos_adj, pos_clause) if a > 0 else (neg_adj, neg_clause)
        adj.setdefault(i, set()).add(j)
        adj.setdefault(j, set()).add(i)
        store[(i, j)] = cl
    for (i, j), cl in pos_clause.items():
        if (i, j) in neg_clause:
            violations.append(
                MtdfViolation(
                    "dual-free",
                    (cl, neg_clause[(i, j)]),
                    f"variables {i},{j} appear in dual clauses",
                )
            )
    for name, adj, store in (("positive", pos_adj, pos_clause), ("negative", neg_adj, neg_clause)):
        for i in sorted(adj):
            for j in sorted(adj[i]):
                for k in sorted(adj[j]):
                    if k != i and k not in adj[i]:
                        a, b = sorted((i, j))
                        c, d = sorted((j, k))
                        violations.append(
                            MtdfViolation(
                                "transitive",
                                (store[(a, b)], store[(c, d)]),
                                f"{name} clauses relate {i}~{j} and {j}~{k} "
                                f"but {min(i,k)},{max(i,k)} is missing",
                            )
                        )
    return violations


def validate_mtdf(inst: CnfInstance) -> MtdfInstance:
    """Check conditions (monotone, dual-free, transitive) and return the
    clique representation; raises MtdfValidationError carrying one entry per
    violated condition, each with a witnessing clause (pair)."""
    violations = mtdf_violations(inst)
    if violations:
        # report each condition once, with its first witness
        seen = {}
        for v in violations:
            seen.setdefault(v.condition, v)
        raise MtdfValidationError(tuple(seen.values()))
    adj = {"pos": {}, "neg": {}}
    for a, b in inst.clauses:
        i, j = sorted((abs(a), abs(b)))
        side = "pos" if a > 0 else "neg"
        adj[side].setdefault(i - 1, set()).add(j - 1)
        adj[side].setdefault(j - 1, set()).add(i - 1)
    cliques = {"pos": [], "neg": []}
    for side in ("pos", "neg"):
        done = set()
        for v in sorted(adj[side]):
            if v in done:
                continue
            comp = {v} | adj[side][v]
            done |= comp
            cliques[side].append(frozenset(comp))
    return MtdfInstance(inst.num_props, tuple(cliques["pos"]), tuple(cliques["neg"]))
