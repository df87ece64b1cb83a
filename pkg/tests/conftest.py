"""Shared fixtures: the figure teams and small independent oracles."""

import random
from itertools import product

import pytest

from depsplit import (
    DependenceAtom,
    DisjunctionFormula,
    Team,
    atom,
    disjunction,
)


@pytest.fixture
def gt_team():
    """Four rows over two binary-ish columns; one four-cycle in the graph."""
    return Team(
        ("x", "y"),
        [("0", "0h"), ("0", "1h"), ("1", "0h"), ("1", "1h")],
        ["s1", "s2", "s3", "s4"],
    )


@pytest.fixture
def mutual():
    return disjunction(atom("x", "y"), atom("y", "x"))


@pytest.fixture
def team_a():
    return Team(
        ("x", "y", "z"),
        [("1", "1", "1"), ("1", "1", "2"), ("1", "2", "1"), ("1", "2", "2")],
        ["s1", "s2", "s3", "s4"],
    )


@pytest.fixture
def formula_a():
    return disjunction(atom("x", "y"), atom("x", "z"))


@pytest.fixture
def team_b():
    return Team(
        ("x", "y", "z"),
        [("1", "1", "1"), ("1", "1", "2"), ("2", "2", "1"), ("2", "2", "2")],
        ["s1", "s2", "s3", "s4"],
    )


@pytest.fixture
def formula_b():
    return disjunction(atom("x"), atom("y", "z"))


@pytest.fixture
def fig_mtdf_team():
    return Team(
        ("x", "y"),
        [("0", "0"), ("0", "1"), ("0", "2"), ("1", "1"), ("2", "1"), ("2", "2")],
        ["s0", "s1", "s2", "s3", "s4", "s5"],
    )


def brute_sat_cnf(num_props, clauses):
    """Truth-table satisfiability of a clause list over DIMACS literals."""
    if not clauses:
        return True
    for bits in product([False, True], repeat=num_props):
        ok = True
        for clause in clauses:
            if not any(bits[abs(l) - 1] ^ (l < 0) for l in clause):
                ok = False
                break
        if ok:
            return True
    return False


def cover_oracle(team, f):
    """Exhaustive disjunction semantics: try all assignments of rows to the
    two sides (each row left, right, or both)."""
    from depsplit import satisfies_atom

    n = len(team)
    for sides in product((0, 1, 2), repeat=n):
        left = [i for i in range(n) if sides[i] in (0, 2)]
        right = [i for i in range(n) if sides[i] in (1, 2)]
        if satisfies_atom(team.subteam(left), f.left) and satisfies_atom(
            team.subteam(right), f.right
        ):
            return True
    return n == 0


def random_team(rng, variables, max_rows=12, max_range=4):
    rows = [
        tuple(str(rng.randint(1, max_range)) for _ in variables)
        for _ in range(rng.randint(0, max_rows))
    ]
    return Team(variables, rows)


FORMULA_POOL = [
    disjunction(atom("x", "y"), atom("z", "u")),
    disjunction(atom("x", "z"), atom("y", "z")),
    disjunction(atom("x", "y"), atom("y", "z")),
    disjunction(atom("x", "y"), atom("y", "x")),
    disjunction(atom("x", "y"), atom("x", "z")),
    disjunction(atom("x", "y"), atom("x", "y")),
    disjunction(atom("y"), atom("z")),
    disjunction(atom("x"), atom("y", "z")),
    disjunction(atom("x"), atom("x", "y")),
    disjunction(atom("y"), atom("x", "y")),
    disjunction(atom("x"), atom("x")),
    disjunction(DependenceAtom(("x", "y"), "z"), DependenceAtom(("x", "y", "u"), "w")),
    disjunction(DependenceAtom(("x", "y"), "z"), DependenceAtom(("y", "u"), "w")),
    disjunction(DependenceAtom(("x", "y"), "z"), DependenceAtom(("x", "y"), "u")),
    disjunction(DependenceAtom(("x", "y"), "z"), DependenceAtom(("x", "y"), "z")),
    disjunction(DependenceAtom((), "z"), DependenceAtom(("x", "y"), "u")),
    disjunction(DependenceAtom(("x",), "z"), DependenceAtom(("z", "y"), "u")),
]


def pool_instance(rng, max_rows=12, max_range=4):
    f = rng.choice(FORMULA_POOL)
    variables = sorted(set(f.free_variables()))
    return random_team(rng, variables, max_rows, max_range), f
