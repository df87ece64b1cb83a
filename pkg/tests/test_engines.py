import os
import random

import pytest

from depsplit import (
    ClassificationError,
    FormulaShapeError,
    OrientationError,
    SizeLimitError,
    Team,
    TwoCnf,
    atom,
    build_team_graph,
    check_bruteforce,
    check_coherent_case,
    check_mutual_unary,
    check_via_2sat,
    disjunction,
    orient_components,
    reduce_to_2cnf,
    size_bound_reject,
    solve_2cnf,
    verify_split,
)
from depsplit.classifier import FormulaPattern
from depsplit.coherence import incoherence_family
from depsplit.engines import BRUTE_CAP_ENV

from conftest import brute_sat_cnf, cover_oracle


class TestBruteforce:
    def test_four_cycle_team_satisfied(self, gt_team, mutual):
        v = check_bruteforce(gt_team, mutual)
        assert v.satisfied and verify_split(gt_team, v.certificate, mutual)
        # the canonical answer pairs s1,s4 on the left
        assert v.certificate.left_rows == frozenset({0, 3})

    def test_counterexample_team_refused(self, team_a, formula_a):
        assert not check_bruteforce(team_a, formula_a).satisfied

    def test_empty_team(self, mutual):
        v = check_bruteforce(Team(("x", "y"), []), mutual)
        assert v.satisfied
        assert v.certificate.left_rows == v.certificate.right_rows == frozenset()

    def test_cap_is_an_error_never_a_fallback(self, mutual):
        team = Team(("x", "y"), [(str(i), str(i)) for i in range(30)])
        with pytest.raises(SizeLimitError):
            check_bruteforce(team, mutual)
        assert check_bruteforce(team, mutual, cap=40).satisfied

    def test_cap_env_override(self, mutual, monkeypatch):
        team = Team(("x", "y"), [(str(i), str(i)) for i in range(10)])
        monkeypatch.setenv(BRUTE_CAP_ENV, "5")
        with pytest.raises(SizeLimitError):
            check_bruteforce(team, mutual)
        monkeypatch.setenv(BRUTE_CAP_ENV, "64")
        assert check_bruteforce(team, mutual).satisfied


class TestReduceTo2Cnf:
    def test_no_violating_pair_no_clause(self):
        team = Team(("x", "y"), [("1", "1"), ("2", "2")])
        cnf = reduce_to_2cnf(team, disjunction(atom("x", "y"), atom("y", "x")))
        assert cnf.clauses == ()

    def test_four_cycle_team_clauses(self, gt_team, mutual):
        # hand-evaluated over the six row pairs of the canonical order
        cnf = reduce_to_2cnf(gt_team, mutual)
        assert set(cnf.clauses) == {(1, 2), (3, 4), (-3, -1), (-4, -2)}

    def test_counterexample_reduction_unsatisfiable(self, team_a, formula_a):
        cnf = reduce_to_2cnf(team_a, formula_a)
        assert solve_2cnf(cnf) is None
        assert not brute_sat_cnf(cnf.num_vars, cnf.clauses)

    def test_pair_violating_both_atoms_emits_both_clauses(self):
        team = Team(("x", "y"), [("1", "1"), ("1", "2")])
        f = disjunction(atom("x", "y"), atom("x", "y"))
        cnf = reduce_to_2cnf(team, f)
        assert set(cnf.clauses) == {(1, 2), (-2, -1)}


class TestSolve2Cnf:
    def test_exclusive_pair(self):
        cnf = TwoCnf(2, ((1, 2), (-1, -2)))
        a = solve_2cnf(cnf)
        assert a is not None and a[0] != a[1]

    def test_forced_contradiction(self):
        assert solve_2cnf(TwoCnf(1, ((1, 1), (-1, -1)))) is None

    def test_tautological_clause_rejected(self):
        with pytest.raises(Exception):
            TwoCnf(1, ((1, -1),))

    def test_agrees_with_truth_tables(self):
        rng = random.Random(17)
        for _ in range(300):
            n = rng.randint(1, 8)
            clauses = []
            for _ in range(rng.randint(0, 14)):
                a = rng.randint(1, n) * rng.choice([1, -1])
                b = rng.randint(1, n) * rng.choice([1, -1])
                if a == -b:
                    continue
                clauses.append(tuple(sorted((a, b))))
            cnf = TwoCnf(n, tuple(clauses))
            got = solve_2cnf(cnf)
            expect = brute_sat_cnf(n, cnf.clauses)
            assert (got is not None) == expect
            if got is not None:
                for a, b in cnf.clauses:
                    assert (got[abs(a) - 1] ^ (a < 0)) or (got[abs(b) - 1] ^ (b < 0))


class TestCheckVia2Sat:
    def test_four_cycle_satisfied(self, gt_team, mutual):
        v = check_via_2sat(gt_team, mutual)
        assert v.satisfied and verify_split(gt_team, v.certificate, mutual)

    def test_incoherence_family_refuted(self, mutual):
        t6 = incoherence_family(FormulaPattern.MUTUAL_UNARY, 6)
        assert not check_via_2sat(t6, mutual).satisfied

    def test_singleton_always_satisfied(self, mutual):
        v = check_via_2sat(Team(("x", "y"), [("1", "2")]), mutual)
        assert v.satisfied and verify_split(Team(("x", "y"), [("1", "2")]), v.certificate, mutual)


class TestTeamGraph:
    def test_four_cycle_graph(self, gt_team):
        g = build_team_graph(gt_team, "x", "y")
        assert g.num_nodes == 4 and g.num_edges == 4
        assert set(g.nodes) == {("0", "left"), ("1", "left"), ("0h", "right"), ("1h", "right")}

    def test_tagging_prevents_self_loops(self):
        g = build_team_graph(Team(("x", "y"), [("a", "a")]), "x", "y")
        assert g.num_nodes == 2 and g.num_edges == 1

    def test_family_graph_shape(self):
        t6 = incoherence_family(FormulaPattern.MUTUAL_UNARY, 6)
        g = build_team_graph(t6, "x", "y")
        assert g.num_nodes == 6 and g.num_edges == 7
        # single component: everything reachable from node 0
        offs, eids, nbrs = g.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for k in range(offs[u], offs[u + 1]):
                w = nbrs[k]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        assert len(seen) == 6


class TestMutualEngine:
    def test_four_cycle_satisfied(self, gt_team, mutual):
        v = check_mutual_unary(gt_team, mutual)
        assert v.satisfied
        assert v.stats["nodes"] == 4 and v.stats["edges"] == 4 and v.stats["components"] == 1
        assert verify_split(gt_team, v.certificate, mutual)
        assert v.certificate.left_rows == frozenset({0, 3})

    def test_family_refuted(self, mutual):
        t6 = incoherence_family(FormulaPattern.MUTUAL_UNARY, 6)
        v = check_mutual_unary(t6, mutual)
        assert not v.satisfied and v.stats["size_bound_fired"]

    def test_two_disjoint_cycles_satisfied(self, mutual):
        rows = [("0", "0h"), ("0", "1h"), ("1", "0h"), ("1", "1h"),
                ("5", "5h"), ("5", "6h"), ("6", "5h"), ("6", "6h")]
        team = Team(("x", "y"), rows)
        v = check_mutual_unary(team, mutual)
        assert v.satisfied and v.stats["components"] == 2
        assert cover_oracle(team, mutual)
        assert verify_split(team, v.certificate, mutual)

    def test_rejects_non_mutual_formula(self, gt_team):
        with pytest.raises(FormulaShapeError):
            check_mutual_unary(gt_team, disjunction(atom("x", "y"), atom("x", "y")))

    def test_renamed_mutual_accepted(self):
        f = disjunction(atom("b", "a"), atom("a", "b"))
        team = Team(("a", "b"), [("1", "2")])
        assert check_mutual_unary(team, f).satisfied

    def test_extra_columns_restricted_first(self, mutual):
        team = Team(("x", "y", "junk"), [("1", "2", "7"), ("1", "2", "8")])
        v = check_mutual_unary(team, mutual)
        assert v.satisfied and v.stats["rows"] == 1
        assert verify_split(team, v.certificate, mutual)


class TestOrientation:
    def test_four_cycle_orientation_matches_figure(self, gt_team, mutual):
        g = build_team_graph(gt_team, "x", "y")
        cert = orient_components(g)
        assert verify_split(gt_team, cert, mutual)
        assert cert.left_rows == frozenset({0, 3}) and cert.right_rows == frozenset({1, 2})

    def test_single_edge(self, mutual):
        team = Team(("x", "y"), [("a", "b")])
        cert = orient_components(build_team_graph(team, "x", "y"))
        assert verify_split(team, cert, mutual)

    def test_three_node_path(self, mutual):
        team = Team(("x", "y"), [("a", "m"), ("b", "m")])
        cert = orient_components(build_team_graph(team, "x", "y"))
        assert verify_split(team, cert, mutual)

    def test_impossible_orientation_raises(self):
        rows = [(a, b) for a in "12" for b in "123"]
        g = build_team_graph(Team(("x", "y"), rows), "x", "y")
        with pytest.raises(OrientationError):
            orient_components(g)

    def test_component_criterion_equivalence(self, mutual):
        rng = random.Random(23)
        for _ in range(300):
            rows = {
                (str(rng.randint(0, 4)), str(rng.randint(0, 4)))
                for _ in range(rng.randint(0, 12))
            }
            team = Team(("x", "y"), sorted(rows))
            verdict = check_mutual_unary(team, mutual)
            graph = build_team_graph(team, "x", "y")
            try:
                cert = orient_components(graph)
                orientable = True
            except OrientationError:
                orientable = False
            assert orientable == verdict.satisfied == check_bruteforce(team, mutual).satisfied
            if orientable:
                assert verify_split(team, cert, mutual)


class TestSizeBound:
    def test_family_rejected(self):
        t6 = incoherence_family(FormulaPattern.MUTUAL_UNARY, 6)
        assert size_bound_reject(t6, "x", "y") is False

    def test_four_cycle_no_conclusion(self, gt_team):
        assert size_bound_reject(gt_team, "x", "y") is None

    def test_empty_no_conclusion(self):
        assert size_bound_reject(Team(("x", "y"), []), "x", "y") is None

    def test_never_fires_on_satisfiable(self, mutual):
        rng = random.Random(5)
        for _ in range(400):
            rows = {
                (str(rng.randint(0, 3)), str(rng.randint(0, 3)))
                for _ in range(rng.randint(0, 10))
            }
            team = Team(("x", "y"), sorted(rows))
            if size_bound_reject(team, "x", "y") is False:
                assert not check_bruteforce(team, mutual).satisfied


class TestCoherentEngine:
    def test_counterexample_full_team_fails(self, team_a, formula_a):
        v = check_coherent_case(team_a, formula_a, 4)
        assert not v.satisfied and v.stats["failing_subteam"] == [0, 1, 2, 3]

    def test_three_row_subteams_pass(self, team_a, formula_a):
        from itertools import combinations

        for combo in combinations(range(4), 3):
            v = check_coherent_case(team_a.subteam(combo), formula_a, 4)
            assert v.satisfied and verify_split(team_a.subteam(combo), v.certificate, formula_a)

    def test_three_target_values_cannot_split(self):
        team = Team(("x", "y"), [("1", "1"), ("1", "2"), ("1", "3")])
        f = disjunction(atom("x", "y"), atom("x", "y"))
        assert not check_coherent_case(team, f, 3).satisfied

    def test_incoherent_formula_rejected(self, mutual, gt_team):
        with pytest.raises(ClassificationError):
            check_coherent_case(gt_team, mutual, 4)

    def test_greedy_certificates_agree_with_2sat(self, formula_b):
        rng = random.Random(9)
        for _ in range(300):
            rows = [
                tuple(str(rng.randint(1, 3)) for _ in range(3))
                for _ in range(rng.randint(0, 10))
            ]
            team = Team(("x", "y", "z"), rows)
            vc = check_coherent_case(team, formula_b, 6)
            vs = check_via_2sat(team, formula_b)
            assert vc.satisfied == vs.satisfied
            if vc.satisfied:
                assert verify_split(team, vc.certificate, formula_b)
