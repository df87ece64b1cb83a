import random
import warnings

import pytest

from depsplit import (
    ClassificationError,
    DependenceAtom,
    DomainMismatchError,
    FormulaShapeError,
    Team,
    atom,
    check_bruteforce,
    disjunction,
    verify_split,
)
from depsplit.classifier import (
    Classification,
    FormulaPattern,
    classify,
    dispatch,
    normalize_higher_arity,
)

from conftest import FORMULA_POOL, pool_instance


def dep(*names):
    return atom(*names)


TABLE_ROWS = [
    (disjunction(dep("x", "y"), dep("z", "u")), FormulaPattern.DISJOINT_UNARY, "NL-complete", "incoherent"),
    (disjunction(dep("x", "z"), dep("y", "z")), FormulaPattern.SHARED_TARGET_UNARY, "NL-complete", "incoherent"),
    (disjunction(dep("x", "y"), dep("y", "z")), FormulaPattern.CHAIN_UNARY, "NL-complete", "incoherent"),
    (disjunction(dep("x", "y"), dep("y", "x")), FormulaPattern.MUTUAL_UNARY, "L-complete", "incoherent"),
    (disjunction(dep("x", "y"), dep("x", "y")), FormulaPattern.IDENTICAL_ATOMS, "FO-definable", 3),
    (disjunction(dep("x", "y"), dep("x", "z")), FormulaPattern.SAME_SOURCE_UNARY, "FO-definable", 4),
]


class TestClassifyUnary:
    @pytest.mark.parametrize("f,pattern,complexity,coherence", TABLE_ROWS)
    def test_table_rows(self, f, pattern, complexity, coherence):
        c = classify(f)
        assert (c.pattern, c.complexity, c.coherence) == (pattern, complexity, coherence)

    def test_engines_match_complexity(self):
        assert classify(disjunction(dep("x", "z"), dep("y", "z"))).engine == "2sat"
        assert classify(disjunction(dep("x", "y"), dep("y", "x"))).engine == "graph"
        assert classify(disjunction(dep("x", "y"), dep("x", "z"))).engine == "coherent"

    def test_constancy_patterns(self):
        c = classify(disjunction(dep("y"), dep("z")))
        assert (c.pattern, c.coherence) == (FormulaPattern.CONSTANCY_PAIR, 4)
        c = classify(disjunction(dep("x"), dep("x", "y")))
        assert (c.pattern, c.coherence) == (FormulaPattern.CONSTANCY_MIX_DETERMINER, 4)
        # the disjoint and target-sharing mixes have level 6: the published
        # level-4 claim is refuted by an explicit 6-row team
        c = classify(disjunction(dep("x"), dep("y", "z")))
        assert (c.pattern, c.coherence) == (FormulaPattern.CONSTANCY_MIX_DISJOINT, 6)
        assert c.derived_extension
        c = classify(disjunction(dep("y"), dep("x", "y")))
        assert (c.pattern, c.coherence) == (FormulaPattern.CONSTANCY_MIX_TARGET, 6)
        assert c.derived_extension

    def test_identical_constancy_is_a_derived_extension(self):
        c = classify(disjunction(dep("x"), dep("x")))
        assert (c.pattern, c.complexity, c.coherence) == (
            FormulaPattern.IDENTICAL_ATOMS,
            "FO-definable",
            3,
        )
        assert c.derived_extension

    def test_mirrored_patterns_get_identical_labels(self):
        for f, pattern, complexity, coherence in TABLE_ROWS:
            m = disjunction(f.right, f.left)
            c = classify(m)
            assert (c.complexity, c.coherence) == (complexity, coherence)

    def test_renaming_invariance(self):
        rng = random.Random(1)
        for f in FORMULA_POOL:
            base = classify(f)
            names = list(set(f.free_variables()))
            fresh = {v: f"n{idx}" for idx, v in enumerate(rng.sample(names, len(names)))}

            def rn(a):
                return DependenceAtom(tuple(fresh[v] for v in a.determiners), fresh[a.target])

            c = classify(disjunction(rn(f.left), rn(f.right)))
            assert (c.pattern, c.complexity, c.coherence) == (
                base.pattern,
                base.complexity,
                base.coherence,
            )

    def test_determiner_permutation_invariance(self):
        f1 = disjunction(DependenceAtom(("x", "y"), "z"), DependenceAtom(("u", "v", "w"), "q"))
        f2 = disjunction(DependenceAtom(("y", "x"), "z"), DependenceAtom(("w", "u", "v"), "q"))
        a, b = classify(f1), classify(f2)
        assert (a.pattern, a.complexity, a.coherence) == (b.pattern, b.complexity, b.coherence)


class TestClassifyHigherArity:
    def test_contained_proper(self):
        f = disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("x1", "x2", "x3"), "u"))
        c = classify(f)
        assert c.pattern is FormulaPattern.HIGHER_ARITY_CONTAINED
        assert c.complexity == "FO-definable" and c.coherence == 6

    def test_contained_equal_sets(self):
        f = disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("x2", "x1"), "u"))
        c = classify(f)
        assert c.pattern is FormulaPattern.HIGHER_ARITY_CONTAINED and c.coherence == 4

    def test_incomparable(self):
        f = disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("x2", "x3"), "u"))
        c = classify(f)
        assert c.pattern is FormulaPattern.HIGHER_ARITY_INCOMPARABLE
        assert c.complexity == "NL-complete" and c.coherence == "incoherent"

    def test_identical_higher_arity(self):
        f = disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("x2", "x1"), "z"))
        c = classify(f)
        assert c.pattern is FormulaPattern.IDENTICAL_ATOMS and c.coherence == 3

    def test_target_overlap_unsupported(self):
        f = disjunction(DependenceAtom(("x",), "z"), DependenceAtom(("z", "x"), "u"))
        c = classify(f)
        assert c.pattern is FormulaPattern.UNSUPPORTED
        assert c.complexity == "unknown" and c.coherence == "unknown" and c.engine == "2sat"

    def test_constancy_with_higher_arity_contained(self):
        f = disjunction(DependenceAtom((), "z"), DependenceAtom(("x", "y"), "u"))
        c = classify(f)
        assert c.pattern is FormulaPattern.HIGHER_ARITY_CONTAINED and c.coherence == 6

    def test_invariants_of_classification(self):
        with pytest.raises(ClassificationError):
            Classification(FormulaPattern.MUTUAL_UNARY, "L-complete", 4, "graph")
        with pytest.raises(ClassificationError):
            Classification(FormulaPattern.IDENTICAL_ATOMS, "FO-definable", "incoherent", "coherent")


class TestNormalize:
    def test_pair_column_holds_tuples(self):
        f = disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("u",), "v"))
        team = Team(
            ("x1", "x2", "z", "u", "v"),
            [("1", "2", "3", "4", "5"), ("1", "2", "3", "4", "6")],
        )
        f2, t2 = normalize_higher_arity(f, team)
        assert f2.left.determiners == ("(x1,x2)",)
        assert f2.right == f.right
        assert t2.vars == ("(x1,x2)", "z", "u", "v")
        assert t2.rows[0][0] == ("1", "2")

    def test_shared_prefix_containment(self):
        f = disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("x1", "x2"), "u"))
        team = Team(("x1", "x2", "z", "u"), [("1", "2", "3", "4")])
        f2, _ = normalize_higher_arity(f, team)
        assert f2.left.determiners == f2.right.determiners == ("(x1,x2)",)
        assert classify(f2).pattern is FormulaPattern.SAME_SOURCE_UNARY

    def test_mixed_base_case_shape(self):
        f = disjunction(DependenceAtom(("x",), "z"), DependenceAtom(("x", "y1", "y2"), "u"))
        team = Team(("x", "y1", "y2", "z", "u"), [("1", "2", "3", "4", "5")])
        f2, _ = normalize_higher_arity(f, team)
        assert f2.left == f.left
        assert f2.right.determiners == ("x", "(y1,y2)")

    def test_all_unary_noop_warns(self, gt_team, mutual):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            f2, t2 = normalize_higher_arity(mutual, gt_team)
        assert (f2, t2) == (mutual, gt_team) and caught

    def test_fresh_name_avoids_collision(self):
        f = disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("u",), "v"))
        team = Team(
            ("x1", "x2", "z", "u", "v", "(x1,x2)"),
            [("1", "2", "3", "4", "5", "6")],
        )
        f2, t2 = normalize_higher_arity(f, team)
        assert f2.left.determiners == ("(x1,x2)'",)

    def test_verdicts_preserved_through_normalization(self):
        rng = random.Random(77)
        shapes = [
            disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("u",), "v")),
            disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("x1", "x2"), "u")),
            disjunction(DependenceAtom(("x1",), "z"), DependenceAtom(("x1", "x2"), "u")),
            disjunction(DependenceAtom(("x1", "x2"), "z"), DependenceAtom(("x2", "x3"), "u")),
        ]
        for _ in range(120):
            f = rng.choice(shapes)
            vars_ = sorted(set(f.free_variables()))
            rows = [
                tuple(str(rng.randint(1, 3)) for _ in vars_)
                for _ in range(rng.randint(0, 9))
            ]
            team = Team(vars_, rows)
            f2, t2 = normalize_higher_arity(f, team)
            assert len(t2) == len(team)
            assert check_bruteforce(team, f).satisfied == check_bruteforce(t2, f2).satisfied


class TestDispatch:
    def test_mutual_goes_to_graph_engine(self, gt_team, mutual):
        v = dispatch(gt_team, mutual)
        assert v.engine == "graph" and v.satisfied
        assert v.stats["pattern"] == "mutual-unary"

    def test_constancy_mix_on_figure_team(self, team_b, formula_b):
        v = dispatch(team_b, formula_b)
        assert v.engine == "coherent" and not v.satisfied

    def test_unsupported_falls_back_to_2sat(self):
        f = disjunction(DependenceAtom(("x",), "z"), DependenceAtom(("z", "x"), "u"))
        team = Team(("x", "z", "u"), [("1", "2", "3"), ("1", "3", "4")])
        v = dispatch(team, f)
        assert v.engine == "2sat"
        assert v.satisfied == check_bruteforce(team, f).satisfied

    def test_engine_override(self, gt_team, mutual):
        assert dispatch(gt_team, mutual, engine="brute").engine == "brute"
        assert dispatch(gt_team, mutual, engine="2sat").engine == "2sat"
        with pytest.raises(FormulaShapeError):
            dispatch(gt_team, mutual, engine="bogus")

    def test_graph_override_on_wrong_shape_propagates(self, gt_team):
        with pytest.raises(FormulaShapeError):
            dispatch(gt_team, disjunction(atom("x", "y"), atom("x", "y")), engine="graph")

    def test_missing_variables_rejected(self, gt_team):
        with pytest.raises(DomainMismatchError):
            dispatch(gt_team, disjunction(atom("q", "y"), atom("y", "q")))

    def test_matches_bruteforce_across_pool(self):
        rng = random.Random(4)
        for _ in range(400):
            team, f = pool_instance(rng, max_rows=10, max_range=3)
            v = dispatch(team, f)
            assert v.satisfied == check_bruteforce(team, f).satisfied
            if v.satisfied:
                assert verify_split(team, v.certificate, f)
