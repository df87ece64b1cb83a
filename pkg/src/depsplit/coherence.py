"""Coherence counterexamples, incoherence families, and bounded level search.

A formula has coherence level k when satisfaction by every k-row subteam is
equivalent to satisfaction by the team itself; it is incoherent when no such
k exists.  Refutations are *witness* teams: the team fails the formula while
every k-row subteam passes.

The bounded search rests on one structural fact: failing subteam sizes form
an up-set (supersets of failing teams fail, by downward closure), so the
teams that matter are the *minimal* failing ones, and the level within
bounds equals the largest minimal failing team size found.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Optional

from .classifier import FormulaPattern, dispatch
from .core import DependenceAtom, DisjunctionFormula, Team, atom, disjunction
from .engines import DEFAULT_BRUTE_CAP, _search_split, check_bruteforce
from .errors import ConfigError, FormulaShapeError


@dataclass(frozen=True)
class CoherenceWitness:
    """A refutation of k-coherence: the team fails the formula while every
    k-row subteam satisfies it."""

    team: Team
    formula: DisjunctionFormula
    k: int


def family_formula(pattern: FormulaPattern) -> DisjunctionFormula:
    if pattern is FormulaPattern.MUTUAL_UNARY:
        return disjunction(atom("x", "y"), atom("y", "x"))
    if pattern is FormulaPattern.CHAIN_UNARY:
        return disjunction(atom("x", "y"), atom("y", "z"))
    if pattern is FormulaPattern.SHARED_TARGET_UNARY:
        return disjunction(atom("x", "z"), atom("y", "z"))
    raise FormulaShapeError(f"no incoherence family for pattern {pattern}")


def _paper_cycle_rows(n: int):
    """The (n+1)-row wrap-around family for even n >= 6: row 0 pairs 1 with
    n/2, then rows walk value pairs (t,t), (t,t+1) with t+1 wrapping to 1."""
    half = n // 2
    rows = [("1", str(half))]
    labels = ["s0"]
    for t in range(1, half + 1):
        rows.append((str(t), str(t)))
        rows.append((str(t), str(t + 1) if t < half else "1"))
        labels.append(f"s{2 * t - 1}")
        labels.append(f"s{2 * t}")
    return rows, labels


_K23_ROWS = [
    ("1", "1"),
    ("1", "2"),
    ("1", "3"),
    ("2", "1"),
    ("2", "2"),
    ("2", "3"),
]
_K23_COLORS = ["1", "2", "3", "2", "3", "1"]


def _paper_cycle_colors(n: int):
    """Third column of the shared-target family: 3 on row 0, then 1/2
    alternating; distinct within every first- and second-column group."""
    colors = ["3"]
    for i in range(1, n + 1):
        colors.append("1" if i % 2 == 1 else "2")
    return colors


def incoherence_family(pattern: FormulaPattern, n: int) -> Team:
    """A verified witness team refuting n-coherence of the given pattern.

    For even n >= 6 this is the wrap-around cycle family of n+1 rows (with a
    copied column for the chain pattern and a conflict-free coloring column
    for the shared-target pattern).  At n = 4 no such (n+1)-row team exists:
    a failing 5-row two-column team would need a graph component with more
    edges than nodes, which a bipartite graph on at most 4 values cannot
    provide once every 4-row subteam must pass.  The complete bipartite
    2-by-3 team (6 rows) is the smallest witness and is returned instead.
    """
    if n % 2 != 0 or n < 4:
        raise ConfigError(f"family parameter must be an even integer >= 4, got {n}")
    formula = family_formula(pattern)
    if n == 4:
        base, colors = _K23_ROWS, _K23_COLORS
        labels = [f"s{i}" for i in range(len(base))]
    else:
        base, labels = _paper_cycle_rows(n)
        colors = _paper_cycle_colors(n)
    if pattern is FormulaPattern.MUTUAL_UNARY:
        return Team(("x", "y"), base, labels)
    if pattern is FormulaPattern.CHAIN_UNARY:
        rows = [(x, y, x) for x, y in base]
        return Team(("x", "y", "z"), rows, labels)
    rows = [(x, y, c) for (x, y), c in zip(base, colors)]
    return Team(("x", "y", "z"), rows, labels)


_COUNTEREXAMPLES = {
    FormulaPattern.SAME_SOURCE_UNARY: (
        ("x", "y", "z"),
        [("1", "1", "1"), ("1", "1", "2"), ("1", "2", "1"), ("1", "2", "2")],
        disjunction(atom("x", "y"), atom("x", "z")),
        3,
    ),
    FormulaPattern.CONSTANCY_MIX_DISJOINT: (
        ("x", "y", "z"),
        [("1", "1", "1"), ("1", "1", "2"), ("2", "2", "1"), ("2", "2", "2")],
        disjunction(atom("x"), atom("y", "z")),
        3,
    ),
    FormulaPattern.CONSTANCY_MIX_DETERMINER: (
        ("x", "y"),
        [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")],
        disjunction(atom("x"), atom("x", "y")),
        3,
    ),
    # The published table lists this team transposed; read as printed, its
    # first column is a key and the whole team satisfies dep(x, y).
    FormulaPattern.CONSTANCY_MIX_TARGET: (
        ("x", "y"),
        [("1", "1"), ("1", "2"), ("2", "3"), ("2", "4")],
        disjunction(atom("y"), atom("x", "y")),
        3,
    ),
    FormulaPattern.IDENTICAL_ATOMS: (
        ("x", "y"),
        [("1", "1"), ("1", "2"), ("1", "3")],
        disjunction(atom("x", "y"), atom("x", "y")),
        2,
    ),
    FormulaPattern.CONSTANCY_PAIR: (
        ("y", "z"),
        [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")],
        disjunction(atom("y"), atom("z")),
        3,
    ),
}


def counterexample_team(pattern: FormulaPattern) -> CoherenceWitness:
    """The stored fixed team refuting (level-1)-coherence of a coherent
    pattern; raises for patterns without a stored witness."""
    try:
        vars_, rows, formula, k = _COUNTEREXAMPLES[pattern]
    except KeyError:
        raise FormulaShapeError(f"no stored counterexample for pattern {pattern}") from None
    labels = [f"s{i + 1}" for i in range(len(rows))]
    return CoherenceWitness(Team(vars_, rows, labels), formula, k)


def verify_incoherence_witness(w: CoherenceWitness) -> bool:
    """True iff the team fails the formula and every k-row subteam passes.

    The full team goes through engine dispatch; subteams small enough for
    the brute-force cap are checked by brute force.
    """
    if dispatch(w.team, w.formula).satisfied:
        return False
    n = len(w.team)
    for combo in combinations(range(n), min(w.k, n)):
        sub = w.team.subteam(combo)
        if len(sub) <= DEFAULT_BRUTE_CAP:
            verdict = check_bruteforce(sub, w.formula)
        else:
            verdict = dispatch(sub, w.formula)
        if not verdict.satisfied:
            return False
    return True


# ---------------------------------------------------------------------------
# Bounded coherence-level search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherenceSearchResult:
    """Outcome of the bounded search; exact within the stated bounds."""

    formula: str
    max_rows: int
    max_range: int
    incoherent_up_to_bound: bool
    level: Optional[int]
    minimal_refutation_sizes: tuple
    witness: Optional[Team]

    def describe(self) -> str:
        if self.incoherent_up_to_bound:
            return (
                f"incoherent up to {self.max_rows} rows "
                f"(minimal failing teams at sizes {list(self.minimal_refutation_sizes)})"
            )
        return f"coherence level {self.level} (exact within bounds)"


def _reduce_search_formula(f: DisjunctionFormula) -> DisjunctionFormula:
    """Drop shared determiners when one determiner set contains the other.

    Rows of a minimal failing team must agree on the shared determiners (two
    rows differing there satisfy both atoms, so each projection class would
    fail separately), and on such teams the shared columns are dead weight.
    """
    la, ra = f.left, f.right
    d1, d2 = set(la.determiners), set(ra.determiners)
    if d1 <= d2:
        shared = d1
    elif d2 <= d1:
        shared = d2
    else:
        return f
    if not shared:
        return f
    la2 = DependenceAtom(tuple(v for v in la.determiners if v not in shared), la.target)
    ra2 = DependenceAtom(tuple(v for v in ra.determiners if v not in shared), ra.target)
    return DisjunctionFormula(la2, ra2)


def _canonical_formula_key(f: DisjunctionFormula) -> str:
    names = {}

    def nm(v):
        if v not in names:
            names[v] = f"v{len(names)}"
        return names[v]

    return "|".join(
        "dep(" + ",".join(nm(v) for v in a.variables()) + ")" for a in (f.left, f.right)
    )


def _atom_specs(f: DisjunctionFormula, cols):
    pos = {c: i for i, c in enumerate(cols)}
    return (
        (tuple(pos[v] for v in f.left.determiners), pos[f.left.target]),
        (tuple(pos[v] for v in f.right.determiners), pos[f.right.target]),
    )


def _rows_satisfy(rows, spec_left, spec_right) -> bool:
    n = len(rows)
    if n <= 2:
        return True
    d1, t1 = spec_left
    d2, t2 = spec_right
    vl = [0] * n
    vr = [0] * n
    conflict = False
    for a in range(n):
        ra = rows[a]
        for b in range(a + 1, n):
            rb = rows[b]
            if ra[t1] != rb[t1]:
                for p in d1:
                    if ra[p] != rb[p]:
                        break
                else:
                    vl[a] |= 1 << b
                    vl[b] |= 1 << a
                    conflict = True
            if ra[t2] != rb[t2]:
                for p in d2:
                    if ra[p] != rb[p]:
                        break
                else:
                    vr[a] |= 1 << b
                    vr[b] |= 1 << a
                    conflict = True
    if not conflict:
        return True
    return _search_split(n, vl, vr) is not None


def _is_minimal_unsat(rows, spec_left, spec_right) -> bool:
    if _rows_satisfy(rows, spec_left, spec_right):
        return False
    return all(
        _rows_satisfy(rows[:i] + rows[i + 1 :], spec_left, spec_right)
        for i in range(len(rows))
    )


def _theta_rows(long_arm: int):
    """Two-column team whose graph is a theta: hubs A and B joined by two
    2-edge arms and one long even arm.  Every edge lies on a cycle and there
    is exactly one edge more than nodes, so the team is minimally failing
    for the mutual pattern."""
    rows = [("A", "r1"), ("B", "r1"), ("A", "r2"), ("B", "r2")]
    left_prev = "A"
    for i in range(1, long_arm, 2):
        right = f"m{i}"
        rows.append((left_prev, right))
        nxt = "B" if i + 1 == long_arm else f"m{i + 1}"
        rows.append((nxt, right))
        left_prev = nxt
    return rows


def _mutual_minimal_unsat_rows(size: int):
    """A minimal failing two-column team of exactly ``size`` rows for the
    mutual pattern, or None (none exists below 6 rows)."""
    if size < 6:
        return None
    if size % 2 == 1:
        rows, _ = _paper_cycle_rows(size - 1)
        return rows
    return _theta_rows(size - 4)


def _proper_row_coloring(rows):
    """Greedy color per row, distinct within every first-column group and
    every second-column group."""
    colors = []
    for i, (x, y) in enumerate(rows):
        used = {
            colors[j]
            for j in range(i)
            if rows[j][0] == x or rows[j][1] == y
        }
        c = 1
        while str(c) in used:
            c += 1
        colors.append(str(c))
    return colors


def _seed_candidates(f_red, cols, max_rows, max_range):
    """Candidate witness teams of exactly max_rows rows, built by mapping the
    columns of the formula onto a minimal failing mutual-pattern team (plus
    copied, colored, or constant columns)."""
    base = _mutual_minimal_unsat_rows(max_rows)
    if base is None or len(cols) < 2:
        return
    base_x = [r[0] for r in base]
    base_y = [r[1] for r in base]
    derived = {
        "copy_x": base_x,
        "copy_y": base_y,
        "color": _proper_row_coloring(base),
        "const": ["0"] * len(base),
    }
    for cx, cy in permutations(cols, 2):
        others = [c for c in cols if c != cx and c != cy]
        for assign in product(("copy_x", "copy_y", "color", "const"), repeat=len(others)):
            columns = {cx: base_x, cy: base_y}
            for c, role in zip(others, assign):
                columns[c] = derived[role]
            rows = list(zip(*(columns[c] for c in cols)))
            if len(set(rows)) != len(base):
                continue
            if any(len(set(col)) > max_range for col in zip(*rows)):
                continue
            yield rows


class _Done(Exception):
    pass


def _exhaustive_minimal_sizes(f_red, cols, max_rows, max_range):
    """Enumerate teams up to column-value isomorphism (rows kept in sorted
    order, each column introducing values 0, 1, 2, ... in order — every
    isomorphism class contains such a representative) and collect the sizes
    of minimal failing teams.  Satisfied teams are extended; failing ones
    are closed off, since their supersets cannot be minimal.

    Conflict masks are maintained incrementally: a candidate row that
    conflicts with nobody keeps the team satisfied and needs no split
    search at all.
    """
    ncols = len(cols)
    (d1, t1), (d2, t2) = _atom_specs(f_red, cols)
    # With a constancy atom on one side, the split search degenerates: the
    # constant part is (a subset of) one value class of that atom's target
    # column, so feasibility is a linear scan over value classes.
    const_side = None
    if not d1:
        const_side = ("left", t1)
    elif not d2:
        const_side = ("right", t2)
    found = {}
    team = [tuple([0] * ncols)]
    vl = [0]
    vr = [0]

    def feasible(n, dropped=-1):
        if const_side is None:
            if dropped < 0:
                return _search_split(n, vl, vr) is not None
            sub = [i for i in range(n) if i != dropped]
            remap = {i: j for j, i in enumerate(sub)}
            svl = [0] * len(sub)
            svr = [0] * len(sub)
            for j, i in enumerate(sub):
                m = vl[i]
                while m:
                    low = m & -m
                    k = low.bit_length() - 1
                    if k != dropped:
                        svl[j] |= 1 << remap[k]
                    m ^= low
                m = vr[i]
                while m:
                    low = m & -m
                    k = low.bit_length() - 1
                    if k != dropped:
                        svr[j] |= 1 << remap[k]
                    m ^= low
            return _search_split(len(sub), svl, svr) is not None
        side, tpos = const_side
        other = vr if side == "left" else vl
        classes = {}
        for i in range(n):
            if i == dropped:
                continue
            v = team[i][tpos]
            classes[v] = classes.get(v, 0) | (1 << i)
        alive = ((1 << n) - 1) & ~(1 << dropped if dropped >= 0 else 0)
        for cm in list(classes.values()) + [0]:
            rest = alive & ~cm
            m = rest
            ok = True
            while m:
                low = m & -m
                if other[low.bit_length() - 1] & rest:
                    ok = False
                    break
                m ^= low
            if ok:
                return True
        return False

    def extend(maxima, last):
        size = len(team)
        if size >= max_rows:
            return
        bit = 1 << size
        caps = [min(m + 1, max_range - 1) for m in maxima]
        for cand in product(*(range(cap + 1) for cap in caps)):
            if cand <= last:
                continue
            nl = 0
            nr = 0
            for i in range(size):
                row = team[i]
                if row[t1] != cand[t1]:
                    for p in d1:
                        if row[p] != cand[p]:
                            break
                    else:
                        nl |= 1 << i
                if row[t2] != cand[t2]:
                    for p in d2:
                        if row[p] != cand[p]:
                            break
                    else:
                        nr |= 1 << i
            team.append(cand)
            vl.append(nl)
            vr.append(nr)
            m = nl
            while m:
                low = m & -m
                vl[low.bit_length() - 1] |= bit
                m ^= low
            m = nr
            while m:
                low = m & -m
                vr[low.bit_length() - 1] |= bit
                m ^= low
            sat = (not nl and not nr) or feasible(size + 1)
            if sat:
                extend([max(m0, v) for m0, v in zip(maxima, cand)], cand)
            else:
                minimal = all(feasible(size + 1, dropped=i) for i in range(size))
                if minimal:
                    s = size + 1
                    if s not in found:
                        found[s] = list(team)
                    if s == max_rows:
                        raise _Done
            team.pop()
            vl.pop()
            vr.pop()
            unbit = ~bit
            for i in range(size):
                vl[i] &= unbit
                vr[i] &= unbit

    try:
        extend([0] * ncols, team[0])
    except _Done:
        pass
    return found


_search_cache: dict = {}


def search_coherence_level(
    f: DisjunctionFormula, max_rows: int = 7, max_range: int = 4
) -> CoherenceSearchResult:
    """Least k (within bounds) with no team refuting k-coherence, or
    "incoherent up to max_rows" when refutations exist at every probed size.

    Two phases: a cheap hunt for a max_rows-sized minimal failing team built
    from mutual-pattern scaffolds (one such team refutes every probed level
    at once), then an exhaustive canonical enumeration when the hunt fails.
    Results are exact within the bounds and cached per formula shape.
    """
    if max_rows < 3:
        raise ConfigError(f"max_rows must be at least 3, got {max_rows}")
    if max_range < 2:
        raise ConfigError(f"max_range must be at least 2, got {max_range}")
    f_red = _reduce_search_formula(f)
    key = (_canonical_formula_key(f_red), max_rows, max_range)
    cached = _search_cache.get(key)
    if cached is not None:
        return CoherenceSearchResult(
            str(f),
            max_rows,
            max_range,
            cached.incoherent_up_to_bound,
            cached.level,
            cached.minimal_refutation_sizes,
            cached.witness,
        )
    cols = f_red.free_variables()
    spec_left, spec_right = _atom_specs(f_red, cols)

    witness_rows = None
    sizes = set()
    for rows in _seed_candidates(f_red, cols, max_rows, max_range):
        if _is_minimal_unsat(rows, spec_left, spec_right):
            witness_rows = rows
            sizes.add(len(rows))
            break
    if witness_rows is None:
        found = _exhaustive_minimal_sizes(f_red, cols, max_rows, max_range)
        sizes = set(found)
        if sizes:
            witness_rows = found[max(sizes)]

    incoherent = max_rows in sizes
    level = None if incoherent else (max(sizes) if sizes else 1)
    witness = None
    if witness_rows is not None:
        witness = Team(cols, [tuple(str(v) for v in row) for row in witness_rows])
    result = CoherenceSearchResult(
        str(f),
        max_rows,
        max_range,
        incoherent,
        level,
        tuple(sorted(sizes)),
        witness,
    )
    _search_cache[key] = result
    return result
