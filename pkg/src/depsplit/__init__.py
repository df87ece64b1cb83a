"""depsplit: model checking for disjunctions of two dependence atoms.

Decides whether a team (a relational table read as a set of assignments)
splits into two parts, each satisfying one functional-dependency atom;
classifies the formula's model-checking complexity (NL-complete, L-complete,
or first-order definable); produces independently verifiable split
certificates; and ships the hardness reductions and coherence machinery the
classification rests on.
"""

from .core import (
    DependenceAtom,
    DisjunctionFormula,
    SplitCertificate,
    Team,
    atom,
    column_range,
    disjunction,
    restrict,
    satisfies_atom,
    verify_split,
)
from .classifier import (
    Classification,
    FormulaPattern,
    classify,
    dispatch,
    normalize_higher_arity,
)
from .engines import (
    TeamGraph,
    TwoCnf,
    Verdict,
    build_team_graph,
    check_bruteforce,
    check_coherent_case,
    check_mutual_unary,
    check_via_2sat,
    orient_components,
    reduce_to_2cnf,
    size_bound_reject,
    solve_2cnf,
)
from .errors import (
    CertificateError,
    ClassificationError,
    ConfigError,
    DepsplitError,
    DomainMismatchError,
    FormulaError,
    FormulaShapeError,
    InvalidInstanceError,
    MtdfValidationError,
    OrientationError,
    ParseError,
    SizeLimitError,
)
from .coherence import (
    CoherenceSearchResult,
    CoherenceWitness,
    counterexample_team,
    family_formula,
    incoherence_family,
    search_coherence_level,
    verify_incoherence_witness,
)
from .reductions import (
    CnfInstance,
    MtdfInstance,
    MtdfSolution,
    UfaInstance,
    mtdf_to_team,
    mtdf_violations,
    parse_dimacs,
    solve_mtdf,
    team_to_mtdf,
    twosat_to_team_chain,
    twosat_to_team_disjoint,
    twosat_to_team_shared_target,
    ufa_complement_to_team,
    validate_mtdf,
)
from .generate import GeneratorConfig, generate_team
from .report import RunReport, build_report, team_digest, verify_report_certificate
from .teamio import load_team, load_team_detailed, parse_formula, save_team

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
