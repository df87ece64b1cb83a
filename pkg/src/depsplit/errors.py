"""Exception hierarchy shared by all depsplit modules."""


class DepsplitError(Exception):
    """Base class for every error raised by this package."""


class DomainMismatchError(DepsplitError):
    """A variable is missing from a team, or a team has the wrong domain."""


class FormulaError(DepsplitError):
    """An atom or formula breaks a well-formedness rule (e.g. duplicate variables)."""


class FormulaShapeError(DepsplitError):
    """An engine was invoked on a formula pattern it does not handle."""


class ClassificationError(DepsplitError):
    """A coherence-based engine was invoked on a formula that is not coherent."""


class CertificateError(DepsplitError):
    """A split certificate references rows that do not exist."""


class SizeLimitError(DepsplitError):
    """An exact procedure was asked to run past its configured size cap."""


class OrientationError(DepsplitError):
    """A team graph cannot be oriented (some component has more edges than nodes)."""


class InvalidInstanceError(DepsplitError):
    """A reduction input violates its structural preconditions."""


class MtdfValidationError(InvalidInstanceError):
    """A clause set is not monotone/transitive/dual-free.

    ``violations`` holds one entry per violated condition, each with a
    witnessing clause (pair).
    """

    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"not a valid monotone/transitive/dual-free clause set: {lines}")


class ConfigError(DepsplitError):
    """A generator or CLI configuration is inconsistent."""


class ParseError(DepsplitError):
    """Malformed textual input (formula, team file, DIMACS, JSON schema)."""
