"""Reproducible team generators, including planted mutual-pattern instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import prod

from .core import Team
from .errors import ConfigError, ParseError

MODES = ("uniform", "planted-satisfiable", "planted-unsatisfiable")

_DEFAULT_NAMES = ("x", "y", "z", "u", "v", "w")


def _var_names(columns: int):
    if columns <= len(_DEFAULT_NAMES):
        return _DEFAULT_NAMES[:columns]
    return _DEFAULT_NAMES + tuple(f"v{i}" for i in range(len(_DEFAULT_NAMES), columns))


@dataclass(frozen=True)
class GeneratorConfig:
    """Deterministic description of a generated team.

    ``ranges`` gives the number of distinct values per column (an int
    broadcasts to all columns).  The planted modes build two-column
    mutual-pattern instances: a forest-shaped team graph (satisfiable by
    construction) or one with a doubly-cyclic component (unsatisfiable).
    """

    rows: int
    columns: int = 2
    ranges: tuple = (4,)
    seed: int = 0
    mode: str = "uniform"

    def __post_init__(self):
        if isinstance(self.ranges, int):
            object.__setattr__(self, "ranges", (self.ranges,))
        ranges = tuple(self.ranges)
        if len(ranges) == 1 and self.columns > 1:
            ranges = ranges * self.columns
        object.__setattr__(self, "ranges", ranges)
        if self.rows < 0:
            raise ConfigError("rows must be non-negative")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "uniform":
            if self.columns < 1:
                raise ConfigError("uniform teams need at least one column")
            if len(ranges) != self.columns:
                raise ConfigError(
                    f"{len(ranges)} ranges given for {self.columns} columns"
                )
            if any(r < 1 for r in ranges):
                raise ConfigError("every range must be at least 1")
            if self.rows > prod(ranges):
                raise ConfigError(
                    f"cannot build {self.rows} distinct rows from a value grid of "
                    f"{prod(ranges)} cells"
                )
        else:
            if self.columns != 2:
                raise ConfigError("planted modes build two-column teams")
            if self.mode == "planted-unsatisfiable" and self.rows < 7:
                raise ConfigError("planted-unsatisfiable needs at least 7 rows")

    @classmethod
    def from_json_obj(cls, obj) -> "GeneratorConfig":
        if not isinstance(obj, dict) or "rows" not in obj:
            raise ParseError('generator config must be an object with at least "rows"')
        known = {"rows", "columns", "ranges", "seed", "mode"}
        unknown = set(obj) - known
        if unknown:
            raise ParseError(f"unknown generator config keys: {sorted(unknown)}")
        kwargs = dict(obj)
        if "ranges" in kwargs and isinstance(kwargs["ranges"], list):
            kwargs["ranges"] = tuple(kwargs["ranges"])
        try:
            return cls(**kwargs)
        except TypeError as e:
            raise ParseError(f"bad generator config: {e}") from None


def _uniform(cfg: GeneratorConfig, rng: random.Random) -> Team:
    cells = prod(cfg.ranges)
    names = _var_names(cfg.columns)
    if cfg.rows * 2 >= cells:
        grid = [[] for _ in range(cfg.columns)]
        rows = []

        def build(prefix, col):
            if col == cfg.columns:
                rows.append(tuple(prefix))
                return
            for v in range(cfg.ranges[col]):
                build(prefix + [str(v)], col + 1)

        build([], 0)
        return Team(names, rng.sample(rows, cfg.rows))
    seen = set()
    ranges = cfg.ranges
    while len(seen) < cfg.rows:
        seen.add(tuple(str(rng.randrange(r)) for r in ranges))
    return Team(names, sorted(seen))


def _planted_forest_rows(count: int, rng: random.Random, x_prefix="a", y_prefix="b"):
    """Rows of a team whose graph is a random bipartite tree on count+1 nodes
    (every component then has one more node than edges)."""
    if count == 0:
        return []
    side = [0]  # node 0 sits on the x side
    name = [f"{x_prefix}0"]
    rows = []
    randrange = rng.randrange
    for i in range(1, count + 1):
        p = randrange(i)
        s = side[p] ^ 1
        side.append(s)
        name.append(f"{x_prefix}{i}" if s == 0 else f"{y_prefix}{i}")
        if s == 0:
            rows.append((name[i], name[p]))
        else:
            rows.append((name[p], name[i]))
    return rows


_DOUBLE_CYCLE_ROWS = [
    ("q0", "w0"),
    ("q0", "w1"),
    ("q0", "w2"),
    ("q1", "w0"),
    ("q1", "w1"),
    ("q1", "w2"),
]


def generate_team(cfg: GeneratorConfig) -> Team:
    """Deterministic for a fixed config (same seed, same team, same bytes)."""
    rng = random.Random(cfg.seed)
    if cfg.mode == "uniform":
        return _uniform(cfg, rng)
    if cfg.mode == "planted-satisfiable":
        return Team(("x", "y"), _planted_forest_rows(cfg.rows, rng))
    rows = list(_DOUBLE_CYCLE_ROWS)
    rows.extend(_planted_forest_rows(cfg.rows - len(rows), rng))
    return Team(("x", "y"), rows)
