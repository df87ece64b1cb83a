"""Text formats: the formula grammar, team files (CSV/JSON), and the JSON
instance formats for the reduction inputs.

Values are text everywhere and compared only by equality, so "01" and "1"
are different symbols; integers in JSON are accepted and stringified, floats
are rejected.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .core import DependenceAtom, DisjunctionFormula, Team
from .errors import DomainMismatchError, ParseError
from .reductions import MtdfInstance, UfaInstance

# ---------------------------------------------------------------------------
# Formula grammar:  formula := atom "|" atom ;  atom := "dep(" ident ("," ident)* ")"
# The last identifier of an atom is its target.
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(dep\b|[A-Za-z_][A-Za-z0-9_']*|[(),|])")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"formula syntax error at position {pos}: {text[pos:pos+10]!r}")
            break
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


def parse_formula(text: str) -> DisjunctionFormula:
    """Parse ``dep(a, ..., t) | dep(b, ..., u)``; whitespace-insensitive.

    The last identifier in an atom is the target; a single identifier makes
    a constancy atom.  Duplicate variables inside one atom are rejected.
    """
    tokens = _tokenize(text)
    idx = 0

    def expect(kind):
        nonlocal idx
        if idx >= len(tokens):
            raise ParseError(f"formula ended early, expected {kind!r}")
        tok, pos = tokens[idx]
        if kind == "ident":
            if tok in ("dep", "(", ")", ",", "|"):
                raise ParseError(f"expected a variable name at position {pos}, got {tok!r}")
        elif tok != kind:
            raise ParseError(f"expected {kind!r} at position {pos}, got {tok!r}")
        idx += 1
        return tok

    def atom():
        expect("dep")
        expect("(")
        names = [expect("ident")]
        while idx < len(tokens) and tokens[idx][0] == ",":
            expect(",")
            names.append(expect("ident"))
        expect(")")
        return DependenceAtom(tuple(names[:-1]), names[-1])

    left = atom()
    expect("|")
    right = atom()
    if idx != len(tokens):
        tok, pos = tokens[idx]
        raise ParseError(f"unexpected {tok!r} at position {pos} after the second atom")
    return DisjunctionFormula(left, right)


# ---------------------------------------------------------------------------
# Team files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TeamFileStats:
    raw_rows: int
    dedup_dropped: int


def _coerce_value(v, where: str):
    if isinstance(v, bool) or v is None or isinstance(v, float):
        raise ParseError(f"{where}: values must be strings or integers, got {v!r}")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return v
    if isinstance(v, list):
        return tuple(_coerce_value(x, where) for x in v)
    raise ParseError(f"{where}: values must be strings or integers, got {v!r}")


def team_from_csv_text(text: str) -> "tuple[Team, TeamFileStats]":
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty team file: missing header row")
    header = [h.strip() for h in header]
    if not header or any(not h for h in header):
        raise ParseError("header row has an empty variable name")
    if len(set(header)) != len(header):
        raise ParseError(f"duplicate variable names in header {header!r}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"ragged row at line {lineno}: {len(row)} values, expected {len(header)}"
            )
        rows.append(tuple(v.strip() for v in row))
    team = Team(header, rows)
    return team, TeamFileStats(len(rows), len(rows) - len(team))


def team_to_csv_text(team: Team) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(team.vars)
    for row in team.rows:
        writer.writerow(["(" + ",".join(map(str, v)) + ")" if isinstance(v, tuple) else v for v in row])
    return buf.getvalue()


def team_from_json_obj(obj) -> "tuple[Team, TeamFileStats]":
    if not isinstance(obj, dict) or "vars" not in obj or "rows" not in obj:
        raise ParseError('team JSON must be an object with "vars" and "rows"')
    vars_ = obj["vars"]
    if not isinstance(vars_, list) or not all(isinstance(v, str) for v in vars_):
        raise ParseError('"vars" must be a list of variable names')
    rows = []
    for i, row in enumerate(obj["rows"]):
        if not isinstance(row, list) or len(row) != len(vars_):
            raise ParseError(f"row {i} must be a list of {len(vars_)} values")
        rows.append(tuple(_coerce_value(v, f"row {i}") for v in row))
    try:
        team = Team(vars_, rows)
    except DomainMismatchError as e:
        raise ParseError(str(e)) from None
    return team, TeamFileStats(len(rows), len(rows) - len(team))


def team_to_json_obj(team: Team) -> dict:
    def render(v):
        return list(map(render, v)) if isinstance(v, tuple) else v

    return {"vars": list(team.vars), "rows": [[render(v) for v in row] for row in team.rows]}


def load_team_detailed(path, fmt: Optional[str] = None) -> "tuple[Team, TeamFileStats]":
    """Read a team file; the format is taken from the extension unless given
    explicitly ("csv" or "json").  Duplicate rows are deduplicated and the
    dropped count is reported in the stats."""
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower() or "csv"
    text = path.read_text()
    if fmt == "csv":
        return team_from_csv_text(text)
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: invalid JSON: {e}") from None
        return team_from_json_obj(obj)
    raise ParseError(f"unknown team format {fmt!r} (expected csv or json)")


def load_team(path, fmt: Optional[str] = None) -> Team:
    return load_team_detailed(path, fmt)[0]


def save_team(team: Team, path, fmt: Optional[str] = None) -> None:
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower() or "csv"
    if fmt == "csv":
        path.write_text(team_to_csv_text(team))
    elif fmt == "json":
        path.write_text(json.dumps(team_to_json_obj(team), indent=2) + "\n")
    else:
        raise ParseError(f"unknown team format {fmt!r} (expected csv or json)")


# ---------------------------------------------------------------------------
# Reduction instance formats
# ---------------------------------------------------------------------------


def mtdf_from_json_obj(obj) -> MtdfInstance:
    if not isinstance(obj, dict):
        raise ParseError("mtdf JSON must be an object")
    pos = obj.get("pos_cliques", [])
    neg = obj.get("neg_cliques", [])
    for name, cliques in (("pos_cliques", pos), ("neg_cliques", neg)):
        if not isinstance(cliques, list) or not all(
            isinstance(c, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in c)
            for c in cliques
        ):
            raise ParseError(f'"{name}" must be a list of lists of variable indices')
    used = [v for c in list(pos) + list(neg) for v in c]
    num = obj.get("num_vars", max(used) + 1 if used else 0)
    if not isinstance(num, int) or num < 0:
        raise ParseError('"num_vars" must be a non-negative integer')
    return MtdfInstance(num, tuple(map(frozenset, pos)), tuple(map(frozenset, neg)))


def mtdf_to_json_obj(m: MtdfInstance) -> dict:
    return {
        "num_vars": m.num_vars,
        "pos_cliques": [sorted(c) for c in m.pos_cliques],
        "neg_cliques": [sorted(c) for c in m.neg_cliques],
    }


def load_mtdf(path) -> MtdfInstance:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e}") from None
    return mtdf_from_json_obj(obj)


def ufa_from_json_obj(obj) -> UfaInstance:
    if not isinstance(obj, dict) or "edges" not in obj or "u" not in obj or "v" not in obj:
        raise ParseError('ufa JSON must be an object with "edges", "u", and "v"')
    edges = []
    for i, e in enumerate(obj["edges"]):
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError(f"edge {i} must be a two-element list")
        a = _coerce_value(e[0], f"edge {i}")
        b = _coerce_value(e[1], f"edge {i}")
        edges.append((a, b))
    u = _coerce_value(obj["u"], '"u"')
    v = _coerce_value(obj["v"], '"v"')
    nodes = {n for e in edges for n in e} | {u, v}
    for extra in obj.get("nodes", []):
        nodes.add(_coerce_value(extra, '"nodes"'))
    return UfaInstance(frozenset(nodes), tuple(edges), u, v)


def ufa_to_json_obj(g: UfaInstance) -> dict:
    return {
        "nodes": sorted(g.nodes),
        "edges": [list(e) for e in g.edges],
        "u": g.u,
        "v": g.v,
    }


def load_ufa(path) -> UfaInstance:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e}") from None
    return ufa_from_json_obj(obj)
