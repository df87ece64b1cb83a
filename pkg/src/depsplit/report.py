"""Machine-readable run reports with re-verifiable certificates."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from .classifier import Classification
from .core import DisjunctionFormula, SplitCertificate, Team, verify_split
from .engines import Verdict
from .errors import ParseError
from .teamio import team_to_json_obj

SCHEMA_VERSION = 1


def team_digest(team: Team) -> str:
    payload = json.dumps(team_to_json_obj(team), separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def certificate_to_obj(cert: SplitCertificate) -> dict:
    return {"left": sorted(cert.left_rows), "right": sorted(cert.right_rows)}


def certificate_from_obj(obj) -> SplitCertificate:
    if not isinstance(obj, dict) or "left" not in obj or "right" not in obj:
        raise ParseError('certificate must be an object with "left" and "right" row lists')
    return SplitCertificate(frozenset(obj["left"]), frozenset(obj["right"]))


@dataclass(frozen=True)
class RunReport:
    """Everything a ``check`` run decided, serializable as JSON.

    Certificates are stored as row-index lists against the canonical
    (deduplicated, lexicographic) row order of the checked team; given the
    team, they re-verify on load.
    """

    formula: str
    team_digest: str
    team_rows: int
    dedup_dropped: int
    classification: dict
    satisfied: bool
    engine: str
    stats: dict
    certificate: Optional[dict]
    timings: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_json_text(self, indent=2) -> str:
        return json.dumps(asdict(self), indent=indent, default=str) + "\n"

    @classmethod
    def from_json_text(cls, text: str) -> "RunReport":
        obj = json.loads(text)
        if obj.get("schema_version") != SCHEMA_VERSION:
            raise ParseError(
                f"unsupported report schema {obj.get('schema_version')!r}"
            )
        kwargs = {k: obj[k] for k in cls.__dataclass_fields__ if k in obj}
        return cls(**kwargs)


def classification_to_obj(cls: Classification) -> dict:
    return {
        "pattern": cls.pattern.value,
        "complexity": cls.complexity,
        "coherence": cls.coherence,
        "engine": cls.engine,
        "derived_extension": cls.derived_extension,
        "notes": list(cls.notes),
    }


def build_report(
    formula: DisjunctionFormula,
    team: Team,
    classification: Classification,
    verdict: Verdict,
    dedup_dropped: int = 0,
    timings: Optional[dict] = None,
) -> RunReport:
    cert = certificate_to_obj(verdict.certificate) if verdict.certificate else None
    stats = {k: v for k, v in verdict.stats.items()}
    return RunReport(
        formula=str(formula),
        team_digest=team_digest(team),
        team_rows=len(team),
        dedup_dropped=dedup_dropped,
        classification=classification_to_obj(classification),
        satisfied=verdict.satisfied,
        engine=verdict.engine,
        stats=stats,
        certificate=cert,
        timings=dict(timings or {}),
    )


def verify_report_certificate(report: RunReport, team: Team, formula: DisjunctionFormula) -> bool:
    """Re-check a loaded report against the team it was computed from."""
    if team_digest(team) != report.team_digest:
        return False
    if not report.satisfied:
        return report.certificate is None
    if report.certificate is None:
        return False
    return verify_split(team, certificate_from_obj(report.certificate), formula)
