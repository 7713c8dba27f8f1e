"""Three-valued analysis outcome shared by every check in the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Status(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Holds (with certificate), Fails (with witness points) or Inconclusive (with reason).

    ``certificate`` and ``witness`` are plain JSON-friendly containers so a
    verdict can be dumped into a report without further conversion.
    """

    status: Status
    certificate: dict[str, Any] | None = None
    witness: list[dict[str, Any]] | None = None
    reason: str | None = None
    notes: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status is Status.HOLDS:
            if self.certificate is None or self.witness:
                raise ValueError("Holds needs a certificate and no witness")
        elif self.status is Status.FAILS:
            if not self.witness or self.certificate is not None:
                raise ValueError("Fails needs at least one witness point and no certificate")
        elif self.certificate is not None or self.witness:
            raise ValueError("Inconclusive carries neither certificate nor witness")

    @classmethod
    def holds(cls, certificate: dict[str, Any], **notes: Any) -> "Verdict":
        return cls(Status.HOLDS, certificate=certificate, notes=notes)

    @classmethod
    def fails(cls, witness: list[dict[str, Any]], reason: str | None = None, **notes: Any) -> "Verdict":
        return cls(Status.FAILS, witness=list(witness), reason=reason, notes=notes)

    @classmethod
    def inconclusive(cls, reason: str, **notes: Any) -> "Verdict":
        return cls(Status.INCONCLUSIVE, reason=reason, notes=notes)

    @property
    def ok(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def failed(self) -> bool:
        return self.status is Status.FAILS

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"status": self.status.value}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.witness:
            out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        if self.notes:
            out["notes"] = self.notes
        return out


def conjunction(parts: dict[str, Verdict]) -> Verdict:
    """Combine named sub-verdicts: first failure wins, then any ambiguity."""
    for name, v in parts.items():
        if v.failed:
            return Verdict.fails(v.witness or [], reason=f"{name}: {v.reason or 'failed'}", failed=name)
    pending = [name for name, v in parts.items() if v.status is Status.INCONCLUSIVE]
    if pending:
        return Verdict.inconclusive("undecided: " + ", ".join(pending))
    return Verdict.holds({name: v.certificate for name, v in parts.items()})
