"""Validation reports: law violations with reproducible witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    law: str
    where: str
    witness: tuple

    def to_dict(self):
        return {"law": self.law, "where": self.where, "witness": list(self.witness)}


@dataclass
class ValidationReport:
    """A report is empty exactly when every requested law held exhaustively."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, where: str, witness: tuple) -> None:
        def plain(w):
            return int(w) if hasattr(w, "item") or isinstance(w, bool) else w

        self.violations.append(Violation(law, where, tuple(plain(w) for w in witness)))

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        self.violations.extend(other.violations)
        return self

    def laws(self) -> set[str]:
        return {v.law for v in self.violations}

    def __len__(self) -> int:
        return len(self.violations)

    def __repr__(self) -> str:
        if self.ok:
            return "ValidationReport(ok)"
        head = ", ".join(f"{v.law}@{v.where}{v.witness}" for v in self.violations[:4])
        more = "" if len(self.violations) <= 4 else f", +{len(self.violations) - 4} more"
        return f"ValidationReport({head}{more})"

    def to_dict(self):
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}
