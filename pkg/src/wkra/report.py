"""Pass/fail records shared by the algebra, frame and axiom checkers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class AxiomResult:
    label: str
    passed: bool
    witness: dict | None = None
    detail: str = ""


@dataclass
class AxiomReport:
    """Ordered verdicts of a family of checks.

    ``witness`` values are element (or point) indices keyed by variable name.
    ``names`` is used only for rendering.
    """

    subject: str = ""
    results: list[AxiomResult] = field(default_factory=list)
    names: list[str] | None = None

    def add(self, label, passed, witness=None, detail=""):
        self.results.append(AxiomResult(label, bool(passed), witness, detail))
        return passed

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def __bool__(self):
        return self.ok

    @property
    def failures(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.passed]

    @property
    def first_failure(self) -> AxiomResult | None:
        fails = self.failures
        return fails[0] if fails else None

    def verdict(self, label: str) -> bool:
        for r in self.results:
            if r.label == label:
                return r.passed
        raise KeyError(label)

    def extend(self, other: "AxiomReport"):
        self.results.extend(other.results)
        return self

    def _name(self, i):
        if self.names is None or not isinstance(i, (int,)) or i >= len(self.names):
            return str(i)
        return self.names[i]

    def named_witness(self, result: AxiomResult) -> dict | None:
        if result.witness is None:
            return None
        return {k: self._name(v) for k, v in result.witness.items()}

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "results": [
                {
                    "label": r.label,
                    "passed": r.passed,
                    "witness": self.named_witness(r),
                    **({"detail": r.detail} if r.detail else {}),
                }
                for r in self.results
            ],
        }

    def format(self) -> str:
        lines = [f"{self.subject}: {'PASS' if self.ok else 'FAIL'}"]
        for r in self.results:
            line = f"  [{'pass' if r.passed else 'FAIL'}] {r.label}"
            w = self.named_witness(r)
            if w:
                line += "  witness: " + ", ".join(f"{k}={v}" for k, v in w.items())
            if r.detail:
                line += f"  ({r.detail})"
            lines.append(line)
        return "\n".join(lines)
