from dataclasses import dataclass, field
from typing import Any


@dataclass
class Report:
    """Outcome of a verifier: truthy when every check passed."""

    ok: bool
    problems: list = field(default_factory=list)
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def fail(cls, problem: str, witness=None) -> "Report":
        return cls(False, [problem], witness)
