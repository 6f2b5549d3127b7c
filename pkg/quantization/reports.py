"""Machine-readable run reports."""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


def serialize_residual(value: Any) -> Any:
    """JSON form of a residual object: its to_dict(), a list of those, or str()."""
    if value is None:
        return None
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if isinstance(value, dict):
        return {str(k): serialize_residual(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [serialize_residual(v) for v in value]
    if isinstance(value, (bool, int, str)):
        return value
    return str(value)


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: Any = None
    detail: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name, "status": self.status}
        if self.residual is not None:
            data["residual"] = serialize_residual(self.residual)
        if self.detail:
            data["detail"] = self.detail
        return data


@dataclass
class Report:
    """
    Result of one command run.

    Attributes:
        command: Command name
        model: Model name
        caps: Truncation caps used, if any
        checks: Individual pass/fail checks
        results: Computed objects (F, star products, dimensions) keyed by section
        runtime_ms: Wall time of the run
    """

    command: str
    model: str
    caps: Dict[str, int] = field(default_factory=dict)
    checks: List[CheckResult] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    runtime_ms: int = 0

    def add_check(self, name: str, passed: bool, residual: Any = None, detail: str = "") -> CheckResult:
        check = CheckResult(name, bool(passed), residual, detail)
        self.checks.append(check)
        return check

    def add_residual(self, name: str, residual: Any, detail: str = "") -> CheckResult:
        """A check that passes iff the residual is exactly zero; nonzero residuals are kept."""
        if isinstance(residual, (list, tuple)):
            passed = not any(residual)
        elif isinstance(residual, dict):
            passed = not any(residual.values())
        else:
            passed = not residual
        return self.add_check(name, passed, None if passed else residual, detail)

    def add_result(self, section: str, value: Any) -> None:
        self.results[section] = serialize_residual(value)

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "model": self.model,
            "caps": dict(self.caps),
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "results": self.results,
        }
        if include_timing:
            data["runtime_ms"] = self.runtime_ms
        return data

    def to_json(self, indent: Optional[int] = 2, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=indent, sort_keys=True)
