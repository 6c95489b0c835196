"""Structured pass/fail reports produced by the validators."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """One named validity condition with any failure descriptions."""

    name: str
    failures: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "failures": list(self.failures)}


@dataclass(frozen=True)
class Report:
    """A bundle of checks; passes only if every check passes."""

    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        out = []
        for c in self.checks:
            out.extend(f"{c.name}: {msg}" for msg in c.failures)
        return out

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}

    def summary(self) -> str:
        if self.passed:
            return "all checks passed"
        return "; ".join(self.failures())
