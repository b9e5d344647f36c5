"""Structured PASS/FAIL reports used by the verification operations."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """An ordered list of check results.

    Lines follow the fixed grammar ``PASS <axiom>`` or
    ``FAIL <axiom> witness=<data>`` so reports are diffable and the CLI
    can derive its exit code by scanning for FAIL lines.
    """

    title: str
    lines: list[str] = field(default_factory=list)

    def check(self, ok: bool, axiom: str, witness: str = "") -> bool:
        if ok:
            self.lines.append(f"PASS {axiom}")
        else:
            self.lines.append(f"FAIL {axiom} witness={witness or '-'}")
        return ok

    def note(self, text: str) -> None:
        self.lines.append(f"INFO {text}")

    @property
    def ok(self) -> bool:
        return not any(line.startswith("FAIL") for line in self.lines)

    @property
    def failures(self) -> list[str]:
        return [line for line in self.lines if line.startswith("FAIL")]

    def __str__(self) -> str:
        return "\n".join([f"# {self.title}"] + self.lines)
