"""Lint findings and their rendered messages."""

from __future__ import annotations

from dataclasses import dataclass, field

ERROR = "error"
WARNING = "warning"

# report order; summary keys are the same names
CATEGORIES = (
    "invalid_hierarchy",
    "ambiguous_joins",
    "missing_hints",
    "overwritten_joins",
    "concrete_joins",
    "incoherent_paths",
    "incoherent_path_warnings",
    "unverifiable_paths",
    "instance_mismatches",
)


@dataclass(frozen=True)
class Diagnostic:
    category: str
    severity: str
    message: str
    key: tuple = ()
    related: tuple[str, ...] = field(default=(), compare=False)

    def sort_key(self):
        return (CATEGORIES.index(self.category), self.key, self.message)

    def to_json(self) -> dict:
        return {
            "category": self.category,
            "severity": self.severity,
            "message": self.message,
            "related": list(self.related),
        }


def missing_join(left: str, right: str, expected: str) -> Diagnostic:
    return Diagnostic(
        "missing_hints",
        ERROR,
        f"There is no join of {left} and {right} but it is expected to be {expected}.",
        (left, right),
    )


def overwritten_join(left: str, right: str, actual: str, expected: str, hint: str = "") -> Diagnostic:
    return Diagnostic(
        "overwritten_joins",
        ERROR,
        f"The join of {left} and {right} is {actual} but it is expected to be {expected}.",
        (left, right),
        (hint,) if hint else (),
    )


def concrete_join(left: str, right: str, concrete: str, expected: str, hint: str = "") -> Diagnostic:
    return Diagnostic(
        "concrete_joins",
        ERROR,
        f"The join of {left} and {right} is a concrete type {concrete} but is expected to be {expected}.",
        (left, right),
        (hint,) if hint else (),
    )


def ambiguous_join(left: str, right: str, candidates) -> Diagnostic:
    names = ", ".join(sorted(candidates))
    return Diagnostic(
        "ambiguous_joins",
        ERROR,
        f"The join of {left} and {right} is ambiguous: {names}.",
        (left, right),
    )


def format_path(names) -> str:
    return "[" + "; ".join(names) + "]"
