"""Finite hierarchies of structures, their joins, and well-formedness.

A :class:`Hierarchy` is given by ``subof``: for each structure, the set of
its strict subclasses (the structures that inherit from it).  The relation
is expected to be transitive; :meth:`Hierarchy.violations` reports where it
is not.  :data:`TOP` is the extra element that inherits from everything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union


class HierarchyError(Exception):
    pass


class UnknownStructure(HierarchyError):
    pass


class NotWellFormed(HierarchyError):
    pass


class _Top:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()

Extended = Union[str, _Top]


@dataclass(frozen=True)
class AmbiguityFailure:
    left: str
    right: str
    candidates: frozenset[str]


@dataclass(frozen=True)
class JoinAssertion:
    left: str
    right: str
    expected: str

    def render(self) -> str:
        return f"check_join {self.left} {self.right} {self.expected}."


@dataclass(frozen=True)
class Violation:
    kind: str  # "reflexive" | "cycle" | "transitivity"
    message: str


class Hierarchy:
    def __init__(self, structures: Iterable[str], subof: Mapping[str, Iterable[str]]):
        self.structures = frozenset(structures)
        self.subof = {s: frozenset(subof.get(s, ())) for s in self.structures}
        extra = {b for bs in self.subof.values() for b in bs} - self.structures
        unknown = set(subof) - self.structures
        if extra or unknown:
            raise UnknownStructure(f"unknown structure {sorted(extra | unknown)[0]!r}")

    @classmethod
    def from_parents(cls, parents: Mapping[str, Iterable[str]]) -> "Hierarchy":
        """Build the (transitively closed) hierarchy from direct superclasses."""
        structures = set(parents)
        for ps in parents.values():
            structures |= set(ps)
        children: dict[str, set[str]] = {s: set() for s in structures}
        for child, ps in parents.items():
            for p in ps:
                children[p].add(child)
        return cls(structures, _close(children))

    @classmethod
    def from_subof(cls, subof: Mapping[str, Iterable[str]], close: bool = False) -> "Hierarchy":
        structures = set(subof)
        for bs in subof.values():
            structures |= set(bs)
        rel = {s: set(subof.get(s, ())) for s in structures}
        return cls(structures, _close(rel) if close else rel)

    def __repr__(self):
        return f"Hierarchy({len(self.structures)} structures)"

    def _check(self, *names):
        for n in names:
            if n is not TOP and n not in self.structures:
                raise UnknownStructure(f"unknown structure {n!r}")

    def violations(self) -> list[Violation]:
        out = []
        if not acyclicity_check(self):
            out.append(Violation("cycle", "The inheritance relation has a cycle."))
        for a in sorted(self.structures):
            if a in self.subof[a]:
                out.append(Violation("reflexive", f"{a} is listed as a strict subclass of itself."))
        for b in sorted(self.structures):
            for a in sorted(self.subof[b]):
                missing = self.subof[a] - self.subof[b]
                for c in sorted(missing):
                    out.append(
                        Violation(
                            "transitivity",
                            f"{c} inherits from {a} and {a} inherits from {b}, "
                            f"but {c} is not listed as a subclass of {b}.",
                        )
                    )
        return out

    def direct_edges(self) -> list[tuple[str, str]]:
        """Covering pairs (parent, child) of the strict order."""
        out = []
        for p in sorted(self.structures):
            for c in sorted(self.subof[p]):
                if not any(c in self.subof[m] for m in self.subof[p] if m != c):
                    out.append((p, c))
        return out


def _close(rel: Mapping[str, set[str]]) -> dict[str, set[str]]:
    closed: dict[str, set[str]] = {}
    for s in rel:
        seen: set[str] = set()
        stack = list(rel[s])
        while stack:
            x = stack.pop()
            if x not in seen:
                seen.add(x)
                stack.extend(rel.get(x, ()))
        closed[s] = seen
    return closed


def leq(h: Hierarchy, a: Extended, b: Extended) -> bool:
    """``b`` non-strictly inherits from ``a``."""
    h._check(a, b)
    if b is TOP:
        return True
    if a is TOP:
        return False
    return a == b or b in h.subof[a]


def mcs(h: Hierarchy, a: str, b: str) -> set[str]:
    """Minimal common subclasses of ``a`` and ``b``."""
    h._check(a, b)
    if a is TOP or b is TOP:
        raise UnknownStructure("mcs is only defined on structures")
    common = (h.subof[a] | {a}) & (h.subof[b] | {b})
    remaining = set(common)
    for c in sorted(common):
        if c in remaining:  # already-removed elements are skipped
            remaining -= h.subof[c]
    return remaining


def join(h: Hierarchy, a: Extended, b: Extended) -> Union[Extended, AmbiguityFailure]:
    if a is TOP or b is TOP:
        h._check(a, b)
        return TOP
    found = mcs(h, a, b)
    if not found:
        return TOP
    if len(found) == 1:
        return next(iter(found))
    return AmbiguityFailure(a, b, frozenset(found))


def check_well_formed(h: Hierarchy) -> list[AmbiguityFailure]:
    out = []
    for a in sorted(h.structures):
        for b in sorted(h.structures):
            r = join(h, a, b)
            if isinstance(r, AmbiguityFailure):
                out.append(r)
    return out


def generate_assertions(h: Hierarchy, skip_ambiguous: bool = False) -> list[JoinAssertion]:
    """All ``check_join`` assertions, ordered by (left, right).

    Raises :class:`NotWellFormed` on an ambiguous join unless
    ``skip_ambiguous`` is set, in which case those pairs are left out.
    """
    out = []
    for a in sorted(h.structures):
        for b in sorted(h.structures):
            if a == b:
                continue
            c = join(h, a, b)
            if isinstance(c, AmbiguityFailure):
                if skip_ambiguous:
                    continue
                raise NotWellFormed(f"the join of {a} and {b} is ambiguous")
            if c is not TOP:
                out.append(JoinAssertion(a, b, c))
    return out


def acyclicity_check(h: Hierarchy) -> bool:
    color: dict[str, int] = {}
    for root in sorted(h.structures):
        if root in color:
            continue
        color[root] = 1
        stack = [(root, iter(sorted(h.subof[root])))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color.get(nxt) == 1:
                return False
            elif nxt not in color:
                color[nxt] = 1
                stack.append((nxt, iter(sorted(h.subof[nxt]))))
    return True


def fold_join(h: Hierarchy, items: Iterable[Extended]) -> Union[Extended, AmbiguityFailure]:
    items = list(items)
    if not items:
        return TOP
    acc = items[0]
    for x in items[1:]:
        acc = join(h, acc, x)
        if isinstance(acc, AmbiguityFailure):
            return acc
    return acc
