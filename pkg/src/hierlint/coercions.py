"""Implicit coercion graph: uniformity, path composition and coherence.

Paths are kept per (source, target) key in creation order.  As in Coq, only
the oldest path of each key is extended when a new coercion arrives; later
paths are stored so that they can be compared against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import diagnostics as dg
from .diagnostics import Diagnostic
from .terms import (
    DefinitionEnv,
    Hole,
    MatchFailure,
    Term,
    TermError,
    Var,
    alpha_equal,
    app,
    constants,
    iter_differences,
    lam,
    match_first_order,
    reduce,
    substitute,
)

SORTCLASS = "Sortclass"
FUNCLASS = "Funclass"


class CoercionError(Exception):
    pass


class DuplicateCoercion(CoercionError):
    pass


class UnknownClass(CoercionError):
    pass


class CompositionFailure(CoercionError):
    pass


@dataclass(frozen=True)
class ClassDecl:
    name: str
    param_count: int = 0
    record_fields: tuple[str, ...] = ()
    record: Optional[str] = None

    def __post_init__(self):
        if self.param_count < 0:
            raise ValueError("param_count must be >= 0")


BUILTIN_CLASSES = (ClassDecl(SORTCLASS), ClassDecl(FUNCLASS))


@dataclass(frozen=True)
class CoercionDecl:
    """``name : source >-> target`` with type ``forall binders, target target_args``.

    ``instance`` names the binder of type ``source source_args``; it defaults
    to the last binder.
    """

    name: str
    source: ClassDecl
    target: ClassDecl
    body: Term
    binders: tuple[str, ...] = ("x",)
    instance: Optional[str] = None
    source_args: tuple[Term, ...] = ()
    target_args: tuple[Term, ...] = ()
    proof_irrelevant: bool = False
    decl_seq: int = 0

    @property
    def instance_name(self) -> str:
        return self.instance if self.instance is not None else self.binders[-1]

    @property
    def uniform(self) -> bool:
        return check_uniform(self)


def check_uniform(c: CoercionDecl) -> bool:
    n = c.source.param_count
    b = c.binders
    return (
        len(b) == n + 1
        and b[n] == c.instance_name
        and tuple(c.source_args) == tuple(Var(x) for x in b[:n])
    )


@dataclass(frozen=True)
class Composite:
    term: Term
    binders: tuple[str, ...]
    instance: str
    source_args: tuple[Term, ...]
    target_args: tuple[Term, ...]


def compose(env: DefinitionEnv, edges: Sequence[CoercionDecl]) -> Composite:
    if not edges:
        raise CompositionFailure("empty path")
    for f, g in zip(edges, edges[1:]):
        if f.target.name != g.source.name:
            raise CompositionFailure(f"{f.name} and {g.name} are not composable")
    first = edges[0]
    binders = first.binders
    inner = app(first.body, *(Var(b) for b in binders))
    current = tuple(first.target_args)
    for g in edges[1:]:
        params = [b for b in g.binders if b != g.instance_name]
        index = {b: i for i, b in enumerate(params)}
        holes = {b: Hole(i) for b, i in index.items()}
        # a free variable as head keeps reduction away from the class name
        pattern = app(Var("#class"), *(substitute(u, holes) for u in g.source_args))
        target = app(Var("#class"), *current)
        if len(g.source_args) != len(current):
            raise CompositionFailure(
                f"{g.name} expects {len(g.source_args)} arguments of {g.source.name}, got {len(current)}"
            )
        try:
            sigma = match_first_order(pattern, target, env)
        except (MatchFailure, TermError) as exc:
            raise CompositionFailure(f"cannot apply {g.name}: {exc}") from None
        missing = [b for b in params if index[b] not in sigma]
        if missing:
            raise CompositionFailure(f"cannot infer parameter {missing[0]} of {g.name}")
        values = {b: sigma[index[b]] for b in params}
        args = [inner if b == g.instance_name else values[b] for b in g.binders]
        inner = app(g.body, *args)
        current = tuple(substitute(u, {**values, g.instance_name: inner}) for u in g.target_args)
    return Composite(lam(binders, inner), tuple(binders), first.instance_name, tuple(first.source_args), current)


def compose_path(env: DefinitionEnv, edges: Sequence[CoercionDecl]) -> Term:
    """Composition ``fn _.._ (... (f1 x1 .. xk))`` as a closed Lam-chain."""
    return compose(env, edges).term


@dataclass
class InheritancePath:
    edges: tuple[CoercionDecl, ...]
    composite: Optional[Composite] = None
    failure: Optional[str] = None
    seq: int = 0
    _normal: Optional[Term] = field(default=None, repr=False)

    @property
    def source(self) -> ClassDecl:
        return self.edges[0].source

    @property
    def target(self) -> ClassDecl:
        return self.edges[-1].target

    @property
    def composed(self) -> Optional[Term]:
        return self.composite.term if self.composite else None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.edges)

    @property
    def circular(self) -> bool:
        return self.source.name == self.target.name

    def render(self) -> str:
        return f"{dg.format_path(self.names)} : {self.source.name} >-> {self.target.name}"


def _applied_vars(n: int) -> list[Term]:
    return [Var(f"#arg{i}") for i in range(n)]


class CoercionGraph:
    def __init__(self, env: DefinitionEnv, classes: Sequence[ClassDecl] = ()):
        self.env = env
        self.classes: dict[str, ClassDecl] = {c.name: c for c in BUILTIN_CLASSES}
        self.coercions: dict[str, CoercionDecl] = {}
        self.path_table: dict[tuple[str, str], list[InheritancePath]] = {}
        self._seq = 0
        for c in classes:
            self.add_class(c)

    def add_class(self, c: ClassDecl):
        if c.name in self.classes and self.classes[c.name] != c:
            raise CoercionError(f"class {c.name!r} declared twice")
        self.classes[c.name] = c

    def valid_path(self, source: str, target: str) -> Optional[InheritancePath]:
        paths = self.path_table.get((source, target))
        return paths[0] if paths else None

    def paths(self, source: str, target: str) -> list[InheritancePath]:
        return list(self.path_table.get((source, target), ()))

    def _make_path(self, edges) -> InheritancePath:
        self._seq += 1
        try:
            return InheritancePath(tuple(edges), compose(self.env, edges), seq=self._seq)
        except CompositionFailure as exc:
            return InheritancePath(tuple(edges), failure=str(exc), seq=self._seq)

    def add_coercion(self, c: CoercionDecl) -> list[Diagnostic]:
        if c.name in self.coercions:
            raise DuplicateCoercion(f"coercion {c.name!r} already declared")
        for cls in (c.source, c.target):
            if self.classes.get(cls.name) != cls:
                raise UnknownClass(f"class {cls.name!r} is not registered")
        self.coercions[c.name] = c
        a, b = c.source.name, c.target.name
        prefixes = [()] + [
            p.edges for (s, t), ps in self.path_table.items() if t == a and s != t for p in ps[:1]
        ]
        suffixes = [()] + [
            q.edges for (s, t), qs in self.path_table.items() if s == b and s != t for q in qs[:1]
        ]
        out = []
        for pre in prefixes:
            for suf in suffixes:
                edges = pre + (c,) + suf
                if not _simple(edges):
                    continue
                path = self._make_path(edges)
                key = (path.source.name, path.target.name)
                bucket = self.path_table.setdefault(key, [])
                bucket.append(path)
                d = self._check_path(path, bucket[0])
                if d is not None:
                    out.append(d)
        return out

    # -- coherence ---------------------------------------------------------

    def normal_form(self, p: InheritancePath) -> Optional[Term]:
        if p.composite is None:
            return None
        if p._normal is None:
            applied = app(p.composite.term, *_applied_vars(len(p.composite.binders)))
            p._normal = reduce(self.env, applied)
        return p._normal

    def _identity_normal(self, p: InheritancePath) -> Term:
        i = p.composite.binders.index(p.composite.instance)
        return _applied_vars(len(p.composite.binders))[i]

    def _check_path(self, path: InheritancePath, oldest: InheritancePath) -> Optional[Diagnostic]:
        """Compare a path with the oldest of its key (or with the identity)."""
        if path.failure is not None:
            return Diagnostic(
                "unverifiable_paths",
                dg.WARNING,
                f"Coercion path {path.render()} cannot be composed: {path.failure}.",
                (path.source.name, path.target.name, path.seq),
                path.names,
            )
        if path.circular:
            nf = self.normal_form(path)
            ident = self._identity_normal(path)
            if _same(nf, ident):
                return None
            return self._incoherent(
                path, None, nf, ident, f"Coercion path {path.render()} is not convertible to the identity."
            )
        if path is oldest:
            return None
        if oldest.failure is not None:
            return None  # already reported when the oldest path was created
        if len(oldest.composite.binders) != len(path.composite.binders):
            return Diagnostic(
                "unverifiable_paths",
                dg.WARNING,
                f"Coercion path {path.render()} cannot be compared with {dg.format_path(oldest.names)}: "
                f"different numbers of parameters.",
                (path.source.name, path.target.name, path.seq),
                path.names,
            )
        a, b = self.normal_form(oldest), self.normal_form(path)
        if _same(a, b):
            return None
        return self._incoherent(
            path,
            oldest,
            b,
            a,
            f"New coercion path {path.render()} is not convertible with existing "
            f"{oldest.render()}.",
        )

    def _incoherent(self, path, oldest, nf_a, nf_b, message) -> Diagnostic:
        flagged: set[str] = set()
        for e in path.edges + (oldest.edges if oldest else ()):
            if e.proof_irrelevant:
                flagged |= constants(reduce(self.env, e.body))
        diffs = list(iter_differences(nf_a, nf_b))
        irrelevant = bool(flagged) and all(
            (constants(x) | constants(y)) & flagged for x, y in diffs
        )
        related = path.names + (oldest.names if oldest else ())
        key = (path.source.name, path.target.name, path.seq)
        if irrelevant:
            return Diagnostic("incoherent_path_warnings", dg.WARNING, message, key, related)
        return Diagnostic("incoherent_paths", dg.ERROR, message, key, related)

    def check_coherence(self) -> list[Diagnostic]:
        out = []
        for key, paths in self.path_table.items():
            for p in paths:
                d = self._check_path(p, paths[0])
                if d is not None:
                    out.append(d)
        return sorted(out, key=Diagnostic.sort_key)

    def convertibility_classes(self, source: str, target: str) -> list[list[InheritancePath]]:
        """Group a key's composable paths by normal form."""
        groups: list[list[InheritancePath]] = []
        for p in self.path_table.get((source, target), ()):
            if p.composite is None:
                continue
            nf = self.normal_form(p)
            for g in groups:
                if _same(self.normal_form(g[0]), nf):
                    g.append(p)
                    break
            else:
                groups.append([p])
        return groups

    def violation_keys(self) -> set[tuple[str, str]]:
        out = set()
        for (s, t), paths in self.path_table.items():
            if s == t:
                if any(
                    p.composite is not None and not _same(self.normal_form(p), self._identity_normal(p))
                    for p in paths
                ):
                    out.add((s, t))
            elif len(self.convertibility_classes(s, t)) > 1:
                out.add((s, t))
        return out

    def reachable(self, source: str, target: str) -> bool:
        return (source, target) in self.path_table


def _simple(edges) -> bool:
    nodes = [edges[0].source.name] + [e.target.name for e in edges]
    inner = nodes[:-1]
    if len(set(inner)) != len(inner):
        return False
    return nodes[-1] not in inner[1:]


def _same(a: Term, b: Term) -> bool:
    return alpha_equal(a, b)
