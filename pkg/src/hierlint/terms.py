"""A small untyped applicative calculus with records.

Terms are immutable dataclasses.  ``reduce`` computes the beta/delta/iota
normal form relative to a :class:`DefinitionEnv`; ``convertible`` compares
normal forms up to renaming of bound variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union


class TermError(Exception):
    pass


class UndeclaredName(TermError):
    pass


class IllFormedProjection(TermError):
    pass


class IllFormedConstruct(TermError):
    pass


class MatchFailure(TermError):
    pass


class NormalizationLimit(TermError):
    """Raised when a reduction exceeds its step budget."""


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Hole:
    id: int

    def __str__(self):
        return f"?{self.id}"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"

    def __str__(self):
        head, args = spine(self)
        parts = [_atom(head)] + [_atom(a) for a in args]
        return " ".join(parts)


@dataclass(frozen=True)
class Lam:
    binder: str
    body: "Term"

    def __str__(self):
        return f"fun {self.binder} => {self.body}"


@dataclass(frozen=True)
class Construct:
    record: str
    fields: tuple[tuple[str, "Term"], ...]

    def __str__(self):
        inner = "; ".join(f"{k} := {v}" for k, v in self.fields)
        return f"{{| {self.record} | {inner} |}}"

    def get(self, name: str) -> "Term":
        for k, v in self.fields:
            if k == name:
                return v
        raise KeyError(name)


@dataclass(frozen=True)
class Proj:
    record: str
    field_name: str
    arg: "Term"

    def __str__(self):
        return f"{self.record}.{self.field_name} {_atom(self.arg)}"


Term = Union[Var, Const, Hole, App, Lam, Construct, Proj]


def _atom(t: Term) -> str:
    if isinstance(t, (Var, Const, Hole, Construct)):
        return str(t)
    return f"({t})"


def app(fn: Term, *args: Term) -> Term:
    """Left-nested application ``fn a1 ... an``."""
    for a in args:
        fn = App(fn, a)
    return fn


def lam(binders: Sequence[str], body: Term) -> Term:
    for b in reversed(binders):
        body = Lam(b, body)
    return body


def spine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def strip_lams(t: Term) -> tuple[list[str], Term]:
    binders = []
    while isinstance(t, Lam):
        binders.append(t.binder)
        t = t.body
    return binders, t


@dataclass(frozen=True)
class RecordDecl:
    """A record type: ordered field names, plus which of them are named
    projections (unnamed fields never produce unification hints)."""

    name: str
    fields: tuple[str, ...]
    constructor: str = ""
    unnamed: frozenset[str] = frozenset()

    def projection_symbol(self, field_name: str) -> str:
        # "Monoid.type" + "sort" -> "Monoid.sort"
        prefix, dot, _ = self.name.rpartition(".")
        return f"{prefix}.{field_name}" if dot else f"{self.name}.{field_name}"


@dataclass(frozen=True)
class DefinitionEnv:
    """Global environment: transparent definitions, opaque constants and records.

    Definitions map a name to ``(params, body)``; unfolding yields
    ``fun params => body``.  The constant-reference graph must be acyclic.
    """

    definitions: Mapping[str, tuple[tuple[str, ...], Term]] = field(default_factory=dict)
    opaque: frozenset[str] = frozenset()
    records: Mapping[str, RecordDecl] = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.definitions) & set(self.opaque)
        if clash:
            raise TermError(f"constant declared twice: {sorted(clash)[0]}")
        # validate bodies and acyclicity once; all operations rely on it
        for name, (params, body) in self.definitions.items():
            check_term(self, body)
        _check_acyclic(self)

    def is_declared(self, name: str) -> bool:
        return name in self.definitions or name in self.opaque

    def unfold(self, name: str) -> Optional[Term]:
        d = self.definitions.get(name)
        if d is None:
            return None
        params, body = d
        return lam(params, body)

    def record(self, name: str) -> RecordDecl:
        try:
            return self.records[name]
        except KeyError:
            raise UndeclaredName(f"record {name!r} is not declared") from None

    def projection_symbols(self) -> dict[str, tuple[str, str]]:
        out = {}
        for r in self.records.values():
            for f in r.fields:
                out[r.projection_symbol(f)] = (r.name, f)
        return out

    def extend(self, definitions=(), opaque=()) -> "DefinitionEnv":
        defs = dict(self.definitions)
        defs.update(definitions)
        return DefinitionEnv(defs, self.opaque | frozenset(opaque), self.records)


def _check_acyclic(env: DefinitionEnv):
    deps = {n: constants(b) & set(env.definitions) for n, (_, b) in env.definitions.items()}
    state: dict[str, int] = {}
    for root in deps:
        if root in state:
            continue
        stack = [(root, iter(deps[root]))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                raise TermError(f"definition {nxt!r} unfolds to itself")
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(deps[nxt])))


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack += [s.fn, s.arg]
        elif isinstance(s, Lam):
            stack.append(s.body)
        elif isinstance(s, Construct):
            stack += [v for _, v in s.fields]
        elif isinstance(s, Proj):
            stack.append(s.arg)


def constants(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Const)}


def holes(t: Term) -> set[int]:
    return {s.id for s in subterms(t) if isinstance(s, Hole)}


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.binder}
    if isinstance(t, Construct):
        out: set[str] = set()
        for _, v in t.fields:
            out |= free_vars(v)
        return out
    if isinstance(t, Proj):
        return free_vars(t.arg)
    return set()


def is_closed(t: Term) -> bool:
    return not free_vars(t) and not holes(t)


def check_term(env: DefinitionEnv, t: Term):
    """Raise if ``t`` mentions undeclared names or malformed records."""
    for s in subterms(t):
        if isinstance(s, Const):
            if not env.is_declared(s.name):
                raise UndeclaredName(f"constant {s.name!r} is not declared")
        elif isinstance(s, Proj):
            r = env.record(s.record)
            if s.field_name not in r.fields:
                raise IllFormedProjection(f"{s.field_name!r} is not a field of {s.record!r}")
        elif isinstance(s, Construct):
            r = env.record(s.record)
            names = tuple(k for k, _ in s.fields)
            if names != r.fields:
                raise IllFormedConstruct(
                    f"constructor of {s.record!r} expects fields {list(r.fields)}, got {list(names)}"
                )


# -- substitution ----------------------------------------------------------

_fresh_counter = itertools.count()


def _fresh(base: str, avoid: set[str]) -> str:
    stem = base.split("~")[0]
    while True:
        cand = f"{stem}~{next(_fresh_counter)}"
        if cand not in avoid:
            return cand


def substitute(t: Term, sigma: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution of free variables."""
    if not sigma:
        return t
    fv_sigma: set[str] = set()
    for v in sigma.values():
        fv_sigma |= free_vars(v)
    return _subst(t, dict(sigma), fv_sigma)


def _subst(t, sigma, fv_sigma):
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, (Const, Hole)):
        return t
    if isinstance(t, App):
        return App(_subst(t.fn, sigma, fv_sigma), _subst(t.arg, sigma, fv_sigma))
    if isinstance(t, Proj):
        return Proj(t.record, t.field_name, _subst(t.arg, sigma, fv_sigma))
    if isinstance(t, Construct):
        return Construct(t.record, tuple((k, _subst(v, sigma, fv_sigma)) for k, v in t.fields))
    # Lam
    inner = {k: v for k, v in sigma.items() if k != t.binder}
    if not inner:
        return t
    binder, body = t.binder, t.body
    if binder in fv_sigma:
        new = _fresh(binder, fv_sigma | free_vars(body) | set(inner))
        body = _subst(body, {binder: Var(new)}, {new})
        binder = new
    return Lam(binder, _subst(body, inner, fv_sigma))


def fill_holes(t: Term, sigma: Mapping[int, Term]) -> Term:
    if isinstance(t, Hole):
        return sigma.get(t.id, t)
    if isinstance(t, App):
        return App(fill_holes(t.fn, sigma), fill_holes(t.arg, sigma))
    if isinstance(t, Lam):
        return Lam(t.binder, fill_holes(t.body, sigma))
    if isinstance(t, Construct):
        return Construct(t.record, tuple((k, fill_holes(v, sigma)) for k, v in t.fields))
    if isinstance(t, Proj):
        return Proj(t.record, t.field_name, fill_holes(t.arg, sigma))
    return t


# -- reduction -------------------------------------------------------------

DEFAULT_FUEL = 200_000


class _Budget:
    __slots__ = ("left",)

    def __init__(self, fuel):
        self.left = fuel

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise NormalizationLimit("reduction step budget exhausted")


def _whnf(env: DefinitionEnv, t: Term, budget: _Budget) -> Term:
    while True:
        if isinstance(t, Const):
            body = env.unfold(t.name)
            if body is None:
                return t
            budget.tick()
            t = body
        elif isinstance(t, App):
            head, args = spine(t)
            head = _whnf(env, head, budget)
            if isinstance(head, Lam):
                budget.tick()
                t = app(substitute(head.body, {head.binder: args[0]}), *args[1:])
            else:
                return app(head, *args)
        elif isinstance(t, Proj):
            arg = _whnf(env, t.arg, budget)
            if isinstance(arg, Construct) and arg.record == t.record:
                budget.tick()
                t = arg.get(t.field_name)
            else:
                return Proj(t.record, t.field_name, arg)
        else:
            return t


def _normalize(env: DefinitionEnv, t: Term, budget: _Budget) -> Term:
    t = _whnf(env, t, budget)
    if isinstance(t, App):
        head, args = spine(t)
        return app(_normalize(env, head, budget), *(_normalize(env, a, budget) for a in args))
    if isinstance(t, Lam):
        return Lam(t.binder, _normalize(env, t.body, budget))
    if isinstance(t, Construct):
        return Construct(t.record, tuple((k, _normalize(env, v, budget)) for k, v in t.fields))
    if isinstance(t, Proj):
        return Proj(t.record, t.field_name, _normalize(env, t.arg, budget))
    return t


def whnf(env: DefinitionEnv, t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Weak-head normal form: reduce only until the head is stuck."""
    check_term(env, t)
    return _whnf(env, t, _Budget(fuel))


def reduce(env: DefinitionEnv, t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Full beta/delta/iota normal form of ``t``.

    >>> env = DefinitionEnv(opaque=frozenset({"c"}))
    >>> reduce(env, App(Lam("x", Var("x")), Const("c")))
    Const(name='c')
    """
    check_term(env, t)
    return _normalize(env, t, _Budget(fuel))


def canonical(t: Term) -> Term:
    """Rename binders to ``#0, #1, ...`` in depth-first order."""
    counter = itertools.count()

    def go(s, renaming):
        if isinstance(s, Var):
            return Var(renaming.get(s.name, s.name))
        if isinstance(s, App):
            return App(go(s.fn, renaming), go(s.arg, renaming))
        if isinstance(s, Lam):
            new = f"#{next(counter)}"
            return Lam(new, go(s.body, {**renaming, s.binder: new}))
        if isinstance(s, Construct):
            return Construct(s.record, tuple((k, go(v, renaming)) for k, v in s.fields))
        if isinstance(s, Proj):
            return Proj(s.record, s.field_name, go(s.arg, renaming))
        return s

    return go(t, {})


def alpha_equal(a: Term, b: Term) -> bool:
    return canonical(a) == canonical(b)


def convertible(env: DefinitionEnv, a: Term, b: Term, fuel: int = DEFAULT_FUEL) -> bool:
    return alpha_equal(reduce(env, a, fuel), reduce(env, b, fuel))


def match_first_order(pattern: Term, target: Term, env: Optional[DefinitionEnv] = None) -> dict[int, Term]:
    """Find the substitution for the holes of ``pattern`` that makes it
    syntactically equal to ``target`` (normalized first when ``env`` is given).

    >>> match_first_order(App(Const("f"), Hole(0)), App(Const("f"), Const("a")))
    {0: Const(name='a')}
    """
    if env is not None:
        target = reduce(env, target)
    sigma: dict[int, Term] = {}
    _match(pattern, target, sigma, {}, set())
    return sigma


def _match(p, t, sigma, bound, target_bound):
    # bound: pattern binder -> target binder
    if isinstance(p, Hole):
        fv = free_vars(t)
        if fv & target_bound or fv & set(bound):
            # the value would either escape its binder or be captured by one of the pattern's
            raise MatchFailure(f"hole ?{p.id} would capture a bound variable")
        prev = sigma.get(p.id)
        if prev is None:
            sigma[p.id] = t
        elif not alpha_equal(prev, t):
            raise MatchFailure(f"hole ?{p.id} matched inconsistently")
        return
    if type(p) is not type(t):
        raise MatchFailure(f"cannot match {p} against {t}")
    if isinstance(p, Var):
        if p.name in bound:
            ok = bound[p.name] == t.name
        else:
            ok = p.name == t.name and t.name not in target_bound
        if not ok:
            raise MatchFailure(f"variable {p.name} does not match {t.name}")
    elif isinstance(p, Const):
        if p.name != t.name:
            raise MatchFailure(f"head {p.name} does not match {t.name}")
    elif isinstance(p, App):
        _match(p.fn, t.fn, sigma, bound, target_bound)
        _match(p.arg, t.arg, sigma, bound, target_bound)
    elif isinstance(p, Lam):
        _match(p.body, t.body, sigma, {**bound, p.binder: t.binder}, target_bound | {t.binder})
    elif isinstance(p, Construct):
        if p.record != t.record or [k for k, _ in p.fields] != [k for k, _ in t.fields]:
            raise MatchFailure(f"record {p.record} does not match {t.record}")
        for (_, pv), (_, tv) in zip(p.fields, t.fields):
            _match(pv, tv, sigma, bound, target_bound)
    elif isinstance(p, Proj):
        if (p.record, p.field_name) != (t.record, t.field_name):
            raise MatchFailure(f"projection {p.field_name} does not match {t.field_name}")
        _match(p.arg, t.arg, sigma, bound, target_bound)


def head_symbol(t: Term, env: Optional[DefinitionEnv] = None) -> Optional[str]:
    """Head constant or projection symbol of ``t`` as written (no reduction)."""
    head, _ = spine(t)
    if isinstance(head, Const):
        return head.name
    if isinstance(head, Proj):
        if env is not None and head.record in env.records:
            return env.records[head.record].projection_symbol(head.field_name)
        return RecordDecl(head.record, ()).projection_symbol(head.field_name)
    return None


def iter_differences(a: Term, b: Term) -> Iterable[tuple[Term, Term]]:
    """Yield the maximal pairs of subterms at which ``a`` and ``b`` differ."""
    a, b = canonical(a), canonical(b)
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x == y:
            continue
        if type(x) is type(y):
            if isinstance(x, App):
                stack += [(x.fn, y.fn), (x.arg, y.arg)]
                continue
            if isinstance(x, Lam):
                stack.append((x.body, y.body))
                continue
            if isinstance(x, Proj) and (x.record, x.field_name) == (y.record, y.field_name):
                stack.append((x.arg, y.arg))
                continue
            if isinstance(x, Construct) and x.record == y.record:
                stack += [(u, v) for (_, u), (_, v) in zip(x.fields, y.fields)]
                continue
        yield x, y
