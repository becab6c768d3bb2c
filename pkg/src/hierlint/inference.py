"""Canonical-structure resolution over a table of unification hints.

Hints are keyed by ``(projection symbol, head symbol)``.  The table is
asymmetric, like Coq's: a problem ``L.sort ?l == R.sort ?r`` consults the key
``(L.sort, R.sort)``.  :func:`check_join_assertion` by default also tries the
swapped key when the first lookup misses, which is what the unifier does when
it applies a hint in either direction.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import diagnostics as dg
from .coercions import CoercionGraph
from .diagnostics import Diagnostic
from .hierarchy import TOP, AmbiguityFailure, Hierarchy, JoinAssertion, join
from .terms import (
    App,
    Const,
    Construct,
    DefinitionEnv,
    Proj,
    Term,
    Var,
    app,
    convertible,
    head_symbol,
    is_closed,
    reduce,
    spine,
    strip_lams,
    whnf,
)


class InferenceError(Exception):
    pass


class IllFormedInstance(InferenceError):
    pass


class IncompleteTable(InferenceError):
    pass


@dataclass(frozen=True)
class CanonicalInstanceDecl:
    name: str
    body: Term
    owner_structure: Optional[str] = None
    for_concrete_type: Optional[str] = None


@dataclass(frozen=True)
class UnificationHint:
    key: tuple[str, str]
    solution_name: str
    source_decl: CanonicalInstanceDecl
    decl_seq: int
    owner: Optional[str] = None  # structure inferred when the hint fires
    concrete: Optional[str] = None  # concrete carrier, if any
    params: int = 0


@dataclass(frozen=True)
class Overwrite:
    key: tuple[str, str]
    previous: UnificationHint
    new: UnificationHint
    via_swap: bool = False  # the shadowed solution came from the swapped key


@dataclass(frozen=True)
class Solved:
    instantiations: Mapping[str, Term]
    inferred_structure: Union[str, object]
    hint: Optional[UnificationHint] = field(default=None, compare=False)


@dataclass(frozen=True)
class NoHint:
    pass


@dataclass(frozen=True)
class ConcreteCollision:
    concrete: str
    hint: Optional[UnificationHint] = field(default=None, compare=False)


ResolutionResult = Union[Solved, NoHint, ConcreteCollision]


class HintTable:
    """Active hints plus their history.

    ``structures`` maps each structure name to its ``type`` record; the first
    field of that record is taken as the carrier (sort) projection.
    """

    def __init__(self, env: DefinitionEnv, structures: Mapping[str, str], graph: Optional[CoercionGraph] = None):
        self.env = env
        self.graph = graph
        self.structures = dict(structures)
        self.by_record = {r: s for s, r in self.structures.items()}
        self.sort_symbol: dict[str, str] = {}
        for s, r in self.structures.items():
            rec = env.record(r)
            if not rec.fields:
                raise InferenceError(f"record {r!r} has no carrier field")
            self.sort_symbol[s] = rec.projection_symbol(rec.fields[0])
        self.structure_of_sort = {v: k for k, v in self.sort_symbol.items()}
        self.hints: dict[tuple[str, str], UnificationHint] = {}
        self.history: list[UnificationHint] = []
        self.overwrites: list[Overwrite] = []
        self.lookups = 0
        self._seq = 0

    # -- declaration -------------------------------------------------------

    def _owner_and_concrete(self, decl, params, record, sort_value):
        owner = decl.owner_structure
        concrete = decl.for_concrete_type
        nf = reduce(self.env, sort_value)
        head, args = spine(nf)
        if owner is None and isinstance(head, Proj) and isinstance(head.arg, Var) and head.arg.name in params:
            owner = self.by_record.get(head.record)
        if concrete is None and is_closed(nf):
            if isinstance(head, Const):
                concrete = head.name
        if owner is None and concrete is None:
            owner = self.by_record.get(record)
        return owner, concrete

    def declare(self, decl: CanonicalInstanceDecl) -> list[Overwrite]:
        body = self.env.unfold(decl.name) if decl.body is None else decl.body
        params, inner = strip_lams(body)
        value = whnf(self.env, inner)
        if not isinstance(value, Construct):
            raise IllFormedInstance(f"{decl.name} does not reduce to a record value")
        rec = self.env.record(value.record)
        if value.record not in self.by_record:
            raise IllFormedInstance(f"{decl.name} builds {value.record}, which is not a structure")
        sort_field = rec.fields[0]
        owner, concrete = self._owner_and_concrete(decl, params, value.record, value.get(sort_field))
        self._seq += 1
        events = []
        for fname, fvalue in value.fields:
            if fname in rec.unnamed:
                continue
            head = head_symbol(fvalue, self.env)
            if head is None:
                continue
            key = (rec.projection_symbol(fname), head)
            hint = UnificationHint(key, decl.name, decl, self._seq, owner, concrete, len(params))
            events.extend(self._install(hint))
        return events

    def _install(self, hint: UnificationHint) -> list[Overwrite]:
        key = hint.key
        events = []
        old = self.hints.get(key)
        if old is not None:
            events.append(Overwrite(key, old, hint))
        else:
            swapped = self.hints.get((key[1], key[0]))
            if swapped is not None and _effective(swapped) != _effective(hint):
                events.append(Overwrite(key, swapped, hint, via_swap=True))
        self.hints[key] = hint
        self.history.append(hint)
        self.overwrites.extend(events)
        return events

    # -- lookup ------------------------------------------------------------

    def resolve(self, problem: tuple[str, str]) -> ResolutionResult:
        """One table consultation for ``left_proj ?l == right_head ...``."""
        self.lookups += 1
        hint = self.hints.get(problem)
        if hint is None:
            return NoHint()
        left, right = problem
        if hint.concrete is not None and right in self.structure_of_sort:
            return ConcreteCollision(hint.concrete, hint)
        return Solved(self._instantiate(hint, left, right), hint.concrete or hint.owner or TOP, hint)

    def _instantiate(self, hint, left, right) -> dict[str, Term]:
        if hint.params == 0:
            return {"?l": Const(hint.solution_name)}
        w = Var("?w")
        out: dict[str, Term] = {"?l": app(Const(hint.solution_name), *([w] * hint.params))}
        target = self.structure_of_sort.get(right)
        if target is not None and hint.owner is not None:
            if target == hint.owner:
                out["?r"] = w
            elif self.graph is not None and self.graph.valid_path(hint.owner, target):
                p = self.graph.valid_path(hint.owner, target)
                if p.composed is not None:
                    out["?r"] = App(p.composed, w)
        return out

    def resolve_structures(self, a: str, b: str, symmetric: bool = True) -> ResolutionResult:
        r = self.resolve((self.sort_symbol[a], self.sort_symbol[b]))
        if isinstance(r, NoHint) and symmetric:
            r = self.resolve((self.sort_symbol[b], self.sort_symbol[a]))
        return r


def _effective(h: UnificationHint):
    return h.concrete or h.owner


def declare_canonical(table: HintTable, decl: CanonicalInstanceDecl) -> list[Overwrite]:
    return table.declare(decl)


def resolve(table: HintTable, problem: tuple[str, str]) -> ResolutionResult:
    return table.resolve(problem)


def check_join_assertion(
    table: HintTable, h: Hierarchy, a: JoinAssertion, symmetric: bool = True
) -> Optional[Diagnostic]:
    """``None`` when the assertion holds, else the diagnostic."""
    for s in (a.left, a.right, a.expected):
        if s not in table.sort_symbol:
            raise InferenceError(f"structure {s!r} has no hint table entry")
    r = table.resolve_structures(a.left, a.right, symmetric)
    if isinstance(r, NoHint):
        return dg.missing_join(a.left, a.right, a.expected)
    if isinstance(r, ConcreteCollision):
        return dg.concrete_join(a.left, a.right, r.concrete, a.expected, r.hint.solution_name)
    if r.inferred_structure != a.expected:
        return dg.overwritten_join(a.left, a.right, str(r.inferred_structure), a.expected, r.hint.solution_name)
    return None


def instance_structure(env: DefinitionEnv, structures: Mapping[str, str], decl: CanonicalInstanceDecl) -> str:
    by_record = {r: s for s, r in structures.items()}
    body = decl.body if decl.body is not None else Const(decl.name)
    value = whnf(env, body)
    if not isinstance(value, Construct) or value.record not in by_record:
        raise IllFormedInstance(f"{decl.name} does not reduce to a structure instance")
    return by_record[value.record]


def check_instance_coherence(
    graph: CoercionGraph,
    instances: Mapping[str, Sequence[CanonicalInstanceDecl]],
    structures: Mapping[str, str],
) -> list[Diagnostic]:
    """Every coercion image of a concrete instance is the concrete instance."""
    env = graph.env
    out = []
    for concrete in sorted(instances):
        decls = list(instances[concrete])
        typed = [(instance_structure(env, structures, d), d) for d in decls]
        for b, tb in typed:
            for a, ta in typed:
                if a == b:
                    continue
                path = graph.valid_path(b, a)
                if path is None or path.composed is None:
                    continue
                lhs = App(path.composed, Const(tb.name))
                if convertible(env, lhs, Const(ta.name)):
                    continue
                via = path.names[0] if len(path.names) == 1 else dg.format_path(path.names)
                out.append(
                    Diagnostic(
                        "instance_mismatches",
                        dg.ERROR,
                        f"The {a} instance of {concrete} obtained by {via} {tb.name} "
                        f"is not convertible with {ta.name}.",
                        (concrete, b, a),
                        (tb.name, ta.name) + path.names,
                    )
                )
    return out


def _fold(table: HintTable, h: Hierarchy, items: Sequence[str], symmetric: bool):
    acc = items[0]
    for x in items[1:]:
        if acc is TOP:
            break
        if acc == x:
            continue
        if join(h, acc, x) is TOP:
            acc = TOP
            continue
        r = table.resolve_structures(acc, x, symmetric)
        if not isinstance(r, Solved):
            raise IncompleteTable(f"no hint infers the join of {acc} and {x}")
        acc = r.inferred_structure
    return acc


def verify_predictability(
    table: HintTable,
    h: Hierarchy,
    problems: Sequence[str],
    seed: Optional[int] = 0,
    samples: int = 24,
    symmetric: bool = True,
) -> bool:
    """Folding joins via the table ignores order, duplication and contraction."""
    if not problems:
        return True
    problems = list(problems)
    expected = _fold(table, h, problems, symmetric)
    ref = problems[0]
    for x in problems[1:]:
        ref = join(h, ref, x)
        if isinstance(ref, AmbiguityFailure):
            return False
    if ref != expected:
        return False
    if len(problems) <= 6:
        orders: Iterable = itertools.permutations(problems)
    else:
        rng = random.Random(seed)
        orders = [rng.sample(problems, len(problems)) for _ in range(samples)]
    contracted = list(dict.fromkeys(problems))
    for order in itertools.chain(orders, [contracted, problems + problems]):
        if _fold(table, h, list(order), symmetric) != expected:
            return False
    return True
