"""The lint pipeline and its reports."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import diagnostics as dg
from .coercions import SORTCLASS, CoercionGraph
from .diagnostics import CATEGORIES, Diagnostic
from .document import DocumentError, HierarchyDocument
from .hierarchy import Hierarchy, JoinAssertion, NotWellFormed, check_well_formed, generate_assertions
from .inference import (
    HintTable,
    IllFormedInstance,
    check_instance_coherence,
    check_join_assertion,
)
from .terms import TermError


@dataclass(frozen=True)
class LintOptions:
    oriented: bool = False  # consult only the (left, right) key
    assertions: bool = True


@dataclass
class LintReport:
    diagnostics: list[Diagnostic]
    assertions: list[JoinAssertion] = field(default_factory=list)
    well_formed: bool = True

    @property
    def summary(self) -> dict[str, int]:
        counts = Counter(d.category for d in self.diagnostics)
        return {c: counts.get(c, 0) for c in CATEGORIES}

    @property
    def errors(self) -> int:
        return sum(d.severity == dg.ERROR for d in self.diagnostics)

    @property
    def warnings(self) -> int:
        return sum(d.severity == dg.WARNING for d in self.diagnostics)

    def to_json(self) -> dict:
        return {"summary": self.summary, "diagnostics": [d.to_json() for d in self.diagnostics]}

    def render_json(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"

    def render_text(self) -> str:
        lines = [f"{d.severity}[{d.category}]: {d.message}" for d in self.diagnostics]
        if lines:
            lines.append("")
        for c, n in self.summary.items():
            lines.append(f"{c}: {n}")
        lines.append(f"{self.errors} error(s), {self.warnings} warning(s)")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "LintReport":
        diags = [
            Diagnostic(d["category"], d["severity"], d["message"], (i,), tuple(d.get("related", ())))
            for i, d in enumerate(data["diagnostics"])
        ]
        return cls(diags)


def emit_assertion_script(report: LintReport) -> str:
    if not report.well_formed:
        raise NotWellFormed("the hierarchy has ambiguous joins")
    return "".join(a.render() + "\n" for a in report.assertions)


@dataclass
class Analysis:
    """Everything the pipeline builds, for commands that need more than a report."""

    doc: HierarchyDocument
    graph: CoercionGraph
    hierarchy: Optional[Hierarchy]
    table: Optional[HintTable]
    report: LintReport


def build_graph(doc: HierarchyDocument) -> CoercionGraph:
    g = CoercionGraph(doc.env, [c.decl for c in doc.classes])
    for c in doc.coercions:
        g.add_coercion(c)
    return g


def build_hierarchy(doc: HierarchyDocument, graph: CoercionGraph) -> Hierarchy:
    names = sorted(doc.structures)
    if any(c.subclasses is not None for c in doc.classes):
        subof = {c.decl.name: set(c.subclasses or ()) for c in doc.classes if c.decl.record}
        for s in subof.values():
            unknown = s - set(names)
            if unknown:
                raise DocumentError(f"subclass {sorted(unknown)[0]!r} is not a structure")
        return Hierarchy.from_subof({n: subof.get(n, set()) for n in names}, close=doc.close_subclasses)
    subof = {n: set() for n in names}
    for (src, tgt) in graph.path_table:
        if src != tgt and src in subof and tgt in subof:
            subof[tgt].add(src)
    return Hierarchy(names, subof)


def analyze(doc: HierarchyDocument, options: LintOptions = LintOptions()) -> Analysis:
    diags: list[Diagnostic] = []
    graph = build_graph(doc)
    diags += graph.check_coherence()

    h = build_hierarchy(doc, graph)
    violations = h.violations()
    for i, v in enumerate(violations):
        diags.append(Diagnostic("invalid_hierarchy", dg.ERROR, v.message, (i,)))
    if violations:
        return Analysis(doc, graph, h, None, LintReport(_sorted(diags), [], False))

    seen = set()
    for f in check_well_formed(h):
        pair = tuple(sorted((f.left, f.right)))
        if pair not in seen:
            seen.add(pair)
            diags.append(dg.ambiguous_join(pair[0], pair[1], f.candidates))
    assertions = generate_assertions(h, skip_ambiguous=True)

    table = HintTable(doc.env, doc.structures, graph)
    declared = set()
    try:
        for c in doc.canonicals:
            table.declare(c)
            declared.add(c.name)
        for concrete in doc.concrete_instances:
            for c in doc.concrete_instances[concrete]:
                if c.name not in declared:
                    table.declare(c)
                    declared.add(c.name)
    except (IllFormedInstance, TermError) as exc:
        raise DocumentError(str(exc)) from None

    missing = set()
    for a in assertions:
        d = check_join_assertion(table, h, a, symmetric=not options.oriented)
        if d is None:
            continue
        if d.category == "missing_hints" and not options.oriented:
            # both orientations fail together; report the pair once
            pair = tuple(sorted((a.left, a.right)))
            if pair in missing:
                continue
            missing.add(pair)
        diags.append(d)

    diags += check_instance_coherence(graph, doc.concrete_instances, doc.structures)
    report = LintReport(_sorted(diags), assertions if options.assertions else [], not seen)
    return Analysis(doc, graph, h, table, report)


def run_lint(doc: HierarchyDocument, options: LintOptions = LintOptions()) -> LintReport:
    return analyze(doc, options).report


def _sorted(diags):
    return sorted(diags, key=Diagnostic.sort_key)


def render_dot(doc: HierarchyDocument, graph: CoercionGraph, h: Hierarchy) -> str:
    """Structures as nodes; an edge X -> Y when Y directly inherits from X."""
    lines = ["digraph hierarchy {", "  node [shape=box];"]
    for s in sorted(h.structures):
        lines.append(f'  "{s}";')
    for p, c in h.direct_edges():
        lines.append(f'  "{p}" -> "{c}";')
    carriers = sorted({c.source.name for c in doc.coercions if c.target.name == SORTCLASS})
    if carriers:
        lines.append(f'  "{SORTCLASS}" [shape=plaintext];')
    for s in carriers:
        lines.append(f'  "{SORTCLASS}" -> "{s}" [style=dotted];')
    lines.append("}")
    return "\n".join(lines) + "\n"
