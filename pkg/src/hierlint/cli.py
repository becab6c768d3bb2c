"""Command-line front end: ``hierlint check|assertions|join|paths|graph|properties``."""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from .document import DocumentError, HierarchyDocument, parse_document
from .fixtures import BUILTIN, load_fixture, write_corpus
from .hierarchy import TOP, AmbiguityFailure, HierarchyError, NotWellFormed, join
from .lint import LintOptions, analyze, emit_assertion_script, render_dot
from .terms import TermError

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def load_input(spec: str) -> HierarchyDocument:
    """A path to a JSON document, or the name of a built-in fixture."""
    if os.path.exists(spec):
        with open(spec, "rb") as fh:
            return parse_document(fh.read(), spec)
    if spec in BUILTIN:
        return load_fixture(spec)
    raise UsageError(f"no such file or built-in fixture: {spec}")


def _structure(doc: HierarchyDocument, name: str) -> str:
    names = doc.structures
    if name in names:
        return name
    if f"{name}.type" in names:
        return f"{name}.type"
    raise UsageError(f"unknown structure {name!r}")


def _class(doc: HierarchyDocument, name: str) -> str:
    try:
        return _structure(doc, name)
    except UsageError:
        return doc.class_decl(name).name


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", required=True, help="document path or built-in fixture name")
    common.add_argument("--oriented", action="store_true", help="consult only the (left, right) hint key")

    p = argparse.ArgumentParser(prog="hierlint", description="Lint packed-class hierarchies.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="run every check")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--strict", action="store_true", help="warnings also fail")
    c.add_argument("--out", help="write the report here instead of stdout")

    a = sub.add_parser("assertions", parents=[common], help="emit the check_join script")
    a.add_argument("--out", help="write the script here instead of stdout")

    j = sub.add_parser("join", parents=[common], help="print the join of two structures")
    j.add_argument("left")
    j.add_argument("right")

    ps = sub.add_parser("paths", parents=[common], help="list inheritance paths between two classes")
    ps.add_argument("source")
    ps.add_argument("target")

    g = sub.add_parser("graph", parents=[common], help="render the hierarchy")
    g.add_argument("--dot", action="store_true", required=True, help="DOT output")

    pr = sub.add_parser("properties", help="run the join-semilattice properties on random hierarchies")
    pr.add_argument("--input", "-i", help="also check this document's hierarchy")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--count", type=int, default=100)
    pr.add_argument("--max-nodes", type=int, default=12)

    fx = sub.add_parser("fixtures", help="list built-in fixtures")
    fx.add_argument("--write", metavar="DIR", help="also dump them as JSON files into DIR")
    return p


def _write(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_check(args) -> int:
    doc = load_input(args.input)
    report = analyze(doc, LintOptions(oriented=args.oriented)).report
    text = report.render_json() if args.format == "json" else report.render_text()
    _write(text, args.out)
    for d in report.diagnostics:
        print(f"{d.severity}: {d.message}", file=sys.stderr)
    if report.errors or (args.strict and report.warnings):
        return EXIT_FINDINGS
    return EXIT_OK


def _cmd_assertions(args) -> int:
    doc = load_input(args.input)
    report = analyze(doc, LintOptions(oriented=args.oriented)).report
    try:
        script = emit_assertion_script(report)
    except NotWellFormed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    _write(script, args.out)
    return EXIT_OK


def _cmd_join(args) -> int:
    doc = load_input(args.input)
    an = analyze(doc)
    a, b = _structure(doc, args.left), _structure(doc, args.right)
    r = join(an.hierarchy, a, b)
    if isinstance(r, AmbiguityFailure):
        print("ambiguous: " + " ".join(sorted(r.candidates)))
        return EXIT_FINDINGS
    print("TOP" if r is TOP else r)
    return EXIT_OK


def _cmd_paths(args) -> int:
    doc = load_input(args.input)
    an = analyze(doc)
    g = an.graph
    src, tgt = _class(doc, args.source), _class(doc, args.target)
    paths = g.paths(src, tgt)
    if not paths:
        print(f"no inheritance path from {src} to {tgt}")
        return EXIT_FINDINGS
    oldest = paths[0]
    bad = False
    for i, p in enumerate(paths):
        if p.failure is not None:
            status = f"not composable: {p.failure}"
            bad = True
        elif p.circular:
            ok = g._check_path(p, oldest) is None
            status = "identity" if ok else "not convertible to the identity"
            bad |= not ok
        elif i == 0:
            status = "valid"
        else:
            d = g._check_path(p, oldest)
            status = "convertible" if d is None else "NOT convertible"
            bad |= d is not None
        print(f"{p.render()}  {status}")
    return EXIT_FINDINGS if bad else EXIT_OK


def _cmd_graph(args) -> int:
    doc = load_input(args.input)
    an = analyze(doc)
    sys.stdout.write(render_dot(doc, an.graph, an.hierarchy))
    return EXIT_OK


def _cmd_properties(args) -> int:
    from .properties import check_join_laws, random_hierarchy

    import random

    rng = random.Random(args.seed)
    failures = 0
    targets = []
    if args.input:
        doc = load_input(args.input)
        targets.append((args.input, analyze(doc).hierarchy))
    for i in range(args.count):
        targets.append((f"random #{i}", random_hierarchy(rng, rng.randint(1, args.max_nodes))))
    for label, h in targets:
        problems = check_join_laws(h)
        if problems:
            failures += 1
            print(f"{label}: {problems[0]}")
    print(f"{len(targets) - failures}/{len(targets)} hierarchies satisfy every property")
    return EXIT_FINDINGS if failures else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "fixtures":
        if args.write:
            for path in write_corpus(args.write):
                print(path)
        else:
            print("\n".join(sorted(BUILTIN)))
        return EXIT_OK
    handler = {
        "check": _cmd_check,
        "assertions": _cmd_assertions,
        "join": _cmd_join,
        "paths": _cmd_paths,
        "graph": _cmd_graph,
        "properties": _cmd_properties,
    }[args.command]
    try:
        return handler(args)
    except (UsageError, DocumentError, HierarchyError, TermError) as exc:
        print(f"hierlint: {exc}", file=sys.stderr)
        return EXIT_USAGE


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
