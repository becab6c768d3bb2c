"""JSON hierarchy descriptions.

A document lists records, classes, definitions, coercions, canonical
instances and concrete instances.  Terms are tagged objects::

    {"var": "x"}  {"const": "c"}  {"app": [fn, arg, ...]}
    {"lam": ["x", "y"], "body": t}
    {"construct": "Monoid.type", "fields": {"sort": t, "class": t}}
    {"proj": "Monoid.sort", "arg": t}

A projection is named by its symbol (``Monoid.sort``) or by a pair
``["Monoid.type", "sort"]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Mapping, Optional

from .coercions import BUILTIN_CLASSES, ClassDecl, CoercionDecl
from .inference import CanonicalInstanceDecl
from .terms import (
    App,
    Const,
    Construct,
    DefinitionEnv,
    Hole,
    Lam,
    Proj,
    RecordDecl,
    Term,
    TermError,
    Var,
    app,
    check_term,
    constants,
    lam,
)

FORMAT_VERSION = "1"


class DocumentError(Exception):
    pass


class DocumentSyntaxError(DocumentError):
    def __init__(self, message, line=0, column=0):
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
        self.line = line
        self.column = column


class UnresolvedReference(DocumentError):
    pass


class VersionMismatch(DocumentError):
    pass


@dataclass
class ClassSpec:
    decl: ClassDecl
    subclasses: Optional[tuple[str, ...]] = None


@dataclass
class HierarchyDocument:
    format_version: str
    classes: list[ClassSpec]
    records: dict[str, RecordDecl]
    env: DefinitionEnv
    coercions: list[CoercionDecl]
    canonicals: list[CanonicalInstanceDecl]
    concrete_instances: dict[str, list[CanonicalInstanceDecl]]
    expected: Optional[dict] = None
    close_subclasses: bool = False
    name: str = ""

    @property
    def structures(self) -> dict[str, str]:
        """Structure name -> its ``type`` record."""
        return {c.decl.name: c.decl.record for c in self.classes if c.decl.record}

    def class_decl(self, name: str) -> ClassDecl:
        for c in self.classes:
            if c.decl.name == name:
                return c.decl
        for c in BUILTIN_CLASSES:
            if c.name == name:
                return c
        raise UnresolvedReference(f"class {name!r} is not declared")


def _err(where: str, msg: str) -> DocumentError:
    return DocumentError(f"{where}: {msg}")


def _expect(obj, kind, where):
    if not isinstance(obj, kind):
        raise _err(where, f"expected {kind.__name__}, got {type(obj).__name__}")
    return obj


class _TermReader:
    def __init__(self, records: Mapping[str, RecordDecl]):
        self.records = records
        self.symbols: dict[str, tuple[str, str]] = {}
        for r in records.values():
            for f in r.fields:
                self.symbols[r.projection_symbol(f)] = (r.name, f)

    def read(self, obj: Any, where: str) -> Term:
        _expect(obj, dict, where)
        if "var" in obj:
            return Var(_expect(obj["var"], str, where))
        if "const" in obj:
            return Const(_expect(obj["const"], str, where))
        if "hole" in obj:
            return Hole(_expect(obj["hole"], int, where))
        if "app" in obj:
            parts = _expect(obj["app"], list, where)
            if len(parts) < 2:
                raise _err(where, "app needs a function and at least one argument")
            return app(*(self.read(p, where) for p in parts))
        if "lam" in obj:
            binders = _expect(obj["lam"], list, where)
            if not binders or not all(isinstance(b, str) for b in binders):
                raise _err(where, "lam needs a nonempty list of binder names")
            return lam(binders, self.read(obj.get("body"), where))
        if "construct" in obj:
            rname = _expect(obj["construct"], str, where)
            rec = self.records.get(rname)
            if rec is None:
                raise UnresolvedReference(f"{where}: record {rname!r} is not declared")
            fields = _expect(obj.get("fields"), dict, where)
            unknown = set(fields) - set(rec.fields)
            if unknown:
                raise UnresolvedReference(f"{where}: {sorted(unknown)[0]!r} is not a field of {rname}")
            missing = [f for f in rec.fields if f not in fields]
            if missing:
                raise _err(where, f"construct of {rname} lacks field {missing[0]!r}")
            return Construct(rname, tuple((f, self.read(fields[f], where)) for f in rec.fields))
        if "proj" in obj:
            p = obj["proj"]
            if isinstance(p, list) and len(p) == 2:
                rname, fname = p
                rec = self.records.get(rname)
                if rec is None:
                    raise UnresolvedReference(f"{where}: record {rname!r} is not declared")
                if fname not in rec.fields:
                    raise UnresolvedReference(f"{where}: {fname!r} is not a field of {rname}")
            else:
                sym = _expect(p, str, where)
                if sym not in self.symbols:
                    raise UnresolvedReference(f"{where}: unknown projection {sym!r}")
                rname, fname = self.symbols[sym]
            return Proj(rname, fname, self.read(obj.get("arg"), where))
        raise _err(where, f"unknown term tag in {sorted(obj)}")


def term_to_json(t: Term, records: Optional[Mapping[str, RecordDecl]] = None) -> dict:
    if isinstance(t, Var):
        return {"var": t.name}
    if isinstance(t, Const):
        return {"const": t.name}
    if isinstance(t, Hole):
        return {"hole": t.id}
    if isinstance(t, App):
        parts = []
        while isinstance(t, App):
            parts.append(t.arg)
            t = t.fn
        return {"app": [term_to_json(t, records)] + [term_to_json(a, records) for a in reversed(parts)]}
    if isinstance(t, Lam):
        binders = []
        while isinstance(t, Lam):
            binders.append(t.binder)
            t = t.body
        return {"lam": binders, "body": term_to_json(t, records)}
    if isinstance(t, Construct):
        return {"construct": t.record, "fields": {k: term_to_json(v, records) for k, v in t.fields}}
    if isinstance(t, Proj):
        rec = (records or {}).get(t.record) or RecordDecl(t.record, (t.field_name,))
        return {"proj": rec.projection_symbol(t.field_name), "arg": term_to_json(t.arg, records)}
    raise TypeError(t)


def _names(where, items):
    seen = set()
    for it in items:
        n = it.get("name")
        if not isinstance(n, str) or not n:
            raise _err(where, "every entry needs a name")
        if n in seen:
            raise _err(where, f"{n!r} declared twice")
        seen.add(n)


def load_document(text: str, name: str = "") -> HierarchyDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return document_from_data(data, name)


def parse_document(raw: bytes | str, name: str = "") -> HierarchyDocument:
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentSyntaxError(f"input is not UTF-8: {exc.reason}") from None
    return load_document(raw, name)


def document_from_data(data: Any, name: str = "") -> HierarchyDocument:
    _expect(data, dict, "document")
    version = str(data.get("version", ""))
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported format version {version!r} (expected {FORMAT_VERSION!r})")
    unknown = set(data) - {
        "version", "classes", "records", "definitions", "coercions", "canonicals",
        "instances", "expected", "close_subclasses", "description",
    }
    if unknown:
        raise _err("document", f"unknown key {sorted(unknown)[0]!r}")

    # records
    records: dict[str, RecordDecl] = {}
    rec_items = _expect(data.get("records", []), list, "records")
    _names("records", rec_items)
    for r in rec_items:
        fields, unnamed = [], set()
        for f in _expect(r.get("fields", []), list, f"record {r['name']}"):
            if isinstance(f, str):
                fields.append(f)
            else:
                _expect(f, dict, f"record {r['name']}")
                fields.append(f["name"])
                if not f.get("named", True):
                    unnamed.add(f["name"])
        if len(set(fields)) != len(fields):
            raise _err(f"record {r['name']}", "duplicate field")
        records[r["name"]] = RecordDecl(r["name"], tuple(fields), r.get("constructor", ""), frozenset(unnamed))
    reader = _TermReader(records)

    # classes
    class_items = _expect(data.get("classes", []), list, "classes")
    _names("classes", class_items)
    classes: list[ClassSpec] = []
    builtin = {c.name for c in BUILTIN_CLASSES}
    for c in class_items:
        where = f"class {c['name']}"
        if c["name"] in builtin:
            raise _err(where, "name is reserved")
        rec = c.get("record")
        if rec is not None and rec not in records:
            raise UnresolvedReference(f"{where}: record {rec!r} is not declared")
        params = c.get("params", 0)
        if not isinstance(params, int) or params < 0:
            raise _err(where, "params must be a natural number")
        fields = records[rec].fields if rec else ()
        subs = c.get("subclasses")
        classes.append(
            ClassSpec(ClassDecl(c["name"], params, fields, rec), tuple(subs) if subs is not None else None)
        )
    class_names = {c.decl.name for c in classes}
    for c in classes:
        for s in c.subclasses or ():
            if s not in class_names:
                raise UnresolvedReference(f"class {c.decl.name}: subclass {s!r} is not declared")

    # definitions
    def_items = _expect(data.get("definitions", []), list, "definitions")
    _names("definitions", def_items)
    definitions, opaque = {}, set()
    # packager-form instance names count as declared up front
    packaged_names = {
        it.get("name")
        for items in (data.get("instances") or {}).values()
        if isinstance(items, list)
        for it in items
        if isinstance(it, dict) and "structure" in it
    }
    for d in def_items:
        where = f"definition {d['name']}"
        if "body" in d:
            params = tuple(_expect(d.get("params", []), list, where))
            body = reader.read(d["body"], where)
            later = sorted(constants(body) - set(definitions) - opaque - packaged_names)
            if later:
                raise UnresolvedReference(f"{where}: {later[0]!r} is not declared before use")
            definitions[d["name"]] = (params, body)
        else:
            opaque.add(d["name"])

    # concrete instances given in packager form become definitions too
    inst_data = _expect(data.get("instances", {}), dict, "instances")
    packaged: list[tuple[str, dict]] = []
    for concrete, items in inst_data.items():
        for it in _expect(items, list, f"instances of {concrete}"):
            if isinstance(it, dict) and "structure" in it:
                packaged.append((concrete, it))
    structure_records = {c.decl.name: c.decl.record for c in classes if c.decl.record}
    for concrete, it in packaged:
        where = f"instance {it.get('name')}"
        rname = structure_records.get(it["structure"])
        if rname is None:
            raise UnresolvedReference(f"{where}: structure {it['structure']!r} is not declared")
        rec = records[rname]
        if len(rec.fields) != 2:
            raise _err(where, "packager form needs a two-field structure record")
        body = Construct(rname, ((rec.fields[0], Const(concrete)), (rec.fields[1], reader.read(it["class"], where))))
        if it["name"] in definitions or it["name"] in opaque:
            raise _err(where, "name already defined")
        definitions[it["name"]] = ((), body)

    try:
        env = DefinitionEnv(definitions, frozenset(opaque), records)
    except TermError as exc:
        raise UnresolvedReference(str(exc)) from None

    def check_closed(t, where):
        try:
            check_term(env, t)
        except TermError as exc:
            raise UnresolvedReference(f"{where}: {exc}") from None
        return t

    # coercions
    spec_by_name = {c.decl.name: c.decl for c in classes}
    spec_by_name.update({c.name: c for c in BUILTIN_CLASSES})
    co_items = _expect(data.get("coercions", []), list, "coercions")
    _names("coercions", co_items)
    coercions = []
    for i, c in enumerate(co_items):
        where = f"coercion {c['name']}"
        try:
            src, tgt = spec_by_name[c["source"]], spec_by_name[c["target"]]
        except KeyError as exc:
            raise UnresolvedReference(f"{where}: class {exc.args[0]!r} is not declared") from None
        body = check_closed(reader.read(c["body"], where) if "body" in c else Const(c["name"]), where)
        binders = tuple(c.get("binders", ["x"]))
        coercions.append(
            CoercionDecl(
                c["name"],
                src,
                tgt,
                body,
                binders,
                c.get("instance"),
                tuple(reader.read(u, where) for u in c.get("source_args", [])),
                tuple(reader.read(u, where) for u in c.get("target_args", [])),
                bool(c.get("proof_irrelevant", False)),
                i,
            )
        )

    # canonicals
    can_items = _expect(data.get("canonicals", []), list, "canonicals")
    _names("canonicals", can_items)
    canonicals = []
    for c in can_items:
        where = f"canonical {c['name']}"
        if "body" in c:
            body = check_closed(reader.read(c["body"], where), where)
        elif c["name"] in definitions:
            body = env.unfold(c["name"])
        else:
            raise UnresolvedReference(f"{where}: no definition named {c['name']!r}")
        for s in (c.get("owner"),):
            if s is not None and s not in structure_records:
                raise UnresolvedReference(f"{where}: structure {s!r} is not declared")
        canonicals.append(CanonicalInstanceDecl(c["name"], body, c.get("owner"), c.get("concrete")))

    concrete_instances: dict[str, list[CanonicalInstanceDecl]] = {}
    for concrete, items in inst_data.items():
        out = concrete_instances.setdefault(concrete, [])
        for it in items:
            n = it if isinstance(it, str) else it.get("name")
            if n not in definitions:
                raise UnresolvedReference(f"instances of {concrete}: no definition named {n!r}")
            out.append(CanonicalInstanceDecl(n, env.unfold(n), None, concrete))

    expected = data.get("expected")
    if expected is not None:
        _expect(expected, dict, "expected")

    return HierarchyDocument(
        version,
        classes,
        records,
        env,
        coercions,
        canonicals,
        concrete_instances,
        expected,
        bool(data.get("close_subclasses", False)),
        name,
    )
