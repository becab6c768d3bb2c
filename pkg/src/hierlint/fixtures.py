"""Built-in hierarchy documents.

``running_example`` is the four-structure monoid/semiring/group/ring
development with its variants.  ``packed_document`` generates flat packed
classes from a parent map; the MathComp skeletons and the two small
two small ambiguity examples are built with it.
"""

from __future__ import annotations

import copy
from typing import Callable, Iterable, Mapping, Sequence

# -- term builders (JSON form) ----------------------------------------------


def V(x):
    return {"var": x}


def C(c):
    return {"const": c}


def A(f, *args):
    return {"app": [f, *args]}


def L(binders, body):
    return {"lam": list(binders), "body": body}


def K(record, **fields):
    return {"construct": record, "fields": fields}


def Kf(record, fields: Mapping):
    return {"construct": record, "fields": dict(fields)}


def P(symbol, arg):
    return {"proj": symbol, "arg": arg}


def _unnamed(name):
    return {"name": name, "named": False}


# -- running example ----------------------------------------------------------

RUNNING_STRUCTURES = ("Monoid.type", "Semiring.type", "Group.type", "Ring.type")


def _running_base() -> dict:
    cT = V("cT")
    records = [
        {"name": "Monoid.class_of", "constructor": "Monoid.Class", "fields": ["mixin"]},
        {"name": "Monoid.type", "constructor": "Monoid.Pack", "fields": ["sort", _unnamed("class")]},
        {"name": "Semiring.class_of", "constructor": "Semiring.Class", "fields": ["base", "mixin"]},
        {"name": "Semiring.type", "constructor": "Semiring.Pack", "fields": ["sort", _unnamed("class")]},
        {"name": "Group.class_of", "constructor": "Group.Class", "fields": ["base", "mixin"]},
        {"name": "Group.type", "constructor": "Group.Pack", "fields": ["sort", _unnamed("class")]},
        {"name": "Ring.class_of", "constructor": "Ring.Class", "fields": ["base", "mixin"]},
        {"name": "Ring.type", "constructor": "Ring.Pack", "fields": ["sort", _unnamed("class")]},
    ]
    classes = [{"name": s, "params": 0, "record": s} for s in RUNNING_STRUCTURES]
    ring_monoid_class = P("Group.base", P("Ring.base", P("Ring.class", cT)))
    definitions = [
        {
            "name": "Semiring.monoidType",
            "params": ["cT"],
            "body": K("Monoid.type", sort=P("Semiring.sort", cT), **{"class": P("Semiring.base", P("Semiring.class", cT))}),
        },
        {
            "name": "Group.monoidType",
            "params": ["cT"],
            "body": K("Monoid.type", sort=P("Group.sort", cT), **{"class": P("Group.base", P("Group.class", cT))}),
        },
        {
            "name": "Ring.monoidType",
            "params": ["cT"],
            "body": K("Monoid.type", sort=P("Ring.sort", cT), **{"class": ring_monoid_class}),
        },
        {
            "name": "Ring.groupType",
            "params": ["cT"],
            "body": K("Group.type", sort=P("Ring.sort", cT), **{"class": P("Ring.base", P("Ring.class", cT))}),
        },
        {
            "name": "Ring.semiringType",
            "params": ["cT"],
            "body": K(
                "Semiring.type",
                sort=P("Ring.sort", cT),
                **{"class": K("Semiring.class_of", base=ring_monoid_class, mixin=P("Ring.mixin", P("Ring.class", cT)))},
            ),
        },
        {
            "name": "Ring.semiring_groupType",
            "params": ["cT"],
            "body": K(
                "Group.type",
                sort=P("Semiring.sort", A(C("Ring.semiringType"), cT)),
                **{"class": P("Ring.base", P("Ring.class", cT))},
            ),
        },
    ]

    def sort_coercion(s):
        prefix = s.split(".")[0]
        return {
            "name": f"{prefix}.sort",
            "source": s,
            "target": "Sortclass",
            "body": L(["cT"], P(f"{prefix}.sort", cT)),
            "binders": ["cT"],
        }

    def view(name, src, tgt):
        return {"name": name, "source": src, "target": tgt}

    coercions = [
        sort_coercion("Monoid.type"),
        sort_coercion("Semiring.type"),
        view("Semiring.monoidType", "Semiring.type", "Monoid.type"),
        sort_coercion("Group.type"),
        view("Group.monoidType", "Group.type", "Monoid.type"),
        sort_coercion("Ring.type"),
        view("Ring.monoidType", "Ring.type", "Monoid.type"),
        view("Ring.semiringType", "Ring.type", "Semiring.type"),
        view("Ring.groupType", "Ring.type", "Group.type"),
    ]
    canonicals = [
        {"name": n}
        for n in (
            "Semiring.monoidType",
            "Group.monoidType",
            "Ring.monoidType",
            "Ring.groupType",
            "Ring.semiringType",
            "Ring.semiring_groupType",
        )
    ]
    return {
        "version": "1",
        "description": "Monoids, semirings, groups and rings as packed classes.",
        "records": records,
        "classes": classes,
        "definitions": definitions,
        "coercions": coercions,
        "canonicals": canonicals,
        "instances": {},
    }


def _clean(expected_diagnostics=(), **summary):
    return {"summary": summary, "diagnostics": list(expected_diagnostics)}


def running_example() -> dict:
    doc = _running_base()
    doc["expected"] = _clean()
    return doc


def running_example_no_semiring_canonical() -> dict:
    doc = _running_base()
    doc["description"] = "Ring.semiringType is not declared canonical."
    doc["canonicals"] = [c for c in doc["canonicals"] if c["name"] != "Ring.semiringType"]
    doc["expected"] = _clean(
        ["There is no join of Ring.type and Semiring.type but it is expected to be Ring.type."],
        missing_hints=1,
    )
    return doc


def running_example_bad_monoid_group() -> dict:
    doc = _running_base()
    cT = V("cT")
    doc["description"] = "A misplaced group instance overwrites the join of groups and monoids."
    doc["definitions"].append(
        {
            "name": "Ring.bad_monoid_groupType",
            "params": ["cT"],
            "body": K(
                "Group.type",
                sort=P("Monoid.sort", A(C("Ring.monoidType"), cT)),
                **{"class": P("Ring.base", P("Ring.class", cT))},
            ),
        }
    )
    doc["canonicals"].append({"name": "Ring.bad_monoid_groupType"})
    doc["expected"] = _clean(
        ["The join of Group.type and Monoid.type is Ring.type but it is expected to be Group.type."],
        overwritten_joins=1,
    )
    return doc


def mutated_mixin() -> dict:
    """Ring.semiringType repacks a different monoid mixin."""
    doc = _running_base()
    cT = V("cT")
    doc["description"] = "Ring.semiringType packs a fresh monoid mixin, so two Ring >-> Monoid paths differ."
    doc["definitions"].insert(0, {"name": "Ring.other_monoid_mixin"})
    for d in doc["definitions"]:
        if d["name"] == "Ring.semiringType":
            d["body"]["fields"]["class"]["fields"]["base"] = K(
                "Monoid.class_of", mixin=A(C("Ring.other_monoid_mixin"), cT)
            )
    doc["expected"] = _clean(
        [
            "New coercion path [Ring.semiringType; Semiring.monoidType] : Ring.type >-> Monoid.type "
            "is not convertible with existing [Ring.monoidType] : Ring.type >-> Monoid.type."
        ],
        incoherent_paths=1,
    )
    return doc


def _z_instances(monoid_for_semiring="Z_monoid", ring=True, semiring=True):
    mon = lambda m: K("Monoid.class_of", mixin=C(m))  # noqa: E731
    out = [{"name": "Z_monoidType", "structure": "Monoid.type", "class": mon("Z_monoid")}]
    if semiring:
        out.append(
            {
                "name": "Z_semiringType",
                "structure": "Semiring.type",
                "class": K("Semiring.class_of", base=mon(monoid_for_semiring), mixin=C("Z_semiring")),
            }
        )
    out.append(
        {
            "name": "Z_groupType",
            "structure": "Group.type",
            "class": K("Group.class_of", base=mon("Z_monoid"), mixin=C("Z_group")),
        }
    )
    if ring:
        out.append(
            {
                "name": "Z_ringType",
                "structure": "Ring.type",
                "class": K(
                    "Ring.class_of",
                    base=K("Group.class_of", base=mon("Z_monoid"), mixin=C("Z_group")),
                    mixin=C("Z_semiring"),
                ),
            }
        )
    return out


def z_instances() -> dict:
    doc = _running_base()
    doc["description"] = "Canonical monoid, semiring, group and ring instances for Z."
    doc["definitions"] = [{"name": n} for n in ("Z", "Z_monoid", "Z_semiring", "Z_group")] + doc["definitions"]
    doc["instances"] = {"Z": _z_instances()}
    doc["expected"] = _clean()
    return doc


def z_mutated() -> dict:
    doc = _running_base()
    doc["description"] = "Z_semiringType is built over a different monoid mixin than Z_monoidType."
    doc["definitions"] = [{"name": n} for n in ("Z", "Z_monoid", "Z_monoid'", "Z_semiring", "Z_group")] + doc[
        "definitions"
    ]
    # without Z_ringType: its equations would make the mismatch show up twice more
    doc["instances"] = {"Z": _z_instances(monoid_for_semiring="Z_monoid'", ring=False)}
    doc["expected"] = _clean(
        [
            "The Monoid.type instance of Z obtained by Semiring.monoidType Z_semiringType "
            "is not convertible with Z_monoidType."
        ],
        instance_mismatches=1,
    )
    return doc


def z_bad_packager() -> dict:
    """The semiring instance names the carrier through another instance's sort."""
    doc = _running_base()
    doc["description"] = "bad_Z_semiringType takes its carrier from Monoid.sort Z_monoidType."
    doc["definitions"] = [{"name": n} for n in ("Z", "Z_monoid", "Z_semiring", "Z_group")] + doc["definitions"]
    doc["definitions"].append(
        {
            "name": "bad_Z_semiringType",
            "body": K(
                "Semiring.type",
                sort=P("Monoid.sort", C("Z_monoidType")),
                **{"class": K("Semiring.class_of", base=K("Monoid.class_of", mixin=C("Z_monoid")), mixin=C("Z_semiring"))},
            ),
        }
    )
    insts = [i for i in _z_instances() if i["name"] != "Z_semiringType"]
    doc["instances"] = {"Z": insts[:1] + ["bad_Z_semiringType"] + insts[1:]}
    doc["canonicals"].append({"name": "bad_Z_semiringType"})
    doc["expected"] = _clean(
        ["The join of Semiring.type and Monoid.type is a concrete type Z but is expected to be Semiring.type."],
        concrete_joins=1,
    )
    return doc


def empty() -> dict:
    return {
        "version": "1",
        "description": "Nothing declared.",
        "records": [],
        "classes": [],
        "definitions": [],
        "coercions": [],
        "canonicals": [],
        "instances": {},
        "expected": _clean(),
    }


# -- generated flat packed classes ------------------------------------------


def _closure(parents: Mapping[str, Sequence[str]]) -> dict[str, set[str]]:
    """Strict ancestors of every structure."""
    out: dict[str, set[str]] = {}

    def go(s):
        if s not in out:
            acc: set[str] = set()
            for p in parents[s]:
                acc |= {p} | go(p)
            out[s] = acc
        return out[s]

    for s in parents:
        go(s)
    return out


def brute_joins(parents: Mapping[str, Sequence[str]]) -> dict[tuple[str, str], frozenset[str]]:
    """Minimal common subclasses of every unordered pair, by enumeration."""
    anc = _closure(parents)
    names = list(parents)
    out = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            common = [c for c in names if (c == a or a in anc[c]) and (c == b or b in anc[c])]
            minimal = [c for c in common if not any(d in anc[c] for d in common if d != c)]
            out[(a, b)] = frozenset(minimal)
    return out


def packed_document(
    parents: Mapping[str, Sequence[str]],
    *,
    description: str = "",
    missing_hints: Iterable[tuple[str, str]] = (),
    irrelevant_shortcuts: Sequence[tuple[str, str]] = (),
    extra: Callable[[dict, dict], None] | None = None,
) -> dict:
    """Flat packed classes for a hierarchy given by direct parents.

    Every structure ``S`` gets a record ``S`` (carrier ``sort`` plus an
    unnamed class field), a class record ``S.class_of`` with one mixin
    field per non-strict ancestor, views ``S.A`` to every strict ancestor,
    a carrier coercion, and coercions to its direct parents.  All views are
    canonical, and every pair of incomparable structures with a unique join
    ``J`` gets a canonical ``J.join_A_B``.  Pairs listed in ``missing_hints``
    keep their definitions but lose the canonical declaration.
    """
    order = list(parents)
    anc = _closure(parents)
    rank = {s: i for i, s in enumerate(order)}

    def up(s):
        return sorted(anc[s] | {s}, key=rank.__getitem__)

    cT = V("cT")
    records, classes, defs, coercions, canonicals = [], [], [], [], []
    for s in order:
        records.append({"name": s, "constructor": f"{s}.Pack", "fields": ["sort", _unnamed("class")]})
        records.append({"name": f"{s}.class_of", "constructor": f"{s}.Class", "fields": [f"m_{x}" for x in up(s)]})
        classes.append({"name": s, "params": 0, "record": s})

    def view_body(s, a, tweak=None):
        fields = {f"m_{x}": P(f"{s}.m_{x}", P(f"{s}.class", cT)) for x in up(a)}
        if tweak:
            fields[f"m_{a}"] = A(C(tweak), fields[f"m_{a}"])
        return Kf(a, {"sort": P(f"{s}.sort", cT), "class": Kf(f"{a}.class_of", fields)})

    missing = {tuple(sorted(p)) for p in missing_hints}
    for s in order:
        for a in sorted(anc[s], key=rank.__getitem__):
            defs.append({"name": f"{s}.{a}", "params": ["cT"], "body": view_body(s, a)})
            if tuple(sorted((s, a))) not in missing:
                canonicals.append({"name": f"{s}.{a}"})
    for s in order:
        coercions.append(
            {"name": f"{s}.sort", "source": s, "target": "Sortclass", "body": L(["cT"], P(f"{s}.sort", cT)), "binders": ["cT"]}
        )
        for p in parents[s]:
            coercions.append({"name": f"{s}.{p}", "source": s, "target": p})

    joins = brute_joins(parents)
    for (a, b), found in joins.items():
        if a in anc[b] or b in anc[a] or len(found) != 1:
            continue
        (j,) = found
        lo, hi = sorted((a, b))
        name = f"{j}.join_{lo}_{hi}"
        defs.append(
            {
                "name": name,
                "params": ["cT"],
                "body": Kf(
                    lo,
                    {
                        "sort": P(f"{hi}.sort", A(C(f"{j}.{hi}"), cT)),
                        "class": P(f"{lo}.class", A(C(f"{j}.{lo}"), cT)),
                    },
                ),
            }
        )
        if (lo, hi) not in missing:
            canonicals.append({"name": name})

    for s, a in irrelevant_shortcuts:
        if a not in anc[s]:
            raise ValueError(f"{a} is not an ancestor of {s}")
        proof = f"{s}.{a}_proof"
        defs.append({"name": proof})
        defs.append({"name": f"{s}.{a}'", "params": ["cT"], "body": view_body(s, a, proof)})
        coercions.append({"name": f"{s}.{a}'", "source": s, "target": a, "proof_irrelevant": True})

    doc = {
        "version": "1",
        "description": description,
        "records": records,
        "classes": classes,
        "definitions": defs,
        "coercions": coercions,
        "canonicals": canonicals,
        "instances": {},
    }
    if extra:
        extra(doc, {"anc": anc, "up": up})
    return doc


def two_joins() -> dict:
    doc = packed_document(
        {"A": [], "B": [], "C": ["A", "B"], "D": ["A", "B"]},
        description="C and D both inherit A and B directly, so A and B have two joins.",
    )
    doc["expected"] = _clean(["The join of A and B is ambiguous: C, D."], ambiguous_joins=1)
    return doc


def interposed_join() -> dict:
    doc = packed_document(
        {"A": [], "B": [], "AB": ["A", "B"], "C": ["AB"], "D": ["AB"]},
        description="A structure AB between {A, B} and {C, D} disambiguates the join.",
    )
    doc["expected"] = _clean()
    return doc


# -- MathComp skeletons -----------------------------------------------------

_GRING = ("zmod", "ring", "comRing", "unitRing", "comUnitRing", "idomain", "field")


def mathcomp_parents(version: str = "1.7.0") -> dict[str, list[str]]:
    p: dict[str, list[str]] = {
        "eqType": [],
        "choiceType": ["eqType"],
        "countType": ["choiceType"],
        "finType": ["countType"],
        "baseFinGroupType": ["finType"],
        "finGroupType": ["baseFinGroupType"],
        "zmodType": ["choiceType"],
        "ringType": ["zmodType"],
        "lmodType": ["zmodType"],
        "lalgType": ["ringType", "lmodType"],
        "algType": ["lalgType"],
        "comRingType": ["ringType"],
        "unitRingType": ["ringType"],
        "comUnitRingType": ["comRingType", "unitRingType"],
        "unitAlgType": ["algType", "unitRingType"],
        "idomainType": ["comUnitRingType"],
        "fieldType": ["idomainType"],
        "decFieldType": ["fieldType"],
        "closedFieldType": ["decFieldType"],
        "countZmodType": ["zmodType", "countType"],
        "countRingType": ["ringType", "countZmodType"],
        "countComRingType": ["comRingType", "countRingType"],
        "countUnitRingType": ["unitRingType", "countRingType"],
        "countComUnitRingType": ["comUnitRingType", "countComRingType", "countUnitRingType"],
        "countIdomainType": ["idomainType", "countComUnitRingType"],
        "countFieldType": ["fieldType", "countIdomainType"],
        "countDecFieldType": ["decFieldType", "countFieldType"],
        "countClosedFieldType": ["closedFieldType", "countDecFieldType"],
        "finZmodType": ["zmodType", "finType"],
        "finRingType": ["ringType", "finZmodType"],
        "finComRingType": ["comRingType", "finRingType"],
        "finUnitRingType": ["unitRingType", "finRingType"],
        "finComUnitRingType": ["comUnitRingType", "finComRingType", "finUnitRingType"],
        "finIdomainType": ["idomainType", "finComUnitRingType"],
        "finFieldType": ["fieldType", "finIdomainType"],
        "finLmodType": ["lmodType", "finZmodType"],
        "finLalgType": ["lalgType", "finRingType", "finLmodType"],
        "finAlgType": ["algType", "finLalgType"],
        "finUnitAlgType": ["unitAlgType", "finUnitRingType", "finAlgType"],
        "numDomainType": ["idomainType"],
        "numFieldType": ["numDomainType", "fieldType"],
        "numClosedFieldType": ["numFieldType", "closedFieldType"],
        "realDomainType": ["numDomainType"],
        "realFieldType": ["realDomainType", "numFieldType"],
        "archiFieldType": ["realFieldType"],
        "rcfType": ["realFieldType"],
        "vectType": ["lmodType"],
        "FalgType": ["unitAlgType", "vectType"],
        "fieldExtType": ["FalgType", "fieldType"],
        "splittingFieldType": ["fieldExtType"],
    }
    if version == "1.8.0":
        for x in _GRING:
            p[f"fin{x[0].upper()}{x[1:]}Type"].append(f"count{x[0].upper()}{x[1:]}Type")
    elif version != "1.7.0":
        raise ValueError(f"unknown version {version!r}")
    return p


MATHCOMP_MISSING_HINTS = (
    ("countClosedFieldType", "countIdomainType", "countClosedFieldType"),
    ("countType", "lmodType", "finLmodType"),
    ("countType", "lalgType", "finLalgType"),
    ("countType", "algType", "finAlgType"),
    ("countType", "unitAlgType", "finUnitAlgType"),
    ("finUnitRingType", "unitAlgType", "finUnitAlgType"),
    ("fieldType", "numDomainType", "numFieldType"),
    ("fieldType", "realDomainType", "realFieldType"),
)

# the inconvertible multiple paths are proof-only; where they sit is not
# recorded, so the skeleton places eleven of them on leaf structures
MATHCOMP_IRRELEVANT = (
    ("rcfType", "fieldType"),
    ("rcfType", "idomainType"),
    ("rcfType", "comUnitRingType"),
    ("archiFieldType", "fieldType"),
    ("archiFieldType", "idomainType"),
    ("numClosedFieldType", "fieldType"),
    ("numClosedFieldType", "idomainType"),
    ("countClosedFieldType", "fieldType"),
    ("countClosedFieldType", "idomainType"),
    ("finFieldType", "idomainType"),
    ("finFieldType", "comUnitRingType"),
)


def _extremal_group(doc, ctx):
    """A finType instance whose carrier placeholder got a countType instance."""
    gT = V("gT")
    up = ctx["up"]
    count_inst = A(C("extremal_group_countType"), gT)
    fields = {f"m_{x}": P(f"countType.m_{x}", P("countType.class", count_inst)) for x in up("countType")}
    fields["m_finType"] = A(C("extremal_group_finMixin"), gT)
    doc["definitions"] += [
        {"name": "extremal_group_finMixin"},
        {"name": "extremal_group_countType", "params": ["gT"], "body": A(C("finGroupType.countType"), gT)},
        {
            "name": "extremal_group_finType",
            "params": ["gT"],
            "body": Kf(
                "finType",
                {"sort": P("countType.sort", count_inst), "class": Kf("finType.class_of", fields)},
            ),
        },
    ]
    doc["canonicals"].append({"name": "extremal_group_finType"})


def mathcomp_1_7_0() -> dict:
    doc = packed_document(
        mathcomp_parents("1.7.0"),
        description="Skeleton of the MathComp 1.7.0 structure hierarchy with opaque mixins.",
        missing_hints=[(a, b) for a, b, _ in MATHCOMP_MISSING_HINTS],
        irrelevant_shortcuts=MATHCOMP_IRRELEVANT,
        extra=_extremal_group,
    )
    diags = []
    for x in ("zmod", "ring", "comRing", "unitRing", "comUnitRing", "idomain", "field"):
        a, b = sorted(("countType", f"{x}Type"))
        cap = x[0].upper() + x[1:]
        diags.append(f"The join of {a} and {b} is ambiguous: count{cap}Type, fin{cap}Type.")
    diags.append("The join of finType and countType is finGroupType but it is expected to be finType.")
    for a, b, e in MATHCOMP_MISSING_HINTS:
        a, b = sorted((a, b))
        diags.append(f"There is no join of {a} and {b} but it is expected to be {e}.")
    doc["expected"] = {
        "summary": {"ambiguous_joins": 7, "missing_hints": 8, "overwritten_joins": 1, "incoherent_path_warnings": 11},
        "diagnostics": diags,
    }
    return doc


def mathcomp_1_8_0() -> dict:
    doc = packed_document(
        mathcomp_parents("1.8.0"),
        description="Skeleton of the MathComp 1.8.0 structure hierarchy with opaque mixins.",
    )
    doc["expected"] = _clean()
    return doc


BUILTIN: dict[str, Callable[[], dict]] = {
    "running_example": running_example,
    "running_example_no_semiring_canonical": running_example_no_semiring_canonical,
    "running_example_bad_monoid_group": running_example_bad_monoid_group,
    "mutated_mixin": mutated_mixin,
    "z_instances": z_instances,
    "z_mutated": z_mutated,
    "z_bad_packager": z_bad_packager,
    "two_joins": two_joins,
    "interposed_join": interposed_join,
    "empty": empty,
    "mathcomp_1_7_0": mathcomp_1_7_0,
    "mathcomp_1_8_0": mathcomp_1_8_0,
}


def fixture_data(name: str) -> dict:
    try:
        return copy.deepcopy(BUILTIN[name]())
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(BUILTIN))}") from None


def load_fixture(name: str):
    from .document import document_from_data

    return document_from_data(fixture_data(name), name)


def write_corpus(directory) -> list[str]:
    """Dump every built-in fixture as ``<name>.json`` under ``directory``."""
    import json
    import os

    os.makedirs(directory, exist_ok=True)
    written = []
    for name in sorted(BUILTIN):
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(fixture_data(name), fh, indent=1, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written
