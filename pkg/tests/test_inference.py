import itertools

import pytest

from hierlint.fixtures import RUNNING_STRUCTURES, load_fixture
from hierlint.hierarchy import JoinAssertion, join
from hierlint.inference import (
    CanonicalInstanceDecl,
    ConcreteCollision,
    HintTable,
    IncompleteTable,
    NoHint,
    Solved,
    check_instance_coherence,
    check_join_assertion,
    declare_canonical,
    resolve,
    verify_predictability,
)
from hierlint.lint import analyze, build_graph
from hierlint.terms import App, Const, Construct, DefinitionEnv, RecordDecl, Var, convertible

M, S, G, R = RUNNING_STRUCTURES


def _table(doc, upto=None):
    t = HintTable(doc.env, doc.structures, build_graph(doc))
    for c in doc.canonicals[:upto]:
        t.declare(c)
    for concrete in sorted(doc.concrete_instances):
        for c in doc.concrete_instances[concrete]:
            if c.name not in {d.name for d in doc.canonicals}:
                t.declare(c)
    return t


def _decl(doc, name):
    return next(c for c in doc.canonicals if c.name == name)


def test_view_registers_sort_pair_only(running):
    t = HintTable(running.env, running.structures)
    declare_canonical(t, _decl(running, "Semiring.monoidType"))
    # the class field is an unnamed projection and is skipped
    assert list(t.hints) == [("Monoid.sort", "Semiring.sort")]
    assert t.hints["Monoid.sort", "Semiring.sort"].owner == S


def test_bad_group_instance_overwrites():
    doc = load_fixture("running_example_bad_monoid_group")
    t = _table(doc, upto=-1)
    events = t.declare(doc.canonicals[-1])
    assert [e.key for e in events] == [("Group.sort", "Monoid.sort")]
    assert events[0].previous.solution_name == "Group.monoidType" or events[0].via_swap
    assert events[0].new.solution_name == "Ring.bad_monoid_groupType"


def test_all_unnamed_fields_register_nothing():
    rec = RecordDecl("X.type", ("sort", "class"), "X.Pack", frozenset({"sort", "class"}))
    env = DefinitionEnv(opaque=frozenset({"T", "c"}), records={"X.type": rec})
    t = HintTable(env, {"X.type": "X.type"})
    body = Construct("X.type", (("sort", Const("T")), ("class", Const("c"))))
    assert t.declare(CanonicalInstanceDecl("x_inst", body)) == []
    assert t.hints == {}


def test_resolve_group_semiring(running):
    t = _table(running)
    r = resolve(t, ("Group.sort", "Semiring.sort"))
    assert isinstance(r, Solved) and r.inferred_structure == R
    w = Var("?w")
    # ?G := Ring.semiring_groupType ?w and ?S := Ring.semiringType ?w for a fresh ring ?w
    assert r.instantiations["?l"] == App(Const("Ring.semiring_groupType"), w)
    assert convertible(t.env, r.instantiations["?r"], App(Const("Ring.semiringType"), w))
    assert r.hint.solution_name == "Ring.semiring_groupType"


def test_resolve_concrete_carrier():
    doc = load_fixture("z_instances")
    t = _table(doc)
    r = resolve(t, ("Monoid.sort", "Z"))
    assert isinstance(r, Solved)
    assert r.instantiations["?l"] == Const("Z_monoidType")
    assert r.inferred_structure == "Z"


def test_resolve_unknown_head(running):
    assert isinstance(resolve(_table(running), ("Monoid.sort", "SomeUnregisteredHead")), NoHint)


def test_resolve_is_one_lookup(running):
    t = _table(running)
    for key in list(t.hints) + [("Monoid.sort", "nothing")]:
        before = t.lookups
        t.resolve(key)
        assert t.lookups == before + 1


def test_symmetric_resolution_costs_at_most_two_lookups(running):
    t = _table(running)
    before = t.lookups
    t.resolve_structures(S, M)
    assert t.lookups - before == 2


def test_missing_join_message():
    doc = load_fixture("running_example_no_semiring_canonical")
    t = _table(doc)
    h = analyze(doc).hierarchy
    d = check_join_assertion(t, h, JoinAssertion(R, S, R))
    assert d.category == "missing_hints"
    assert d.message == "There is no join of Ring.type and Semiring.type but it is expected to be Ring.type."


def test_overwritten_join_message_and_asymmetry():
    doc = load_fixture("running_example_bad_monoid_group")
    t = _table(doc)
    h = analyze(doc).hierarchy
    assert check_join_assertion(t, h, JoinAssertion(M, G, G)) is None
    d = check_join_assertion(t, h, JoinAssertion(G, M, G))
    assert d.category == "overwritten_joins"
    assert d.message == "The join of Group.type and Monoid.type is Ring.type but it is expected to be Group.type."


def test_concrete_join_message():
    doc = load_fixture("z_bad_packager")
    t = _table(doc)
    assert isinstance(t.resolve(("Semiring.sort", "Monoid.sort")), ConcreteCollision)
    d = check_join_assertion(t, analyze(doc).hierarchy, JoinAssertion(S, M, S))
    assert d.message == "The join of Semiring.type and Monoid.type is a concrete type Z but is expected to be Semiring.type."


def test_running_example_assertions_all_pass(running):
    t = _table(running)
    an = analyze(running)
    assert all(check_join_assertion(t, an.hierarchy, a) is None for a in an.report.assertions)


def test_oriented_mode_is_stricter(running):
    t = _table(running)
    an = analyze(running)
    failing = [a for a in an.report.assertions if check_join_assertion(t, an.hierarchy, a, symmetric=False)]
    assert failing and len(failing) < len(an.report.assertions)


# -- concrete instances --------------------------------------------------------

Z_EQUATIONS = {
    ("Semiring.type", "Monoid.type"),
    ("Group.type", "Monoid.type"),
    ("Ring.type", "Monoid.type"),
    ("Ring.type", "Semiring.type"),
    ("Ring.type", "Group.type"),
}


def test_z_instances_cohere():
    doc = load_fixture("z_instances")
    g = build_graph(doc)
    assert check_instance_coherence(g, doc.concrete_instances, doc.structures) == []
    # the five equations are exactly the coercion pairs between Z's instances
    names = {i.name: i for i in doc.concrete_instances["Z"]}
    assert len(names) == 4
    checked = {(b, a) for b in doc.structures for a in doc.structures if b != a and g.valid_path(b, a)}
    assert checked == Z_EQUATIONS


def test_mutated_z_fails_first_equation_only():
    doc = load_fixture("z_mutated")
    diags = check_instance_coherence(build_graph(doc), doc.concrete_instances, doc.structures)
    assert [d.key for d in diags] == [("Z", "Semiring.type", "Monoid.type")]
    assert diags[0].message == (
        "The Monoid.type instance of Z obtained by Semiring.monoidType Z_semiringType "
        "is not convertible with Z_monoidType."
    )


def test_single_instance_has_nothing_to_check():
    doc = load_fixture("z_instances")
    one = {"Z": doc.concrete_instances["Z"][:1]}
    assert check_instance_coherence(build_graph(doc), one, doc.structures) == []


# -- predictability -----------------------------------------------------------


def test_predictability_examples(running):
    t = _table(running)
    h = analyze(running).hierarchy
    assert verify_predictability(t, h, [G, S]) and verify_predictability(t, h, [S, G])
    assert verify_predictability(t, h, [M, M, M])


def test_predictability_exhaustive(running):
    t = _table(running)
    h = analyze(running).hierarchy
    for k in (1, 2, 3):
        for items in itertools.combinations_with_replacement(RUNNING_STRUCTURES, k):
            assert verify_predictability(t, h, list(items))
            # oracle: all orders fold to the hierarchy join
            results = set()
            for order in itertools.permutations(items):
                acc = order[0]
                for x in order[1:]:
                    acc = join(h, acc, x)
                results.add(acc)
            assert len(results) == 1


def test_predictability_needs_hints():
    doc = load_fixture("running_example_no_semiring_canonical")
    t = _table(doc)
    h = analyze(doc).hierarchy
    with pytest.raises(IncompleteTable):
        verify_predictability(t, h, [R, S], symmetric=False)


def test_overwritten_table_is_not_predictable():
    doc = load_fixture("running_example_bad_monoid_group")
    t = _table(doc)
    h = analyze(doc).hierarchy
    assert not verify_predictability(t, h, [G, M], symmetric=False)
