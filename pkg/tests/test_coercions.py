import random

import pytest

from hierlint.coercions import (
    ClassDecl,
    CoercionDecl,
    CoercionGraph,
    CompositionFailure,
    DuplicateCoercion,
    UnknownClass,
    check_uniform,
    compose,
    compose_path,
)
from hierlint.fixtures import load_fixture
from hierlint.lint import build_graph
from hierlint.terms import App, Const, DefinitionEnv, Lam, Var, app, convertible, reduce


def _coercion(doc, name):
    return next(c for c in doc.coercions if c.name == name)


def _graph(doc, order=None):
    g = CoercionGraph(doc.env, [c.decl for c in doc.classes])
    diags = []
    for c in order if order is not None else doc.coercions:
        diags += g.add_coercion(c)
    return g, diags


def test_view_coercion_is_uniform(running):
    c = _coercion(running, "Semiring.monoidType")
    assert c.source.param_count == 0 and len(c.binders) == 1
    assert check_uniform(c)


def test_instance_before_parameter_is_not_uniform():
    src, tgt = ClassDecl("C", 1), ClassDecl("D")
    c = CoercionDecl("f", src, tgt, Lam("x", Lam("A", Var("x"))), ("x", "A"), "x", (Var("A"),))
    assert not check_uniform(c)
    ok = CoercionDecl("f", src, tgt, Lam("A", Lam("x", Var("x"))), ("A", "x"), "x", (Var("A"),))
    assert check_uniform(ok)


def test_constant_function_is_uniform():
    c = CoercionDecl("f", ClassDecl("C"), ClassDecl("k"), Lam("x", Const("k")))
    assert check_uniform(c)


def test_single_edge_composition_is_the_body(running):
    f = _coercion(running, "Ring.groupType")
    term = compose_path(running.env, [f])
    r = Var("r")
    assert convertible(running.env, App(term, r), App(f.body, r))


def test_composed_views_match_direct_view(running):
    env = running.env
    edges = [_coercion(running, "Ring.semiringType"), _coercion(running, "Semiring.monoidType")]
    comp = compose(env, edges)
    r = Var("r")
    assert convertible(env, App(comp.term, r), App(Const("Ring.monoidType"), r))
    wrapped = CoercionDecl("wrapped", edges[0].source, edges[-1].target, comp.term, comp.binders, comp.instance,
                           comp.source_args, comp.target_args)
    assert check_uniform(wrapped)


def test_composition_of_uniform_parametric_coercions():
    # lists of A >-> sequences of A >-> collections of A
    env = DefinitionEnv(opaque=frozenset({"to_seq", "to_coll"}))
    L, S, K = ClassDecl("List", 1), ClassDecl("Seq", 1), ClassDecl("Coll", 1)
    A = Var("A")
    f = CoercionDecl("to_seq", L, S, Const("to_seq"), ("A", "l"), None, (A,), (A,))
    g = CoercionDecl("to_coll", S, K, Const("to_coll"), ("B", "s"), None, (Var("B"),), (Var("B"),))
    assert f.uniform and g.uniform
    comp = compose(env, [f, g])
    got = reduce(env, app(comp.term, Var("T"), Var("xs")))
    assert got == app(Const("to_coll"), Var("T"), app(Const("to_seq"), Var("T"), Var("xs")))
    assert comp.target_args == (A,)


def test_unbound_parameter_is_a_composition_failure():
    env = DefinitionEnv(opaque=frozenset({"f", "g", "k"}))
    A, B, C = ClassDecl("A"), ClassDecl("B", 1), ClassDecl("C", 1)
    f = CoercionDecl("f", A, B, Const("f"), ("x",), target_args=(Const("k"),))
    # g's parameter p never occurs in its source argument list
    g = CoercionDecl("g", B, C, Const("g"), ("p", "y"), "y", (Const("k"),), (Var("p"),))
    assert not g.uniform
    with pytest.raises(CompositionFailure):
        compose(env, [f, g])


def test_incompatible_edges_do_not_compose(running):
    with pytest.raises(CompositionFailure):
        compose(running.env, [_coercion(running, "Semiring.monoidType"), _coercion(running, "Ring.groupType")])


def test_running_graph_is_coherent(running):
    g, diags = _graph(running)
    assert diags == []
    assert g.check_coherence() == []
    assert g.valid_path("Ring.type", "Monoid.type").names == ("Ring.monoidType",)
    assert len(g.paths("Ring.type", "Monoid.type")) == 3


def test_mutated_mixin_has_one_incoherent_path():
    doc = load_fixture("mutated_mixin")
    g, diags = _graph(doc)
    assert [d.category for d in diags] == ["incoherent_paths"]
    assert [d.category for d in g.check_coherence()] == ["incoherent_paths"]
    assert "[Ring.semiringType; Semiring.monoidType]" in diags[0].message
    assert "[Ring.monoidType]" in diags[0].message


def test_empty_region_gains_one_entry():
    g = CoercionGraph(DefinitionEnv(opaque=frozenset({"f"})), [ClassDecl("X"), ClassDecl("Y")])
    assert g.add_coercion(CoercionDecl("f", ClassDecl("X"), ClassDecl("Y"), Const("f"))) == []
    assert list(g.path_table) == [("X", "Y")]


def test_non_identity_self_coercion():
    X = ClassDecl("X")
    g = CoercionGraph(DefinitionEnv(opaque=frozenset({"k"})), [X])
    g.add_coercion(CoercionDecl("loop", X, X, Lam("x", App(Const("k"), Var("x")))))
    diags = g.check_coherence()
    assert len(diags) == 1 and diags[0].category == "incoherent_paths"
    assert diags[0].message == "Coercion path [loop] : X >-> X is not convertible to the identity."


def test_identity_self_coercion_is_fine():
    X = ClassDecl("X")
    g = CoercionGraph(DefinitionEnv(), [X])
    assert g.add_coercion(CoercionDecl("loop", X, X, Lam("x", Var("x")))) == []


def test_duplicate_and_unknown():
    X, Y = ClassDecl("X"), ClassDecl("Y")
    g = CoercionGraph(DefinitionEnv(opaque=frozenset({"f"})), [X])
    with pytest.raises(UnknownClass):
        g.add_coercion(CoercionDecl("f", X, Y, Const("f")))
    g.add_class(Y)
    g.add_coercion(CoercionDecl("f", X, Y, Const("f")))
    with pytest.raises(DuplicateCoercion):
        g.add_coercion(CoercionDecl("f", X, Y, Const("f")))


def test_mathcomp_warnings_come_from_flagged_shortcuts():
    doc = load_fixture("mathcomp_1_7_0")
    diags = build_graph(doc).check_coherence()
    assert len(diags) == 11
    assert {d.category for d in diags} == {"incoherent_path_warnings"}
    assert all(d.severity == "warning" for d in diags)


def _closure_holds(g):
    for (a, b), ps in g.path_table.items():
        for (b2, c), qs in g.path_table.items():
            if b2 != b or a == b or b == c:
                continue
            edges = ps[0].edges + qs[0].edges
            nodes = [edges[0].source.name] + [e.target.name for e in edges]
            if len(set(nodes[:-1])) != len(nodes) - 1:
                continue  # not simple, so not required
            if (a, c) not in g.path_table:
                return False
    return True


@pytest.mark.parametrize("fixture", ["running_example", "mutated_mixin", "interposed_join"])
def test_closure_and_verdicts_are_order_independent(fixture):
    doc = load_fixture(fixture)
    base, _ = _graph(doc)
    keys, verdicts = set(base.path_table), base.violation_keys()
    rng = random.Random(50)
    for _ in range(50):
        order = list(doc.coercions)
        rng.shuffle(order)
        g, _ = _graph(doc, order)
        assert set(g.path_table) == keys
        assert g.violation_keys() == verdicts
        assert _closure_holds(g)


def test_diagnostic_paths_share_endpoints_and_differ():
    doc = load_fixture("mutated_mixin")
    g = build_graph(doc)
    for d in g.check_coherence():
        src, tgt = d.key[0], d.key[1]
        paths = {p.names: p for p in g.paths(src, tgt)}
        named = [paths[n] for n in paths if set(n) <= set(d.related)]
        assert len(named) >= 2
        a, b = named[0], named[1]
        assert (a.source.name, a.target.name) == (b.source.name, b.target.name)
        assert not convertible(doc.env, App(a.composed, Var("r")), App(b.composed, Var("r")))
