import itertools
import random

import pytest

from hierlint.fixtures import BUILTIN, load_fixture
from hierlint.hierarchy import (
    TOP,
    AmbiguityFailure,
    Hierarchy,
    JoinAssertion,
    NotWellFormed,
    UnknownStructure,
    acyclicity_check,
    check_well_formed,
    fold_join,
    generate_assertions,
    join,
    leq,
    mcs,
)
from hierlint.lint import analyze
from hierlint.properties import check_join_laws, random_hierarchy

M, S, G, R = "Monoid.type", "Semiring.type", "Group.type", "Ring.type"

LISTING = """\
check_join Group.type Monoid.type Group.type.
check_join Group.type Ring.type Ring.type.
check_join Group.type Semiring.type Ring.type.
check_join Monoid.type Group.type Group.type.
check_join Monoid.type Ring.type Ring.type.
check_join Monoid.type Semiring.type Semiring.type.
check_join Ring.type Group.type Ring.type.
check_join Ring.type Monoid.type Ring.type.
check_join Ring.type Semiring.type Ring.type.
check_join Semiring.type Group.type Ring.type.
check_join Semiring.type Monoid.type Semiring.type.
check_join Semiring.type Ring.type Ring.type.
"""


@pytest.fixture(scope="module")
def running_h():
    return Hierarchy.from_parents({M: [], S: [M], G: [M], R: [S, G]})


def _h(name):
    return analyze(load_fixture(name)).hierarchy


def test_leq(running_h):
    assert leq(running_h, M, R)
    assert not leq(running_h, S, G) and not leq(running_h, G, S)
    assert leq(running_h, R, R)
    for x in (M, S, G, R, TOP):
        assert leq(running_h, x, TOP)
    assert not leq(running_h, TOP, M)


def test_mcs_examples(running_h):
    assert mcs(running_h, G, S) == {R}
    for x in (M, S, G, R):
        assert mcs(running_h, x, x) == {x}
    assert mcs(_h("two_joins"), "A", "B") == {"C", "D"}


def test_join_examples(running_h):
    assert join(running_h, R, TOP) is TOP
    assert join(running_h, TOP, M) is TOP
    assert join(running_h, M, G) == G
    r = join(_h("two_joins"), "A", "B")
    assert isinstance(r, AmbiguityFailure) and r.candidates == {"C", "D"}


def test_unknown_structure(running_h):
    with pytest.raises(UnknownStructure):
        join(running_h, M, "Field.type")


def test_running_example_is_well_formed(running_h):
    assert check_well_formed(running_h) == []
    assert check_well_formed(_h("running_example")) == []


def test_two_joins_fails_exactly_on_a_b():
    fails = check_well_formed(_h("two_joins"))
    assert {(f.left, f.right) for f in fails} == {("A", "B"), ("B", "A")}


def test_interposed_join_is_well_formed():
    h = _h("interposed_join")
    assert check_well_formed(h) == []
    asserts = generate_assertions(h)
    assert JoinAssertion("A", "B", "AB") in asserts
    assert JoinAssertion("B", "A", "AB") in asserts


def test_interposed_join_assertions_by_hand():
    # A, B on top; AB joins them; C and D inherit from AB
    h = _h("interposed_join")
    got = {(a.left, a.right, a.expected) for a in generate_assertions(h)}
    expected = set()
    below = {"A": {"AB", "C", "D"}, "B": {"AB", "C", "D"}, "AB": {"C", "D"}, "C": set(), "D": set()}
    for x, y in itertools.permutations(below, 2):
        if y in below[x]:
            expected.add((x, y, y))
        elif x in below[y]:
            expected.add((x, y, x))
    expected |= {("A", "B", "AB"), ("B", "A", "AB")}
    assert got == expected


def test_running_assertions_match_listing(running_h):
    text = "".join(a.render() + "\n" for a in generate_assertions(running_h))
    assert text == LISTING


def test_single_structure_has_no_assertions():
    assert generate_assertions(Hierarchy.from_parents({"A": []})) == []


def test_assertions_on_ambiguous_hierarchy():
    h = _h("two_joins")
    with pytest.raises(NotWellFormed):
        generate_assertions(h)
    assert all({a.left, a.right} != {"A", "B"} for a in generate_assertions(h, skip_ambiguous=True))


def test_acyclicity():
    assert acyclicity_check(_h("running_example"))
    assert not acyclicity_check(Hierarchy(["A", "B"], {"A": {"B"}, "B": {"A"}}))
    assert acyclicity_check(_h("mathcomp_1_7_0"))


def test_transitivity_is_validated_not_repaired():
    h = Hierarchy.from_subof({"A": {"B"}, "B": {"C"}, "C": set()})
    kinds = [v.kind for v in h.violations()]
    assert kinds == ["transitivity"]
    assert Hierarchy.from_subof({"A": {"B"}, "B": {"C"}, "C": set()}, close=True).violations() == []


def test_reflexive_entry_is_a_violation():
    h = Hierarchy(["A"], {"A": {"A"}})
    assert {v.kind for v in h.violations()} == {"cycle", "reflexive"}


def test_fold_join(running_h):
    assert fold_join(running_h, [G, S, M]) == R
    assert fold_join(running_h, [M, M, M]) == M
    assert fold_join(running_h, []) is TOP


def test_associativity_breaks_without_well_formedness():
    h = _h("two_joins")
    assert any(isinstance(join(h, a, b), AmbiguityFailure) for a, b in itertools.product(sorted(h.structures), repeat=2))
    assert check_join_laws(h)  # the suite notices


# -- independent oracle ------------------------------------------------------


def _warshall(n, edges):
    """below[i][j]: j strictly inherits from i."""
    below = [[False] * n for _ in range(n)]
    for i, j in edges:
        below[i][j] = True
    for k in range(n):
        for i in range(n):
            if below[i][k]:
                for j in range(n):
                    if below[k][j]:
                        below[i][j] = True
    return below


def _oracle_join(below, i, j):
    n = len(below)
    le = lambda a, b: a == b or below[a][b]  # noqa: E731
    common = [c for c in range(n) if le(i, c) and le(j, c)]
    minimal = [c for c in common if not any(d != c and le(d, c) for d in common)]
    return minimal


def _random_dags(seed, count, max_nodes):
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        n = rng.randint(1, max_nodes)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.25]
        below = _warshall(n, edges)
        if all(len(_oracle_join(below, i, j)) <= 1 for i in range(n) for j in range(n)):
            produced += 1
            yield n, below


def _as_hierarchy(n, below):
    names = [f"N{i:02d}" for i in range(n)]
    return names, Hierarchy(names, {names[i]: {names[j] for j in range(n) if below[i][j]} for i in range(n)})


def test_join_agrees_with_oracle_on_random_dags():
    queries = 0
    for n, below in _random_dags(seed=7, count=100, max_nodes=12):
        names, h = _as_hierarchy(n, below)
        for i, j in itertools.product(range(n), repeat=2):
            minimal = _oracle_join(below, i, j)
            expected = names[minimal[0]] if minimal else TOP
            assert join(h, names[i], names[j]) == expected
            queries += 1
    assert queries > 100


def test_join_laws_on_random_dags():
    for n, below in _random_dags(seed=11, count=100, max_nodes=12):
        _, h = _as_hierarchy(n, below)
        ext = sorted(h.structures) + [TOP]
        j = {(a, b): join(h, a, b) for a in ext for b in ext}
        for a in ext:
            assert j[a, a] == a
            assert j[a, TOP] is TOP and j[TOP, a] is TOP
        for a, b in itertools.product(ext, repeat=2):
            assert j[a, b] == j[b, a]
            assert leq(h, a, j[a, b]) and leq(h, b, j[a, b])
            for c in ext:
                assert leq(h, j[a, b], c) == (leq(h, a, c) and leq(h, b, c))
                assert j[j[a, b], c] == j[a, j[b, c]]


def test_property_module_on_its_own_random_hierarchies():
    rng = random.Random(3)
    for _ in range(30):
        h = random_hierarchy(rng, rng.randint(1, 8))
        assert check_join_laws(h) == []


AMBIGUOUS_FIXTURES = {"two_joins", "mathcomp_1_7_0"}


@pytest.mark.parametrize("name", sorted(AMBIGUOUS_FIXTURES))
def test_ambiguous_fixtures(name):
    assert check_well_formed(_h(name))


@pytest.mark.parametrize("name", sorted(set(BUILTIN) - AMBIGUOUS_FIXTURES))
def test_join_laws_on_well_formed_fixtures(name):
    h = _h(name)
    assert check_well_formed(h) == []
    assert check_join_laws(h) == []


def test_fixture_joins_agree_with_oracle():
    for name in sorted(BUILTIN):
        h = _h(name)
        names = sorted(h.structures)
        idx = {s: i for i, s in enumerate(names)}
        below = [[names[j] in h.subof[names[i]] for j in range(len(names))] for i in range(len(names))]
        for a, b in itertools.product(names, repeat=2):
            minimal = _oracle_join(below, idx[a], idx[b])
            r = join(h, a, b)
            if len(minimal) > 1:
                assert isinstance(r, AmbiguityFailure) and r.candidates == {names[m] for m in minimal}
            else:
                assert r == (names[minimal[0]] if minimal else TOP)
