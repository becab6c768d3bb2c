"""Executable join-semilattice laws for well-formed hierarchies."""

from __future__ import annotations

import itertools
import random

from .hierarchy import TOP, AmbiguityFailure, Hierarchy, check_well_formed, join, leq


def random_dag(rng: random.Random, n: int, density: float = 0.3) -> Hierarchy:
    """Random closed strict order on ``S0 .. S{n-1}`` (edges only go upward)."""
    names = [f"S{i}" for i in range(n)]
    parents = {s: [names[j] for j in range(i) if rng.random() < density] for i, s in enumerate(names)}
    return Hierarchy.from_parents(parents)


def random_hierarchy(rng: random.Random, n: int, density: float = 0.3, tries: int = 200) -> Hierarchy:
    """A random well-formed hierarchy; falls back to a chain if none is found."""
    for _ in range(tries):
        h = random_dag(rng, n, density)
        if not check_well_formed(h):
            return h
    names = [f"S{i}" for i in range(n)]
    return Hierarchy.from_parents({s: names[i - 1 : i] for i, s in enumerate(names)})


def _brute_join(h: Hierarchy, a, b):
    if a is TOP or b is TOP:
        return TOP
    common = [c for c in h.structures if leq(h, a, c) and leq(h, b, c)]
    minimal = [c for c in common if not any(d != c and leq(h, d, c) for d in common)]
    if not minimal:
        return TOP
    return minimal[0] if len(minimal) == 1 else AmbiguityFailure(a, b, frozenset(minimal))


def check_join_laws(h: Hierarchy) -> list[str]:
    """Failures of the join laws on ``h`` (empty when all hold)."""
    out = []
    ext = sorted(h.structures) + [TOP]
    j = {(a, b): join(h, a, b) for a in ext for b in ext}
    for (a, b), r in j.items():
        if r != _brute_join(h, a, b):
            out.append(f"join({a}, {b}) = {r} disagrees with enumeration")
    if any(isinstance(r, AmbiguityFailure) for r in j.values()):
        return out + ["hierarchy is not well-formed"]
    for a in ext:
        if j[a, a] != a:
            out.append(f"join({a}, {a}) = {j[a, a]}")
        if j[a, TOP] is not TOP or j[TOP, a] is not TOP:
            out.append(f"TOP does not absorb {a}")
    for a, b in itertools.product(ext, ext):
        r = j[a, b]
        if r != j[b, a]:
            out.append(f"join({a}, {b}) != join({b}, {a})")
        if not (leq(h, a, r) and leq(h, b, r)):
            out.append(f"join({a}, {b}) = {r} is not an upper bound")
        for c in ext:
            if leq(h, r, c) != (leq(h, a, c) and leq(h, b, c)):
                out.append(f"least upper bound fails for ({a}, {b}, {c})")
            if j[j[a, b], c] != j[a, j[b, c]]:
                out.append(f"join is not associative on ({a}, {b}, {c})")
    return out
