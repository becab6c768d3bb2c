"""
Four structures and their joins
===============================

Monoids, semirings, groups and rings, packed as classes.  We look at the
coercion paths, ask for a few joins, and print the assertion script.
"""

from hierlint import load_fixture
from hierlint.hierarchy import join
from hierlint.lint import analyze, emit_assertion_script

doc = load_fixture("running_example")
an = analyze(doc)

# the structures and who inherits from whom
for parent, child in an.hierarchy.direct_edges():
    print(f"{child} inherits from {parent}")

# three ways from rings down to monoids; the first one declared is the valid one
for p in an.graph.paths("Ring.type", "Monoid.type"):
    print(p.render())

# joins come from the hierarchy alone
print(join(an.hierarchy, "Group.type", "Semiring.type"))   # Ring.type
print(join(an.hierarchy, "Monoid.type", "Group.type"))     # Group.type

# every join must also be inferable from the declared canonical instances
print(an.report.render_text())
print(emit_assertion_script(an.report))
