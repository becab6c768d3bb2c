"""
Two ways to break structure inference
=====================================

Drop a canonical declaration, or add a misplaced one, and watch which
assertion fails.
"""

from hierlint import load_fixture
from hierlint.lint import analyze

# Ring.semiringType never declared canonical: nothing infers the join
missing = analyze(load_fixture("running_example_no_semiring_canonical"))
for d in missing.report.diagnostics:
    print(d.message)

# a group instance whose carrier is written as a monoid carrier
bad = analyze(load_fixture("running_example_bad_monoid_group"))
for d in bad.report.diagnostics:
    print(d.message)

# the overwrite is one-sided: asking with the arguments swapped still works
t = bad.table
print(t.resolve(("Monoid.sort", "Group.sort")).inferred_structure)   # Group.type
print(t.resolve(("Group.sort", "Monoid.sort")).inferred_structure)   # Ring.type
for e in t.overwrites:
    print(e.key, e.previous.solution_name, "->", e.new.solution_name)
