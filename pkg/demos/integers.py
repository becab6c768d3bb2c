"""
Instances for a concrete type
=============================

Z gets a monoid, semiring, group and ring instance.  Forgetting structure
along any coercion must land on the instance declared for that structure.
"""

from hierlint import load_fixture
from hierlint.inference import check_instance_coherence
from hierlint.lint import analyze, build_graph

doc = load_fixture("z_instances")
g = build_graph(doc)
print(check_instance_coherence(g, doc.concrete_instances, doc.structures))   # []

# the semiring rebuilt over a second monoid mixin breaks one equation
bad = load_fixture("z_mutated")
for d in check_instance_coherence(build_graph(bad), bad.concrete_instances, bad.structures):
    print(d.message)

# a semiring instance that names its carrier through the monoid instance
# teaches inference that the join of semirings and monoids is Z itself
r = analyze(load_fixture("z_bad_packager")).report
print(r.diagnostics[0].message)
