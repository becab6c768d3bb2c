"""
Auditing a 50-structure hierarchy
=================================

Skeletons of two library releases: the older one has seven missing
inheritance edges, eight missing hints and one overwritten join.
"""

import time

from hierlint import load_fixture
from hierlint.lint import analyze

for name in ("mathcomp_1_7_0", "mathcomp_1_8_0"):
    t0 = time.perf_counter()
    an = analyze(load_fixture(name))
    took = time.perf_counter() - t0
    counts = {k: v for k, v in an.report.summary.items() if v}
    print(f"{name}: {len(an.hierarchy.structures)} structures, {took:.2f}s, {counts or 'clean'}")

old = analyze(load_fixture("mathcomp_1_7_0")).report
for d in old.diagnostics:
    if d.category != "incoherent_path_warnings":
        print(" ", d.message)
