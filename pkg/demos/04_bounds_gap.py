"""Grid approximations of the inner and outer bounds, and how close they get.

For both fixture channels the bounds coincide, so the gap only reflects the
grid resolution. A random channel shows the generic case.
"""
import numpy as np

from twc import GridSpec, builtin, check_all, hausdorff_distance, inner_bound, outer_bound, validate

for name in ("example1", "example2"):
    twc = builtin(name)
    for k in (10, 25, 50):
        inner, outer = inner_bound(twc, GridSpec(k)), outer_bound(twc, GridSpec(k))
        print(f"{name} k={k:<3} gap={hausdorff_distance(inner, outer):.2e}  "
              f"outer corner=({outer.r1_max:.4f}, {outer.r2_max:.4f})")

rng = np.random.default_rng(0)
twc = validate(rng.dirichlet(np.ones(4), size=(2, 2)).reshape(2, 2, 2, 2))
report = check_all(twc)
print("random channel tightness certified:", report.tightness)
inner, outer = inner_bound(twc, GridSpec(50)), outer_bound(twc, GridSpec(50))
print("random channel gap at k=50: %.2e" % hausdorff_distance(inner, outer))
