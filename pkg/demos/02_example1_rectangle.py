"""A two-way channel whose capacity region is a rectangle.

Neither of the classical symmetry conditions applies, yet each direction has
a common capacity-achieving input, so the inner and outer bounds meet.
"""
import numpy as np

from twc import Direction, builtin, capacity_region, check_all, common_maximizer
from twc.channel import marginals

twc = builtin("example1")
print(twc)
print(np.round(twc.p.reshape(4, 4), 4))

# the forward link seen from user 2: one matrix per value of x2
for x2, m in enumerate(marginals(twc, Direction.FORWARD)):
    print(f"forward matrix for x2={x2}:\n{m}")

mv = common_maximizer(marginals(twc, Direction.FORWARD))
print("common maximizer:", np.round(mv.pstar, 4), "capacities:", np.round(mv.capacities, 4))

report = check_all(twc)
for name, status in report.statuses.items():
    print(f"  {name:<12} {status}")

region = capacity_region(twc, report)
print("capacity region corner: R1 = %.4f, R2 = %.4f" % (region.r1_max, region.r2_max))
print("rectangle:", region.to_dict()["rectangle"])
