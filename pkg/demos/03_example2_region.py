"""A non-rectangular capacity region traced by sweeping user 2's input.

Only the forward direction has a common maximizer here. Fixing user 1 at it
and sweeping user 2's input over a fine grid traces the exact frontier.
Writes ``example2_region.csv`` next to this script.
"""
from pathlib import Path

import numpy as np

from twc import builtin, capacity_region, check_all

twc = builtin("example2")
report = check_all(twc)
print({k: v for k, v in report.statuses.items() if k.startswith("thm")})

region = capacity_region(twc, report)
f = region.frontier
print(f"{len(f)} frontier vertices; path = {region.metadata['path']}, grid = {region.metadata['grid']}")
print("end points:", np.round(f[0], 4), np.round(f[-1], 4))

# the largest sum rate sits strictly inside the frontier
i = int(np.argmax(f.sum(axis=1)))
print("max sum rate %.4f at (%.4f, %.4f)" % (f[i].sum(), *f[i]))

out = Path(__file__).with_name("example2_region.csv")
out.write_text(region.to_csv())
print("wrote", out.name)
