"""
Potential versus non-potential laws on the reference loading paths
===================================================================

Both laws are built from the same loading density, so they agree until the
first unloading.  After that the potential law unloads along a curve while
the non-potential law returns along straight lines through the origin.
"""

# %%
# Build the density used by cases 1 and 2: two PPR laws with equal
# energies, coupled through the bilinear ``F``.
import os

import numpy as np

from mixedcz.pathsim import (
    case_density,
    chord_residual,
    first_unloading,
    origin_line_residual,
    run_case,
    unloading_zone_runs,
)

psi = case_density(1)
print("openings:", psi.openings)

# %%
# Drive both laws along the case-1 path.
pot, non = run_case(1)
k = first_unloading(pot)
gap = np.max(np.abs(pot.traction[:, :k] - non.traction[:, :k]))
print(f"first unloading at sample {k}; traction gap before it {gap:.1e}")

# %%
# On unloading the non-potential law follows a line through the origin,
# the potential law does not.
for s in unloading_zone_runs(non, (0,)):
    print("non-potential line residual", origin_line_residual(non.y[0, s], non.traction[0, s]))
for s in unloading_zone_runs(pot, (0,)):
    print("potential chord deviation  ", chord_residual(pot.y[0, s], pot.traction[0, s]))

# %%
# Case 3 uses different openings in the two directions.  Along its path the
# potential tractions stay nonnegative; negative values only show up once
# the first opening is pushed well past the path.
pot3, non3 = run_case(3)
print("case 3 min tractions: potential", pot3.traction.min(), "non-potential", non3.traction.min())

# %%
# Save traces and plots for all four cases.
from mixedcz.plots import trace_svg  # noqa: E402

out = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out, exist_ok=True)
for n in (1, 2, 3, 4):
    for name, trace in zip(("potential", "nonpotential"), run_case(n)):
        path = os.path.join(out, f"case{n}_{name}.csv")
        with open(path, "w", newline="") as fh:
            trace.to_csv(fh)
        trace_svg(path, path[:-4] + ".svg", f"case {n}, {name}")
print("traces written to", out)
