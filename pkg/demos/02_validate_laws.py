"""
Checking the structural hypotheses of a law
===========================================

Every hypothesis is checked on a tensor grid plus random points.  A failing
check reports the worst point it found.
"""

# %%
import warnings

from mixedcz.laws1d import ConcavityWarning, PprIntrinsic
from mixedcz.mixedmode import CouplingF, LoadingDensity, PotentialLaw, TensionLaw
from mixedcz.pathsim import case_density
from mixedcz.validate import check_gradient_consistency, check_psi1d, run_all, standard_grid


def show(reports, only_failed=False):
    for r in reports:
        if not only_failed or r.failed:
            print(f"  {r.hypothesis:<12} {r.status.value:<4} worst={r.worst:.3g} at {r.location}")


# %%
# The case-1 laws satisfy everything.
psi = case_density(1)
grid = standard_grid(psi.openings)
for law in (PotentialLaw(psi), TensionLaw.from_density(psi)):
    reports = run_all(law, grid)
    print(law.model.value, sum(not r.failed for r in reports), "of", len(reports), "checks pass")

# %%
# With unequal openings the constructed potential loses several properties.
print("case 3, potential:")
show(run_all(PotentialLaw(case_density(3))), only_failed=True)

# %%
# A steep PPR shape parameter breaks the 1-D hypotheses.
with warnings.catch_warnings():
    warnings.simplefilter("ignore", ConcavityWarning)
    steep = PprIntrinsic(2.0, 2.0, 0.6, 2.0)
print("lambda = 0.6:")
show(check_psi1d(steep), only_failed=True)

# %%
# The non-potential traction is a gradient of the potential only when the
# coupling vanishes.
base = PprIntrinsic(2.0, 2.0, 0.2, 2.0)
for alpha in (0.0, 2.0):
    d = LoadingDensity(CouplingF(2.0, 2.0, alpha), base, base)
    r = check_gradient_consistency(TensionLaw.from_density(d), PotentialLaw(d))
    print(f"coupling {alpha}: max |T - grad Phi| = {r.worst:.3g}")
