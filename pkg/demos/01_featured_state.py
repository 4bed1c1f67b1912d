"""A PPT qutrit state that the MUB correlation sum still flags as entangled."""

# %% Build the state from its three family parameters
import numpy as np

from boundsim import FamilyParams, coeffs_from_family, family_state, mcp, ppt_min_eig
from boundsim.simplex import equivalent_variants, ppt_min_eig_coeffs
from boundsim.witness import witness_coeffs

p = FamilyParams(3, q1=-0.07, q2=-1.73, q3=-0.5774)
c = coeffs_from_family(p)
print("Bell weights c[k, l]:")
print(np.array2string(c.c, precision=4))

# %% All weights are nonnegative, so this is a genuine mixture of Bell states
rho = family_state(p)
print("physical:", c.physical)

# %% Partial transpose stays positive: no entanglement is visible to the PPT test
print("smallest eigenvalue of rho^T_A:", round(ppt_min_eig(rho, 3), 6))

# %% The four conjugated-basis correlations add up to more than 2
rep = mcp(rho, labeling="methods_d3")
print("correlations:", [round(x, 4) for x in rep.correlations])
print("2 - I_4 =", round(rep.witness, 4), "-> entangled" if rep.witness < 0 else "")

# %% Letting each basis pick its best outcome relabelling gives the same verdict
best = mcp(rho)
print("best relabelling per basis:", best.labeling.perms, " 2 - I_4 =", round(best.witness, 4))

# %% 72 local-unitary relabellings of the same state: PT spectrum and witness are unchanged
variants = equivalent_variants(p)
print(len(variants), "variants;",
      "PT min eig spread", f"{np.ptp([ppt_min_eig_coeffs(v) for v in variants]):.1e};",
      "witness spread", f"{np.ptp([witness_coeffs(v) for v in variants]):.1e}")
