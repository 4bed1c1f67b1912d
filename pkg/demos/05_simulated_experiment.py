"""Photon-counting simulation: retroactive mixing, the witness from counts, and tomography."""

# %%
import numpy as np

from boundsim import FamilyParams, NoiseModel, coeffs_from_family, measurement_budget, state_from_coeffs
from boundsim.expsim import (
    mcp_from_counts,
    reconstruct,
    retroactive_mix,
    simulate_mcp,
    simulate_tomography,
    tomography_settings,
)
from boundsim.numkernel import fidelity
from boundsim.simplex import ppt_min_eig

c = coeffs_from_family(FamilyParams(3, -0.07, -1.73, -0.5774))
rho = state_from_coeffs(c)
print("settings needed (tomography, MCP matched-only, MCP all pairs):", measurement_budget(3).as_tuple())

# %% One run: count each Bell state separately, then mix the counts on the computer
noise = NoiseModel(peak=1500, background=5, seed=0)
mixed = retroactive_mix(simulate_mcp(3, noise), c)
rep = mcp_from_counts(mixed, 3, "methods_d3")
print("C from counts:", [round(x, 3) for x in rep.correlations], " 2 - I_4 =", round(rep.witness, 4))

# %% Repeat over 100 seeds: counting statistics alone
w = np.array([mcp_from_counts(retroactive_mix(simulate_mcp(3, NoiseModel(seed=s)), c), 3, "methods_d3").witness
              for s in range(100)])
print(f"witness over 100 runs: {w.mean():.4f} +- {w.std():.4f}, negative in {np.mean(w < 0):.0%}")

# %% Tomography from the same kind of counts, background subtracted
tset = tomography_settings(3)
est = reconstruct(retroactive_mix(simulate_tomography(tset, noise), c), tset, background=5)
print(f"reconstructed fidelity {fidelity(est, rho):.4f}, min PT eigenvalue {ppt_min_eig(est, 3):.4f}")
