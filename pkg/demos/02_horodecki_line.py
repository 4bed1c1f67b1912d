"""Walk along the one-parameter Horodecki family and see where the witness fires."""

# %%
from boundsim import horodecki_sweep

rows = horodecki_sweep(0.0, 5.0, 0.25)
print(f"{'lambda':>7} {'min eig PT':>12} {'2 - I_4':>9}  verdict")
for r in rows:
    if not r.ppt:
        verdict = "NPT (free entangled)"
    elif r.bound_entangled:
        verdict = "PPT and detected: bound entangled"
    else:
        verdict = "PPT, not detected"
    print(f"{r.lam:7.2f} {r.min_pt_eig:12.5f} {r.witness:9.4f}  {verdict}")

# %% The PPT window is [1, 4]; inside it the witness is negative except on [2, 3]
ppt = [r.lam for r in rows if r.ppt]
print("PPT for lambda in", (min(ppt), max(ppt)))
