"""Most negative witness value reachable by PPT family states, per dimension.

Takes a few minutes for all six dimensions; pass dimensions as arguments to
run a subset, e.g. ``python 04_optimize_minima.py 3 4``.
"""

# %%
import sys
import time

from boundsim import optimize_witness

dims = [int(a) for a in sys.argv[1:]] or [3, 4, 5, 7, 8, 9]
for d in dims:
    t0 = time.perf_counter()
    res = optimize_witness(d, threads=4)
    q = ", ".join(f"{x:.4f}" for x in res.params.q)
    print(
        f"d={d}: min(2 - I) = {res.witness:.5f} at q = ({q}); "
        f"min PT eig {res.min_pt_eig:.1e}, min weight {res.min_coeff:.1e}; "
        f"{res.evaluations} evaluations, {time.perf_counter() - t0:.1f}s"
    )

# %% The optimum sits on the PPT boundary: the smallest PT eigenvalue is ~0 there.
