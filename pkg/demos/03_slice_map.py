"""Classify a 2D slice of the qutrit family and save it as a grey-level PGM image."""

# %%
import sys
from pathlib import Path

from boundsim import SliceSpec, scan_slice
from boundsim.search import CLASS_GRAY, CLASS_NAMES, region_components, region_has_holes

spec = SliceSpec(q3=-0.5776, q1_range=(-1.0, 1.0), q2_range=(-3.0, 0.0), resolution=(200, 200))
grid = scan_slice(spec, threads=4)

# %% How many cells fall into each class
for name, n in grid.counts().items():
    print(f"{name:>25}: {n}")

# %% The bound-entangled cells form one region without holes
mask = grid.bound_region
print("components:", region_components(mask), " holes:", region_has_holes(mask))
j, i = grid.cell_of(-0.07, -1.73)
print("cell nearest (-0.07, -1.73):", CLASS_NAMES[grid.cls[j, i]])

# %% Write the heatmap (top row = largest q2)
out = Path(sys.argv[1] if len(sys.argv) > 1 else "slice.pgm")
out.write_bytes(grid.to_pgm())
print("wrote", out, "grey levels", dict(zip(CLASS_NAMES, CLASS_GRAY)))
