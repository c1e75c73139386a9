"""
Neighbour search on a cell grid
===============================

Every interaction in the package has a finite range R, so the only pairs that
matter are the ones closer than R. A cell grid with edge >= R finds them by
looking at the 3**d cells around each point.
"""

# %%
import time

import numpy as np

from pairpot.spatial import PointPattern, Window, dist_to_pattern, erode, neighbors_within

rng = np.random.default_rng(1)
W = Window(2, 20.0)
x = PointPattern(W, rng.uniform(0, 20, (2000, 2)))
print(x)

# %% The grid is built lazily per radius and cached on the pattern.
grid = x.grid(1.0)
print("cells per axis:", grid.ncell, "edge:", grid.edge)

t = time.perf_counter()
i, j, d = grid.self_pairs(1.0)
print(f"{len(i)} ordered pairs within 1.0 in {1e3 * (time.perf_counter() - t):.1f} ms")

# %% Same answer as the O(n^2) scan.
full = np.linalg.norm(x.points[:, None] - x.points[None, :], axis=2)
brute = np.count_nonzero((full <= 1.0) & (full > 0))
print("brute force agrees:", brute == len(i))

# %% Queries at arbitrary locations
u = (10.0, 10.0)
near = neighbors_within(x, u, 0.8)
print(f"{len(near)} points within 0.8 of {u}; nearest at", round(dist_to_pattern(u, x), 4))

# %% Eroded windows shrink every side by the margin on both ends.
for m in (0.0, 2.0, 10.0):
    e = erode(W, m)
    print(f"margin {m}: [{e.lo}, {e.hi}]^2, volume {e.volume}, empty={e.is_empty}")
