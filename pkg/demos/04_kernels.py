"""
Smoothing kernels and bandwidth schedules
=========================================
"""

# %%
import numpy as np

from pairpot.kernels import (
    KERNELS,
    check_moments,
    default_bandwidth_schedule,
    lipschitz_check,
    squared_integral,
)

for name, k in KERNELS.items():
    rep = check_moments(k, k.order, 1e-9)
    lip, jump = lipschitz_check(k)
    print(f"{name:15s} order {k.order}  moments ok {rep.passed}  int K^2 {squared_integral(k):.4f}  "
          f"Lipschitz ~{lip:.3f}{'  (jump)' if jump else ''}")

# %% The Epanechnikov kernel has a non-zero second moment, so it is not of order 3.
print(np.round(check_moments("epanechnikov", 3, 1e-9).moments, 6))

# %% A schedule b(L) = c L^(-1/(2 alpha + d)), pinned to R/4 at the smallest side.
s = default_bandwidth_schedule("epanechnikov", 2, 1.0, 10.0)
for L in (10, 20, 40, 80):
    print(L, round(s(L), 4))
print("schedule sane:", s.check([10, 20, 40, 80], 2, 1.0))
