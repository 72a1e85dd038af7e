# coding: utf-8

# # Naive sum vs chirp transform
#
# dft_full(method="auto") picks the cheaper path from a cost model:
#   naive ~ p^d * |I|            (one term per point per frequency)
#   fast  ~ c * d * p^(d-1) * m log2 m,  m the padded chirp length
# This script times both paths and reports the constant c that makes the two
# models agree on this machine. The library ships c = FAST_COST_FACTOR.

# In[1]:

import math
import time

import numpy as np

from orbitsum.fourier import FAST_COST_FACTOR, dft_full
from orbitsum.fp import PointSet


def best_of(fn, reps=3):
    out = math.inf
    for _ in range(reps):
        t = time.perf_counter()
        fn()
        out = min(out, time.perf_counter() - t)
    return out


# In[2]:

rng = np.random.default_rng(0)
ratios = []
for p, d in [(31, 2), (101, 2), (211, 2), (13, 3), (31, 3)]:
    n = max(1, p**d // 10)
    I = PointSet(p, d, rng.choice(p**d, n, replace=False))
    t_fast = best_of(lambda: dft_full(I, "fast"))
    t_naive = best_of(lambda: dft_full(I, "naive"))
    m = 1 << (2 * p - 2).bit_length()
    per_naive = t_naive / (p**d * n)
    per_fast = t_fast / (d * p ** (d - 1) * m * math.log2(m))
    ratios.append(per_fast / per_naive)
    gap = np.max(np.abs(dft_full(I, "fast").values - dft_full(I, "naive").values)) / n
    print(f"p={p:4d} d={d} |I|={n:6d} fast={t_fast * 1e3:8.2f} ms naive={t_naive * 1e3:9.2f} ms "
          f"c={ratios[-1]:.2f} max|diff|/|I|={gap:.1e}")


# In[3]:

print(f"median c = {np.median(ratios):.2f} (shipped: {FAST_COST_FACTOR})")
