# coding: utf-8

# # Quadratic residues as an orbit
#
# The squares mod p form the orbit of 1 under the group generated by g^2,
# g a primitive root. Every nonzero frequency has the same magnitude,
# sqrt(p+1)/2, so the largest nonzero ratio falls like p^(-1/2).

# In[1]:

import math

from orbitsum import dft_full, gen_instance, max_nonzero_ratio
from orbitsum.lab import InstanceConfig


# In[2]:

for p in (7, 11, 19, 23, 31, 43, 59, 103, 101):
    inst = gen_instance(InstanceConfig(p, 1, "quadratic-residue"))
    f = dft_full(inst.orbit.points)
    mags = f.magnitudes[1:]
    print(f"p={p:4d} |I|={len(inst.orbit.points):3d} "
          f"|S| in [{mags.min():.6f}, {mags.max():.6f}] "
          f"sqrt(p+1)/2={math.sqrt(p + 1) / 2:.6f} ratio={max_nonzero_ratio(f):.4f}")


# For p = 3 mod 4 the spread of |S| over nonzero frequencies is at rounding
# level and the ratio tracks sqrt(p+1)/(p-1). For p = 1 mod 4 (the last row)
# the Gauss sum is real, S = (-1 +- sqrt p)/2, and two magnitudes appear.
