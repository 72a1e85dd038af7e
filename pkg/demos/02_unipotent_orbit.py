# coding: utf-8

# # When the orbit sits on a line
#
# The unipotent group {[[1, t], [0, 1]]} moves e1 along the affine line x = 1.
# The orbit is as large as it can be for a cyclic group of order p, yet
# S(xi) has full magnitude at xi = (1, 0): no cancellation at all.

# In[1]:

from orbitsum import dft_full, gen_instance, max_nonzero_ratio
from orbitsum.lab import InstanceConfig


# In[2]:

for p in (11, 31, 101):
    inst = gen_instance(InstanceConfig(p, 2, "unipotent-counterexample"))
    f = dft_full(inst.orbit.points)
    prof = inst.profile
    print(f"p={p:4d} |I|={prof.orbit_size} max hyperplane hit={prof.max_hyperplane_hit} "
          f"beta_eff={prof.beta_eff:.3f} ratio={max_nonzero_ratio(f):.12f} |S(1,0)|={f.magnitude((1, 0)):.3f}")


# Compare with a generic cyclic subgroup of GL_2 of similar size: the orbit
# spreads across hyperplanes and the ratio drops well below one.

# In[3]:

for seed in range(3):
    inst = gen_instance(InstanceConfig(101, 2, "cyclic-random", seed=seed))
    f = dft_full(inst.orbit.points)
    print(f"seed={seed} |I|={inst.profile.orbit_size:5d} beta_eff={inst.profile.beta_eff:.3f} "
          f"ratio={max_nonzero_ratio(f):.4f}")
