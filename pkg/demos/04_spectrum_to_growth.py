# coding: utf-8

# # From a large spectrum to a growing affine set
#
# Take the QR orbit for p = 13, pick a threshold alpha, and lift the spectrum
# to A = {(M, xi) : M in H, xi in Spec}. Then look at how A grows under
# products and run the iteration driver that hunts for a level j where the
# spectrum stops shrinking.

# In[1]:

from orbitsum import (
    build_A_alpha,
    dft_full,
    gen_instance,
    growth_report,
    prop_p_iteration,
    spec_alpha,
    spec_difference_check,
)
from orbitsum.lab import InstanceConfig


# In[2]:

inst = gen_instance(InstanceConfig(13, 1, "quadratic-residue"))
H, I = inst.group, inst.orbit
f = dft_full(I.points)
for alpha in (0.2, 0.4, 0.6):
    S = spec_alpha(f, alpha)
    r = spec_difference_check(f, alpha, exact=True)
    print(f"alpha={alpha} |Spec|={len(S)} pair count={r.details['pair_count']} bound={r.details['bound']:.2f}")


# In[3]:

A = build_A_alpha(H, spec_alpha(f, 0.4))
g = growth_report(A)
print(f"|A|={g.size} |A^2|={g.size2} |A^3|={g.size3} tripling={g.tripling:.3f} covering K={g.covering_K}")
print("fiber sizes over L(A):", sorted(set(A.blocks.fiber_sizes.tolist())))


# In[4]:

sched, cert = prop_p_iteration(H, I, 0.5, field_=f)
print("ladder:", [f"{a:.3g}" for a in sched.alphas])
print("spec sizes:", sched.spec_sizes, "chosen j:", sched.chosen_j)
print(f"|E_j|={cert.E_size} >= bound {float(cert.bound):.1f}: {cert.size_ok}; "
      f"pairs checked={cert.checked_pairs} violations={cert.violations}")
