"""Restricted centers in an l_p direct sum.

For ``X = (X_1 + ... + X_m)_p`` with product subspace and product set, the
farthest radius and the restricted radius combine blockwise as an l_p norm
of the block values, and the center set is the product of block center sets.
This demo compares the blockwise route with a direct solve on the
materialized product set.
"""

import numpy as np

from rclab import product_center, product_farthest_radius, product_restricted_radius
from rclab.direct_sum import direct_solve, minimizing_sequence, random_instance, tail_mass_check

rng = np.random.default_rng(3)
inst = random_instance(rng, m_max=3, dim_max=2, set_max=4, m_min=3, rotund=True)
print(f"m = {inst.m} blocks, dims {inst.dims}, p = {inst.p}")

x = rng.standard_normal(inst.space.dim)
F = inst.materialize()
print("farthest radius, blockwise:   ", product_farthest_radius(inst, x))
print("farthest radius, materialized:", max(inst.space.norm.evaluate(F.points - x)))

blockwise = product_restricted_radius(inst)
direct = direct_solve(inst)
print("restricted radius, blockwise:", blockwise.radius)
print("restricted radius, direct:   ", direct.radius)
print("block radii:", np.round(blockwise.component_radii, 6))

cloud = product_center(inst)
gap = inst.space.norm.evaluate(cloud.points - direct.center).min()
print("center cloud size", len(cloud), "distance to direct center", gap)

# A minimizing sequence approaching the center: its block tails beyond some
# index j stay below eps, with j at most the number of blocks.
seq = minimizing_sequence(inst, steps=20)
rep = tail_mass_check(inst, seq, eps=0.01)
print("tail check: j =", rep.j, "holds =", rep.holds)
