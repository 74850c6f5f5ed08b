"""Restricted Chebyshev centers of a finite set.

The restricted radius of ``F`` relative to a subspace ``V`` is the smallest
``r(v, F) = max_a |v - a|`` over ``v`` in ``V``. In a rotund norm the
minimizer is unique; in a flat norm it can be a whole segment, which the
solver returns as a cloud of near-minimizers.
"""

import numpy as np

from rclab import BoundedSet, LqNorm, Space, Subspace, grid_oracle, restricted_radius

# Three points in the Euclidean plane, centers restricted to the x-axis.
L2 = Space(2)
V = Subspace([[1.0, 0.0]], L2)
F = BoundedSet([[1.0, 1.0], [-1.0, 1.0], [0.0, -0.5]], L2)

sol = restricted_radius(V, F)
print("l2:  radius", sol.radius, "center", sol.center, "cloud size", len(sol.minimizers))
print("     certified gap", sol.gap)

# The brute-force grid oracle agrees up to its spacing.
grid = grid_oracle(V, F, resolution=401)
print("     grid oracle radius", grid.radius)

# In l_1, for F = {(1, 1), (-1, -1)} and V spanned by (1, -1), every point
# (t, -t) with |t| <= 1 has farthest distance |t - 1| + |t + 1| = 2.
L1 = Space(2, LqNorm(1.0))
V1 = Subspace([[1.0, -1.0]], L1)
F1 = BoundedSet([[1.0, 1.0], [-1.0, -1.0]], L1)
sol1 = restricted_radius(V1, F1)
ts = sol1.minimizers.points[:, 0]
print("l1:  radius", sol1.radius, "cloud size", len(sol1.minimizers),
      "t range", (float(ts.min()), float(ts.max())))

# Shifting the set and the subspace together shifts the center.
rng = np.random.default_rng(1)
shift = rng.standard_normal(2) * np.array([1.0, 0.0])
moved = restricted_radius(V, BoundedSet(F.points + shift, L2))
print("translation check:", np.allclose(moved.center, sol.center + shift, atol=1e-6))
