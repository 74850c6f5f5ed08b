"""Moduli of center sets and two geometric probes.

``p1_modulus`` measures how far the delta-sublevel set of one set ``F`` can
reach from its center set. ``p2_modulus`` does the same uniformly over a
family, and ``lp2_modulus`` compares one anchor against the whole family.
With a common delta window they come out ordered ``p2 <= lp2 <= p1``.

``ured_probe`` estimates the modulus of rotundity in a direction ``z`` by
sampling unit pairs ``x, y`` with ``x - y`` parallel to ``z``; ``qur_probe``
looks for a witness against quasi-uniform rotundity of a subspace. Both
probes can only falsify a property, never prove it.
"""

import numpy as np

from rclab import (BoundedSet, CNorm, LqNorm, SetFamily, Space, Subspace, lp2_modulus,
                   p1_modulus, p2_modulus, qur_probe, ured_probe)

L2 = Space(2)
X = Subspace([[1.0, 0.0]], L2)
fam = SetFamily([BoundedSet([[0.0, 1.0]], L2),
                 BoundedSet([[1.0, 1.0], [-1.0, 1.0], [0.0, -0.5]], L2)])
sols = fam.solve(X)
window = min(s.radius for s in sols)
eps = [0.1, 0.25, 0.5]
p2 = p2_modulus(X, fam, eps, sols=sols, window=window)
lp2 = lp2_modulus(X, fam, fam.members[1], eps, sols=sols, window=window)
p1 = p1_modulus(X, fam.members[1], eps, sol=sols[1], delta_max=window)
print(f"{'eps':>5} {'p2':>10} {'lp2':>10} {'p1':>10}")
for e in eps:
    print(f"{e:>5} {p2.delta(e):>10.6f} {lp2.delta(e):>10.6f} {p1.delta(e):>10.6f}")

# Euclidean rotundity: at eps = 1 the modulus is 1 - sqrt(3)/2 whatever z is.
print("\nURED, l2, z = (1, 1):", ured_probe(L2, [1.0, 1.0]).modulus_estimate,
      " exact:", 1 - np.sqrt(3) / 2)
print("URED, l1, z = (1, -1):", ured_probe(Space(2, LqNorm(1.0)), [1.0, -1.0]).modulus_estimate)

# QUR probe for the c-norm line: no witness at this resolution, only a
# small delta estimate.
cn = Space(3, CNorm())
res = qur_probe(cn, Subspace([[1.0, 1.0, 0.0]], cn), 0.5)
print("\nQUR, c-norm, eps = 0.5: delta estimate", res.delta_estimate, "witness", res.witness)
