"""A family with constant radius but no uniform P2 modulus.

Block ``i`` of the direct sum is ``R^3`` with the ``l_{p_i}`` norm,
``p_i = 1 + 1/i``, and the subspace spanned by ``e1, e2``. The set ``G_n``
lives in block ``n``. Every ``G_n`` has restricted radius 1 and center 0,
yet the point ``w_n`` at distance 1 from the center is only
``2^(1/(n+1)) - 1`` worse than optimal. For any ``delta > 0`` some ``n``
puts ``w_n`` in the delta-sublevel set while it stays far from the center.
"""

from rclab.counterexamples import measure_p2_failure, p2_violation

rows = measure_p2_failure(20)
print(f"{'n':>3} {'rad':>10} {'r(w_n)':>10} {'gap':>10} {'dist':>8}")
for r in rows:
    print(f"{r['n']:>3} {r['rad']:>10.6f} {r['r_wn']:>10.6f} {r['gap']:>10.6f} "
          f"{r['dist_to_center']:>8.4f}")

for delta in (0.1, 0.05, 0.035):
    hit = p2_violation(delta, eps=0.5, n_max=40)
    print(f"delta = {delta}: first violating n =", None if hit is None else hit["n"])
