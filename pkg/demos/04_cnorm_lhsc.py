"""Metric projection that fails to be lower semicontinuous.

On ``R^3`` with the c-norm and ``Y`` spanned by ``(1, 1, 0)``, the point
``(1, 0, 0)`` projects onto a whole segment of ``Y``. The nearby points
``(1, 0, 1/k)`` each project onto the single endpoint ``(1, 1, 0)``, so the
far end of the segment is never approached as ``k`` grows.
"""

from rclab.counterexamples import run_lhsc_failure

rows = run_lhsc_failure((1, 10, 100, 1000))
r0 = rows[0]
print(f"anchor: distance {r0['d_anchor']:.6f}, segment t in "
      f"[{r0['t_min']:.4f}, {r0['t_max']:.4f}] ({r0['proj_anchor_cloud']} points)")
print(f"{'k':>5} {'h':>8} {'projection':>26} {'lower gap':>10} {'upper gap':>10}")
for r in rows:
    proj = ", ".join(f"{c:.4f}" for c in r["proj_k"])
    print(f"{r['k']:>5} {r['h']:>8.4f} {'(' + proj + ')':>26} {r['lhsc_gap']:>10.4f} "
          f"{r['uhsc_gap']:>10.4f}")
