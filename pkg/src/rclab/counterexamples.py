"""Two explicit constructions.

* ``build_p2_failure``: blocks ``(R^3, l_{p_i})`` with ``p_i = 1 + 1/i`` and
  ``Y_i = span{e1, e2}``. The two-point sets ``G_n`` (supported in block
  ``n``) all have restricted radius 1 and center ``{0}``, while the points
  ``w_n`` at distance 1 from the center have farthest radius
  ``2^(1/(n+1)) -> 1``. No single ``delta`` works for the whole family.
* ``run_lhsc_failure``: the c-norm on ``R^3`` with ``Y = span{(1,1,0)}``.
  The metric projection of ``(1,0,0)`` is a segment, while points
  ``(1,0,1/k)`` project to the single endpoint ``(1,1,0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .direct_sum import (
    Component,
    ProductInstance,
    product_center,
    product_farthest_radius,
    product_restricted_radius,
)
from .errors import ValidationError
from .geometry import BoundedSet, Subspace, dist_to_cloud, directed_hausdorff, hausdorff
from .solver import grid_oracle, metric_projection
from .spaces import CNorm, LqNorm, Space

__all__ = [
    "P2FailureInstance",
    "LhscFailureInstance",
    "block_exponent",
    "build_p2_failure",
    "measure_p2_failure",
    "p2_violation",
    "lhsc_instance",
    "run_lhsc_failure",
]


def block_exponent(i):
    """``p_i = 1 + 1/i``."""
    return 1.0 + 1.0 / i


@dataclass(frozen=True)
class P2FailureInstance:
    n: int
    m: int
    p: float
    instance: ProductInstance
    w: np.ndarray
    u_norm: float

    @property
    def G(self):
        return self.instance.materialize()


def build_p2_failure(n, m=None, p=2.0):
    """Block-``n`` instance truncated to ``m`` blocks (default ``m = n``).

    Block ``n`` holds ``G_n = {±(1,1,0)/|(1,1,0)|_{p_n}}``, every other block
    holds ``{0}``; ``w`` has block ``n`` equal to ``(1,-1,0)/|(1,1,0)|_{p_n}``.
    """
    if m is None:
        m = n
    if not (1 <= n <= m):
        raise ValidationError(f"n: need 1 <= n <= m, got n={n}, m={m}")
    comps = []
    u_norm = None
    for i in range(1, m + 1):
        space = Space(3, LqNorm(block_exponent(i)))
        Y = Subspace([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], space)
        if i == n:
            u_norm = float(space.norm.evaluate(np.array([1.0, 1.0, 0.0])))
            u = np.array([1.0, 1.0, 0.0]) / u_norm
            F = BoundedSet(np.array([u, -u]), space)
        else:
            F = BoundedSet(np.zeros((1, 3)), space)
        comps.append(Component(space, Y, F))
    inst = ProductInstance(comps, p)
    w = np.zeros(3 * m)
    w[3 * (n - 1):3 * n] = np.array([1.0, -1.0, 0.0]) / u_norm
    return P2FailureInstance(n, m, float(p), inst, w, u_norm)


def measure_p2_failure(n_max, p=2.0, tol=1e-6):
    """Per ``n``: ``rad``, ``r(w_n, G_n)``, their gap and ``d(w_n, Z_Y(G_n))``."""
    if n_max < 1:
        raise ValidationError("nmax: must be >= 1")
    rows = []
    for n in range(1, n_max + 1):
        ce = build_p2_failure(n, n, p)
        rad = product_restricted_radius(ce.instance, tol).radius
        r_w = product_farthest_radius(ce.instance, ce.w)
        cloud = product_center(ce.instance, tol)
        dist = dist_to_cloud(ce.w, cloud.as_set(ce.instance))
        rows.append({"n": n, "rad": rad, "r_wn": r_w, "gap": r_w - rad, "dist_to_center": dist})
    return rows


def p2_violation(delta, eps=0.5, n_max=40, p=2.0, tol=1e-6):
    """First ``n`` whose witness ``w_n`` lies in ``Z_Y(G_n, delta)`` but farther
    than ``eps`` from ``Z_Y(G_n)``; ``None`` if no ``n <= n_max`` does."""
    for row in measure_p2_failure(n_max, p, tol):
        if row["gap"] <= delta and row["dist_to_center"] > eps:
            return row
    return None


@dataclass(frozen=True)
class LhscFailureInstance:
    space: Space
    Y: Subspace
    anchor: np.ndarray

    def perturbed(self, k):
        return np.array([1.0, 0.0, 1.0 / k])


def lhsc_instance():
    space = Space(3, CNorm())
    return LhscFailureInstance(space, Subspace([[1.0, 1.0, 0.0]], space), np.array([1.0, 0.0, 0.0]))


def run_lhsc_failure(k_list=(1, 10, 100), tol=1e-6, resolution=101):
    """Anchor projection segment against projections of ``(1, 0, 1/k)``.

    Rows: ``k``, ``h`` (input distance ``1/k`` in c-norm), ``d_anchor``,
    ``proj_anchor_cloud`` (cloud size), segment end points as ``t`` values,
    ``proj_k`` (projection of the perturbed point), ``d_k`` and
    ``d_k_grid`` (grid-oracle distance at ``resolution``), ``lhsc_gap`` and
    ``uhsc_gap``.
    """
    if not k_list or any(k < 1 for k in k_list):
        raise ValidationError("k: need entries >= 1")
    ce = lhsc_instance()
    space, Y = ce.space, ce.Y
    anchor = metric_projection(Y, ce.anchor, tol)
    t = anchor.minimizers.points[:, 0]
    rows = []
    for k in k_list:
        x = ce.perturbed(k)
        sol = metric_projection(Y, x, tol)
        grid = grid_oracle(Y, BoundedSet(x, space), resolution=resolution)
        rows.append({
            "k": int(k),
            "h": hausdorff(BoundedSet(x, space), BoundedSet(ce.anchor, space)),
            "d_anchor": anchor.radius,
            "proj_anchor_cloud": len(anchor.minimizers),
            "t_min": float(t.min()),
            "t_max": float(t.max()),
            "proj_k": sol.center.copy(),
            "d_k": sol.radius,
            "d_k_grid": grid.radius,
            "lhsc_gap": directed_hausdorff(anchor.minimizers, sol.minimizers),
            "uhsc_gap": directed_hausdorff(sol.minimizers, anchor.minimizers),
        })
    return rows
