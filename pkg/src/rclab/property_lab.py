"""Empirical moduli and probes for uniform sublevel collapse, rotundity and
semicontinuity of restricted center maps.

Quantifiers of the form "for every G in the family" range over explicitly
listed finite families. A failing check comes with a witness; a passing check
is evidence at the sampling resolution only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .geometry import BoundedSet, _intersection_grid, directed_hausdorff, hausdorff
from .solver import (
    ModulusCurve,
    SublevelProbe,
    bisect_delta,
    coefficient_bound,
    p1_modulus,
    ray_directions,
    restricted_radius,
)
from .spaces import as_point

__all__ = [
    "SetFamily",
    "normalize",
    "p2_modulus",
    "lp2_modulus",
    "local_vs_uniform_compare",
    "QURResult",
    "qur_probe",
    "UREDResult",
    "ured_probe",
    "semicontinuity_gap",
    "ScalingReport",
    "scaling_check",
    "DEFAULT_QUR_DELTAS",
]

NORMALIZATIONS = ("none", "rad_eq_1", "rad_le_1")
DEFAULT_QUR_DELTAS = (0.5, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001)


class SetFamily:
    """A finite, nonempty list of sets over one space.

    ``normalization`` records a promise about the restricted radii of the
    members (``rad == 1`` or ``rad <= 1``); ``check`` verifies it against
    solved radii.
    """

    def __init__(self, members, normalization="none"):
        members = list(members)
        if not members:
            raise ValidationError("members: family must be nonempty")
        if normalization not in NORMALIZATIONS:
            raise ValidationError(f"normalization: expected one of {NORMALIZATIONS}, got {normalization!r}")
        dim = members[0].space.dim
        for i, G in enumerate(members):
            if G.space.dim != dim:
                raise DimensionError(f"members[{i}]: dimension {G.space.dim} does not match {dim}")
        self.members = members
        self.normalization = normalization

    @property
    def space(self):
        return self.members[0].space

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __repr__(self):
        return f"SetFamily({len(self)} members, normalization={self.normalization!r})"

    def solve(self, V, tol=1e-6, seed=0):
        sols = [restricted_radius(V, G, tol, seed=seed) for G in self.members]
        self.check(sols)
        return sols

    def check(self, sols, atol=1e-6):
        for i, s in enumerate(sols):
            if self.normalization == "rad_eq_1" and abs(s.radius - 1) > atol:
                raise ValidationError(f"members[{i}]: radius {s.radius:.9g} is not 1")
            if self.normalization == "rad_le_1" and s.radius > 1 + atol:
                raise ValidationError(f"members[{i}]: radius {s.radius:.9g} exceeds 1")


def normalize(V, F, tol=1e-6, seed=0):
    """``(F - w) / rad_V(F)`` with ``w`` a restricted center: radius 1, centered at 0."""
    sol = restricted_radius(V, F, tol, seed=seed)
    if sol.radius <= 0:
        raise ValidationError("set: radius is zero, cannot normalize")
    return BoundedSet((F.points - sol.center) / sol.radius, F.space)


def _window(sols):
    radii = [s.radius for s in sols if s.radius > 0]
    return min(radii) if radii else 1.0


def _eps_list(eps_grid):
    eps = sorted(float(e) for e in eps_grid)
    if not eps or any(e <= 0 for e in eps):
        raise ValidationError("eps_grid: need positive values")
    return eps


def _probes(V, fam, sols, resolution, sampler, window, seed):
    return [SublevelProbe(V, G, s, resolution, sampler, window=window, seed=seed)
            for G, s in zip(fam.members, sols)]


def p2_modulus(V, fam, eps_grid, resolution=101, *, tol=1e-6, window=None, sampler="rays",
               iterations=30, seed=0, sols=None):
    """Uniform (P2) modulus over a finite family.

    For each ``eps`` the largest ``delta`` in ``[0, window]`` (bisection) such
    that the sampled ``Z_V(G, delta)`` lies within ``eps`` of the center cloud
    ``Z_V(G)`` for every member ``G``. ``window`` defaults to the smallest
    positive member radius, so that the P2, lP2 and P1 searches of one
    family run over the same interval and the same probe sequence.

    Returns
    -------
    ModulusCurve
        ``kind == "P2"``; ``meta`` carries the window and member radii.
    """
    eps = _eps_list(eps_grid)
    if sols is None:
        sols = fam.solve(V, tol, seed)
    if window is None:
        window = _window(sols)
    probes = _probes(V, fam, sols, resolution, sampler, window, seed)
    pairs = tuple(
        (e, bisect_delta(lambda d: all(p.holds(d, e) for p in probes), window, iterations))
        for e in eps)
    return ModulusCurve(pairs, "P2", {"window": window, "radii": [s.radius for s in sols]})


def lp2_modulus(V, fam, anchor, eps_grid, resolution=101, *, tol=1e-6, window=None,
                sampler="rays", iterations=30, seed=0, sols=None):
    """Local (lP2) modulus at ``anchor``.

    ``delta`` passes when every member ``G`` with ``H(anchor, G) < delta``
    (and the anchor itself) satisfies the sampled inclusion
    ``Z_V(G, delta) ⊆ Z_V(G) + eps B``.
    """
    eps = _eps_list(eps_grid)
    if anchor.space.dim != fam.space.dim:
        raise DimensionError("anchor: dimension does not match the family")
    if sols is None:
        sols = fam.solve(V, tol, seed)
    if window is None:
        window = _window(sols)
    h = np.array([hausdorff(anchor, G) for G in fam.members])
    same = np.nonzero(h == 0)[0]
    if same.size:
        a_sol = sols[int(same[0])]
    else:
        a_sol = restricted_radius(V, anchor, tol, seed=seed)
    a_probe = SublevelProbe(V, anchor, a_sol, resolution, sampler, window=window, seed=seed)
    probes = _probes(V, fam, sols, resolution, sampler, window, seed)

    def passes(d, e):
        if not a_probe.holds(d, e):
            return False
        return all(p.holds(d, e) for p, hi in zip(probes, h) if hi < d)

    pairs = tuple((e, bisect_delta(lambda d: passes(d, e), window, iterations)) for e in eps)
    return ModulusCurve(pairs, "lP2", {"window": window, "hausdorff": h.tolist()})


def local_vs_uniform_compare(V, fam, eps, resolution=101, *, tol=1e-6, sampler="rays",
                             iterations=30, seed=0):
    """Per-anchor lP2 deltas against the uniform P2 delta of a finite family.

    For a finite family the uniform delta equals the smallest anchor delta up
    to sampling slack: small Hausdorff neighbourhoods of each member contain
    only that member.
    """
    sols = fam.solve(V, tol, seed)
    window = _window(sols)
    kw = dict(tol=tol, window=window, sampler=sampler, iterations=iterations, seed=seed,
              sols=sols)
    p2 = p2_modulus(V, fam, [eps], resolution, **kw).delta(float(eps))
    local = [lp2_modulus(V, fam, G, [eps], resolution, **kw).delta(float(eps))
             for G in fam.members]
    p1 = [p1_modulus(V, G, [eps], resolution, sol=s, delta_max=window, sampler=sampler,
                     iterations=iterations).delta(float(eps))
          for G, s in zip(fam.members, sols)]
    return {"lp2_deltas": local, "p2_delta": p2, "min_anchor_delta": min(local),
            "p1_deltas": p1, "window": window}


@dataclass(frozen=True)
class QURResult:
    delta_estimate: float
    witness: np.ndarray | None
    v_samples: int
    w_candidates: int


def _lattice(Y, spacing, reach):
    n = int(np.floor(reach / spacing + 1e-9))
    axis = spacing * np.arange(-n, n + 1)
    return np.stack(np.meshgrid(*[axis] * Y.k, indexing="ij"), axis=-1).reshape(-1, Y.k)


def qur_probe(space, Y, eps, v_samples=21, grid_spacing=0.05, deltas=DEFAULT_QUR_DELTAS,
              points_per_axis=41, atol=1e-12):
    """Sampled quasi-uniform-rotundity check of ``space`` with respect to ``Y``.

    For each candidate ``delta`` (tried in descending order) and each sampled
    ``v in Y`` with ``|v| <= 2`` (beyond that ``B[0,1] ∩ B[v,1-delta]`` is
    empty) the probe looks for ``w`` in a fixed lattice of ``Y`` (spacing
    ``grid_spacing`` in frame coordinates, plus ``v`` itself) with
    ``|w| <= eps`` and ``B[0,1] ∩ B[v,1-delta] ⊆ B[w,1-delta]``. The lattice
    does not depend on ``eps``, so candidate sets are nested and the estimate
    is monotone in ``eps``.

    Returns
    -------
    QURResult
        ``delta_estimate`` is the largest surviving candidate (``0.0`` when none
        survives, with ``witness`` a sample ``v`` admitting no ``w``).
    """
    if eps <= 0:
        raise ValidationError("eps: must be > 0")
    if Y.space.dim != space.dim:
        raise DimensionError("subspace: dimension does not match the space")
    if Y.k == 0:
        return QURResult(float(max(deltas)), None, 1, 1)
    norm = space.norm.evaluate
    lo, _ = space.bounds()
    reach = 2.0 / lo
    if Y.k == 1:
        vc = np.linspace(-reach, reach, 2 * (v_samples // 2) + 1)[:, None]
    else:
        axis = np.linspace(-reach, reach, v_samples)
        vc = np.stack(np.meshgrid(*[axis] * Y.k, indexing="ij"), axis=-1).reshape(-1, Y.k)
    vs = Y.embed(vc)
    vs = vs[norm(vs) <= 2.0 + 1e-12]
    lattice = Y.embed(_lattice(Y, grid_spacing, float(eps) / lo))
    lattice = lattice[norm(lattice) <= eps + 1e-12]
    zero = space.zero()
    witness = None
    for delta in sorted(deltas, reverse=True):
        r = 1.0 - delta
        ok = True
        for v in vs:
            ws = lattice if norm(v) > eps + 1e-12 else np.vstack([lattice, v])
            pts = _intersection_grid(zero, 1.0, v, r, space, points_per_axis, atol)
            if pts.shape[0] == 0:
                continue
            excess = norm(pts[None, :, :] - ws[:, None, :]).max(axis=1) - r
            if not np.any(excess <= atol):
                ok = False
                witness = v.copy()
                break
        if ok:
            return QURResult(float(delta), None, len(vs), len(lattice))
    return QURResult(0.0, witness, len(vs), len(lattice))


@dataclass(frozen=True)
class UREDResult:
    curve: ModulusCurve
    worst_pairs: tuple

    @property
    def modulus_estimate(self):
        return self.curve.pairs[0][1]


def _sphere_samples(dim, samples, seed):
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        t = 2 * np.pi * np.arange(samples) / samples
        return np.column_stack([np.cos(t), np.sin(t)])
    u = np.random.default_rng(seed).standard_normal((samples, dim))
    return np.vstack([np.eye(dim), -np.eye(dim), u])


def _unit_root(norm, x, z, sign, iters=80):
    """Largest ``t >= 0`` with ``|x - sign * t z| <= 1`` (``x`` on the unit sphere)."""
    zn = float(norm(z))
    lo = np.zeros(x.shape[0])
    hi = np.full(x.shape[0], 2.0 / zn + 1.0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = norm(x - sign * mid[:, None] * z) <= 1.0
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return sign * lo


def ured_probe(space, z, eps_grid=(1.0,), samples=8192, tol=1e-12, seed=0):
    """Modulus of rotundity of ``space`` in the direction ``z``.

    Points ``x`` are sampled on the unit sphere; for each the two roots
    ``t`` of ``|x - t z| = 1`` (bisection) give pairs ``y = x - t z`` on the
    sphere. For each ``eps'`` the estimate is
    ``min {1 - |(x + y)/2| : |x - y| >= eps'}``; values at or below ``tol``
    are reported as ``0`` (a flat piece in direction ``z``).
    """
    z = as_point(z, space, "z")
    norm = space.norm.evaluate
    if norm(z) == 0:
        raise ValidationError("z: direction must be nonzero")
    eps = _eps_list(eps_grid)
    u = _sphere_samples(space.dim, samples, seed)
    x = u / norm(u)[:, None]
    ts = np.concatenate([_unit_root(norm, x, z, 1.0), _unit_root(norm, x, z, -1.0)])
    xx = np.vstack([x, x])
    y = xx - ts[:, None] * z
    gap = norm(xx - y)
    mid = 1.0 - norm(0.5 * (xx + y))
    pairs, worst = [], []
    for e in eps:
        sel = np.nonzero(gap >= e)[0]
        if sel.size == 0:
            pairs.append((e, 0.0))
            worst.append(None)
            continue
        j = sel[np.argmin(mid[sel])]
        m = float(mid[j])
        pairs.append((e, 0.0 if m <= tol else m))
        worst.append((xx[j].copy(), y[j].copy()))
    return UREDResult(ModulusCurve(tuple(pairs), "URED", {"samples": int(xx.shape[0])}),
                      tuple(worst))


def semicontinuity_gap(V, sets_sequence, tol=1e-6, seed=0):
    """Directed center-cloud gaps of a set sequence against its last element.

    Each row has ``h`` (Hausdorff distance to the limit set), ``lhsc_gap``
    (``sup`` over the limit centers of the distance to the member's centers)
    and ``uhsc_gap`` (the reverse direction).
    """
    sets_sequence = list(sets_sequence)
    if not sets_sequence:
        raise ValidationError("sets_sequence: need at least one set")
    sols = [restricted_radius(V, G, tol, seed=seed) for G in sets_sequence]
    limit, zlim = sets_sequence[-1], sols[-1].minimizers
    rows = []
    for G, s in zip(sets_sequence, sols):
        rows.append({
            "h": hausdorff(G, limit),
            "lhsc_gap": directed_hausdorff(zlim, s.minimizers),
            "uhsc_gap": directed_hausdorff(s.minimizers, zlim),
            "radius": s.radius,
        })
    return rows


@dataclass(frozen=True)
class ScalingReport:
    checks: int
    violations: int
    worst_mismatch: float


def scaling_check(V, F, w=None, alpha=None, samples=1000, slack=1e-9, tol=1e-6, seed=0):
    """Membership equivalence ``v ∈ Z_V(F, delta)`` iff
    ``(v - w)/alpha ∈ Z_V((F - w)/alpha, delta/alpha)``.

    The two radii are solved independently. Defaults are ``w`` a restricted
    center and ``alpha = rad_V(F)`` (the normalized set has radius 1).
    Sampled ``v`` are spread around the sublevel boundaries; a violation is a
    disagreement of the two verdicts with both margins above ``slack``
    (relative to the respective radius).
    """
    sol = restricted_radius(V, F, tol, seed=seed)
    if w is None:
        w = sol.center
    w = as_point(w, F.space, "w")
    if V.k and V.residual(w[None, :])[0] > 1e-9 * max(1.0, float(np.abs(w).max())):
        raise ValidationError("w: must lie in the subspace")
    if alpha is None:
        alpha = sol.radius
    if alpha <= 0:
        raise ValidationError("alpha: must be > 0")
    G = BoundedSet((F.points - w) / alpha, F.space)
    gsol = restricted_radius(V, G, tol, seed=seed)
    rng = np.random.default_rng(seed)
    R = coefficient_bound(V, F)
    if V.k:
        dirs = ray_directions(V.k, count=max(samples, 8), seed=seed)
        d = dirs[rng.integers(0, dirs.shape[0], samples)]
        c = V.coords(sol.center) + rng.uniform(0, 1, samples)[:, None] * R * d
        v = V.embed(c)
    else:
        v = np.zeros((samples, F.space.dim))
    rv = F.space.norm.evaluate(v[:, None, :] - F.points).max(axis=1)
    # deltas straddling each sample's own level, so verdicts of both signs occur
    delta = np.maximum(0.0, rv - sol.radius + rng.uniform(-1e-3, 1e-3, samples) * alpha)
    u = (v - w) / alpha
    ru = G.space.norm.evaluate(u[:, None, :] - G.points).max(axis=1)
    left = (rv - (sol.radius + delta)) / max(sol.radius, 1e-300)
    right = (ru - (gsol.radius + delta / alpha)) / max(gsol.radius, 1e-300)
    mismatch = (left <= 0) != (right <= 0)
    violating = mismatch & (np.abs(left) > slack) & (np.abs(right) > slack)
    worst = float(np.max(np.abs(left - right))) if samples else 0.0
    return ScalingReport(int(samples), int(violating.sum()), worst)
