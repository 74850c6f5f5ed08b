"""Finite l_p direct sums of normed spaces and product sets.

A ``ProductInstance`` bundles ``m`` component triples ``(X_i, Y_i, F_i)``
and an outer exponent ``p``. Quantities on the sum are computed blockwise
(no Cartesian materialization); ``materialize`` and ``direct_solve`` build
the full product for brute-force cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian

import numpy as np

from .errors import DimensionError, ValidationError
from .geometry import BoundedSet, Subspace, directed_hausdorff, farthest_radius
from .solver import restricted_radius
from .spaces import CNorm, LqNorm, Space, SumNorm, lp_combine

__all__ = [
    "Component",
    "ProductInstance",
    "ProductPoint",
    "ProductCloud",
    "ProductRadius",
    "TailReport",
    "product_norm",
    "product_farthest_radius",
    "product_restricted_radius",
    "product_center",
    "product_hausdorff",
    "direct_solve",
    "tail_mass_check",
    "minimizing_sequence",
    "semicontinuity_transfer_probe",
    "random_instance",
    "clear_cache",
]

MATERIALIZE_CAP = 10_000
CLOUD_CAP = 100_000


@dataclass(frozen=True)
class Component:
    space: Space
    subspace: Subspace
    set: BoundedSet

    def __post_init__(self):
        if self.subspace.space.dim != self.space.dim or self.set.space.dim != self.space.dim:
            raise DimensionError("component: subspace/set dimension does not match its space")


class ProductInstance:
    """``X = (⊕_p X_i)``, ``Y = (⊕_p Y_i)`` and ``F = Π F_i``."""

    def __init__(self, components, p):
        components = tuple(components)
        if not components:
            raise ValidationError("components: need at least one component")
        p = float(p)
        if not np.isfinite(p) or p < 1:
            raise ValidationError(f"p: need finite p >= 1, got {p!r}")
        self.components = components
        self.p = p
        self.dims = tuple(c.space.dim for c in components)
        self.offsets = np.cumsum((0,) + self.dims)
        self.space = Space(int(self.offsets[-1]),
                           SumNorm(p, tuple((c.space.dim, c.space.norm) for c in components)))

    @property
    def m(self):
        return len(self.components)

    def __repr__(self):
        return f"ProductInstance(m={self.m}, p={self.p}, dims={self.dims})"

    def split(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.space.dim:
            raise DimensionError(f"x: dimension {x.shape[-1]} does not match product dim {self.space.dim}")
        return [x[..., a:b] for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    def join(self, blocks):
        if len(blocks) != self.m:
            raise DimensionError(f"blocks: expected {self.m} blocks, got {len(blocks)}")
        for i, (b, d) in enumerate(zip(blocks, self.dims)):
            if np.shape(b)[-1] != d:
                raise DimensionError(f"blocks[{i}]: dimension {np.shape(b)[-1]} does not match {d}")
        return np.concatenate([np.asarray(b, dtype=float) for b in blocks], axis=-1)

    @property
    def subspace(self):
        rows = []
        for c, a in zip(self.components, self.offsets[:-1]):
            for v in c.subspace.basis:
                row = np.zeros(self.space.dim)
                row[a:a + c.space.dim] = v
                rows.append(row)
        return Subspace(np.array(rows).reshape(-1, self.space.dim), self.space)

    def materialize(self, cap=MATERIALIZE_CAP):
        """The product set ``Π F_i`` as explicit points (``|Π F_i| <= cap``)."""
        size = int(np.prod([len(c.set) for c in self.components]))
        if size > cap:
            raise ValidationError(f"set: product has {size} points, above the cap {cap}")
        pts = [np.concatenate(t) for t in cartesian(*(c.set.points for c in self.components))]
        return BoundedSet(np.array(pts), self.space)

    def with_sets(self, sets):
        """Same spaces and subspaces with the component sets replaced (``None`` keeps one)."""
        if len(sets) != self.m:
            raise DimensionError(f"sets: expected {self.m} sets, got {len(sets)}")
        comps = [c if s is None else Component(c.space, c.subspace, s)
                 for c, s in zip(self.components, sets)]
        return ProductInstance(comps, self.p)


@dataclass(frozen=True)
class ProductPoint:
    blocks: tuple

    @classmethod
    def from_flat(cls, inst, x):
        return cls(tuple(np.array(b) for b in inst.split(x)))

    def flat(self):
        return np.concatenate([np.asarray(b, dtype=float) for b in self.blocks])


def _flat(inst, x):
    if isinstance(x, ProductPoint):
        return inst.join(list(x.blocks))
    x = np.asarray(x, dtype=float)
    inst.split(x)
    return x


def product_norm(inst, x):
    """``(Σ |x_i|^p)^(1/p)``."""
    return float(inst.space.norm.evaluate(_flat(inst, x)))


def product_farthest_radius(inst, x):
    """``r(x, Π F_i)`` computed as ``(Σ r(x_i, F_i)^p)^(1/p)``."""
    blocks = inst.split(_flat(inst, x))
    radii = [farthest_radius(b, c.set) for b, c in zip(blocks, inst.components)]
    return float(lp_combine(np.array(radii), inst.p))


_SOLVE_CACHE = {}


def clear_cache():
    _SOLVE_CACHE.clear()


def _component_key(c, tol, seed):
    return (c.space, c.subspace.basis.tobytes(), c.subspace.basis.shape,
            c.set.points.tobytes(), c.set.points.shape, tol, seed)


def _solve_component(c, tol, seed):
    key = _component_key(c, tol, seed)
    sol = _SOLVE_CACHE.get(key)
    if sol is None:
        sol = restricted_radius(c.subspace, c.set, tol, seed=seed)
        if len(_SOLVE_CACHE) > 4096:
            _SOLVE_CACHE.clear()
        _SOLVE_CACHE[key] = sol
    return sol


@dataclass(frozen=True)
class ProductRadius:
    radius: float
    component_solutions: tuple

    @property
    def component_radii(self):
        return tuple(s.radius for s in self.component_solutions)


def product_restricted_radius(inst, tol=1e-6, seed=0, workers=None):
    """``rad_Y(F) = (Σ rad_{Y_i}(F_i)^p)^(1/p)`` from independent component solves."""
    if tol <= 0:
        raise ValidationError("tol: must be > 0")
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            sols = tuple(ex.map(lambda c: _solve_component(c, tol, seed), inst.components))
    else:
        sols = tuple(_solve_component(c, tol, seed) for c in inst.components)
    radius = float(lp_combine(np.array([s.radius for s in sols]), inst.p))
    return ProductRadius(radius, sols)


@dataclass(frozen=True)
class ProductCloud:
    """Product center cloud as flat points ``(N, dim)`` plus component clouds."""

    points: np.ndarray
    component_clouds: tuple
    truncated: bool
    radius: float

    def as_set(self, inst):
        return BoundedSet(self.points, inst.space)

    def __len__(self):
        return self.points.shape[0]


def _subsample(clouds, cap):
    clouds = [np.asarray(c) for c in clouds]
    truncated = False
    while int(np.prod([len(c) for c in clouds])) > cap:
        i = int(np.argmax([len(c) for c in clouds]))
        n = len(clouds[i])
        idx = np.unique(np.linspace(0, n - 1, max(1, n // 2)).round().astype(int))
        clouds[i] = clouds[i][idx]
        truncated = True
    return clouds, truncated


def product_center(inst, tol=1e-6, cap=CLOUD_CAP, seed=0):
    """``Z_Y(F) = Π Z_{Y_i}(F_i)`` as the Cartesian product of component clouds.

    Clouds above ``cap`` points are thinned by deterministic even subsampling
    of the largest component cloud; ``truncated`` flags that case.
    """
    res = product_restricted_radius(inst, tol, seed)
    comp = [s.minimizers.points for s in res.component_solutions]
    clouds, truncated = _subsample(comp, cap)
    pts = np.array([np.concatenate(t) for t in cartesian(*clouds)])
    return ProductCloud(pts, tuple(comp), truncated, res.radius)


def direct_solve(inst, tol=1e-6, seed=0, **kwargs):
    """Minimax solve over the materialized product set in the full sum space."""
    return restricted_radius(inst.subspace, inst.materialize(), tol, seed=seed, **kwargs)


def _directed_blocks(inst, A_blocks, B_blocks):
    """Directed Hausdorff distance between product sets given by their blocks."""
    d = [directed_hausdorff(BoundedSet(a, c.space), BoundedSet(b, c.space))
         for a, b, c in zip(A_blocks, B_blocks, inst.components)]
    return float(lp_combine(np.array(d), inst.p))


def product_hausdorff(inst, F_sets, G_sets):
    """Hausdorff distance between ``Π F_i`` and ``Π G_i``, blockwise.

    For product sets ``d(x, Π G_i)^p = Σ d(x_i, G_i)^p`` and the supremum
    over ``x`` splits by block.
    """
    A = [s.points if isinstance(s, BoundedSet) else s for s in F_sets]
    B = [s.points if isinstance(s, BoundedSet) else s for s in G_sets]
    return max(_directed_blocks(inst, A, B), _directed_blocks(inst, B, A))


@dataclass(frozen=True)
class TailReport:
    j: int
    max_tail: float
    holds: bool
    minimizing: bool
    tails: tuple


def tail_mass_check(inst, points, eps, radius=None, tol=1e-6):
    """Smallest ``j`` with ``max_n Σ_{i>j} |y_{n,i}|^p < eps^p``.

    The sequence is validated as minimizing: ``r(y_n, F)`` must be
    non-increasing (up to ``tol``) and end within ``1e-6 * max(1, rad)`` of the product radius
    (solved when ``radius`` is not given). ``holds`` requires both the
    validation and a tail index; ``j == m`` (empty tail) is always available
    in a finite truncation.
    """
    if eps <= 0:
        raise ValidationError("eps: must be > 0")
    flats = [_flat(inst, y) for y in points]
    if not flats:
        raise ValidationError("points: need at least one point")
    Y = np.array(flats)
    norms = np.stack([c.space.norm.evaluate(b) for b, c in zip(inst.split(Y), inst.components)],
                     axis=1)
    powered = norms ** inst.p
    # suffix[:, j] = Σ_{i>j} |y_{n,i}|^p for j = 0..m
    suffix = np.concatenate([np.cumsum(powered[:, ::-1], axis=1)[:, ::-1][:, 1:],
                             np.zeros((Y.shape[0], 1))], axis=1)
    suffix = np.concatenate([powered.sum(axis=1, keepdims=True), suffix], axis=1)
    tails = suffix.max(axis=0)
    below = np.nonzero(tails < eps ** inst.p)[0]
    j = int(below[0]) if below.size else inst.m

    if radius is None:
        radius = product_restricted_radius(inst, tol).radius
    r = np.array([product_farthest_radius(inst, y) for y in Y])
    # monotonicity is checked up to the solver tolerance: the generated
    # sequences approach a numerical center, which is only tol-accurate
    slack = tol * max(1.0, float(r.max()))
    minimizing = bool(np.all(np.diff(r) <= slack)
                      and r[-1] - radius <= 1e-6 * max(1.0, radius)
                      and np.all(r >= radius - max(tol, 1e-9)))
    return TailReport(j, float(tails[j]), minimizing and below.size > 0, minimizing,
                      tuple(tails.tolist()))


def minimizing_sequence(inst, start=None, steps=30, tol=1e-6, seed=0):
    """Points ``c + 2^-n (y_0 - c)``, ``n = 0..steps``, from ``y_0`` in ``Y`` toward a
    product center ``c``.

    ``r(., F)`` is convex, so it is non-increasing along the segment and the
    sequence is minimizing. ``start`` defaults to a seeded random point of
    ``Y`` at unit scale.
    """
    c = product_center(inst, tol, seed=seed).points[0]
    if start is None:
        V = inst.subspace
        rng = np.random.default_rng(seed)
        start = V.embed(rng.standard_normal(V.k)) if V.k else np.zeros(inst.space.dim)
    start = _flat(inst, start)
    return [c + 0.5 ** n * (start - c) for n in range(steps + 1)]


def semicontinuity_transfer_probe(inst, perturbations, tol=1e-6, seed=0):
    """Directed center-set gaps against the input Hausdorff distance.

    Each perturbation lists one replacement set per component (``None`` keeps
    the original). For each perturbed product set ``G`` the rows report
    ``H(F, G)``, the lHsc gap ``sup_{y in Z(F)} d(y, Z(G))`` and the uHsc gap
    ``sup_{y in Z(G)} d(y, Z(F))``, all computed blockwise on the product
    center clouds.
    """
    base = product_center(inst, tol, seed=seed)
    rows = []
    for idx, sets in enumerate(perturbations):
        other = inst.with_sets(list(sets))
        pert = product_center(other, tol, seed=seed)
        h = product_hausdorff(inst, [c.set for c in inst.components],
                              [c.set for c in other.components])
        rows.append({
            "index": idx,
            "hausdorff": h,
            "lhsc_gap": _directed_blocks(inst, base.component_clouds, pert.component_clouds),
            "uhsc_gap": _directed_blocks(inst, pert.component_clouds, base.component_clouds),
            "radius": pert.radius,
        })
    return rows


def _random_basis(rng, k, d):
    while True:
        b = rng.standard_normal((k, d))
        if k == 0 or np.linalg.svd(b, compute_uv=False)[-1] > 1e-3:
            return b


def random_instance(rng, m_max=3, dim_max=3, set_max=5, p_choices=(1.0, 2.0, 3.0),
                    rotund=False, m_min=1):
    """Random product instance for property checks.

    Component norms are drawn from l_1.5, l_2, l_3 (``rotund=True``) or
    additionally l_1 and, in dimension 3, the c-norm.
    """
    m = int(rng.integers(m_min, m_max + 1))
    p = float(rng.choice(p_choices))
    comps = []
    for _ in range(m):
        d = int(rng.integers(1, dim_max + 1))
        choices = [LqNorm(1.5), LqNorm(2.0), LqNorm(3.0)]
        if not rotund:
            choices.append(LqNorm(1.0))
            if d == 3:
                choices.append(CNorm())
        space = Space(d, choices[int(rng.integers(len(choices)))])
        k = int(rng.integers(0, d + 1))
        V = Subspace(_random_basis(rng, k, d), space)
        n = int(rng.integers(1, set_max + 1))
        F = BoundedSet(np.round(rng.uniform(-2, 2, size=(n, d)), 3), space)
        comps.append(Component(space, V, F))
    return ProductInstance(comps, p)
