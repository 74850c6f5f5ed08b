"""Restricted Chebyshev centers by convex minimax optimization.

For a subspace ``V`` and a finite set ``F`` the objective
``v -> r(v, F) = max_a |v - a|`` is convex on ``V``. ``restricted_radius``
minimizes it in orthonormal frame coordinates:

1. batched multistart subgradient descent (origin plus box corners, step
   ``c / sqrt(t)``, ties between farthest points broken by lowest index);
2. gradient-sampling refinement with a shrinking sampling radius, which
   also yields a certified lower bound through convexity;
3. ray exploration around the best point at rounding-level tolerance, so
   that non-singleton center sets (segments, faces) come back as clouds.

``grid_oracle`` is the brute-force reference used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .errors import NonConvergenceError, RCLabError, UnsupportedError, ValidationError
from .geometry import BoundedSet, dist_to_cloud

__all__ = [
    "CenterSolution",
    "SublevelCloud",
    "ModulusCurve",
    "MAX_SUBSPACE_DIM",
    "restricted_radius",
    "grid_oracle",
    "sublevel_sample",
    "metric_projection",
    "p1_modulus",
    "coefficient_bound",
    "ray_directions",
    "bisect_delta",
    "SublevelProbe",
]

MAX_SUBSPACE_DIM = 16
GRID_MAX_DIM = 3
_ULP = np.finfo(float).eps


@dataclass(frozen=True)
class CenterSolution:
    """Restricted radius estimate and a cloud of near-minimizers.

    ``radius`` is attained at ``minimizers.points[0]``; ``lower_bound`` is a
    certified lower bound on the true infimum (``radius - lower_bound`` is the
    optimality gap). Every cloud member ``v`` has ``r(v, F) <= radius + cluster_tol``.
    """

    radius: float
    minimizers: BoundedSet
    cluster_tol: float
    iterations: int
    method: str
    lower_bound: float = -np.inf

    @property
    def center(self):
        return self.minimizers.points[0]

    @property
    def gap(self):
        return self.radius - self.lower_bound

    @property
    def diameter(self):
        pts = self.minimizers.points
        if len(pts) == 1:
            return 0.0
        return float(self.minimizers.space.norm.evaluate(pts[:, None] - pts[None]).max())


@dataclass(frozen=True)
class SublevelCloud:
    delta: float
    points: BoundedSet


@dataclass(frozen=True)
class ModulusCurve:
    """``(epsilon, delta)`` pairs for one of the P1/P2/lP2/QUR/URED moduli."""

    pairs: tuple
    kind: str
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        eps = [e for e, _ in self.pairs]
        if any(b <= a for a, b in zip(eps, eps[1:])):
            raise ValidationError("pairs: epsilon values must be strictly increasing")
        if any(d < 0 for _, d in self.pairs):
            raise ValidationError("pairs: delta values must be nonnegative")

    def delta(self, eps):
        for e, d in self.pairs:
            if e == eps:
                return d
        raise KeyError(eps)

    def as_rows(self):
        return [{"epsilon": e, "delta": d} for e, d in self.pairs]


class _Objective:
    """``c -> r(c @ frame, F)`` on frame coefficients, batched over leading axes."""

    def __init__(self, V, F):
        if V.space.dim != F.space.dim:
            raise ValidationError("subspace: dimension does not match the set")
        self.V = V
        self.F = F.unique()
        self.Q = V.frame
        self.A = self.F.points
        self.norm = F.space.norm
        self.k = V.k
        self.evals = 0

    def _dists(self, C):
        X = np.asarray(C, dtype=float) @ self.Q
        D = X[..., None, :] - self.A
        return D, self.norm.evaluate(D)

    def __call__(self, C):
        C = np.asarray(C, dtype=float)
        self.evals += 1
        if C.ndim == 2 and C.shape[0] * len(self.A) > 400_000:
            step = max(1, 400_000 // len(self.A))
            return np.concatenate([self(C[i:i + step]) for i in range(0, C.shape[0], step)])
        return self._dists(C)[1].max(axis=-1)

    def value_and_grad(self, C):
        self.evals += 1
        D, N = self._dists(C)
        j = np.argmax(N, axis=-1)
        Dj = np.take_along_axis(D, j[..., None, None], axis=-2)[..., 0, :]
        g = self.norm.subgradient(Dj) @ self.Q.T
        return N.max(axis=-1), g


def coefficient_bound(V, F):
    """Euclidean radius in frame coordinates containing every restricted center.

    Any center ``v`` satisfies ``|v| <= r(0, F) + min_a |a|``; the norm
    equivalence constant converts that to a Euclidean bound.
    """
    lo, _ = F.space.bounds()
    norms = F.space.norm.evaluate(F.points)
    return float((norms.max() + norms.min()) / lo)


def ray_directions(k, count=64, seed=0):
    """Deterministic unit directions in R^k used for ray sampling."""
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        t = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    eye = np.eye(k)
    dirs = [eye, -eye]
    if k == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = np.pi * (1 + 5 ** 0.5) * i
        r = np.sqrt(1 - z * z)
        dirs.append(np.column_stack([r * np.cos(phi), r * np.sin(phi), z]))
    else:
        a, b = np.triu_indices(k, 1)
        for sa in (1, -1):
            for sb in (1, -1):
                d = np.zeros((a.size, k))
                d[np.arange(a.size), a] = sa
                d[np.arange(a.size), b] = sb
                dirs.append(d / np.sqrt(2))
        rng = np.random.default_rng(seed)
        extra = rng.standard_normal((count, k))
        dirs.append(extra / np.linalg.norm(extra, axis=1, keepdims=True))
    return np.vstack(dirs)


def _ray_extent(obj, x, dirs, level, s_hi, iters=60):
    """``sup {s >= 0 : f(x + s d) <= level}`` per direction, by bisection.

    The sublevel set of a convex function is convex and contains ``x``, so
    the predicate is monotone along each ray.
    """
    hi = np.full(dirs.shape[0], float(s_hi))
    for _ in range(60):
        out = obj(x + hi[:, None] * dirs) > level
        if out.all():
            break
        hi = np.where(out, hi, 2 * hi)
    lo = np.zeros_like(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = obj(x + mid[:, None] * dirs) <= level
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return lo


def _min_norm_weights(G):
    """Convex weights ``lam`` minimizing ``|lam @ G|`` (small NNLS with a sum penalty)."""
    m = G.shape[0]
    rho = 1e3 * max(1.0, float(np.abs(G).max()))
    M = np.vstack([G.T, np.full((1, m), rho)])
    b = np.zeros(M.shape[0])
    b[-1] = rho
    lam, _ = nnls(M, b, maxiter=50 * m)
    s = lam.sum()
    return lam / s if s > 0 else np.full(m, 1.0 / m)


def _multistart(obj, R, starts, iters):
    x = starts.copy()
    best_f = np.full(x.shape[0], np.inf)
    best_x = x.copy()
    a0 = 0.5 * R
    for t in range(iters):
        f, g = obj.value_and_grad(x)
        better = f < best_f
        best_f = np.where(better, f, best_f)
        best_x[better] = x[better]
        gn = np.linalg.norm(g, axis=1)
        step = np.where(gn > 0, a0 / np.sqrt(t + 1.0) / np.where(gn > 0, gn, 1.0), 0.0)
        x = x - step[:, None] * g
    f = obj(x)
    better = f < best_f
    best_f = np.where(better, f, best_f)
    best_x[better] = x[better]
    return best_x, best_f


def _start_points(k, R, count, rng):
    pts = [np.zeros(k)]
    for scale in (1.0, 0.5, 0.25):
        if len(pts) >= count:
            break
        if k <= 4:
            corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * k, indexing="ij")).reshape(k, -1).T
        else:
            corners = rng.choice([-1.0, 1.0], size=(count, k))
        pts.extend(scale * R * corners)
    while len(pts) < count:
        pts.append(rng.uniform(-R, R, size=k))
    return np.array(pts[:count])


def _gradient_sampling(obj, x, R, rng, eps0, eps_min, max_iter, beta=1e-6):
    k = x.size
    m = 2 * k + 1
    fx = float(obj(x))
    eps = eps0
    t_last = eps0
    lower = -np.inf
    it = 0
    while it < max_iter:
        it += 1
        U = rng.standard_normal((m, k))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        U *= rng.uniform(0.0, 1.0, size=(m, 1)) ** (1.0 / k)
        P = np.vstack([x, x + eps * U])
        fv, G = obj.value_and_grad(P)
        lam = _min_norm_weights(G)
        g = lam @ G
        gn = float(np.linalg.norm(g))
        lower = max(lower, float(lam @ (fv - np.einsum("ij,ij->i", G, P))) - gn * R)
        if fv[0] < fx:
            fx = float(fv[0])
        if gn <= eps:
            eps *= 0.1
            if eps < eps_min:
                break
            continue
        d = -g / gn
        t = min(max(2.0 * t_last, eps), R)
        t_min = 1e-3 * eps
        moved = False
        while t >= t_min:
            xn = x + t * d
            fn = float(obj(xn))
            if fn <= fx - beta * t * gn:
                x, fx, t_last, moved = xn, fn, t, True
                break
            t *= 0.5
        if not moved:
            eps *= 0.1
            if eps < eps_min:
                break
    return x, fx, lower, it


def restricted_radius(V, F, tol=1e-6, *, seed=0, starts=20, subgradient_iters=300,
                      max_iters=5000, cloud_density=None, explore=True):
    """Restricted radius ``rad_V(F)`` and restricted centers ``Z_V(F)``.

    Parameters
    ----------
    V : Subspace
    F : BoundedSet
    tol : float
        Required certified gap between the returned radius and the true
        infimum.
    seed : int
        Seed for multistart jitter and gradient sampling.
    cloud_density : int, optional
        Points placed along each exploration ray when the center set is not
        a singleton. Defaults depend on ``V.k``.

    Returns
    -------
    CenterSolution
        ``method == "hybrid"``.

    Raises
    ------
    NonConvergenceError
        If the certified gap stays above ``tol``; ``best`` holds the best
        iterate.
    """
    if tol <= 0:
        raise ValidationError("tol: must be > 0")
    if V.k > MAX_SUBSPACE_DIM:
        raise UnsupportedError(f"subspace: dimension {V.k} exceeds {MAX_SUBSPACE_DIM}")
    obj = _Objective(V, F)
    k = V.k
    space = F.space
    if k == 0:
        r = float(obj(np.zeros(0)))
        return CenterSolution(r, BoundedSet(space.zero(), space), 1e-6 * max(1.0, r), 0,
                              "hybrid", r)

    R = coefficient_bound(V, F)
    rng = np.random.default_rng(seed)
    xs, fs = _multistart(obj, R, _start_points(k, R, starts, rng), subgradient_iters)
    iterations = starts * subgradient_iters
    order = np.argsort(fs, kind="stable")
    x, fx = xs[order[0]], float(fs[order[0]])
    lower = -np.inf
    eps_min = 1e-11 * max(1.0, R)
    eps0 = max(0.5 * R / np.sqrt(subgradient_iters), 100 * eps_min)
    for _ in range(3):
        x, fx, lb, it = _gradient_sampling(obj, x, R, rng, eps0, eps_min, max_iters)
        iterations += it
        lower = max(lower, lb)
        if fx - lower <= tol:
            break
        eps0 = max(eps0 * 0.1, 100 * eps_min)

    cloud = x[None, :]
    if explore:
        cloud, x, fx = _explore_flat(obj, x, fx, R, seed, cloud_density)
    pts = V.embed(cloud)
    sol = CenterSolution(fx, BoundedSet(pts, space), 1e-6 * max(1.0, fx), iterations,
                         "hybrid", min(lower, fx))
    if fx - lower > tol:
        raise NonConvergenceError(
            f"restricted_radius: certified gap {fx - lower:.3g} exceeds tol {tol:.3g}",
            best=sol, gap=fx - lower)
    return sol


def _explore_flat(obj, x, fx, R, seed, density):
    k = x.size
    if density is None:
        density = {1: 128, 2: 32, 3: 12}.get(k, 6)
    dirs = ray_directions(k, count={2: 72, 3: 128}.get(k, 64), seed=seed)
    level = fx + 16 * _ULP * max(1.0, abs(fx))
    probe = 1e-9 * max(1.0, R)
    flat = obj(x + probe * dirs) <= level
    if not flat.any():
        return x[None, :], x, fx
    dirs = dirs[flat]
    ext = _ray_extent(obj, x, dirs, level, s_hi=R)
    # a flat piece keeps its extent when the level is raised 64x; a curved
    # bowl grows by sqrt(64)
    ext_hi = _ray_extent(obj, x, dirs, fx + 1024 * _ULP * max(1.0, abs(fx)), s_hi=R)
    # pieces shorter than min_extent are left out: at that scale a slightly
    # misplaced optimum of a weakly curved objective also looks flat
    min_extent = 1e-6 * max(1.0, R)
    flat = (ext >= 0.5 * ext_hi) & (ext > min_extent)
    if not flat.any():
        return x[None, :], x, fx
    dirs, ext = dirs[flat], ext[flat]
    frac = np.arange(1, density + 1) / density
    pts = (x + (ext[:, None, None] * frac[None, :, None]) * dirs[:, None, :]).reshape(-1, k)
    vals = obj(pts)
    keep = vals <= level
    pts, vals = pts[keep], vals[keep]
    if vals.size and vals.min() < fx:
        j = int(np.argmin(vals))
        x, fx = pts[j], float(vals[j])
    cloud = np.vstack([x[None, :], pts])
    _, idx = np.unique(np.round(cloud, 14), axis=0, return_index=True)
    idx = np.sort(idx)
    if idx[0] != 0:
        idx = np.concatenate([[0], idx])
    return cloud[idx], x, fx


def grid_oracle(V, F, box_radius=None, resolution=201):
    """Exhaustive grid minimization of ``r(., F)`` over frame coefficients.

    The grid covers ``[-box_radius, box_radius]^k`` in frame coordinates
    (default: ``coefficient_bound``). ``cluster_tol`` carries the slack
    ``up * h * sqrt(k) / 2`` implied by the spacing ``h``: every point of the box
    lies that close (in norm) to a grid point, and ``r(., F)`` is 1-Lipschitz,
    so ``lower_bound = radius - slack``.
    """
    if V.k > GRID_MAX_DIM:
        raise UnsupportedError(f"grid_oracle: subspace dimension {V.k} exceeds {GRID_MAX_DIM}")
    if resolution < 11:
        raise ValidationError("resolution: must be >= 11")
    obj = _Objective(V, F)
    space = F.space
    k = V.k
    if k == 0:
        r = float(obj(np.zeros(0)))
        return CenterSolution(r, BoundedSet(space.zero(), space), 0.0, 1, "grid", r)
    if box_radius is None:
        box_radius = coefficient_bound(V, F)
    axis = np.linspace(-box_radius, box_radius, resolution)
    grid = np.stack(np.meshgrid(*[axis] * k, indexing="ij"), axis=-1).reshape(-1, k)
    vals = obj(grid)
    _, up = space.bounds()
    h = axis[1] - axis[0]
    slack = float(up * h * np.sqrt(k) / 2)
    best = float(vals.min())
    order = np.argsort(vals, kind="stable")
    near = order[vals[order] <= best + slack]
    pts = V.embed(grid[near])
    return CenterSolution(best, BoundedSet(pts, space), slack, grid.shape[0], "grid",
                          best - slack)


def sublevel_sample(V, F, sol, delta, resolution=101, box_radius=None):
    """Grid sample of ``Z_V(F, delta) = {v in V : r(v, F) <= rad + delta}``.

    The grid is centered at ``sol.center``. By default its half-width is the
    Euclidean image of ``2 * rad + delta``: any ``v`` in the sublevel set
    satisfies ``|v - v*| <= r(v, F) + r(v*, F)``. Pass ``box_radius`` (frame
    units) to share one grid across several ``delta``.
    """
    if delta < 0:
        raise ValidationError("delta: must be >= 0")
    space = F.space
    if V.k == 0:
        return SublevelCloud(delta, BoundedSet(space.zero(), space))
    if V.k > GRID_MAX_DIM:
        raise UnsupportedError(f"sublevel_sample: subspace dimension {V.k} exceeds {GRID_MAX_DIM}")
    obj = _Objective(V, F)
    c0 = V.coords(sol.center)
    if box_radius is None:
        lo, _ = space.bounds()
        box_radius = (2 * sol.radius + delta) / lo
    axis = np.linspace(-box_radius, box_radius, resolution)
    grid = c0 + np.stack(np.meshgrid(*[axis] * V.k, indexing="ij"), axis=-1).reshape(-1, V.k)
    vals = obj(grid)
    keep = vals <= sol.radius + delta + 1e-12 * max(1.0, sol.radius)
    if not keep.any():
        raise RCLabError("sublevel_sample: empty sample; the solution does not match (V, F)")
    return SublevelCloud(delta, BoundedSet(V.embed(grid[keep]), space))


def metric_projection(V, x, tol=1e-6, **kwargs):
    """Best approximations ``P_V(x)``: the restricted center problem for ``{x}``."""
    return restricted_radius(V, BoundedSet(np.asarray(x, dtype=float)[None, :], V.space),
                             tol, **kwargs)


def bisect_delta(passes, window, iterations=30):
    """Largest ``delta`` in ``[0, window]`` with ``passes(delta)``, by bisection.

    Returns ``window`` when it passes outright and ``0.0`` when no probe passes.
    """
    if passes(window):
        return float(window)
    lo, hi = 0.0, float(window)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid
    return lo


class SublevelProbe:
    """Largest distance from sampled points of ``Z_V(F, delta)`` to the center cloud.

    With ``sampler="rays"`` the sublevel set is sampled along rays from the
    best center: the boundary crossing on each ray (found by bisection) and
    evenly spaced interior points. ``sampler="grid"`` uses
    ``sublevel_sample`` on a grid shared by all ``delta``.
    """

    def __init__(self, V, F, sol, resolution=101, sampler="rays", window=None, seed=0):
        self.V, self.F, self.sol = V, F, sol
        self.sampler = sampler
        self.resolution = resolution
        self.space = F.space
        self._cache = {}
        if V.k == 0:
            return
        self.obj = _Objective(V, F)
        self.x = V.coords(sol.center)
        self.R = coefficient_bound(V, F)
        if sampler == "rays":
            count = {2: resolution, 3: 4 * resolution}.get(V.k, resolution)
            self.dirs = ray_directions(V.k, count=count, seed=seed)
        elif sampler == "grid":
            if window is None:
                window = sol.radius
            lo, _ = self.space.bounds()
            self.box = (2 * sol.radius + window) / lo
        else:
            raise ValidationError(f"sampler: unknown sampler {sampler!r}")

    def points(self, delta):
        if self.V.k == 0:
            return self.space.zero()[None, :]
        if self.sampler == "grid":
            return sublevel_sample(self.V, self.F, self.sol, delta, self.resolution,
                                   box_radius=self.box).points.points
        level = self.sol.radius + delta
        ext = _ray_extent(self.obj, self.x, self.dirs, level, s_hi=self.R)
        frac = np.array([0.25, 0.5, 0.75, 1.0])
        c = self.x + (ext[:, None, None] * frac[None, :, None]) * self.dirs[:, None, :]
        return self.V.embed(c.reshape(-1, self.V.k))

    def excursion(self, delta):
        """``sup`` over sampled ``Z_V(F, delta)`` of the distance to the center cloud."""
        if delta not in self._cache:
            pts = self.points(delta)
            self._cache[delta] = float(np.max(dist_to_cloud(pts, self.sol.minimizers)))
        return self._cache[delta]

    def holds(self, delta, eps):
        return self.excursion(delta) <= eps + 1e-12


def p1_modulus(V, F, eps_grid, resolution=101, *, sol=None, tol=1e-6, delta_max=None,
               sampler="rays", iterations=30):
    """Single-instance (P1) modulus: for each ``eps`` the largest ``delta`` found with
    ``Z_V(F, delta) ⊆ Z_V(F) + eps B``.

    The search window is ``[0, delta_max]`` with ``delta_max`` defaulting to
    the restricted radius (``1`` when the radius is zero).
    """
    eps_grid = sorted(float(e) for e in eps_grid)
    if any(e <= 0 for e in eps_grid):
        raise ValidationError("eps_grid: values must be > 0")
    if sol is None:
        sol = restricted_radius(V, F, tol)
    if delta_max is None:
        delta_max = sol.radius if sol.radius > 0 else 1.0
    probe = SublevelProbe(V, F, sol, resolution, sampler, window=delta_max)
    pairs = tuple((e, bisect_delta(lambda d: probe.holds(d, e), delta_max, iterations))
                  for e in eps_grid)
    return ModulusCurve(pairs, "P1", {"delta_max": delta_max, "radius": sol.radius})
