"""Finite point sets, linear subspaces and set-level distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, UnsupportedError, ValidationError
from .spaces import as_point

__all__ = [
    "BoundedSet",
    "Subspace",
    "InclusionResult",
    "pairwise_dist",
    "farthest_radius",
    "directed_hausdorff",
    "hausdorff",
    "dist_to_cloud",
    "ball_inclusion",
]


class BoundedSet:
    """A nonempty finite point set in ``space``; rows of ``points`` are the points."""

    def __init__(self, points, space):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValidationError("set.points: need a nonempty list of points")
        if pts.shape[1] != space.dim:
            raise DimensionError(
                f"set.points: points have dim {pts.shape[1]}, space dim is {space.dim}"
            )
        if not np.all(np.isfinite(pts)):
            raise ValidationError("set.points: coordinates must be finite")
        pts.setflags(write=False)
        self.points = pts
        self.space = space

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"BoundedSet({len(self)} points, dim={self.space.dim})"

    def unique(self):
        return BoundedSet(np.unique(self.points, axis=0), self.space)

    def translate(self, v):
        return BoundedSet(self.points + np.asarray(v, dtype=float), self.space)

    def scale(self, a):
        return BoundedSet(self.points * float(a), self.space)

    def to_json(self):
        return {"points": self.points.tolist()}


class Subspace:
    """Span of the rows of ``basis``; an empty basis means ``{0}``.

    ``frame`` holds an orthonormal (Euclidean) basis of the same span. All
    coefficient grids and solver iterations work in ``frame`` coordinates, so
    Euclidean lengths of coefficient vectors equal Euclidean lengths of points.
    """

    RANK_TOL = 1e-10

    def __init__(self, basis, space):
        b = np.array(basis, dtype=float)
        if b.size == 0:
            b = np.zeros((0, space.dim))
        if b.ndim == 1:
            b = b[None, :]
        if b.ndim != 2 or b.shape[1] != space.dim:
            raise DimensionError(f"subspace.basis: vectors must have dim {space.dim}")
        if not np.all(np.isfinite(b)):
            raise ValidationError("subspace.basis: coordinates must be finite")
        if b.shape[0]:
            s = np.linalg.svd(b, compute_uv=False)
            if s.size < b.shape[0] or s[-1] < self.RANK_TOL * s[0]:
                raise ValidationError("subspace.basis: vectors are not linearly independent")
            q, _ = np.linalg.qr(b.T)
            frame = q.T.copy()
        else:
            frame = np.zeros((0, space.dim))
        b.setflags(write=False)
        frame.setflags(write=False)
        self.basis = b
        self.frame = frame
        self.space = space

    @property
    def k(self):
        return self.basis.shape[0]

    def __repr__(self):
        return f"Subspace(k={self.k}, dim={self.space.dim})"

    def embed(self, coeffs):
        """Frame coefficients ``(..., k)`` to ambient points ``(..., dim)``."""
        coeffs = np.asarray(coeffs, dtype=float)
        return coeffs @ self.frame

    def coords(self, points):
        return np.asarray(points, dtype=float) @ self.frame.T

    def residual(self, points):
        """Euclidean distance from each point to the span."""
        points = np.asarray(points, dtype=float)
        return np.linalg.norm(points - self.embed(self.coords(points)), axis=-1)

    def to_json(self):
        return {"basis": self.basis.tolist()}


def _check(space_a, space_b, what):
    if space_a.dim != space_b.dim:
        raise DimensionError(f"{what}: dimension {space_a.dim} does not match {space_b.dim}")


def pairwise_dist(space, xs, ys):
    """Matrix of norm distances between rows of ``xs`` and rows of ``ys``."""
    xs = np.atleast_2d(xs)
    ys = np.atleast_2d(ys)
    return space.norm.evaluate(xs[:, None, :] - ys[None, :, :])


def farthest_radius(x, F):
    """``r(x, F)``: the largest distance from ``x`` to a point of ``F``.

    ``x`` may be a single point or a batch ``(n, dim)``; a batch returns one
    radius per row.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != F.space.dim:
        raise DimensionError(f"x: dimension {x.shape[-1]} does not match set dim {F.space.dim}")
    d = F.space.norm.evaluate(x[..., None, :] - F.points)
    r = d.max(axis=-1)
    return float(r) if x.ndim == 1 else r


def dist_to_cloud(x, S):
    """Distance from ``x`` (or each row of a batch) to the nearest point of ``S``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != S.space.dim:
        raise DimensionError(f"x: dimension {x.shape[-1]} does not match set dim {S.space.dim}")
    if x.ndim == 1:
        return float(S.space.norm.evaluate(x - S.points).min())
    out = np.empty(x.shape[0])
    step = max(1, 2_000_000 // max(1, len(S) * S.space.dim))
    for i in range(0, x.shape[0], step):
        out[i:i + step] = pairwise_dist(S.space, x[i:i + step], S.points).min(axis=1)
    return out


def directed_hausdorff(A, B):
    """``sup_{a in A} d(a, B)``."""
    _check(A.space, B.space, "B")
    return float(dist_to_cloud(A.points, B).max())


def hausdorff(A, B):
    """Hausdorff distance between two finite sets of the same space."""
    return max(directed_hausdorff(A, B), directed_hausdorff(B, A))


@dataclass(frozen=True)
class InclusionResult:
    holds: bool
    worst_violation: float
    witness: np.ndarray | None
    empty: bool
    samples: int


def ball_inclusion(c1, r1, c2, r2, c3, r3, space, points_per_axis=41, atol=1e-12):
    """Sampled test of ``B[c1,r1] ∩ B[c2,r2] ⊆ B[c3,r3]``.

    A uniform grid of ``points_per_axis`` points per coordinate covers the
    bounding box of ``B[c1,r1]`` (every supported norm dominates the max-norm,
    so the box ``c1 ± r1`` contains the ball). Grid points lying in both
    balls are tested against the third. A ``holds`` verdict is evidence at
    the grid resolution, a failure comes with a witness.
    """
    if min(r1, r2, r3) < 0:
        raise ValidationError("radii: must be nonnegative")
    if space.dim > 3:
        raise UnsupportedError("ball_inclusion: grid sampling supports dim <= 3")
    c1, c2, c3 = (as_point(c, space, name) for c, name in ((c1, "c1"), (c2, "c2"), (c3, "c3")))
    pts = _intersection_grid(c1, r1, c2, r2, space, points_per_axis, atol)
    if pts.shape[0] == 0:
        return InclusionResult(True, 0.0, None, True, 0)
    excess = space.norm.evaluate(pts - c3) - r3
    i = int(np.argmax(excess))
    worst = float(max(excess[i], 0.0))
    holds = bool(excess[i] <= atol)
    return InclusionResult(holds, worst, None if holds else pts[i].copy(), False, pts.shape[0])


def _intersection_grid(c1, r1, c2, r2, space, points_per_axis, atol=1e-12):
    axes = [np.linspace(c - r1, c + r1, points_per_axis) for c in c1]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, space.dim)
    keep = space.norm.evaluate(grid - c1) <= r1 + atol
    keep &= space.norm.evaluate(grid - c2) <= r2 + atol
    return grid[keep]
