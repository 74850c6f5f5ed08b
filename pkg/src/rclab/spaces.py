"""Finite-dimensional normed spaces.

Points are plain float64 numpy arrays; every norm here evaluates over the
last axis so that batches of points ``(..., dim)`` are handled in one call.
Three closed-form norm families are supported:

* ``LqNorm(q)``: the usual ``(sum |x_i|^q)^(1/q)`` with real ``q >= 1``.
* ``CNorm()``: ``|x_1| + sqrt(x_2^2 + x_3^2)`` on R^3.
* ``SumNorm(p, parts)``: the ``l_p`` combination of block norms, used to
  build finite direct sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError

__all__ = [
    "LqNorm",
    "CNorm",
    "SumNorm",
    "Space",
    "NormReport",
    "as_point",
    "norm",
    "validate_norm",
    "lp_combine",
]


def lp_combine(values, p, axis=-1):
    """``(sum v_i^p)^(1/p)`` of nonnegative values along ``axis``."""
    values = np.asarray(values, dtype=float)
    if p == 1:
        return values.sum(axis=axis)
    top = values.max(axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    scaled = np.power(values / safe, p).sum(axis=axis, keepdims=True)
    out = np.where(top > 0, top * np.power(scaled, 1.0 / p), 0.0)
    return np.squeeze(out, axis=axis)


def _lp_weights(values, total, p):
    # d/dv_i (sum v^p)^(1/p) = (v_i / total)^(p-1); zero when total == 0
    if p == 1:
        return np.where(total[..., None] > 0, 1.0, 0.0) * np.ones_like(values)
    safe = np.where(total > 0, total, 1.0)[..., None]
    w = np.power(values / safe, p - 1)
    return np.where(total[..., None] > 0, w, 0.0)


@dataclass(frozen=True)
class LqNorm:
    q: float = 2.0

    def __post_init__(self):
        q = float(self.q)
        if not np.isfinite(q) or q < 1:
            raise ValidationError(f"norm.q: need finite q >= 1, got {self.q!r}")
        object.__setattr__(self, "q", q)

    def check_dim(self, dim):
        pass

    def evaluate(self, y):
        y = np.asarray(y, dtype=float)
        return lp_combine(np.abs(y), self.q)

    def subgradient(self, y):
        y = np.asarray(y, dtype=float)
        if self.q == 1:
            return np.sign(y)
        n = self.evaluate(y)
        return np.sign(y) * _lp_weights(np.abs(y), n, self.q)

    def bounds(self, dim):
        """Constants ``(lo, up)`` with ``lo |x|_2 <= |x| <= up |x|_2``."""
        e = 1.0 / self.q - 0.5
        if e >= 0:
            return 1.0, float(dim) ** e
        return float(dim) ** e, 1.0

    def to_json(self):
        return {"kind": "lq", "q": self.q}


@dataclass(frozen=True)
class CNorm:
    def check_dim(self, dim):
        if dim != 3:
            raise ValidationError(f"norm.kind: cnorm needs dim 3, got dim {dim}")

    def evaluate(self, y):
        y = np.asarray(y, dtype=float)
        return np.abs(y[..., 0]) + np.hypot(y[..., 1], y[..., 2])

    def subgradient(self, y):
        y = np.asarray(y, dtype=float)
        r = np.hypot(y[..., 1], y[..., 2])
        safe = np.where(r > 0, r, 1.0)
        g = np.empty_like(y)
        g[..., 0] = np.sign(y[..., 0])
        g[..., 1] = np.where(r > 0, y[..., 1] / safe, 0.0)
        g[..., 2] = np.where(r > 0, y[..., 2] / safe, 0.0)
        return g

    def bounds(self, dim):
        return 1.0, float(np.sqrt(2.0))

    def to_json(self):
        return {"kind": "cnorm"}


@dataclass(frozen=True)
class SumNorm:
    """``l_p`` sum of block norms; ``parts`` is a tuple of ``(dim, norm)``."""

    p: float
    parts: tuple = field(default=())

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or p < 1:
            raise ValidationError(f"norm.p: need finite p >= 1, got {self.p!r}")
        if not self.parts:
            raise ValidationError("norm.parts: need at least one block")
        parts = tuple((int(d), n) for d, n in self.parts)
        for i, (d, n) in enumerate(parts):
            if d < 1:
                raise ValidationError(f"norm.parts[{i}].dim: must be >= 1")
            n.check_dim(d)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "parts", parts)

    @property
    def offsets(self):
        return np.cumsum([0] + [d for d, _ in self.parts])

    def check_dim(self, dim):
        total = sum(d for d, _ in self.parts)
        if dim != total:
            raise ValidationError(f"norm.parts: block dims sum to {total}, space dim is {dim}")

    def block_norms(self, y):
        y = np.asarray(y, dtype=float)
        off = self.offsets
        return np.stack(
            [n.evaluate(y[..., off[i]:off[i + 1]]) for i, (_, n) in enumerate(self.parts)],
            axis=-1,
        )

    def evaluate(self, y):
        return lp_combine(self.block_norms(y), self.p)

    def subgradient(self, y):
        y = np.asarray(y, dtype=float)
        b = self.block_norms(y)
        w = _lp_weights(b, lp_combine(b, self.p), self.p)
        off = self.offsets
        g = np.empty_like(y)
        for i, (_, n) in enumerate(self.parts):
            g[..., off[i]:off[i + 1]] = w[..., i:i + 1] * n.subgradient(y[..., off[i]:off[i + 1]])
        return g

    def bounds(self, dim):
        m = len(self.parts)
        e = 1.0 / self.p - 0.5
        los, ups = zip(*(n.bounds(d) for d, n in self.parts))
        return min(los) * m ** min(0.0, e), max(ups) * m ** max(0.0, e)

    def to_json(self):
        return {
            "kind": "sum",
            "p": self.p,
            "parts": [{"dim": d, "norm": n.to_json()} for d, n in self.parts],
        }


@dataclass(frozen=True)
class Space:
    dim: int
    norm: object = field(default_factory=LqNorm)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValidationError(f"space.dim: must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        self.norm.check_dim(self.dim)

    def __call__(self, x):
        return self.norm.evaluate(x)

    def dist(self, x, y):
        return self.norm.evaluate(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def bounds(self):
        return self.norm.bounds(self.dim)

    def zero(self):
        return np.zeros(self.dim)

    def to_json(self):
        return {"dim": self.dim, "norm": self.norm.to_json()}


def as_point(coords, space=None, name="x"):
    """Validate and convert ``coords`` into a 1-D float array."""
    x = np.array(coords, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValidationError(f"{name}: expected a nonempty flat list of reals")
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"{name}: coordinates must be finite")
    if space is not None and x.size != space.dim:
        raise DimensionError(f"{name}: dimension {x.size} does not match space dim {space.dim}")
    return x


def norm(space, x):
    """Norm of a single point ``x`` of ``space``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (space.dim,):
        raise DimensionError(f"x: dimension {x.shape[-1:]} does not match space dim {space.dim}")
    return float(space.norm.evaluate(x)) if x.ndim == 1 else space.norm.evaluate(x)


@dataclass(frozen=True)
class NormReport:
    samples: int
    triangle: float
    homogeneity: float
    separation: float

    @property
    def max_violation(self):
        return max(self.triangle, self.homogeneity, self.separation)

    @property
    def ok(self):
        return self.max_violation <= 1e-12


def validate_norm(space, sample_count=1000, seed=0):
    """Sample the norm axioms on random points and report the worst violations."""
    if sample_count < 1:
        raise ValidationError("sample_count: must be >= 1")
    rng = np.random.default_rng(seed)
    n = space.norm.evaluate
    x = rng.standard_normal((sample_count, space.dim))
    y = rng.standard_normal((sample_count, space.dim))
    a = rng.uniform(-3.0, 3.0, size=sample_count)
    nx, ny = n(x), n(y)
    triangle = np.maximum(n(x + y) - nx - ny, 0.0).max()
    homogeneity = np.abs(n(a[:, None] * x) - np.abs(a) * nx).max()
    zero_ok = n(np.zeros(space.dim)) == 0.0
    separation = float(np.any(nx <= 0.0) or not zero_ok)
    return NormReport(sample_count, float(triangle), float(homogeneity), separation)
