import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rclab import (BoundedSet, CNorm, LqNorm, Space, Subspace, farthest_radius, grid_oracle,
                   hausdorff, metric_projection, p1_modulus, restricted_radius, sublevel_sample)
from rclab.errors import NonConvergenceError, UnsupportedError, ValidationError
from rclab.solver import ModulusCurve, SublevelProbe, bisect_delta

L2 = Space(2)
XAXIS = Subspace([[1, 0]], L2)
CN = Space(3, CNorm())
DIAG = Subspace([[1, 1, 0]], CN)


def segment(n=201):
    t = np.linspace(0, 1, n)
    return BoundedSet(np.outer(t, [1, 1, 0]), CN)


def test_orthogonal_projection_example():
    sol = restricted_radius(XAXIS, BoundedSet([[0, 1]], L2))
    assert sol.radius == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(sol.center, 0, atol=1e-6)
    assert sol.method == "hybrid" and sol.gap <= 1e-6


def test_block_example_lq15():
    sp = Space(3, LqNorm(1.5))
    u = np.array([1.0, 1.0, 0.0]) / 2 ** (1 / 1.5)
    V = Subspace([[1, 0, 0], [0, 1, 0]], sp)
    sol = restricted_radius(V, BoundedSet([u, -u], sp))
    assert sol.radius == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(sol.minimizers.points, 0, atol=1e-6)
    assert sol.diameter <= 1e-5


def test_cnorm_segment_center():
    sol = restricted_radius(DIAG, BoundedSet([[1, 0, 0]], CN))
    assert sol.radius == pytest.approx(1.0, abs=1e-9)
    assert hausdorff(sol.minimizers, segment()) <= 0.02
    assert np.all(farthest_radius(sol.minimizers.points, BoundedSet([[1, 0, 0]], CN))
                  <= sol.radius + sol.cluster_tol)


def one_d_oracle(k):
    # min over t of |1 - t| + sqrt(t^2 + 1/k^2) on a fine 1-D grid
    t = np.linspace(-1, 3, 400001)
    f = np.abs(1 - t) + np.sqrt(t ** 2 + 1.0 / k ** 2)
    return f.min(), t[np.argmin(f)]


@pytest.mark.parametrize("k", [1, 10, 100])
def test_cnorm_perturbed_projection(k):
    fmin, tmin = one_d_oracle(k)
    sol = metric_projection(DIAG, [1, 0, 1 / k])
    assert sol.radius == pytest.approx(np.sqrt(1 + 1 / k ** 2), abs=1e-9)
    assert sol.radius <= fmin + 1e-12
    assert tmin == pytest.approx(1.0, abs=1e-4)
    assert np.allclose(sol.minimizers.points, [1, 1, 0], atol=1e-6)


def test_metric_projection_l2():
    sol = metric_projection(XAXIS, [3, 4])
    assert sol.radius == pytest.approx(4.0, abs=1e-9)
    assert np.allclose(sol.center, [3, 0], atol=1e-6)


def test_trivial_subspaces():
    F = BoundedSet([[1, 2], [3, -1]], L2)
    sol = restricted_radius(Subspace([], L2), F)
    assert sol.radius == farthest_radius([0, 0], F)
    assert sol.minimizers.points.tolist() == [[0.0, 0.0]]
    full = Subspace(np.eye(2), L2)
    sol = restricted_radius(full, BoundedSet([[0.5, -2.0]], L2))
    assert sol.radius == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(sol.center, [0.5, -2.0], atol=1e-6)
    g = grid_oracle(Subspace([], L2), F)
    assert g.radius == farthest_radius([0, 0], F)


SPACES = [Space(2), Space(2, LqNorm(1.0)), Space(3, LqNorm(1.5)), Space(3, LqNorm(3.0)), CN]


@pytest.mark.parametrize("seed", range(12))
def test_solver_agrees_with_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    space = SPACES[seed % len(SPACES)]
    d = space.dim
    k = 1 + seed % min(d, 2)
    V = Subspace(rng.standard_normal((k, d)), space)
    F = BoundedSet(rng.uniform(-2, 2, (int(rng.integers(1, 6)), d)), space)
    sol = restricted_radius(V, F)
    g = grid_oracle(V, F, resolution=401 if k == 1 else 201)
    assert g.lower_bound - 1e-9 <= sol.radius <= g.radius + 1e-9
    assert sol.radius - sol.lower_bound <= 1e-6
    # every cloud member is near optimal and lies in V
    assert np.all(farthest_radius(sol.minimizers.points, F) <= sol.radius + sol.cluster_tol)
    assert np.all(V.residual(sol.minimizers.points) <= 1e-8)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.1, 10), st.sampled_from([1.0, 1.5, 2.0]))
def test_radius_equivariance(seed, alpha, q):
    rng = np.random.default_rng(seed)
    space = Space(3, LqNorm(q))
    V = Subspace(rng.standard_normal((2, 3)), space)
    F = BoundedSet(rng.uniform(-2, 2, (4, 3)), space)
    w = V.embed(rng.standard_normal(2))
    r = restricted_radius(V, F).radius
    # rad_V(alpha (F - w)) = alpha rad_V(F) for w in V
    r2 = restricted_radius(V, BoundedSet(alpha * (F.points - w), space)).radius
    assert r2 == pytest.approx(alpha * r, rel=1e-6, abs=1e-7)


def test_deterministic_given_seed():
    rng = np.random.default_rng(5)
    V = Subspace(rng.standard_normal((2, 3)), CN)
    F = BoundedSet(rng.standard_normal((5, 3)), CN)
    a, b = restricted_radius(V, F, seed=3), restricted_radius(V, F, seed=3)
    assert a.radius == b.radius
    assert np.array_equal(a.minimizers.points, b.minimizers.points)


def test_nonconvergence_reports_best():
    rng = np.random.default_rng(0)
    V = Subspace(rng.standard_normal((3, 3)), CN)
    F = BoundedSet(rng.standard_normal((6, 3)), CN)
    with pytest.raises(NonConvergenceError) as err:
        restricted_radius(V, F, tol=1e-30, subgradient_iters=2, max_iters=3)
    assert err.value.best is not None and err.value.gap > 1e-30


def test_input_errors():
    F = BoundedSet([[0, 1]], L2)
    with pytest.raises(ValidationError):
        restricted_radius(XAXIS, F, tol=0)
    big = Space(17)
    with pytest.raises(UnsupportedError):
        restricted_radius(Subspace(np.eye(17), big), BoundedSet(np.zeros(17), big))
    sp4 = Space(4)
    with pytest.raises(UnsupportedError):
        grid_oracle(Subspace(np.eye(4), sp4), BoundedSet(np.zeros(4), sp4))
    with pytest.raises(ValidationError):
        grid_oracle(XAXIS, F, resolution=5)
    with pytest.raises(ValidationError):
        sublevel_sample(XAXIS, F, restricted_radius(XAXIS, F), -0.1)


def test_sublevel_sample_l2():
    F = BoundedSet([[0, 1]], L2)
    sol = restricted_radius(XAXIS, F)
    cloud = sublevel_sample(XAXIS, F, sol, 0.5, resolution=2001).points
    t = cloud.points[:, 0]
    h = 2 * (2 * sol.radius + 0.5) / 2000
    assert abs(t.max() - np.sqrt(1.25)) <= h and abs(t.min() + np.sqrt(1.25)) <= h
    assert np.all(farthest_radius(cloud.points, F) <= sol.radius + 0.5 + 1e-9)
    zero = sublevel_sample(XAXIS, F, sol, 0.0, resolution=2001).points
    assert hausdorff(zero, sol.minimizers) <= h
    Z = Subspace([], L2)
    assert sublevel_sample(Z, F, restricted_radius(Z, F), 0.3).points.points.tolist() == [[0, 0]]


def test_sublevel_sample_cnorm_delta_zero_covers_segment():
    F = BoundedSet([[1, 0, 0]], CN)
    sol = restricted_radius(DIAG, F)
    cloud = sublevel_sample(DIAG, F, sol, 0.0, resolution=401).points
    assert hausdorff(cloud, segment()) <= 0.02


def test_ray_probe_matches_grid_sampler():
    F = BoundedSet([[0, 1], [1, 2]], L2)
    sol = restricted_radius(XAXIS, F)
    rays = SublevelProbe(XAXIS, F, sol)
    grid = SublevelProbe(XAXIS, F, sol, resolution=4001, sampler="grid")
    h = 2 * grid.box / 4000
    for d in (0.01, 0.1, 0.5):
        # grid points sit inside the sublevel set, the ray end points on its boundary
        assert grid.excursion(d) - 1e-12 <= rays.excursion(d) <= grid.excursion(d) + h


def test_p1_modulus_l2_closed_form():
    # Z(F, delta) = {|t| <= sqrt((1+delta)^2 - 1)}, so delta(eps) = sqrt(1 + eps^2) - 1
    curve = p1_modulus(XAXIS, BoundedSet([[0, 1]], L2), [0.1, 0.25, 0.5])
    for e, d in curve.pairs:
        assert d == pytest.approx(np.sqrt(1 + e * e) - 1, abs=1e-7)
    assert curve.kind == "P1"
    assert [d for _, d in curve.pairs] == sorted(d for _, d in curve.pairs)


def test_p1_modulus_flat_center_is_window():
    # the c-norm segment problem: Z(F, delta) grows by about delta around the
    # segment, so small eps gives small delta but never 0
    curve = p1_modulus(DIAG, BoundedSet([[1, 0, 0]], CN), [0.05, 0.5])
    assert 0 < curve.delta(0.05) < curve.delta(0.5)


def test_bisect_delta_and_curve_validation():
    assert bisect_delta(lambda d: d <= 0.3, 1.0) == pytest.approx(0.3, abs=1e-8)
    assert bisect_delta(lambda d: True, 2.0) == 2.0
    assert bisect_delta(lambda d: False, 2.0) == 0.0
    with pytest.raises(ValidationError):
        ModulusCurve(((0.5, 0.1), (0.2, 0.1)), "P1")
    with pytest.raises(ValidationError):
        ModulusCurve(((0.5, -0.1),), "P1")
