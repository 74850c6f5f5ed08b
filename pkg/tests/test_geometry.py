import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rclab import BoundedSet, CNorm, LqNorm, Space, Subspace, ball_inclusion, farthest_radius, hausdorff
from rclab.errors import DimensionError, UnsupportedError, ValidationError
from rclab.geometry import directed_hausdorff, dist_to_cloud, pairwise_dist

L2 = Space(2)


def S(pts, space=L2):
    return BoundedSet(pts, space)


def test_farthest_radius_examples():
    assert farthest_radius([0, 0], S([[1, 0], [-1, 0]])) == 1.0
    sp = Space(3, LqNorm(2.0))
    u = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
    assert farthest_radius(np.zeros(3), BoundedSet([u, -u], sp)) == pytest.approx(1.0, abs=1e-15)
    assert farthest_radius([0.3, 0.4], S([[0.3, 0.4]])) == 0.0


def test_farthest_radius_batch_matches_loop():
    rng = np.random.default_rng(0)
    F = S(rng.standard_normal((7, 2)))
    xs = rng.standard_normal((20, 2))
    assert np.array_equal(farthest_radius(xs, F), [farthest_radius(x, F) for x in xs])


def test_hausdorff_examples():
    A = S([[0, 0], [2, 0]])
    assert hausdorff(A, A) == 0.0
    assert hausdorff(S([[0, 0]]), S([[1, 0]])) == 1.0
    assert hausdorff(A, S([[0, 0]])) == 2.0
    assert directed_hausdorff(S([[0, 0]]), A) == 0.0


def test_dist_to_cloud():
    C = S([[0, 0], [1, 1]])
    assert dist_to_cloud([1, 1], C) == 0.0
    assert dist_to_cloud(np.array([[3, 1], [0, -2]]), C).tolist() == [2.0, 2.0]


sets3 = st.lists(st.tuples(*[st.floats(-5, 5, allow_nan=False)] * 2), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(sets3, sets3, sets3, st.sampled_from([1.0, 2.0, 3.0]))
def test_hausdorff_is_a_metric(a, b, c, q):
    sp = Space(2, LqNorm(q))
    A, B, C = (BoundedSet(np.array(x), sp) for x in (a, b, c))
    assert hausdorff(A, B) == hausdorff(B, A)
    assert hausdorff(A, C) <= hausdorff(A, B) + hausdorff(B, C) + 1e-12
    assert hausdorff(A, A.unique()) == 0.0


@settings(max_examples=40, deadline=None)
@given(sets3, st.tuples(st.floats(-5, 5), st.floats(-5, 5)), st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
def test_farthest_radius_is_1_lipschitz(a, x, y):
    F = S(np.array(a))
    x, y = np.array(x), np.array(y)
    assert abs(farthest_radius(x, F) - farthest_radius(y, F)) <= L2(x - y) + 1e-12


def test_pairwise_matches_norm():
    sp = Space(3, CNorm())
    rng = np.random.default_rng(2)
    x, y = rng.standard_normal((4, 3)), rng.standard_normal((5, 3))
    D = pairwise_dist(sp, x, y)
    assert D.shape == (4, 5)
    assert D[2, 3] == sp(x[2] - y[3])


def test_set_validation():
    with pytest.raises(ValidationError):
        S(np.zeros((0, 2)))
    with pytest.raises(DimensionError):
        S([[1, 2, 3]])
    with pytest.raises(ValidationError):
        S([[1, np.inf]])
    F = S([[1, 2]])
    with pytest.raises(ValueError):
        F.points[0, 0] = 5
    with pytest.raises(DimensionError):
        farthest_radius([1, 2, 3], F)
    with pytest.raises(DimensionError):
        hausdorff(F, BoundedSet([[1, 2, 3]], Space(3)))


def test_subspace_frame_and_rank():
    V = Subspace([[1, 1, 0], [0, 1, 1]], Space(3))
    assert V.k == 2
    assert np.allclose(V.frame @ V.frame.T, np.eye(2))
    assert np.allclose(V.residual(np.array([[2, 3, 1]])), 0)
    assert V.residual(np.array([[1, -1, 1]]))[0] == pytest.approx(np.sqrt(3))
    with pytest.raises(ValidationError, match="independent"):
        Subspace([[1, 2], [2, 4]], L2)
    Z = Subspace([], L2)
    assert Z.k == 0 and Z.embed(np.zeros(0)).tolist() == [0.0, 0.0]


def test_ball_inclusion_identical_and_empty():
    res = ball_inclusion([0, 0], 1, [0, 0], 0.8, [0, 0], 0.8, L2)
    assert res.holds and not res.empty
    res = ball_inclusion([0, 0], 1, [3, 0], 1, [10, 10], 0.1, L2)
    assert res.holds and res.empty


def test_ball_inclusion_lens():
    # the lens B[0,1] ∩ B[(1.5,0),1] has its farthest points from (0.75,0) at
    # (0.75, ±sqrt(1 - 0.75^2)), distance sqrt(0.4375) ≈ 0.6614
    r = np.sqrt(0.4375)
    assert ball_inclusion([0, 0], 1, [1.5, 0], 1, [0.75, 0], r + 1e-9, L2, 81).holds
    res = ball_inclusion([0, 0], 1, [1.5, 0], 1, [0.75, 0], 0.6, L2, 81)
    assert not res.holds
    assert res.worst_violation > 0.05
    assert L2(res.witness - [0.75, 0]) > 0.6


def test_ball_inclusion_limits():
    with pytest.raises(UnsupportedError):
        ball_inclusion(np.zeros(4), 1, np.zeros(4), 1, np.zeros(4), 1, Space(4))
    with pytest.raises(ValidationError):
        ball_inclusion([0, 0], -1, [0, 0], 1, [0, 0], 1, L2)
