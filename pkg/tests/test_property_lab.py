import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rclab import (BoundedSet, LqNorm, SetFamily, Space, Subspace, local_vs_uniform_compare,
                   lp2_modulus, p1_modulus, p2_modulus, qur_probe, semicontinuity_gap, ured_probe)
from rclab.counterexamples import build_p2_failure, lhsc_instance
from rclab.errors import ValidationError
from rclab.property_lab import normalize, scaling_check

L2 = Space(2)
XAXIS = Subspace([[1, 0]], L2)
EPS = [0.1, 0.25, 0.5]


def l2_family():
    return SetFamily([BoundedSet([[0, 1]], L2), normalize(XAXIS, BoundedSet([[0, 2]], L2)),
                      normalize(XAXIS, BoundedSet([[1, 1], [-1, 1], [0, -0.5]], L2))],
                     "rad_eq_1")


def test_single_member_p2_equals_p1():
    F = BoundedSet([[0.3, 1], [1, -1]], L2)
    p2 = p2_modulus(XAXIS, SetFamily([F]), EPS)
    p1 = p1_modulus(XAXIS, F, EPS)
    assert p2.pairs == p1.pairs


def test_l2_family_positive():
    fam = l2_family()
    curve = p2_modulus(XAXIS, fam, EPS)
    assert all(d > 0 for _, d in curve.pairs)
    # the member {(0,1)} alone gives sqrt(1 + eps^2) - 1, an upper bound for the family
    for e, d in curve.pairs:
        assert d <= np.sqrt(1 + e * e) - 1 + 1e-7


def test_normalization_checked():
    fam = SetFamily([BoundedSet([[0, 2]], L2)], "rad_eq_1")
    with pytest.raises(ValidationError, match="radius"):
        p2_modulus(XAXIS, fam, [0.5])
    fam = SetFamily([BoundedSet([[0, 0.5]], L2)], "rad_le_1")
    assert p2_modulus(XAXIS, fam, [0.5]).delta(0.5) > 0
    with pytest.raises(ValidationError):
        SetFamily([])
    with pytest.raises(ValidationError):
        SetFamily([BoundedSet([[0, 1]], L2)], "weird")


def p2_prefix(N):
    insts = [build_p2_failure(n, N) for n in range(1, N + 1)]
    V = insts[0].instance.subspace
    return V, SetFamily([c.G for c in insts], "rad_eq_1")


def test_counterexample_family_decays():
    deltas = []
    for N in (1, 2, 4):
        V, fam = p2_prefix(N)
        d = p2_modulus(V, fam, [0.5]).delta(0.5)
        assert d <= 2 ** (1 / (N + 1)) - 1 + 1e-9
        deltas.append(d)
    assert deltas[0] > deltas[1] > deltas[2]


def test_lp2_anchor_only_reduces_to_p1():
    F = BoundedSet([[0.2, 1], [1, 0.4]], L2)
    assert lp2_modulus(XAXIS, SetFamily([F]), F, EPS).pairs == p1_modulus(XAXIS, F, EPS).pairs


def test_lp2_cnorm_failure():
    ce = lhsc_instance()
    anchor = BoundedSet(ce.anchor, ce.space)
    fam = SetFamily([anchor] + [BoundedSet(ce.perturbed(k), ce.space) for k in (1, 10, 100, 1000)])
    curve = lp2_modulus(ce.Y, fam, anchor, [1.0], window=1.0)
    # any delta admits (1,0,1/k) with 1/k < delta; its sublevel set contains
    # the anchor-side end t=0 of the segment at distance about 2 > eps
    assert curve.delta(1.0) <= 1e-3
    assert p1_modulus(ce.Y, anchor, [1.0], delta_max=1.0).delta(1.0) > 0.1


def test_ordering_and_local_vs_uniform():
    fam = l2_family()
    for e in EPS:
        rep = local_vs_uniform_compare(XAXIS, fam, e)
        assert rep["p2_delta"] == pytest.approx(rep["min_anchor_delta"], abs=1e-12)
        for lp2, p1 in zip(rep["lp2_deltas"], rep["p1_deltas"]):
            assert rep["p2_delta"] <= lp2 <= p1
    V, pfam = p2_prefix(3)
    rep = local_vs_uniform_compare(V, pfam, 0.5)
    assert rep["min_anchor_delta"] == pytest.approx(rep["p2_delta"], abs=1e-12)
    assert rep["p2_delta"] <= 2 ** (1 / 4) - 1 + 1e-9


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.2, 5.0))
def test_scaled_family_same_verdicts(seed, alpha):
    rng = np.random.default_rng(seed)
    sp = Space(2, LqNorm(float(rng.choice([1.5, 2.0, 3.0]))))
    V = Subspace([[1, 0]], sp)
    members = [BoundedSet(rng.uniform(-2, 2, (3, 2)), sp) for _ in range(2)]
    fam = SetFamily(members)
    scaled = SetFamily([BoundedSet(alpha * G.points, sp) for G in members])
    a = p2_modulus(V, fam, [0.3], iterations=20)
    b = p2_modulus(V, scaled, [0.3 * alpha], iterations=20)
    assert b.delta(0.3 * alpha) == pytest.approx(alpha * a.delta(0.3), rel=1e-5, abs=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_scaling_check_clean(seed):
    rng = np.random.default_rng(seed)
    sp = Space(3, LqNorm([1.0, 1.5, 2.0, 3.0][seed]))
    V = Subspace(rng.standard_normal((2, 3)), sp)
    F = BoundedSet(rng.uniform(-2, 2, (4, 3)), sp)
    assert scaling_check(V, F, samples=500, seed=seed).violations == 0
    w = V.embed([0.3, -0.7])
    assert scaling_check(V, F, w=w, alpha=2.5, samples=500, seed=seed).violations == 0
    with pytest.raises(ValidationError):
        scaling_check(V, F, w=[1.0, 2.0, 3.0] if V.residual(np.array([[1.0, 2, 3]]))[0] > 1e-3
                      else [0, 0, 9.0])


def test_qur_l2():
    res = qur_probe(L2, XAXIS, 0.5)
    assert res.delta_estimate >= 0.01 and res.witness is None
    fine = qur_probe(L2, XAXIS, 0.5, v_samples=41, grid_spacing=0.025, points_per_axis=61)
    assert fine.delta_estimate >= 0.01


def test_qur_monotone_in_eps():
    sp = Space(2, LqNorm(1.5))
    V = Subspace([[1, 1]], sp)
    est = [qur_probe(sp, V, e).delta_estimate for e in (0.05, 0.1, 0.3, 0.6, 1.2)]
    assert est == sorted(est)


def test_qur_trivial_regime():
    # with eps >= 2 every sampled v (|v| <= 2) is itself an admissible w, and
    # B[0,1] ∩ B[v,1-delta] ⊆ B[v,1-delta] always holds
    sp = Space(3, LqNorm(1.0))
    V = Subspace([[1, 1, 0]], sp)
    res = qur_probe(sp, V, 2.0, points_per_axis=21)
    assert res.delta_estimate == 0.5 and res.witness is None


def test_ured_examples():
    for z in ([1, 0], [1, 1], [0.3, -2.0]):
        m = ured_probe(L2, z).modulus_estimate
        assert m == pytest.approx(1 - np.sqrt(3) / 2, abs=1e-3)
    res = ured_probe(Space(2, LqNorm(1.0)), [1, -1])
    assert res.modulus_estimate == 0.0
    x, y = res.worst_pairs[0]
    assert Space(2, LqNorm(1.0))(x - y) >= 1.0
    assert ured_probe(Space(3, LqNorm(1.5)), [1, 0, 1]).modulus_estimate > 0
    with pytest.raises(ValidationError):
        ured_probe(L2, [0, 0])


def test_ured_l2_curve_matches_modulus_of_convexity():
    res = ured_probe(L2, [1, 2], eps_grid=[0.5, 1.0, 1.5])
    for e, m in res.curve.pairs:
        assert m == pytest.approx(1 - np.sqrt(1 - e * e / 4), abs=2e-3)


def test_semicontinuity_gap_examples():
    F = BoundedSet([[0.5, 1.0]], L2)
    rows = semicontinuity_gap(XAXIS, [F, F, F])
    assert all(r["lhsc_gap"] == 0 and r["uhsc_gap"] == 0 for r in rows)
    seq = [BoundedSet([[0.5 + 1 / k, 1.0]], L2) for k in (1, 10, 100)] + [F]
    for k, r in zip((1, 10, 100), semicontinuity_gap(XAXIS, seq)):
        assert r["h"] == pytest.approx(1 / k)
        assert r["lhsc_gap"] <= r["h"] + 1e-6 and r["uhsc_gap"] <= r["h"] + 1e-6
    ce = lhsc_instance()
    seq = [BoundedSet(ce.perturbed(k), ce.space) for k in (1, 10, 100)] + [BoundedSet(ce.anchor, ce.space)]
    rows = semicontinuity_gap(ce.Y, seq)
    for r in rows[:-1]:
        assert r["lhsc_gap"] == pytest.approx(2.0, abs=0.05)
        assert r["uhsc_gap"] <= 1e-6
