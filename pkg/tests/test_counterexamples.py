import numpy as np
import pytest

from rclab import restricted_radius
from rclab.counterexamples import (block_exponent, build_p2_failure, measure_p2_failure,
                                   p2_violation, run_lhsc_failure)
from rclab.errors import ValidationError


def test_block_one_is_euclidean():
    ce = build_p2_failure(1)
    assert block_exponent(1) == 2.0
    u = ce.instance.components[0].set.points[0]
    assert np.allclose(u, np.array([1, 1, 0]) / np.sqrt(2), atol=1e-15)


def test_block_three_norm():
    assert build_p2_failure(3).u_norm == pytest.approx(2 ** 0.75, rel=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
def test_witness_has_unit_norm_in_its_block(n):
    ce = build_p2_failure(n, n + 2)
    blocks = ce.instance.split(ce.w)
    norms = [c.space(b) for c, b in zip(ce.instance.components, blocks)]
    assert norms[n - 1] == pytest.approx(1.0, abs=1e-15)
    assert all(v == 0 for i, v in enumerate(norms) if i != n - 1)
    for i, c in enumerate(ce.instance.components):
        if i != n - 1:
            assert np.all(c.set.points == 0)


def test_block_center_is_singleton_zero():
    for n in (1, 7, 40):
        c = build_p2_failure(n).instance.components[n - 1]
        sol = restricted_radius(c.subspace, c.set)
        assert sol.diameter <= 1e-5
        assert np.allclose(sol.center, 0, atol=1e-6)


def test_measure_table_closed_forms():
    rows = measure_p2_failure(40)
    for r in rows:
        expected = 2 ** (1 / (r["n"] + 1))
        assert abs(r["rad"] - 1) <= 1e-6
        assert abs(r["r_wn"] - expected) <= 1e-9
        assert abs(r["dist_to_center"] - 1) <= 1e-6
    assert rows[0]["gap"] == pytest.approx(np.sqrt(2) - 1, abs=1e-9)
    assert rows[6]["gap"] == pytest.approx(2 ** (1 / 8) - 1, abs=1e-9)
    gaps = [r["gap"] for r in rows]
    assert gaps == sorted(gaps, reverse=True)


def test_outer_exponent_irrelevant():
    # all data lives in one block, so p does not enter
    for p in (1.0, 3.0):
        r = measure_p2_failure(3, p=p)[-1]
        assert r["r_wn"] == pytest.approx(2 ** 0.25, abs=1e-12)


def test_violation_found_by_n14():
    row = p2_violation(0.05, eps=0.5)
    assert row is not None and row["n"] == 14
    assert row["gap"] == pytest.approx(2 ** (1 / 15) - 1, abs=1e-9)
    assert p2_violation(0.5, n_max=3)["n"] == 1


def test_lhsc_table():
    rows = run_lhsc_failure((1, 10, 100))
    for r in rows:
        assert r["d_anchor"] == pytest.approx(1.0, abs=1e-9)
        assert r["t_min"] <= 0.02 and r["t_max"] >= 0.98
        assert np.allclose(r["proj_k"], [1, 1, 0], atol=0.02)
        assert r["h"] == pytest.approx(1 / r["k"], abs=1e-15)
        assert r["d_k"] == pytest.approx(np.sqrt(1 + 1 / r["k"] ** 2), abs=1e-9)
        assert abs(r["d_k_grid"] - r["d_k"]) <= 0.05
        assert r["lhsc_gap"] == pytest.approx(2.0, abs=0.05)
        assert r["uhsc_gap"] <= 1e-6


def test_input_errors():
    with pytest.raises(ValidationError):
        build_p2_failure(3, 2)
    with pytest.raises(ValidationError):
        measure_p2_failure(0)
    with pytest.raises(ValidationError):
        run_lhsc_failure([0])
