from __future__ import annotations

import numpy as np
import pytest

from framelip import (
    ReluLayer,
    active_set,
    doubled_frame_kappa,
    frame_bounds,
    make_doubled,
    make_mercedes_benz,
    make_random,
    make_standard_basis,
    relu_apply,
    relu_injectivity,
    relu_lipschitz_bounds,
    relu_pointwise_lower,
    sub_frame_lower_bound,
)
from framelip.errors import DimensionMismatch, NotInjective
from framelip.relu import active_masks


class TestApply:
    def test_basis(self):
        np.testing.assert_array_equal(relu_apply(ReluLayer(make_standard_basis(2)), [3.0, -4.0]), [3.0, 0.0])

    def test_below_bias(self):
        layer = ReluLayer(make_random(3, 5, seed=0), bias=np.full(5, 100.0))
        np.testing.assert_array_equal(relu_apply(layer, [1.0, -2.0, 0.5]), np.zeros(5))

    def test_doubled_sign_split(self):
        layer = ReluLayer(make_doubled(make_standard_basis(2)))
        np.testing.assert_array_equal(relu_apply(layer, [1.0, -2.0]), [1.0, 0.0, 0.0, 2.0])

    def test_bad_bias(self):
        with pytest.raises(DimensionMismatch):
            ReluLayer(make_standard_basis(2), bias=[0.0])


class TestActiveSet:
    layer = ReluLayer(make_standard_basis(2))

    def test_both(self):
        assert active_set(self.layer, [1.0, 1.0]) == 0b11

    def test_none(self):
        assert active_set(self.layer, [-1.0, -1.0]) == 0

    def test_tie_is_active(self):
        assert active_set(self.layer, [1.0, 0.0]) == 0b11


class TestInjectivity:
    def test_basis_not_injective_empty_pattern(self):
        rep = relu_injectivity(ReluLayer(make_standard_basis(2)))
        assert not rep.injective
        assert rep.failing_pattern.active == 0
        assert rep.failing_pattern.encode() == "00"
        assert np.all(rep.failing_pattern.witness < 0)

    def test_doubled_basis(self):
        rep = relu_injectivity(ReluLayer(make_doubled(make_standard_basis(2))))
        assert rep.injective and rep.failing_pattern is None
        assert rep.a_alpha == pytest.approx(1.0, abs=1e-12)
        assert relu_lipschitz_bounds(rep) == pytest.approx((0.5, 1.0))

    def test_doubled_mb(self):
        rep = relu_injectivity(ReluLayer(make_doubled(make_mercedes_benz())))
        lo, hi = relu_lipschitz_bounds(rep)
        assert lo == pytest.approx(0.5 * np.sqrt(1.5), abs=1e-9)
        assert hi == pytest.approx(np.sqrt(1.5), abs=1e-9)

    @pytest.mark.parametrize("seed", range(6))
    def test_doubled_random_a_alpha_is_a(self, seed):
        f = make_random(3, 4, seed=seed)
        rep = relu_injectivity(ReluLayer(make_doubled(f)))
        assert rep.injective
        assert rep.a_alpha == pytest.approx(frame_bounds(f).lower, abs=1e-9)

    def test_report_invariants(self):
        layer = ReluLayer(make_random(2, 6, seed=3), bias=-0.2 * np.ones(6))
        rep = relu_injectivity(layer)
        vals = [sub_frame_lower_bound(layer.frame, p.active) for p in rep.patterns]
        assert rep.injective == all(v > 0 for v in vals)
        if rep.injective:
            assert rep.a_alpha == min(vals)
            assert sub_frame_lower_bound(layer.frame, rep.worst_pattern.active) == rep.a_alpha

    def test_bounds_require_injective(self):
        with pytest.raises(NotInjective):
            relu_lipschitz_bounds(relu_injectivity(ReluLayer(make_standard_basis(2))))

    def test_sandwich_ratio(self):
        rep = relu_injectivity(ReluLayer(make_doubled(make_random(2, 3, seed=1))))
        lo, hi = relu_lipschitz_bounds(rep)
        assert lo == hi / 2


class TestPointwise:
    def test_equal_points(self):
        layer = ReluLayer(make_doubled(make_standard_basis(2)))
        assert relu_pointwise_lower(layer, [0.3, 0.2], [0.3, 0.2]) == 0.0

    def test_hand_example(self):
        layer = ReluLayer(make_doubled(make_standard_basis(2)))
        x, y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        assert relu_pointwise_lower(layer, x, y) == pytest.approx(0.5)
        assert np.sum((relu_apply(layer, x) - relu_apply(layer, y)) ** 2) == pytest.approx(2.0)

    @pytest.mark.parametrize("seed", range(4))
    def test_sweep_and_midpoint_inclusions(self, seed):
        rng = np.random.default_rng(seed)
        f = make_random(3, int(rng.integers(3, 7)), seed=seed)
        layer = ReluLayer(f, bias=rng.normal(size=f.m) * 0.5)
        X = rng.standard_normal((2000, 3)) * 2
        Y = rng.standard_normal((2000, 3)) * 2
        B = frame_bounds(f).upper
        Ix, Iy, Im = active_masks(layer, X), active_masks(layer, Y), active_masks(layer, 0.5 * (X + Y))
        assert np.all((Ix & Iy) & ~Im == 0)
        assert np.all(Im & ~(Ix | Iy) == 0)
        for x, y in zip(X[:300], Y[:300]):
            gap = np.sum((relu_apply(layer, x) - relu_apply(layer, y)) ** 2)
            assert relu_pointwise_lower(layer, x, y) <= gap + 1e-9
            assert np.sqrt(gap) <= np.sqrt(B) * np.linalg.norm(x - y) + 1e-12


class TestDoubledKappa:
    def test_basis(self):
        d = doubled_frame_kappa(make_standard_basis(2))
        assert d.kappa == pytest.approx(1 / np.sqrt(2))
        u, v = d.witness
        np.testing.assert_allclose(v, -u)
        assert abs(abs(u[0]) - 1.0) < 1e-12 or abs(abs(u[1]) - 1.0) < 1e-12

    def test_mercedes_benz(self):
        assert doubled_frame_kappa(make_mercedes_benz()).kappa == pytest.approx(np.sqrt(0.75), abs=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_witness_attains(self, seed):
        f = make_random(3, 5, seed=seed)
        d = doubled_frame_kappa(f)
        layer = ReluLayer(make_doubled(f))
        u, v = d.witness
        r = np.linalg.norm(relu_apply(layer, u) - relu_apply(layer, v)) / np.linalg.norm(u - v)
        assert r == pytest.approx(d.kappa, abs=1e-9)
