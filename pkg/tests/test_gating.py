from __future__ import annotations

import numpy as np
import pytest

from framelip import (
    AnalysisConfig,
    GateOperator,
    gate_apply,
    gate_injectivity,
    gated_set,
    make_doubled,
    make_mercedes_benz,
    make_random,
    make_standard_basis,
    measure,
    sub_frame_lower_bound,
)
from framelip.gating import exterior_reach, gate_cell


class TestApply:
    def test_basis(self):
        np.testing.assert_array_equal(gate_apply(GateOperator(make_standard_basis(2), 0.5), [2.0, 0.1]), [2.0, 0.0])

    def test_small_threshold_is_measure(self):
        f = make_random(3, 5, seed=0)
        x = np.array([1.0, 2.0, -0.5])
        mu = np.min(np.abs(measure(f, x)))
        np.testing.assert_array_equal(gate_apply(GateOperator(f, mu), x), measure(f, x))

    def test_boundary_passes(self):
        np.testing.assert_array_equal(gate_apply(GateOperator(make_standard_basis(2), 0.5), [0.5, 1.0]), [0.5, 1.0])

    def test_warns_inside_ball(self):
        with pytest.warns(UserWarning):
            gate_apply(GateOperator(make_standard_basis(2), 0.5), [0.1, 0.1])


class TestGatedSet:
    op = GateOperator(make_standard_basis(2), 0.5)

    def test_above(self):
        assert gated_set(self.op, [2.0, 0.1]) == 0b01

    def test_all_pass(self):
        assert gated_set(self.op, [1.0, -1.0]) == 0b11

    def test_tie(self):
        assert gated_set(self.op, [0.5, -0.5]) == 0b11


class TestInjectivity:
    def test_basis_small_threshold(self):
        op = GateOperator(make_standard_basis(2), 0.1)
        rep = gate_injectivity(op)
        assert rep.verdict == "not-injective" and rep.injective is False
        assert np.linalg.norm(rep.failing_witness) >= 1.0
        mask = gated_set(op, rep.failing_witness)
        assert sub_frame_lower_bound(op.frame, mask) == 0.0
        # the pattern with e1 gated off is realised at (0.05, 1.2)
        assert "o+" in {p.encode() for p in rep.patterns}
        assert gated_set(op, [0.05, 1.2]) == 0b10

    @pytest.mark.parametrize("seed", range(3))
    def test_doubled_rich_frame_injective(self, seed):
        f = make_doubled(make_random(2, 4, seed=seed))
        rep = gate_injectivity(GateOperator(f, 0.01))
        assert rep.verdict == "injective"

    def test_mercedes_benz_threshold(self):
        f = make_mercedes_benz()
        assert gate_injectivity(GateOperator(f, 0.4)).verdict == "injective"
        rep = gate_injectivity(GateOperator(f, 0.6))
        assert rep.verdict == "not-injective"
        assert np.linalg.norm(rep.failing_witness) >= 1.0
        assert sub_frame_lower_bound(f, gated_set(rep.op, rep.failing_witness)) == 0.0

    def test_mercedes_benz_sampled(self):
        # independent check: sampled gated sets outside the ball
        f = make_mercedes_benz()
        theta = np.linspace(0, 2 * np.pi, 20_000, endpoint=False)
        X = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        for mu, expect in [(0.4, True), (0.6, False)]:
            ok = all(sub_frame_lower_bound(f, gated_set(GateOperator(f, mu), x)) > 0 for x in X[::50])
            assert ok == expect

    @staticmethod
    def _polygon(radius, k=8):
        # regular k-gon with vertices on the circle of the given radius, as rows G x >= h
        ang = 2 * np.pi * (np.arange(k) + 0.5) / k
        G = -np.stack([np.cos(ang), np.sin(ang)], axis=1)
        h = -radius * np.cos(np.pi / k) * np.ones(k)
        return G, h, np.zeros(k, dtype=bool)

    def test_polygon_outside_ball_found_by_probes(self):
        ans, w = exterior_reach(*self._polygon(1.2), AnalysisConfig(vertex_enum_cap=0))
        assert ans is True and np.linalg.norm(w) >= 1.0

    def test_polygon_inside_ball_needs_vertices(self):
        # the bounding box sticks out of the ball, so only vertex listing settles it
        G, h, s = self._polygon(0.9)
        assert exterior_reach(G, h, s, AnalysisConfig(vertex_enum_cap=0))[0] is None
        assert exterior_reach(G, h, s, AnalysisConfig())[0] is False

    def test_polygon_grazing_ball_is_inconclusive(self):
        ans, _ = exterior_reach(*self._polygon(1.0 - 1e-10), AnalysisConfig())
        assert ans is None

    def test_unbounded_cell_reaches(self):
        op = GateOperator(make_standard_basis(2), 0.5)
        G, h, s = gate_cell(op, (1, 0))
        ans, w = exterior_reach(G, h, s, AnalysisConfig())
        assert ans is True and np.linalg.norm(w) >= 1.0

    def test_bounded_cell_inside_ball(self):
        op = GateOperator(make_standard_basis(2), 0.5)
        G, h, s = gate_cell(op, (0, 0))
        ans, _ = exterior_reach(G, h, s, AnalysisConfig())
        assert ans is False

    def test_threshold_positive(self):
        with pytest.raises(ValueError):
            GateOperator(make_standard_basis(2), -1.0)
