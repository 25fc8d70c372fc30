from __future__ import annotations

import numpy as np
import pytest

from framelip import (
    AnalysisConfig,
    Frame,
    GateOperator,
    IntensityOperator,
    ReluLayer,
    SatOperator,
    estimate_kappa,
    frame_bounds,
    make_doubled,
    make_mercedes_benz,
    make_random,
    make_standard_basis,
    ratio,
    sub_frame_lower_bound,
    sweep_open_problem,
)
from framelip.errors import DegenerateDomain, ZeroDistance
from framelip.lipschitz import Domain, write_sweep_csv
from framelip.relu import active_set

CFG = AnalysisConfig(kappa_budget=20_000)


class TestRatio:
    def test_linear_between_frame_bounds(self):
        f = make_random(3, 5, seed=1)
        fb = frame_bounds(f)
        rng = np.random.default_rng(0)
        for x, y in rng.standard_normal((200, 2, 3)):
            r = ratio(f, x, y)
            assert np.sqrt(fb.lower) - 1e-12 <= r <= np.sqrt(fb.upper) + 1e-12

    def test_same_region_relu(self):
        layer = ReluLayer(make_random(2, 5, seed=2))
        rng = np.random.default_rng(1)
        x = rng.standard_normal(2)
        y = x + 1e-4 * rng.standard_normal(2)
        J = active_set(layer, x)
        assert J == active_set(layer, y)
        assert ratio(layer, x, y) >= np.sqrt(sub_frame_lower_bound(layer.frame, J)) - 1e-9

    def test_identical_pair(self):
        with pytest.raises(ZeroDistance):
            ratio(make_standard_basis(2), [1.0, 2.0], [1.0, 2.0])

    def test_quotient_identifies_signs(self):
        op = IntensityOperator(make_mercedes_benz())
        with pytest.raises(ZeroDistance):
            ratio(op, [1.0, 2.0], [-1.0, -2.0])


class TestDomain:
    @pytest.mark.parametrize("name", ["box", "ball", "ball-complement", "quotient"])
    def test_samples_inside(self, name):
        dom = Domain(name, 3, 3.0)
        X = dom.sample(np.random.default_rng(0), 5000)
        assert dom.contains(X).all()
        assert dom.contains(dom.project(5 * X)).all()
        assert dom.contains(dom.project(0.01 * X)).all()

    def test_degenerate(self):
        with pytest.raises(DegenerateDomain):
            Domain("box", 0)

    def test_unknown(self):
        with pytest.raises(ValueError):
            Domain("sphere", 2)


class TestEstimate:
    def test_doubled_basis(self):
        layer = ReluLayer(make_doubled(make_standard_basis(2)))
        rep = estimate_kappa(layer, cfg=CFG)
        assert rep.kappa_hat == pytest.approx(1 / np.sqrt(2), abs=1e-3)
        x, y = rep.witness_pair
        assert ratio(layer, x, y) == rep.kappa_hat
        np.testing.assert_allclose(x, -y, atol=1e-12)
        assert rep.consistent()

    def test_sat_basis_level_one(self):
        rep = estimate_kappa(SatOperator(make_standard_basis(2), 1.0), cfg=CFG)
        assert 0.5 - 1e-6 <= rep.kappa_hat <= 1 + 1e-3

    def test_mercedes_benz_intensity(self):
        rep = estimate_kappa(IntensityOperator(make_mercedes_benz()), cfg=CFG)
        assert np.sqrt(0.5) - 1e-3 <= rep.kappa_hat <= 1 + 1e-3

    def test_witness_consistency(self):
        op = SatOperator(make_random(2, 5, seed=3), 0.7)
        rep = estimate_kappa(op, cfg=CFG)
        assert rep.kappa_hat == ratio(op, *rep.witness_pair)
        assert all(np.linalg.norm(v) <= 1 + 1e-12 for v in rep.witness_pair)

    def test_refinement_trace_monotone(self):
        rep = estimate_kappa(ReluLayer(make_doubled(make_random(3, 4, seed=2))), cfg=CFG)
        assert np.all(np.diff(rep.refine_trace) <= 0)
        assert rep.refinement_steps > 0

    def test_gate_domain(self):
        op = GateOperator(make_mercedes_benz(), 0.4)
        rep = estimate_kappa(op, cfg=CFG)
        assert rep.domain == "ball-complement"
        assert rep.theoretical_lower is None
        assert all(np.linalg.norm(v) >= 1 - 1e-12 for v in rep.witness_pair)

    def test_budget_floor(self):
        with pytest.raises(ValueError):
            estimate_kappa(make_standard_basis(2), budget=10)

    def test_seeded_determinism(self):
        op = ReluLayer(make_random(2, 6, seed=5))
        a = estimate_kappa(op, cfg=CFG, seed=3)
        b = estimate_kappa(op, cfg=CFG, seed=3)
        assert a.kappa_hat == b.kappa_hat
        np.testing.assert_array_equal(a.witness_pair[0], b.witness_pair[0])

    def test_threads_do_not_matter(self, monkeypatch):
        op = SatOperator(make_random(2, 4, seed=1), 0.6)
        cfg = CFG.replace(chunk_size=2_500)
        monkeypatch.setenv("FRAMELIP_THREADS", "1")
        a = estimate_kappa(op, cfg=cfg)
        monkeypatch.setenv("FRAMELIP_THREADS", "4")
        b = estimate_kappa(op, cfg=cfg)
        assert a.kappa_hat == b.kappa_hat
        np.testing.assert_array_equal(a.witness_pair[1], b.witness_pair[1])

    def test_csv_rows(self, tmp_path):
        path = tmp_path / "pairs.csv"
        estimate_kappa(make_standard_basis(2), budget=1000, csv_path=path)
        lines = path.read_text().splitlines()
        assert lines[0] == "ratio,dist"
        assert len(lines) == 1001
        r, d = map(float, lines[1].split(","))
        assert r == pytest.approx(1.0) and d > 0

    @pytest.mark.parametrize("seed", range(3))
    def test_sandwich_on_generic_relu(self, seed):
        layer = ReluLayer(make_random(2, 6, seed=seed))
        rep = estimate_kappa(layer, cfg=CFG)
        if rep.theoretical_upper is not None:
            assert rep.theoretical_lower - 1e-6 <= rep.kappa_hat <= rep.theoretical_upper + 1e-6

    def test_pair_on_line(self):
        rep = estimate_kappa(IntensityOperator(Frame(np.array([[1.0], [1.0]]))), cfg=CFG.replace(kappa_budget=2000))
        assert rep.kappa_hat == pytest.approx(np.sqrt(2), abs=1e-6)


class TestSweep:
    def test_relu_doubled_attains_sqrt2(self, tmp_path):
        res = sweep_open_problem("relu-K", 4, seed=0, budget=2000)
        assert len(res.rows) == 4
        for row in res.rows:
            assert row[-1] == pytest.approx(np.sqrt(2), abs=1e-3)
        path = tmp_path / "sweep.csv"
        write_sweep_csv(res, path)
        assert path.read_text().splitlines()[0].split(",") == res.header

    def test_relu_random_family_in_sandwich(self):
        res = sweep_open_problem("relu-K", 3, seed=1, family="random", budget=2000)
        for row in res.rows:
            assert 1.0 - 1e-6 <= row[-1] <= 2.0 + 1e-6

    def test_sat_rows_above_bound(self):
        res = sweep_open_problem("sat-f", 3, seed=2, budget=2000)
        assert len(res.rows) + res.skipped > 0
        for row in res.rows:
            assert row[6] >= row[7] - 1e-6

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            sweep_open_problem("relu-X", 1)
