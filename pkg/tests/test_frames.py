from __future__ import annotations

import itertools

import numpy as np
import pytest

from framelip import (
    Frame,
    frame_bounds,
    load_frame,
    make_doubled,
    make_mercedes_benz,
    make_random,
    make_simplex_funtf,
    make_standard_basis,
    measure,
    save_frame,
    sub_frame_lower_bound,
)
from framelip.errors import DimensionMismatch, FrameError
from framelip.frames import bottom_eigvec, frame_from_csv, frame_from_json, frame_to_csv, frame_to_json, to_mask


class TestFrameBounds:
    def test_basis(self):
        assert tuple(frame_bounds(make_standard_basis(2))) == pytest.approx((1.0, 1.0), abs=1e-12)

    def test_mercedes_benz(self):
        fb = frame_bounds(make_mercedes_benz())
        assert fb.lower == pytest.approx(1.5, abs=1e-9)
        assert fb.upper == pytest.approx(1.5, abs=1e-9)

    def test_rayleigh_sampling(self):
        f = make_random(3, 5, seed=11)
        X = np.random.default_rng(0).standard_normal((1_000_000, 3))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        q = np.sum(measure(f, X) ** 2, axis=1)
        fb = frame_bounds(f)
        assert abs(q.min() - fb.lower) <= 1e-3
        assert abs(q.max() - fb.upper) <= 1e-3
        # the extreme eigenvalues bound every Rayleigh quotient
        assert q.min() >= fb.lower * (1 - 1e-9) and q.max() <= fb.upper * (1 + 1e-9)

    def test_doubling_doubles_bounds(self):
        f = make_random(3, 4, seed=5)
        assert frame_bounds(make_doubled(f)).lower == pytest.approx(2 * frame_bounds(f).lower, abs=1e-9)
        fb = frame_bounds(make_doubled(make_standard_basis(2)))
        assert tuple(fb) == pytest.approx((2.0, 2.0), abs=1e-12)


class TestSubFrames:
    def test_mb_minus_one(self):
        f = make_mercedes_benz()
        for drop in range(3):
            J = [i for i in range(3) if i != drop]
            assert sub_frame_lower_bound(f, J) == pytest.approx(0.5, abs=1e-9)

    def test_full_and_single(self):
        f = make_mercedes_benz()
        assert sub_frame_lower_bound(f, [0, 1, 2]) == pytest.approx(frame_bounds(f).lower)
        assert sub_frame_lower_bound(f, [1]) == 0.0
        assert sub_frame_lower_bound(f, 0) == 0.0

    def test_monotone_in_subsets(self):
        f = make_random(3, 6, seed=2)
        for J in range(64):
            for extra in range(6):
                assert sub_frame_lower_bound(f, J) <= sub_frame_lower_bound(f, J | (1 << extra)) + 1e-12

    def test_mask_and_iterable_agree(self):
        f = make_random(2, 4, seed=1)
        assert sub_frame_lower_bound(f, [0, 2]) == sub_frame_lower_bound(f, 0b101)
        assert to_mask({1, 3}) == 0b1010

    def test_bottom_eigvec(self):
        f = make_random(3, 5, seed=9)
        u = bottom_eigvec(f)
        assert np.linalg.norm(u) == pytest.approx(1.0)
        assert np.sum(measure(f, u) ** 2) == pytest.approx(frame_bounds(f).lower, abs=1e-10)


class TestMeasure:
    def test_basis(self):
        np.testing.assert_array_equal(measure(make_standard_basis(2), [3.0, -4.0]), [3.0, -4.0])

    def test_mb_first_vector(self):
        assert measure(make_mercedes_benz(), [0.0, 1.0])[0] == pytest.approx(1.0)

    def test_zero(self):
        np.testing.assert_array_equal(measure(make_random(3, 5, seed=0), np.zeros(3)), np.zeros(5))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            measure(make_standard_basis(2), [1.0, 2.0, 3.0])


class TestConstructors:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_simplex_funtf(self, n):
        f = make_simplex_funtf(n)
        assert f.m == n + 1
        np.testing.assert_allclose(np.linalg.norm(f.vectors, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(f.vectors.T @ f.vectors, (n + 1) / n * np.eye(n), atol=1e-9)
        # any one element removed leaves lower bound (n+1)/n - 1
        for drop in range(n + 1):
            J = [i for i in range(n + 1) if i != drop]
            assert sub_frame_lower_bound(f, J) == pytest.approx(1.0 / n, abs=1e-9)

    def test_simplex_two_is_mb_shaped(self):
        assert tuple(frame_bounds(make_simplex_funtf(2))) == pytest.approx((1.5, 1.5), abs=1e-9)

    def test_random_deterministic(self):
        a = make_random(3, 7, seed=42)
        b = make_random(3, 7, seed=42)
        assert a.vectors.tobytes() == b.vectors.tobytes()
        assert make_random(3, 7, seed=43).vectors.tobytes() != a.vectors.tobytes()

    def test_doubled(self):
        f = make_doubled(make_standard_basis(2))
        assert f.m == 4
        np.testing.assert_array_equal(f.vectors[2:], -f.vectors[:2])


class TestValidation:
    def test_nonfinite(self):
        with pytest.raises(FrameError):
            Frame(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_too_few(self):
        with pytest.raises(FrameError):
            Frame(np.ones((1, 2)))

    def test_rank_deficient_is_reported_not_rejected(self):
        f = Frame(np.array([[1.0, 0.0], [2.0, 0.0]]))
        assert not f.is_frame
        assert frame_bounds(f).lower == 0.0

    def test_immutable(self):
        f = make_standard_basis(2)
        with pytest.raises(ValueError):
            f.vectors[0, 0] = 5.0


class TestFileFormats:
    def test_json_round_trip_bit_exact(self, tmp_path):
        f = make_random(3, 7, seed=42)
        g = frame_from_json(frame_to_json(f))
        assert g.vectors.tobytes() == f.vectors.tobytes()
        path = tmp_path / "f.json"
        save_frame(f, path)
        assert load_frame(path).vectors.tobytes() == f.vectors.tobytes()

    def test_csv_round_trip_bit_exact(self, tmp_path):
        f = make_simplex_funtf(4)
        assert frame_from_csv(frame_to_csv(f)).vectors.tobytes() == f.vectors.tobytes()
        path = tmp_path / "f.csv"
        save_frame(f, path)
        assert load_frame(path).vectors.tobytes() == f.vectors.tobytes()

    def test_json_shape_mismatch(self):
        with pytest.raises(FrameError):
            frame_from_json('{"n": 3, "m": 2, "vectors": [[1, 0], [0, 1]]}')

    def test_json_missing_field(self):
        with pytest.raises(FrameError):
            frame_from_json('{"n": 2, "vectors": [[1, 0], [0, 1]]}')

    def test_bad_csv(self):
        with pytest.raises(FrameError):
            frame_from_csv("1,0\n0,x\n")

    def test_label_survives(self):
        f = make_mercedes_benz()
        assert frame_from_json(frame_to_json(f)).label == f.label


def test_bounds_bracket_every_measurement():
    f = make_random(4, 6, seed=8)
    fb = frame_bounds(f)
    X = np.random.default_rng(1).standard_normal((10_000, 4))
    e = np.sum(measure(f, X) ** 2, axis=1)
    r = np.sum(X**2, axis=1)
    assert np.all(e >= fb.lower * r * (1 - 1e-9))
    assert np.all(e <= fb.upper * r * (1 + 1e-9))


def test_subset_bounds_agree_with_lapack():
    f = make_random(3, 5, seed=4)
    for size in range(3, 6):
        for J in itertools.combinations(range(5), size):
            V = f.vectors[list(J)]
            assert sub_frame_lower_bound(f, J) == pytest.approx(np.linalg.eigvalsh(V.T @ V)[0], abs=1e-10)
