"""Periodic B-spline / Fourier interpolation and the evaluation kernels."""

import numpy as np
import pytest

from eulerlab import Grid, ScalarField, VectorField, random_scalar
from eulerlab.interp import Interpolant, sample
from eulerlab import _kernels

TAU = 2.0 * np.pi


def trig_poly(grid):
    x, y = grid.coords()
    return ScalarField(grid, np.cos(x) + 0.5 * np.sin(2 * y) + 0.25 * np.cos(x + y))


def exact(points):
    tx, ty = points
    return np.cos(tx) + 0.5 * np.sin(2 * ty) + 0.25 * np.cos(tx + ty)


@pytest.fixture
def points(rng):
    return rng.uniform(0.0, TAU, size=(2, 400))


class TestSplineAccuracy:
    def test_exact_on_grid_nodes(self, grid32):
        f = trig_poly(grid32)
        x, y = grid32.coords()
        pts = np.stack([np.broadcast_to(x, grid32.shape).ravel(),
                        np.broadcast_to(y, grid32.shape).ravel()])
        for order in (3, 5):
            vals = sample(f, pts, order=order)
            assert np.max(np.abs(vals - f.data.ravel())) < 1e-12

    def test_convergence_order(self, points):
        errs = {}
        for n in (16, 32, 64):
            g = Grid(dim=2, n=n, length=TAU)
            f = trig_poly(g)
            errs[n] = {order: np.max(np.abs(sample(f, points, order=order)
                                            - exact(points)))
                       for order in (3, 5)}
        # cubic ~ h^4, quintic ~ h^6
        rate3 = np.log2(errs[16][3] / errs[32][3])
        rate5 = np.log2(errs[16][5] / errs[32][5])
        assert rate3 > 3.5
        assert rate5 > 5.5

    def test_fourier_mode_is_exact(self, grid16, points):
        f = trig_poly(grid16)
        vals = sample(f, points, order="fourier")
        assert np.max(np.abs(vals - exact(points))) < 1e-12

    def test_periodength_wrapping(self, grid32):
        f = trig_poly(grid32)
        p = np.array([[0.3], [1.1]])
        shifted = p + TAU * np.array([[3.0], [-2.0]])
        for order in (3, 5, "fourier"):
            a = sample(f, p, order=order)
            b = sample(f, shifted, order=order)
            assert np.max(np.abs(a - b)) < 1e-12

    def test_vector_field_component_consistency(self, grid32, rng, points):
        u = VectorField(grid32, np.stack([trig_poly(grid32).data,
                                          random_scalar(grid32, rng).data]))
        vu = sample(u, points, order=5)
        v0 = sample(ScalarField(grid32, u.data[0]), points, order=5)
        assert np.max(np.abs(vu[0] - v0)) < 1e-14

    def test_3d_roundtrip(self, grid3d, rng):
        f = random_scalar(grid3d, rng, max_xi=3.0)
        pts = rng.uniform(0, TAU, size=(3, 200))
        v3 = sample(f, pts, order=3)
        vf = sample(f, pts, order="fourier")
        assert np.max(np.abs(v3 - vf)) < 5e-4


class TestNyquistWarning:
    def test_warns_on_unpaired_nyquist(self, grid16):
        hat = np.zeros(grid16.shape, dtype=complex)
        hat[grid16.n // 2, 1] = 1.0  # unpaired Nyquist content
        f = ScalarField.from_hat(grid16, hat)
        with pytest.warns(UserWarning):
            Interpolant(f, order=3)

    def test_silent_on_smooth_data(self, grid16, rng):
        import warnings
        f = random_scalar(grid16, rng, max_xi=3.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            Interpolant(f, order=3)


class TestKernels:
    def test_backend_selected(self):
        assert _kernels.BACKEND in ("numba", "numpy")

    def test_numba_and_numpy_agree_2d(self, rng):
        coeffs = rng.standard_normal((2, 16, 16))
        tx = rng.uniform(0, 16, size=300)
        ty = rng.uniform(0, 16, size=300)
        for order in (3, 5):
            a = _kernels._eval_2d_numpy(coeffs, tx, ty, order)
            b = _kernels.eval_spline_2d(coeffs, tx, ty, order)
            assert np.max(np.abs(a - b)) < 1e-12

    def test_numba_and_numpy_agree_3d(self, rng):
        coeffs = rng.standard_normal((1, 8, 8, 8))
        t = [rng.uniform(0, 8, size=100) for _ in range(3)]
        for order in (3, 5):
            a = _kernels._eval_3d_numpy(coeffs, *t, order)
            b = _kernels.eval_spline_3d(coeffs, *t, order)
            assert np.max(np.abs(a - b)) < 1e-12

    def test_cubic_weights_partition_of_unity(self, rng):
        f = rng.uniform(0, 1, size=50)
        w = _kernels._cubic_weights_np(f)
        assert np.max(np.abs(np.sum(w, axis=0) - 1.0)) < 1e-14

    def test_quintic_weights_partition_of_unity(self, rng):
        f = rng.uniform(0, 1, size=50)
        w = _kernels._quintic_weights_np(f)
        assert np.max(np.abs(np.sum(w, axis=0) - 1.0)) < 1e-13
