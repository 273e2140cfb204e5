import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layerwave.medium import (
    averages,
    fast_grid,
    make_piecewise,
    make_sinusoidal,
    make_tabulated,
    sample,
)

positive_param = st.floats(min_value=0.1, max_value=10.0)


class TestConstruction:
    def test_piecewise_band_layout(self):
        medium = make_piecewise(5 / 8, 5 / 2, 8 / 5, 2 / 5)
        K, rho, Z, c = sample(medium, 0.5)
        assert K == 5 / 8 and rho == 8 / 5
        assert Z == pytest.approx(1.0)
        assert c == pytest.approx(5 / 8)
        # outside the inner band
        K_out, rho_out, _, _ = sample(medium, 0.0)
        assert K_out == 5 / 2 and rho_out == 2 / 5

    def test_homogeneous_sample(self):
        medium = make_piecewise(1, 1, 1, 1)
        assert sample(medium, 0.7) == (1, 1, 1, 1)

    def test_sinusoidal_extremes(self):
        medium = make_sinusoidal(5 / 8, 5 / 2)
        K, rho, _, _ = sample(medium, 0.25)
        assert K == pytest.approx(5 / 8)
        assert rho == pytest.approx(8 / 5)
        K_b, _, _, _ = sample(medium, 0.75)
        assert K_b == pytest.approx(5 / 2)

    @pytest.mark.parametrize("bad", [(-1, 1, 1, 1), (1, 0, 1, 1), (1, 1, np.inf, 1)])
    def test_rejects_nonpositive_parameters(self, bad):
        with pytest.raises(ValueError):
            make_piecewise(*bad)

    def test_tabulated_validation(self):
        with pytest.raises(ValueError):
            make_tabulated([1.0], [1.0])
        with pytest.raises(ValueError):
            make_tabulated([1.0, 2.0], [1.0, -2.0])
        with pytest.raises(ValueError):
            make_tabulated([1.0, 2.0, 3.0], [1.0, 2.0])

    def test_sampling_is_periodic(self):
        medium = make_piecewise(2, 3, 4, 5)
        y = np.linspace(0, 1, 37, endpoint=False)
        for ours, shifted in zip(sample(medium, y), sample(medium, y + 1.0)):
            np.testing.assert_array_equal(ours, shifted)

    def test_tabulated_lookup(self):
        K = np.array([1.0, 2.0, 3.0, 4.0])
        rho = np.array([4.0, 3.0, 2.0, 1.0])
        medium = make_tabulated(K, rho)
        np.testing.assert_array_equal(medium.bulk_modulus([0.0, 0.3, 0.5, 0.99]), [1, 2, 3, 4])


class TestAverages:
    def test_rho_m_eight_medium(self):
        root = np.sqrt(56.0)
        avg = averages(make_piecewise(1, 1, 8 + root, 8 - root))
        assert avg.K_m == pytest.approx(1.0, abs=1e-14)
        assert avg.K_h == pytest.approx(1.0, abs=1e-14)
        assert avg.rho_m == pytest.approx(8.0, abs=1e-12)
        assert avg.rho_h == pytest.approx(1.0, abs=1e-12)

    def test_homogeneous(self):
        avg = averages(make_piecewise(1, 1, 1, 1))
        assert (avg.K_m, avg.K_h, avg.rho_m, avg.rho_h) == (1, 1, 1, 1)
        assert avg.constant_impedance and avg.constant_soundspeed

    def test_constant_impedance_medium(self):
        avg = averages(make_piecewise(5 / 8, 5 / 2, 8 / 5, 2 / 5))
        assert avg.K_m == pytest.approx(25 / 16)
        assert avg.K_h == pytest.approx(1.0)
        assert avg.rho_m == pytest.approx(1.0)
        assert avg.rho_h == pytest.approx(16 / 25)
        assert avg.constant_impedance
        assert not avg.constant_soundspeed

    def test_constant_soundspeed_medium(self):
        avg = averages(make_piecewise(2, 1 / 2, 2, 1 / 2))
        assert avg.constant_soundspeed
        assert not avg.constant_impedance

    def test_sinusoidal_closed_form_averages(self):
        # <1/(a + b sin)> = 1/sqrt(a^2 - b^2) gives K_h = sqrt(K_A K_B);
        # with rho = 1/K the other three follow.
        K_A, K_B = 5 / 8, 5 / 2
        avg = averages(make_sinusoidal(K_A, K_B))
        assert avg.K_m == pytest.approx((K_A + K_B) / 2, rel=1e-12)
        assert avg.K_h == pytest.approx(np.sqrt(K_A * K_B), rel=1e-10)
        assert avg.rho_m == pytest.approx(1 / np.sqrt(K_A * K_B), rel=1e-10)
        assert avg.rho_h == pytest.approx(2 / (K_A + K_B), rel=1e-12)
        assert avg.constant_impedance
        assert not avg.constant_soundspeed

    def test_sinusoidal_quadrature_convergence(self):
        coarse = averages(make_sinusoidal(5 / 8, 5 / 2), n_samples=4096)
        fine = averages(make_sinusoidal(5 / 8, 5 / 2), n_samples=8192)
        assert coarse.K_h == pytest.approx(fine.K_h, rel=1e-10)
        assert coarse.rho_m == pytest.approx(fine.rho_m, rel=1e-10)

    @given(K_A=positive_param, K_B=positive_param, rho_A=positive_param, rho_B=positive_param)
    @settings(max_examples=60, deadline=None)
    def test_am_hm_inequality(self, K_A, K_B, rho_A, rho_B):
        avg = averages(make_piecewise(K_A, K_B, rho_A, rho_B))
        assert avg.K_h <= avg.K_m * (1 + 1e-14)
        assert avg.rho_h <= avg.rho_m * (1 + 1e-14)


class TestGrid:
    def test_fast_grid_layout(self):
        grid = fast_grid(8)
        np.testing.assert_allclose(grid, np.arange(8) / 8)

    def test_fast_grid_rejects_tiny(self):
        with pytest.raises(ValueError):
            fast_grid(1)
