import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layerwave.fastfield import (
    ORDER_LEVELS,
    PeriodicGridFunction,
    PeriodicPolyFunction,
    closed_form_fastvars_layered,
    fluctuation,
    solve_fastvars,
    zero_mean_antiderivative,
)
from layerwave.medium import fast_grid, make_piecewise, make_sinusoidal, make_tabulated

BAND_BREAKS = np.array([0.0, 0.25, 0.75, 1.0])


def two_band_function(value_A, value_B):
    return PeriodicPolyFunction.from_band_values(BAND_BREAKS, [value_B, value_A, value_B])


class TestOperators:
    def test_fluctuation_of_constant(self):
        np.testing.assert_allclose(fluctuation(np.full(64, 7.0)), 0.0, atol=1e-14)

    def test_fluctuation_of_zero_mean_input(self):
        y = fast_grid(128)
        f = np.sin(2 * np.pi * y)
        np.testing.assert_allclose(fluctuation(f), f, atol=1e-14)

    def test_antiderivative_of_sine(self):
        y = fast_grid(256)
        result = zero_mean_antiderivative(np.sin(2 * np.pi * y))
        expected = -np.cos(2 * np.pi * y) / (2 * np.pi)
        np.testing.assert_allclose(result, expected, atol=1e-13)

    def test_antiderivative_of_constant_is_zero(self):
        np.testing.assert_allclose(zero_mean_antiderivative(np.full(64, 3.2)), 0.0, atol=1e-14)

    def test_band_fluctuation_values(self):
        # {K^-1 K_h} for the constant-impedance medium: +-3/5 on the bands
        f = two_band_function(8 / 5, 2 / 5).fluctuation()
        assert f.evaluate(0.5) == pytest.approx(3 / 5)
        assert f.evaluate(0.0) == pytest.approx(-3 / 5)

    def test_derivative_recovers_fluctuation_smooth(self):
        y = fast_grid(512)
        f = np.cos(2 * np.pi * y) + 0.5 * np.sin(4 * np.pi * y) + 2.0
        F = zero_mean_antiderivative(f)
        h = 1.0 / y.size
        central = (np.roll(F, -1) - np.roll(F, 1)) / (2 * h)
        np.testing.assert_allclose(central, fluctuation(f), atol=1e-3)

    def test_derivative_recovers_fluctuation_piecewise(self):
        # on each band the slope of [[f]] equals the band's fluctuation value
        f = two_band_function(2.0, -1.0)
        F = f.zero_mean_antiderivative()
        fluct = f.fluctuation()
        for seg_coefs, seg_fluct in zip(F.coefs, fluct.coefs):
            assert seg_coefs[1] == pytest.approx(seg_fluct[0], abs=1e-14)

    @given(coeffs=st.lists(st.floats(-3, 3), min_size=2, max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_antiderivative_matches_analytic_trig(self, coeffs):
        y = fast_grid(256)
        f = np.zeros_like(y)
        expected = np.zeros_like(y)
        for m, a in enumerate(coeffs, start=1):
            w = 2 * np.pi * m
            f += a * np.cos(w * y) + 0.3 * a * np.sin(w * y)
            expected += a * np.sin(w * y) / w - 0.3 * a * np.cos(w * y) / w
        F = zero_mean_antiderivative(f)
        assert abs(F.mean()) < 1e-12
        np.testing.assert_allclose(F, expected, atol=1e-10)

    @given(
        value_A=st.floats(0.1, 10),
        value_B=st.floats(0.1, 10),
        weight_A=st.floats(0.1, 10),
        weight_B=st.floats(0.1, 10),
    )
    @settings(max_examples=80, deadline=None)
    def test_weighted_mean_of_antiderivative_vanishes(self, value_A, value_B, weight_A, weight_B):
        # <f [[g]]> = 0 for piecewise-constant f, g sharing the band layout
        g = two_band_function(value_A, value_B)
        f = two_band_function(weight_A, weight_B)
        assert abs((f * g.zero_mean_antiderivative()).mean()) < 1e-12

    def test_poly_algebra_against_brute_quadrature(self):
        f = two_band_function(2.0, 0.5).zero_mean_antiderivative()
        g = two_band_function(1.5, 3.0).zero_mean_antiderivative()
        product = f * g
        dense = np.linspace(0, 1, 2_000_001)
        brute = np.trapezoid(f.evaluate(dense) * g.evaluate(dense), dense)
        assert product.mean() == pytest.approx(brute, abs=5e-11)

    def test_poly_rejects_mismatched_breakpoints(self):
        f = two_band_function(1.0, 2.0)
        g = PeriodicPolyFunction.from_band_values([0.0, 0.5, 1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            _ = f * g

    def test_grid_function_roundtrip(self):
        y = fast_grid(128)
        f = PeriodicGridFunction(np.cos(2 * np.pi * y))
        assert abs((f * f).mean() - 0.5) < 1e-12


class TestSolveFastvars:
    def test_homogeneous_chain_vanishes(self):
        table = solve_fastvars(make_piecewise(1, 1, 1, 1), max_order=6)
        for name, values in table.functions.items():
            np.testing.assert_allclose(values, 0.0, atol=1e-14, err_msg=name)

    def test_matches_closed_forms_on_piecewise(self):
        medium = make_piecewise(5 / 8, 5 / 2, 8 / 5, 2 / 5)
        table = solve_fastvars(medium, max_order=1)
        A, B, C = closed_form_fastvars_layered(medium, table.yhat)
        np.testing.assert_allclose(table.functions["A"], A, atol=1e-10)
        np.testing.assert_allclose(table.functions["B"], B, atol=1e-10)
        np.testing.assert_allclose(table.functions["C"], C, atol=1e-10)

    def test_interface_point_values(self):
        medium = make_piecewise(5 / 8, 5 / 2, 8 / 5, 2 / 5)
        table = solve_fastvars(medium, max_order=1)
        assert table.representation["A"].evaluate(0.25) == pytest.approx(-0.3)
        assert table.representation["B"].evaluate(0.25) == pytest.approx(-0.15)
        assert table.representation["C"].evaluate(0.25) == pytest.approx(-0.15)

    def test_constant_bulk_modulus_degeneracy(self):
        # K constant: B vanishes identically and A reduces to -rho_h [[rho^-1]]
        root = np.sqrt(56.0)
        medium = make_piecewise(1, 1, 8 + root, 8 - root)
        table = solve_fastvars(medium, max_order=1)
        np.testing.assert_allclose(table.functions["B"], 0.0, atol=1e-14)
        rhoinv = two_band_function(1 / (8 + root), 1 / (8 - root))
        expected = -table.averages.rho_h * rhoinv.zero_mean_antiderivative().evaluate(table.yhat)
        np.testing.assert_allclose(table.functions["A"], expected, atol=1e-13)

    @pytest.mark.parametrize("order,expected_names", [
        (1, ("A", "B", "C")),
        (2, ("A", "B", "C", "D", "E", "F", "H")),
        (4, sum((ORDER_LEVELS[k] for k in (1, 2, 3, 4)), ())),
        (6, sum((ORDER_LEVELS[k] for k in (1, 2, 3, 4, 6)), ())),
    ])
    def test_order_gating(self, order, expected_names):
        table = solve_fastvars(make_piecewise(2, 1, 3, 1), max_order=order)
        assert table.names() == tuple(expected_names)
        assert table.max_order == order

    def test_invalid_order_rejected(self):
        with pytest.raises(ValueError):
            solve_fastvars(make_piecewise(1, 2, 3, 4), max_order=5)

    def test_tabulated_resolution_floor(self):
        y = fast_grid(32)
        medium = make_tabulated(np.exp(np.sin(2 * np.pi * y)), np.full(32, 1.0))
        with pytest.raises(ValueError, match="64"):
            solve_fastvars(medium)

    @pytest.mark.parametrize("factory", [
        lambda: make_piecewise(5 / 8, 5 / 2, 8 / 5, 2 / 5),
        lambda: make_sinusoidal(5 / 8, 5 / 2),
    ])
    def test_all_functions_zero_mean(self, factory):
        table = solve_fastvars(factory(), max_order=6)
        for name, mean in table.means.items():
            assert abs(mean) < 1e-10, name

    @pytest.mark.parametrize("factory", [
        lambda: make_piecewise(5 / 8, 5 / 2, 8 / 5, 2 / 5),
        lambda: make_sinusoidal(5 / 8, 5 / 2),
    ])
    def test_assumed_averages_vanish(self, factory):
        table = solve_fastvars(factory(), max_order=1)
        for key in ("Kinv*C", "rhoinv*C", "rho*A", "rho*B"):
            assert abs(table.weighted_means[key]) < 1e-12, key

    def test_asymmetric_tabulated_medium_warns(self):
        y = fast_grid(256)
        K = np.exp(0.4 * np.sin(2 * np.pi * y) + 0.3 * np.cos(4 * np.pi * y))
        rho = np.exp(0.3 * np.sin(4 * np.pi * y) + 0.2 * np.cos(2 * np.pi * y))
        with pytest.warns(UserWarning, match="does not vanish"):
            solve_fastvars(make_tabulated(K, rho), max_order=1)

    def test_closed_forms_reject_non_piecewise(self):
        with pytest.raises(ValueError):
            closed_form_fastvars_layered(make_sinusoidal(1, 2), fast_grid(16))

    def test_closed_forms_homogeneous_limit(self):
        A, B, C = closed_form_fastvars_layered(make_piecewise(2, 2, 3, 3), fast_grid(64))
        for values in (A, B, C):
            np.testing.assert_allclose(values, 0.0, atol=1e-15)
