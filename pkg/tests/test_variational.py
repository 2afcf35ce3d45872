import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dnls_lab import functionals as fn
from dnls_lab.random_fields import random_smooth_field
from dnls_lab.spectral import Field, make_grid
from dnls_lab.variational import (
    BoxTooSmallError,
    DegenerateFieldError,
    GN1_CONSTANT,
    cgn_constant,
    cgn_inv9,
    cgn_inv9_half,
    cgn_inv18,
    elliptic_residual,
    estimate_sharp_constant,
    gn1_check,
    gn2_check,
    ground_state_Q,
    maximize_weinstein,
    psi_optimizer,
    shape_profile,
    shoot_Q0,
    weinstein_ratio,
)

C_GN = 0.979114668789372           # mpmath, 3^(1/6) (2 pi)^(-1/9)
GN2_RATIO_AT_Q = 0.9942824254721406


@pytest.fixture(scope="module")
def psi():
    return psi_optimizer()


class TestConstants:
    def test_cgn(self):
        assert cgn_constant() == pytest.approx(C_GN, abs=1e-14)

    def test_powers_are_consistent(self):
        c = cgn_constant()
        assert cgn_inv9() == pytest.approx(c**-9, rel=1e-13)
        assert cgn_inv18() == pytest.approx(c**-18, rel=1e-13)
        assert cgn_inv9_half() == pytest.approx(c**-4.5, rel=1e-13)

    def test_named_values(self):
        assert 4 * cgn_inv9() == pytest.approx(4.836798304624581, abs=1e-13)
        assert 2 * cgn_inv9_half() == pytest.approx(2.199272221582535, abs=1e-13)


class TestGroundState:
    def test_closed_form_residual(self, Q_wide):
        assert elliptic_residual(Q_wide, "dnls_ground_state") <= 1e-10

    def test_default_box_interior_residual(self, Q):
        assert elliptic_residual(Q, "dnls_ground_state", window=0.5) <= 1e-10

    def test_peak(self, Q):
        assert Q.values[Q.grid.n // 2] == pytest.approx(2.0, abs=1e-15)

    def test_box_too_small(self):
        with pytest.raises(BoxTooSmallError, match="box too small"):
            ground_state_Q(make_grid(10, 256))

    def test_shooting_peak(self):
        assert shoot_Q0() == pytest.approx(2.0, abs=1e-10)

    def test_numerical_route_matches_closed_form(self, wide_grid, Q_wide):
        num = ground_state_Q(wide_grid, method="numerical")
        assert num.sup_distance(Q_wide) <= 1e-9

    def test_unknown_method(self, grid):
        with pytest.raises(ValueError):
            ground_state_Q(grid, method="guess")


class TestPsi:
    def test_scaled_psi_solves_quartic_quintic(self, psi):
        assert elliptic_residual(psi * math.sqrt(2), "quartic_quintic", window=0.5) <= 1e-8

    def test_truncated_norms(self, psi):
        # mpmath on [-100, 100]: both differ from pi/2, pi/8 by ~7e-7
        assert fn.lp_norm(psi, 4) ** 4 == pytest.approx(1.570795660208221, abs=1e-8)
        assert fn.kinetic(psi) == pytest.approx(0.3926984151520403, abs=1e-8)

    def test_complex_input_rejected(self, grid):
        with pytest.raises(ValueError):
            elliptic_residual(Field.from_function(grid, lambda x: 1j * np.exp(-x**2)), "quartic_quintic")

    def test_unknown_equation(self, Q):
        with pytest.raises(ValueError):
            elliptic_residual(Q, "kdv")


class TestInequalities:
    def test_gn1_equality_at_Q(self, Q):
        rep = gn1_check(Q, "Q")
        assert rep.ratio == pytest.approx(1.0, abs=1e-8)
        assert rep.sharp_constant_used == GN1_CONSTANT
        assert rep.test_field_id == "Q"

    def test_gn2_equality_at_psi(self, psi):
        assert gn2_check(psi).ratio == pytest.approx(1.0, abs=1e-5)

    def test_gn2_at_Q(self, Q):
        assert gn2_check(Q).ratio == pytest.approx(GN2_RATIO_AT_Q, abs=1e-8)

    def test_gaussian_ratios_below_one(self, gaussian):
        assert gn1_check(gaussian).ratio < 1
        assert gn2_check(gaussian).ratio < 1

    @pytest.mark.parametrize("check", [gn1_check, gn2_check])
    def test_degenerate_fields(self, grid, check):
        with pytest.raises(DegenerateFieldError):
            check(Field.zeros(grid))
        with pytest.raises(DegenerateFieldError):
            check(Field.from_function(grid, lambda x: 0 * x + 1.0))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.3, 3.0), st.floats(0.1, 10.0))
    def test_ratios_invariant_under_scaling(self, seed, lam, amp):
        grid = make_grid(80, 2048)
        rng = np.random.default_rng(seed)
        x0 = rng.uniform(-2, 2)
        f = Field.from_function(grid, lambda x: amp * np.exp(-((lam * (x - x0)) ** 2) / 2))
        g = Field.from_function(grid, lambda x: np.exp(-x**2 / 2))
        for ineq in ("gn1", "gn2"):
            assert weinstein_ratio(f, ineq) == pytest.approx(weinstein_ratio(g, ineq), rel=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_fields_obey_both(self, seed):
        v = random_smooth_field(make_grid(), np.random.default_rng(seed))
        assert gn1_check(v).ratio <= 1 + 1e-9
        assert gn2_check(v).ratio <= 1 + 1e-9


class TestShapeFamily:
    def test_contains_Q(self, grid):
        f = Field(grid, shape_profile(grid.x, math.sqrt(2), 0.5, 0.75))
        assert weinstein_ratio(f, "gn1") == pytest.approx(GN1_CONSTANT, rel=1e-8)

    def test_contains_psi(self, psi):
        f = Field(psi.grid, shape_profile(psi.grid.x, 1e-8, 0.5, 0.5))
        assert weinstein_ratio(f, "gn2") == pytest.approx(C_GN, rel=1e-5)


@pytest.mark.slow
class TestSharpConstantSearch:
    def test_gn1(self):
        est = maximize_weinstein("gn1")
        assert est.converged
        assert est.constant == pytest.approx(4 / math.pi**2, abs=1e-6)

    def test_gn2(self):
        assert estimate_sharp_constant("gn2") == pytest.approx(C_GN, abs=1e-5)

    def test_unknown_inequality(self):
        with pytest.raises(ValueError):
            maximize_weinstein("gn3")
