import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dnls_lab import functionals as fn
from dnls_lab.random_fields import random_smooth_field
from dnls_lab.spectral import Field, make_grid
from dnls_lab.threshold import (
    BoostBoundaryWarning,
    RegimeError,
    alpha_from_invariants,
    boost,
    boost_radicand,
    boosted_energy_identity,
    bracket_floor,
    cubic_analyze,
    cubic_b,
    cubic_F,
    fn_bounds,
    gwp_verdict,
    optimal_bound_rhs,
    f_lower_constant,
    momentum_bound_rhs,
    momentum_identity,
    optimal_alpha,
    regime_of,
    remainder_Rn,
    threshold_constant,
)
from tests.conftest import boosted_gaussian

PI = math.pi
# mpmath oracle values for Q
RADICAND_Q = 0.09806397190738484      # 1 - pi^4/108
ALPHA_Q = 0.2214316733299291
R_Q = 8.635864952219516
SLACK_Q_ALPHA1 = 3.295631180452831

ROOTS = {
    4.2: (7.140537795052189, 10.26538236056204),
    4.5: (6.643363664685165, 11.73585227544559),
    6.0: (5.816908217711081, 17.39162578197306),
    8.0: (5.468077266811803, 24.12228139140504),
}


class TestConstants:
    def test_threshold_is_four_pi(self):
        assert threshold_constant() == pytest.approx(4 * PI, abs=1e-12)

    def test_floors(self):
        assert bracket_floor() == pytest.approx(4.83680, abs=1e-5)
        assert f_lower_constant() == pytest.approx(2.19927, abs=1e-5)


class TestGroundStateBounds:
    def test_radicand_and_regime(self, Q):
        f = fn.f_functional(Q)
        assert boost_radicand(f) == pytest.approx(RADICAND_Q, abs=1e-8)
        assert boost_radicand(f) == pytest.approx(1 - PI**4 / 108, abs=1e-8)
        assert regime_of(f) == "boost_regime"

    def test_optimal_alpha(self, Q):
        assert optimal_alpha(Q) == pytest.approx(ALPHA_Q, abs=1e-8)

    def test_remainder(self, Q):
        assert remainder_Rn(Q) == pytest.approx(R_Q, abs=1e-7)

    def test_bound_at_unit_boost(self, Q):
        rep = momentum_bound_rhs(Q, 1.0, time_tag=0.0)
        assert rep.lhs == pytest.approx(0.0, abs=1e-14)
        assert rep.slack == pytest.approx(SLACK_Q_ALPHA1, abs=1e-8)
        assert rep.regime == "boost_regime"

    def test_closed_form_equals_bound_at_optimum(self, Q):
        rep = momentum_bound_rhs(Q, optimal_alpha(Q))
        assert optimal_bound_rhs(Q) == pytest.approx(rep.rhs, rel=1e-12)
        assert rep.slack >= 0

    def test_bracket(self, Q):
        lower, f, upper = fn_bounds(Q)
        assert lower <= f <= upper
        assert upper == pytest.approx(math.sqrt(2 * PI), abs=1e-8)


class TestBoostedGaussian:
    def test_example_values(self, grid):
        v = boosted_gaussian(grid, c=-2.0)
        rep = momentum_bound_rhs(v, 1.0)
        assert rep.lhs == pytest.approx(2 * math.sqrt(PI), abs=1e-10)
        assert rep.rhs == pytest.approx(4.556729505505535, abs=1e-10)
        assert rep.slack == pytest.approx(1.011821803694503, abs=1e-10)

    def test_small_field_is_subcritical(self, grid):
        v = boosted_gaussian(grid, c=0.0) * 0.3
        assert regime_of(fn.f_functional(v)) == "subcritical_bracket"
        with pytest.raises(RegimeError, match="subcritical_bracket"):
            optimal_alpha(v)


class TestErrors:
    def test_nonpositive_alpha(self, Q):
        for alpha in (0.0, -1.0):
            with pytest.raises(ValueError):
                momentum_bound_rhs(Q, alpha)

    def test_zero_field(self, grid):
        with pytest.raises(ValueError):
            momentum_bound_rhs(Field.zeros(grid), 1.0)

    def test_boundary_warns(self):
        f_edge = (16 * 4 * PI**2 / 27) ** 0.25
        with pytest.warns(BoostBoundaryWarning):
            assert alpha_from_invariants(2 * PI, f_edge, 1.0) == 0.0


class TestIdentities:
    def test_boost_zero_is_trivial(self, Q):
        assert boosted_energy_identity(Q, 0.0) == 0.0

    def test_boost_preserves_mass(self, Q):
        assert fn.mass(boost(Q, 0.7)) == pytest.approx(fn.mass(Q), rel=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-3.0, 3.0))
    def test_boosted_energy(self, seed, alpha):
        grid = make_grid()
        # boosts are exact on the grid only for wavenumbers on the lattice
        alpha = round(alpha / (2 * PI / grid.L)) * 2 * PI / grid.L
        v = random_smooth_field(grid, np.random.default_rng(seed))
        assert abs(boosted_energy_identity(v, alpha)) <= 1e-10 * max(1.0, fn.kinetic(v))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_momentum_identity(self, seed):
        v = random_smooth_field(make_grid(), np.random.default_rng(seed))
        assert abs(momentum_identity(v, fn.momentum_gauged(v))) <= 1e-12 * max(1.0, abs(fn.momentum_gauged(v)))

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_bound_and_bracket_on_random_fields(self, seed):
        v = random_smooth_field(make_grid(), np.random.default_rng(seed))
        assert momentum_bound_rhs(v, 1.0).slack >= -1e-9
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoostBoundaryWarning)
            try:
                alpha = optimal_alpha(v)
            except RegimeError:
                alpha = 0.0
        if alpha > 0:
            assert momentum_bound_rhs(v, alpha).slack >= -1e-9
        try:
            lower, f, upper = fn_bounds(v)
        except ValueError:
            return
        assert lower - 1e-9 <= f <= upper + 1e-9


class TestCubic:
    def test_double_root_at_four_pi(self):
        rep = cubic_analyze(4 * PI)
        assert abs(rep.F_at_two_thirds) <= 1e-12 * PI**3
        assert rep.double_root
        assert rep.X1 == rep.X2 == pytest.approx(8 * PI / 3, rel=1e-15)
        assert rep.gwp_verdict == "at_or_above"

    @pytest.mark.parametrize("mult", sorted(ROOTS))
    def test_roots_above_threshold(self, mult):
        rep = cubic_analyze(mult * PI)
        x1, x2 = ROOTS[mult]
        assert rep.X1 == pytest.approx(x1, rel=1e-10)
        assert rep.X2 == pytest.approx(x2, rel=1e-10)
        assert rep.bracket_ok
        assert bracket_floor() < rep.X1 < rep.X2 < rep.m0
        assert rep.F_at_two_thirds < 0

    def test_no_roots_below(self):
        rep = cubic_analyze(2 * PI)
        assert rep.F_at_two_thirds == pytest.approx(32 * PI**3 / 9, rel=1e-13)
        assert rep.X1 is None and rep.bracket_ok is None
        assert rep.gwp_verdict == "below_threshold"

    def test_verdict_flip(self):
        four_pi = 4 * PI
        assert gwp_verdict(four_pi * (1 - 1e-6))[0] == "below_threshold"
        assert gwp_verdict(four_pi)[0] == "at_or_above"
        assert gwp_verdict(four_pi * (1 + 1e-6))[0] == "at_or_above"
        # a mass printed to ten digits still reads as the threshold
        assert gwp_verdict(12.566370614) == ("at_or_above", True)

    def test_sign_at_two_thirds_tracks_threshold(self):
        for m0 in np.linspace(1, 30, 59):
            F = cubic_F(2 * m0 / 3, m0, cubic_b(m0))
            if abs(m0 - 4 * PI) > 1e-6:
                assert (F > 0) == (m0 < 4 * PI)

    def test_epsilon(self):
        rep = cubic_analyze(4 * PI, epsilon=1e-3)
        assert rep.F_at_two_thirds < 0 and not rep.double_root
        assert rep.X1 < 8 * PI / 3 < rep.X2

    @pytest.mark.parametrize("m0,eps", [(0.0, 0.0), (-1.0, 0.0), (4.0, -1.0), (1.0, 1e6)])
    def test_invalid_input(self, m0, eps):
        with pytest.raises(ValueError):
            cubic_analyze(m0, eps)
