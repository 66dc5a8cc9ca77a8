from fractions import Fraction

import pytest

from pvi_periods.curve import Cycle, HyperCurve, IntegrandSpec, PeriodEngine
from pvi_periods.errors import DomainError, PoleEncountered
from pvi_periods.numerics import DEFAULT_DIFF2, DEFAULT_QUAD, DiffSpec, central_derivative
from pvi_periods.painleve6 import (
    PVI_18,
    PqState,
    PviFamily,
    PviParams,
    hypergeometric_residual,
    pq_relation_residual,
    pq_system_residual,
    pvi_params_from_alphas,
    pvi_residual,
    y_case1,
    y_case2,
)
from pvi_periods.schlesinger import case2_coefficients

GRID = [0.05 * k for k in range(1, 20)]
COMPLEX_XS = [0.3 + 0.4j, -0.2 + 0.7j]
CYCLES = [(1, 0), (0, 1), (1, 1), (2, -1)]

FD1 = DiffSpec(h=1e-3, levels=2, scale_mode="absolute")
FD2 = DiffSpec(h=5e-3, levels=2, scale_mode="absolute")


def legendre_periods(x, cycle, n):
    """Recompute (a_1, a_2, a_3) directly from a fresh engine."""
    engine = PeriodEngine(HyperCurve((0.0, 1.0, complex(x))))
    return tuple(
        engine.period(
            Cycle(cycle), IntegrandSpec(n=n, pole_flags=tuple(int(q == i) for q in range(3)))
        )[0]
        for i in range(3)
    )


class TestParameterMap:
    def test_eigenvalue_map_examples(self):
        params = pvi_params_from_alphas(
            Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4), Fraction(1, 4)
        )
        assert params.as_tuple() == (
            Fraction(1, 8),
            Fraction(-1, 8),
            Fraction(1, 8),
            Fraction(3, 8),
        )

    @pytest.mark.parametrize(
        "n, expected",
        [
            (1, (Fraction(25, 8), Fraction(-1, 8), Fraction(1, 8), Fraction(3, 8))),
            (3, (Fraction(121, 8), Fraction(-9, 8), Fraction(9, 8), Fraction(-5, 8))),
            (-2, (Fraction(2), Fraction(-1, 2), Fraction(1, 2), Fraction(0))),
            (-3, (Fraction(49, 8), Fraction(-9, 8), Fraction(9, 8), Fraction(-5, 8))),
        ],
    )
    def test_family_one_quadruples(self, n, expected):
        assert PviFamily("case1", 1, 0, n=n).params.as_tuple() == expected

    def test_family_one_at_n_minus_one_meets_family_two(self):
        assert PviFamily("case1", 1, 0, n=-1).params == PVI_18
        assert PviFamily("case2", 1, 0).params == PVI_18

    def test_reference_tags_share_the_18_quadruple(self):
        for tag in ("picard-okamoto", "hitchin", "kk"):
            assert PviFamily(tag).params == PVI_18

    def test_family_validation(self):
        with pytest.raises(DomainError):
            PviFamily("case3")
        with pytest.raises(DomainError):
            PviFamily("case1", 0, 0, n=1)
        with pytest.raises(DomainError):
            PviFamily("case1", 1, 1)
        with pytest.raises(DomainError):
            PviFamily("case1", 1, 1, n=0)

    def test_reference_tags_are_not_cycle_evaluated(self):
        with pytest.raises(DomainError):
            PviFamily("hitchin").evaluate(0.3)


class TestResidualFunction:
    def test_exact_rational_spot_value(self):
        r = pvi_residual(Fraction(2), Fraction(3), Fraction(0), Fraction(0), PVI_18)
        assert r == Fraction(-253, 192)

    def test_exact_self_consistency(self):
        x, y, yp = Fraction(3, 7), Fraction(5, 2), Fraction(-1, 3)
        r0 = pvi_residual(x, y, yp, Fraction(0), PVI_18)
        assert pvi_residual(x, y, yp, -r0, PVI_18) == 0

    def test_float_matches_rational(self):
        exact = pvi_residual(Fraction(2), Fraction(3), Fraction(0), Fraction(0), PVI_18)
        approx = pvi_residual(2.0, 3.0, 0.0, 0.0, PVI_18)
        assert abs(approx - float(exact)) < 1e-12

    def test_fixed_singular_arguments_rejected(self):
        with pytest.raises(DomainError):
            pvi_residual(0, 0.5, 0, 0, PVI_18)
        with pytest.raises(DomainError):
            pvi_residual(1, 0.5, 0, 0, PVI_18)

    @pytest.mark.parametrize("y", [Fraction(1), 1 + 1e-12, 1e-13, 2 + 1e-13])
    def test_solution_value_on_singular_point_signals_pole(self, y):
        with pytest.raises(PoleEncountered):
            pvi_residual(2, y, 0, 0, PVI_18)


class TestFamilyOneSolution:
    def test_both_displayed_forms_of_y_agree(self):
        # x a_1 / (x a_1 + (x-1) a_2) = -x a_1 / (x a_3 + a_2) via sum a_i = 0
        for n in (1, -1, 3):
            a1, a2, a3 = legendre_periods(0.35, (1, 1), n)
            x = 0.35
            y, _, _ = y_case1(x, 1, 1, n)
            assert abs(y - x * a1 / (x * a1 + (x - 1) * a2)) < 1e-12
            assert abs(y - (-x * a1 / (x * a3 + a2))) < 1e-12

    def test_closed_second_derivative_matches_flow_route_at_n_minus_one(self):
        x, n = 0.4, -1
        a1, a2, a3 = legendre_periods(x, (2, -1), n)
        d = x * a1 + (x - 1) * a2
        num = n * (x - 1) * a2**2 - n * x * a1**2 - 2 * (n + 1) * a1 * a2
        a1p = 0.5 * n * (a1 - a3) / x
        a2p = 0.5 * n * (a2 - a3) / (x - 1)
        nump = (
            n * a2**2
            + 2 * n * (x - 1) * a2 * a2p
            - n * a1**2
            - 2 * n * x * a1 * a1p
            - 2 * (n + 1) * (a1p * a2 + a1 * a2p)
        )
        dp = a1 + x * a1p + a2 + (x - 1) * a2p
        flow = (nump * d - 2 * num * dp) / (2 * d**3)
        _, _, ypp = y_case1(x, 2, -1, n)
        assert abs(ypp - (-a1 * a2 * a3 / (2 * d**3))) < 1e-12
        assert abs(ypp - flow) < 1e-9

    @pytest.mark.parametrize("n, cycle", [(1, (1, 1)), (3, (2, -1)), (-1, (1, 0)), (-3, (0, 1))])
    def test_derivatives_match_finite_differences(self, n, cycle):
        x = 0.35

        def y_at(t):
            return y_case1(t, *cycle, n)[0]

        y, yp, ypp = y_case1(x, *cycle, n)
        fd1, _ = central_derivative(y_at, x, k=1, spec=FD1)
        fd2, _ = central_derivative(y_at, x, k=2, spec=FD2)
        assert abs(yp - fd1) < 1e-6
        assert abs(ypp - fd2) < 1e-6

    def test_cycle_rescaling_leaves_the_solution_fixed(self):
        for lam in (2, -3):
            base = y_case1(0.45, 1, -1, 3)
            scaled = y_case1(0.45, lam, -lam, 3)
            for u, w in zip(base, scaled):
                assert abs(u - w) < 1e-9

    def test_even_positive_n_is_degenerate(self):
        with pytest.raises(PoleEncountered):
            y_case1(0.4, 1, 1, 2)

    def test_fixed_singular_x_rejected(self):
        with pytest.raises(DomainError):
            y_case1(0.0, 1, 1, 1)
        with pytest.raises(DomainError):
            y_case1(1.0, 1, 1, 1)

    def test_solution_crossing_a_singular_value_signals_pole(self):
        # at x = 2 the (1, 1)-cycle solution for n = -2 passes through y = 1
        y, yp, ypp = y_case1(2.0, 1, 1, -2)
        assert abs(y - 1.0) < 1e-12
        with pytest.raises(PoleEncountered):
            pvi_residual(2.0, y, yp, ypp, PviFamily("case1", 1, 1, n=-2).params)


class TestFamilyTwoSolution:
    def test_simplified_coefficients_match_the_constructor(self):
        x = 0.35
        engine = PeriodEngine(HyperCurve((0.0, 1.0, x)))
        for cycle in CYCLES:
            sol = case2_coefficients(HyperCurve((0.0, 1.0, x)), Cycle(cycle), engine=engine)
            a1, a2, _ = sol.a
            y, _, _ = y_case2(x, *cycle)
            assert abs(y - x * a1 / (x * a1 + (x - 1) * a2)) < 1e-10

    def test_derivatives_match_finite_differences(self):
        x = 0.55

        def y_at(t):
            return y_case2(t, 1, 1)[0]

        y, yp, ypp = y_case2(x, 1, 1)
        fd1, _ = central_derivative(y_at, x, k=1, spec=FD1)
        fd2, _ = central_derivative(y_at, x, k=2, spec=FD2)
        assert abs(yp - fd1) < 1e-6
        assert abs(ypp - fd2) < 1e-6

    def test_cycle_rescaling_leaves_the_solution_fixed(self):
        base = y_case2(0.25, 1, 2)
        scaled = y_case2(0.25, -2, -4)
        for u, w in zip(base, scaled):
            assert abs(u - w) < 1e-9

    def test_fixed_singular_x_rejected(self):
        with pytest.raises(DomainError):
            y_case2(0.0, 1, 1)


class TestResidualSweeps:
    @pytest.mark.parametrize("n", [1, 3, -2, -3])
    def test_family_one_solves_the_equation(self, n):
        params = PviFamily("case1", 1, 1, n=n).params
        evaluated = skipped = 0
        for cycle in CYCLES:
            for x in GRID + COMPLEX_XS:
                try:
                    y, yp, ypp = y_case1(x, *cycle, n)
                    r = abs(pvi_residual(x, y, yp, ypp, params))
                except PoleEncountered:
                    skipped += 1
                    continue
                evaluated += 1
                assert r < 1e-6, f"cycle {cycle}, x = {x}: residual {r:.3e}"
        total = len(CYCLES) * (len(GRID) + len(COMPLEX_XS))
        assert evaluated >= total - 2 and skipped <= 2

    def test_family_one_even_positive_n_always_signals_pole(self):
        for x in (0.2, 0.5, 0.8):
            with pytest.raises(PoleEncountered):
                y_case1(x, 1, 1, 2)

    def test_family_two_solves_the_equation(self):
        evaluated = 0
        for cycle in CYCLES:
            for x in GRID + COMPLEX_XS:
                y, yp, ypp = y_case2(x, *cycle)
                r = abs(pvi_residual(x, y, yp, ypp, PVI_18))
                evaluated += 1
                assert r < 1e-6, f"cycle {cycle}, x = {x}: residual {r:.3e}"
        assert evaluated == len(CYCLES) * (len(GRID) + len(COMPLEX_XS))

    def test_family_evaluate_round_trip(self):
        fam = PviFamily("case2", 1, 1)
        y, yp, ypp = fam.evaluate(0.3)
        assert abs(pvi_residual(0.3, y, yp, ypp, fam.params)) < 1e-8


class TestPeriodDifferentialEquations:
    @pytest.mark.parametrize("cycle, x", [((1, 0), 0.3), ((0, 1), 0.6), ((1, 1), 0.35 + 0.2j)])
    def test_p_period_satisfies_its_equation(self, cycle, x):
        assert abs(hypergeometric_residual("p", x, *cycle)) < 1e-6

    @pytest.mark.parametrize("cycle, x", [((1, 0), 0.3), ((0, 1), 0.6), ((1, 1), 0.35 + 0.2j)])
    def test_q_period_satisfies_its_equation(self, cycle, x):
        assert abs(hypergeometric_residual("q", x, *cycle)) < 1e-6

    def test_unknown_equation_label_rejected(self):
        with pytest.raises(DomainError):
            hypergeometric_residual("r", 0.3, 1, 0)

    @pytest.mark.parametrize("cycle, x", [((1, 0), 0.3), ((0, 1), 0.6), ((2, -1), 0.45)])
    def test_q_is_twice_x_times_p_prime(self, cycle, x):
        assert pq_relation_residual(x, *cycle) < 1e-6

    def test_periods_solve_the_first_order_system(self):
        from pvi_periods.painleve6 import _pq_values

        p_at, q_at = _pq_values(0.3, 1, 1, DEFAULT_QUAD)
        p, q = p_at(0.3), q_at(0.3)
        pp, _ = central_derivative(p_at, 0.3, k=1, spec=DEFAULT_DIFF2)
        qp, _ = central_derivative(q_at, 0.3, k=1, spec=DEFAULT_DIFF2)
        r1, r2 = pq_system_residual(
            Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4), p, pp, q, qp, 0.3
        )
        assert abs(r1) < 1e-6
        assert abs(r2) < 1e-6

    def test_zero_state_is_an_exact_solution(self):
        r1, r2 = pq_system_residual(
            Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4), 0, 0, 0, 0, Fraction(1, 3)
        )
        assert r1 == 0 and r2 == 0

    def test_system_rejects_fixed_singular_x(self):
        with pytest.raises(DomainError):
            pq_system_residual(1, 1, 1, 0, 0, 0, 0, 0)

    def test_state_delta_is_the_eigenvalue_sum(self):
        state = PqState(Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4), 0.0, 0.0)
        assert state.delta == Fraction(-1, 4)


class TestEliminationIdentity:
    """The second-order operators annihilating p and q are forced, coefficient
    by coefficient, by the first-order system; the checks run in exact
    rational arithmetic on an arbitrary cubic, so they hold independently of
    any period computation."""

    ALPHA, BETA, GAMMA = Fraction(1, 3), Fraction(2, 5), Fraction(-1, 7)

    @staticmethod
    def cubic(x):
        p = x**3 - 2 * x + 1
        return p, 3 * x**2 - 2, 6 * x

    def p_operator(self, x, p, pp, ppp, alpha, beta, gamma, drop_beta=False):
        linear = 1 - 4 * gamma - 2 * alpha - (0 if drop_beta else 2 * beta)
        return (
            x * (x - 1) * ppp
            + pp * ((2 * gamma + 2 * alpha - 1) + x * linear)
            + 4 * p * (gamma**2 + gamma * (alpha + beta))
        )

    def test_p_operator_is_the_eliminant_of_the_system(self):
        a, b, g = self.ALPHA, self.BETA, self.GAMMA
        for x in (Fraction(2, 7), Fraction(-3, 5), Fraction(9, 4)):
            p, pp, ppp = self.cubic(x)
            q = (x * pp - 2 * (g + a) * p) / (2 * a)
            qp = (pp + x * ppp - 2 * (g + a) * pp) / (2 * a)
            lhs = self.p_operator(x, p, pp, ppp, a, b, g)
            rhs = 2 * a * ((x - 1) * qp - 2 * ((g + b) * q + b * p))
            assert lhs == rhs

    def test_dropping_the_beta_term_breaks_the_identity(self):
        a, b, g = self.ALPHA, self.BETA, self.GAMMA
        x = Fraction(2, 7)
        p, pp, ppp = self.cubic(x)
        q = (x * pp - 2 * (g + a) * p) / (2 * a)
        qp = (pp + x * ppp - 2 * (g + a) * pp) / (2 * a)
        rhs = 2 * a * ((x - 1) * qp - 2 * ((g + b) * q + b * p))
        assert self.p_operator(x, p, pp, ppp, a, b, g, drop_beta=True) != rhs

    def test_p_operator_specializes_to_the_period_equation(self):
        a, b, g = Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4)
        assert 2 * g + 2 * a - 1 == -1
        assert 1 - 4 * g - 2 * a - 2 * b == 2
        assert 4 * (g**2 + g * (a + b)) == Fraction(1, 4)

    def test_q_operator_specializes_to_the_period_equation(self):
        a, b, g = Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4)
        # eliminating p instead of q gives
        # x(x-1) q'' + q' [x(1 - 4g - 2a - 2b) + 2(g + a)] + 4 g (a + b + g) q
        assert 1 - 4 * g - 2 * a - 2 * b == 2 and 2 * (g + a) == 0
        assert 4 * g * (a + b + g) == Fraction(1, 4)

    def test_q_eliminant_from_the_system(self):
        a, b, g = self.ALPHA, self.BETA, self.GAMMA
        for x in (Fraction(2, 7), Fraction(-3, 5)):
            q, qp, qpp = self.cubic(x)
            p = ((x - 1) * qp - 2 * (g + b) * q) / (2 * b)
            pp = ((x - 1) * qpp + qp - 2 * (g + b) * qp) / (2 * b)
            lhs = (
                x * (x - 1) * qpp
                + qp * (x * (1 - 4 * g - 2 * a - 2 * b) + 2 * (g + a))
                + 4 * g * (a + b + g) * q
            )
            rhs = 2 * b * (x * pp - 2 * ((g + a) * p + a * q))
            assert lhs == rhs
