"""Acceptance battery: one test (and one printed verdict line) per criterion.

Run `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines;
without -s they still appear for any failing criterion.
"""

import math
from fractions import Fraction
from functools import partial

import pytest

from pvi_periods import suites
from pvi_periods.curve import (
    Cycle,
    HyperCurve,
    IntegrandSpec,
    PeriodEngine,
    build_contour,
    circle_path,
    continue_v,
)
from pvi_periods.errors import PoleEncountered
from pvi_periods.numerics import DEFAULT_DIFF2, DiffSpec, central_derivative
from pvi_periods.painleve6 import (
    PVI_18,
    PviFamily,
    PviParams,
    _pq_values,
    hypergeometric_residual,
    pq_relation_residual,
    pq_system_residual,
    pvi_residual,
)
from pvi_periods.reference import (
    agm_ellipk,
    hitchin_y,
    jacobi_theta,
    kk_y,
    mu_from_x,
    picard_okamoto_y,
    picard_y0,
    reference_step,
    segment_period,
    x_from_mu,
)
from pvi_periods.schlesinger import (
    case1_coefficients,
    case2_coefficients,
    epd_potential,
    separable_solution_check,
    sum_residual,
    tau_value,
    verify_pde,
    verify_tau,
    verify_zero_relation,
)

# Richardson finite differences with base step h = 1e-5 for the PDE checks.
PDE_DIFF = DiffSpec(h=1e-5, levels=2)

GRID19 = suites.grid_points(0.05, 0.95, 19)
COMPLEX_XS = (0.3 + 0.2j, 0.6 - 0.25j)
CYCLES4 = ((1, 0), (0, 1), (1, 1), (2, -1))
CASE1_NS = (-3, -1, 1, 3)

PICARD_PVI = PviParams(Fraction(0), Fraction(0), Fraction(0), Fraction(1, 2))


def _cycles_for(genus):
    basis_first = Cycle.basis(1, genus)
    basis_last = Cycle.basis(2 * genus, genus)
    mixed = Cycle((1, -1) if genus == 1 else (1, -1, 2, 0))
    return (basis_first, basis_last, mixed)


def _seeded_curve(genus, first_at_zero=False):
    return suites.random_curve(genus, seed=40 + genus, first_at_zero=first_at_zero)


class Gate:
    """Collects (residual, tol) pairs and prints one verdict line."""

    def __init__(self):
        self.items = []
        self.notes = []

    def add(self, residual, tol, what=""):
        self.items.append((float(residual), float(tol), what))

    def note(self, text):
        self.notes.append(text)

    def verdict(self, number, label):
        assert self.items, f"criterion {number}: no checks ran"
        worst = max(self.items, key=lambda it: it[0] / it[1])
        ok = all(r < t for r, t, _ in self.items)
        for note in self.notes:
            print(f"    note: {note}")
        tag = "PASS" if ok else "FAIL"
        detail = f"{len(self.items)} checks, worst {worst[0]:.3e} vs gate {worst[1]:g}"
        if worst[2]:
            detail += f" at {worst[2]}"
        print(f"[{tag}] criterion {number:>2}: {label} — {detail}")
        assert ok, f"criterion {number}: {label} — {detail}"


def _stencil_triple(yfn, x, h1=1e-4, h2=6e-3):
    step1 = DiffSpec(h=h1 * reference_step(x), levels=3, scale_mode="absolute")
    step2 = DiffSpec(h=h2 * reference_step(x), levels=2, scale_mode="absolute")
    y = yfn(x)
    yp, _ = central_derivative(yfn, x, k=1, spec=step1)
    ypp, _ = central_derivative(yfn, x, k=2, spec=step2)
    return y, yp, ypp


def _reference_residual(yfn, x, params, h2=6e-3):
    y, yp, ypp = _stencil_triple(yfn, x, h2=h2)
    return abs(pvi_residual(x, y, yp, ypp, params))


def test_criterion_01_case1_schlesinger_pde():
    gate = Gate()
    for genus in (1, 2):
        curve = _seeded_curve(genus)
        for n in CASE1_NS:
            for cyc in _cycles_for(genus):
                rep = verify_pde(
                    partial(case1_coefficients, cycle=cyc, n=n), curve, diff=PDE_DIFF
                )
                gate.add(rep.max_residual, 1e-6, f"g={genus} n={n} cycle={cyc.coefficients}")
    gate.verdict(1, "Case 1 Schlesinger PDE residuals")


def test_criterion_02_case2_schlesinger_pde():
    gate = Gate()
    for genus in (1, 2):
        curve = _seeded_curve(genus, first_at_zero=True)
        for cyc in _cycles_for(genus):
            rep = verify_pde(partial(case2_coefficients, cycle=cyc), curve, diff=PDE_DIFF)
            gate.add(rep.max_residual, 1e-6, f"g={genus} cycle={cyc.coefficients}")
    gate.verdict(2, "Case 2 Schlesinger PDE residuals (u_1 = 0)")


def test_criterion_03_sum_rule():
    gate = Gate()
    for genus in (1, 2):
        curve = _seeded_curve(genus, first_at_zero=True)
        for cyc in _cycles_for(genus):
            for n in CASE1_NS:
                sol = case1_coefficients(curve, cyc, n)
                gate.add(sum_residual(sol), 1e-10, f"case1 g={genus} n={n}")
            sol = case2_coefficients(curve, cyc)
            gate.add(sum_residual(sol), 1e-10, f"case2 g={genus}")
    gate.verdict(3, "sum rule |sum a_i| = 0")


def test_criterion_04_zero_relation():
    gate = Gate()
    for genus in (1, 2):
        curve = _seeded_curve(genus)
        for cyc in _cycles_for(genus):
            gate.add(verify_zero_relation(curve, cyc), 1e-10, f"g={genus}")
    gate.verdict(4, "zero relation (2g-1)p_0 + sum u_i q_i = 0")


def test_criterion_05_epd_potential():
    gate = Gate()
    for genus in (1, 2):
        curve = _seeded_curve(genus, first_at_zero=True)
        cyc = _cycles_for(genus)[2]
        for case, sol in (
            ("case1", case1_coefficients(curve, cyc, -1)),
            ("case2", case2_coefficients(curve, cyc)),
        ):
            rep = epd_potential(sol)
            gate.add(rep.max_gradient_residual, 1e-6, f"{case} g={genus} gradient")
            gate.add(rep.max_cross_residual, 1e-5, f"{case} g={genus} cross")
        gate.add(
            separable_solution_check(curve.branch_points, (2.5, 0.5 + 0.8j)),
            1e-6,
            f"separable g={genus}",
        )
    gate.verdict(5, "EPD potential: gradient, cross-derivative, separable solution")


def test_criterion_06_tau_three_way():
    gate = Gate()
    configs = (
        ("case1", 1, -1),
        ("case1", 1, 1),
        ("case1", 2, 1),
        ("case2", 1, None),
    )
    for case, genus, n in configs:
        curve = _seeded_curve(genus, first_at_zero=True)
        cyc = _cycles_for(genus)[2]
        sol = (
            case1_coefficients(curve, cyc, n) if case == "case1" else case2_coefficients(curve, cyc)
        )
        rep = verify_tau(sol)
        gate.add(rep.max_fd_vs_analytic, 1e-6, f"{case} g={genus} fd-vs-analytic")
        gate.add(rep.max_analytic_vs_contour, 1e-8, f"{case} g={genus} analytic-vs-contour")
        tau0 = tau_value(case, curve, n=n)
        gate.add(0.0 if abs(tau0) > 1e-12 else math.inf, 1.0, f"{case} g={genus} tau nonzero")
    gate.verdict(6, "tau log-derivative three-way agreement and non-vanishing")


def _family_params_displayed(n):
    return (
        Fraction(9 * n * n + 12 * n + 4, 8),
        Fraction(-n * n, 8),
        Fraction(n * n, 8),
        Fraction(4 - n * n, 8),
    )


def test_criterion_07_pvi_residuals_on_grid():
    gate = Gate()
    families = [("case1", -1), ("case2", None)] + [("case1", n) for n in (1, 2, 3, -2, -3)]
    xs = GRID19 + COMPLEX_XS
    poles = 0
    evaluated = 0
    for tag, n in families:
        fam = PviFamily(tag, 1, 0, n)
        if tag == "case1":
            assert fam.params.as_tuple() == _family_params_displayed(n)
        else:
            assert fam.params.as_tuple() == PVI_18.as_tuple()
        for c1, c2 in CYCLES4:
            fam = PviFamily(tag, c1, c2, n)

            def residual_at(x, fam=fam):
                try:
                    y, yp, ypp = fam.evaluate(x)
                    return abs(pvi_residual(x, y, yp, ypp, fam.params))
                except PoleEncountered:
                    return None

            for x, res in zip(xs, suites._map_over(residual_at, xs)):
                if res is None:
                    poles += 1
                    continue
                evaluated += 1
                gate.add(res, 1e-6, f"{tag} n={n} cycle=({c1},{c2}) x={x}")
    gate.note(f"{evaluated} points evaluated, {poles} movable poles skipped")
    gate.note("n=2 is the degenerate family: every point is a logged pole skip")
    gate.verdict(7, "PVI residuals of both families on the 19+2-point grid, 4 cycles")


def test_criterion_08_closed_form_derivatives():
    gate = Gate()
    xs = GRID19 + COMPLEX_XS
    poles = 0
    for tag, n in (("case1", -1), ("case1", 3), ("case2", None)):
        fam = PviFamily(tag, 1, 1, n)

        def check_at(x, fam=fam, tag=tag, n=n):
            try:
                y, yp, ypp = fam.evaluate(x)
                y_at = suites._frozen_y(tag, n, 1, 1, x, suites.DEFAULT_QUAD)
                spec1, spec2 = suites._pvi_fd_specs(x)
                fd1, _ = central_derivative(y_at, x, k=1, spec=spec1)
                fd2, _ = central_derivative(y_at, x, k=2, spec=spec2)
                return abs(yp - fd1), abs(ypp - fd2)
            except PoleEncountered:
                return None

        for x, out in zip(xs, suites._map_over(check_at, xs)):
            if out is None:
                poles += 1
                continue
            gate.add(out[0], 1e-6, f"{tag} n={n} y' at x={x}")
            gate.add(out[1], 1e-6, f"{tag} n={n} y'' at x={x}")
    gate.note(f"{poles} stencils skipped at movable poles")

    # The general-n first-derivative numerator reduces to the n = -1 display
    # exactly: rational-coefficient identity at symbolic-free rational points.
    a1, a2 = Fraction(2, 3), Fraction(5, 7)
    for x in (Fraction(3, 10), Fraction(1, 2), Fraction(7, 9)):
        n = Fraction(-1)
        general = n * (x - 1) * a2**2 - n * x * a1**2 - 2 * (n + 1) * a1 * a2
        display = x * a1**2 - (x - 1) * a2**2
        gate.add(0.0 if general == display else math.inf, 1.0, f"reduction at x={x}")
    gate.verdict(8, "closed-form y', y'' vs stencils; general-n reduction at n=-1")


def test_criterion_09_picard_fuchs():
    gate = Gate()
    for c1, c2 in ((1, 0), (0, 1), (1, 1)):
        for x in (0.3, 0.6):
            gate.add(
                abs(hypergeometric_residual("p", x, c1, c2)), 1e-6, f"p-ode ({c1},{c2}) x={x}"
            )
            gate.add(
                abs(hypergeometric_residual("q", x, c1, c2)), 1e-6, f"q-ode ({c1},{c2}) x={x}"
            )
            gate.add(abs(pq_relation_residual(x, c1, c2)), 1e-6, f"q=2xp' ({c1},{c2}) x={x}")
            p_at, q_at = _pq_values(x, c1, c2, suites.DEFAULT_QUAD)
            pp, _ = central_derivative(p_at, x, k=1, spec=DEFAULT_DIFF2)
            qp, _ = central_derivative(q_at, x, k=1, spec=DEFAULT_DIFF2)
            r1, r2 = pq_system_residual(
                Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4), p_at(x), pp, q_at(x), qp, x
            )
            gate.add(abs(r1), 1e-6, f"pq-system r1 ({c1},{c2}) x={x}")
            gate.add(abs(r2), 1e-6, f"pq-system r2 ({c1},{c2}) x={x}")
    gate.verdict(9, "Picard-Fuchs equations, q = 2xp', triangular pq-system")


def test_criterion_10_reference_solutions():
    gate = Gate()
    for x in (0.2, 0.5, 0.7):
        gate.add(
            _reference_residual(lambda t: picard_y0(t, 1 / 3, 1 / 5), x, PICARD_PVI),
            1e-5,
            f"picard x={x}",
        )
        gate.add(
            _reference_residual(lambda t: picard_okamoto_y(t, 1 / 3, 1 / 5)[0], x, PVI_18),
            1e-5,
            f"okamoto x={x}",
        )
        gate.add(
            _reference_residual(lambda t: hitchin_y(t, 0.3, 0.1), x, PVI_18),
            1e-5,
            f"hitchin x={x}",
        )
    for x in (0.3, 0.6):
        gate.add(
            _reference_residual(lambda t: kk_y(t, 0.17, 0.29), x, PVI_18, h2=8e-3),
            1e-4,
            f"kk x={x}",
        )
        agm = 2.0 * agm_ellipk(x)
        gate.add(
            abs(segment_period(x) - agm) / max(1.0, abs(agm)), 1e-9, f"segment-agm x={x}"
        )
    for x in (0.12, 0.5, 0.94, 0.3 + 0.4j):
        mu = mu_from_x(x).mu
        quartic = abs(
            jacobi_theta(2, 0, mu) ** 4 + jacobi_theta(4, 0, mu) ** 4 - jacobi_theta(3, 0, mu) ** 4
        )
        gate.add(quartic, 1e-12, f"quartic x={x}")
        gate.add(abs(x_from_mu(mu) - x), 1e-10, f"round-trip x={x}")
    gate.verdict(10, "reference solutions and modular identities")


def test_criterion_11_engine_health():
    gate = Gate()
    for pts in [(0, 1, 0.3), (0, 1, 0.3 + 0.2j), (0, 1, 0.05), (0, 1.1, 2.3, 3.2, 4.5)]:
        cur = HyperCurve(pts)
        e1 = PeriodEngine(cur)
        e2 = PeriodEngine(cur, margin_scale=2.0)
        for k in range(1, 2 * cur.genus + 1):
            a, _ = e1.basis_period(k, IntegrandSpec(n=-1))
            b, _ = e2.basis_period(k, IntegrandSpec(n=-1))
            gate.add(abs(a - b) / max(1.0, abs(a)), 1e-9, f"deformation {pts} k={k}")
    legendre = HyperCurve((0, 1, 0.3))
    one = continue_v(legendre, circle_path(0.0, 0.1, curve=legendre))
    pair = continue_v(legendre, build_contour(legendre, 1))
    all3 = continue_v(legendre, circle_path(0.4, 5.0, curve=legendre))
    gate.add(abs(one[-1] / one[0] + 1), 1e-12, "monodromy: one point flips")
    gate.add(abs(pair[-1] / pair[0] - 1), 1e-12, "monodromy: pair preserves")
    gate.add(abs(all3[-1] / all3[0] + 1), 1e-12, "monodromy: three points flip")
    exact = pvi_residual(Fraction(2), Fraction(3), Fraction(0), Fraction(0), PVI_18)
    gate.add(0.0 if exact == Fraction(-253, 192) else math.inf, 1.0, "exact rational residual")
    numeric = pvi_residual(2.0, 3.0, 0.0, 0.0, PVI_18)
    gate.add(abs(numeric - float(Fraction(-253, 192))), 1e-12, "float vs exact residual")
    gate.verdict(11, "engine health: deformation invariance, monodromy parity, exact residual")
