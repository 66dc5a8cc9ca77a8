"""Upper-triangular rank-two Schlesinger solutions built from period integrals.

Two families are constructed over a hyperelliptic curve v^2 = prod (u - u_i):

* Case 1 (exponent n != 0): alpha_i = n/4 and a_i = oint v^n du/(u - u_i).
* Case 2 (first branch point pinned at 0): alpha = (1/4, -1/4, ..., -1/4)
  and a_i built from periods of du/v and du/((u - u_i) v).

Everything else in the module is verification machinery: finite-difference
checks of the coupled PDEs da_i/du_j = 2(alpha_j a_i - alpha_i a_j)/(u_j - u_i),
the potential f with a_i = df/du_i and its Euler-Poisson-Darboux structure,
the zero relation among the periods, and three independent computations of
d ln(tau)/du_j.  Finite differences always go through a PeriodEngine frozen on
the base curve so that perturbed-curve periods are smooth in the perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curve import (
    HyperCurve,
    IntegrandSpec,
    PeriodEngine,
    circle_path,
    integrate_contour,
)
from .errors import DomainError, NumericsError
from .numerics import (
    DEFAULT_DIFF,
    DEFAULT_DIFF_MIXED,
    DEFAULT_QUAD,
    central_derivative,
    mixed_second_derivative,
)

__all__ = [
    "TriangularSolution",
    "ResidueMatrices",
    "EpdConfig",
    "case1_coefficients",
    "case2_coefficients",
    "residue_matrices",
    "verify_pde",
    "epd_potential",
    "separable_solution_check",
    "verify_zero_relation",
    "tau_value",
    "verify_tau",
    "sum_residual",
    "PdeReport",
    "EpdReport",
    "TauReport",
]

_SUM_TOL = 1e-10


def _scale(a):
    """Normalization used by every residual in this module: max(1, max |a_i|)."""
    return max(1.0, max(abs(v) for v in a))


@dataclass(frozen=True)
class TriangularSolution:
    """One member of a triangular solution family.

    case is "case1" or "case2"; n is the Case-1 exponent (None for Case 2).
    alphas and alpha_inf are exact rationals, a are the period coefficients.
    degenerate marks Case 1 with positive even n, where v^n du/(u - u_i) is a
    polynomial differential and every a_i vanishes identically.
    """

    case: str
    curve: HyperCurve
    cycle: Cycle
    alphas: tuple
    alpha_inf: Fraction
    a: tuple
    n: int | None = None
    degenerate: bool = False

    def __post_init__(self):
        m = len(self.curve.branch_points)
        if len(self.alphas) != m or len(self.a) != m:
            raise DomainError("alphas and a must have one entry per branch point")
        if self.case not in ("case1", "case2"):
            raise DomainError(f"unknown case tag {self.case!r}")
        if self.case == "case1" and (self.n is None or self.n == 0):
            raise DomainError("Case 1 requires a nonzero integer n")
        if self.case == "case2" and self.curve.branch_points[0] != 0:
            raise DomainError("Case 2 requires the first branch point at 0")
        if -sum(self.alphas, Fraction(0)) != self.alpha_inf:
            raise DomainError("alpha_inf must equal -sum(alphas)")
        res = sum_residual(self)
        if res > _SUM_TOL:
            raise NumericsError(
                f"sum of coefficients a_i is {res:.3e} relative to the coefficient "
                f"scale; expected an exact differential (< {_SUM_TOL})"
            )

    @property
    def betas(self):
        return tuple(-2 * al for al in self.alphas)


@dataclass(frozen=True)
class EpdConfig:
    """Exponents beta_i = -2 alpha_i of the Euler-Poisson-Darboux system."""

    betas: tuple

    @classmethod
    def from_solution(cls, sol):
        return cls(sol.betas)


@dataclass
class ResidueMatrices:
    """The 2x2 residue matrices A^(i) and the matrix at infinity."""

    matrices: tuple
    at_infinity: np.ndarray
    mismatch: float


@dataclass
class PdeReport:
    case: str
    residuals: dict  # (i, j), 0-based -> normalized residual
    scale: float

    @property
    def max_residual(self):
        return max(self.residuals.values())


@dataclass
class EpdReport:
    f: complex
    betas: tuple
    gradient_residuals: dict  # i -> |df/du_i (FD) - a_i| / scale
    cross_residuals: dict  # (i, j) -> EPD equation residual / scale
    scale: float

    @property
    def max_gradient_residual(self):
        return max(self.gradient_residuals.values())

    @property
    def max_cross_residual(self):
        return max(self.cross_residuals.values())


@dataclass
class TauReport:
    case: str
    rows: dict  # j -> (finite difference, analytic residue, contour residue)

    @property
    def max_fd_vs_analytic(self):
        return max(abs(fd - an) / max(1.0, abs(an)) for fd, an, _ in self.rows.values())

    @property
    def max_analytic_vs_contour(self):
        return max(abs(an - ct) / max(1.0, abs(an)) for _, an, ct in self.rows.values())

    @property
    def max_discrepancy(self):
        return max(self.max_fd_vs_analytic, self.max_analytic_vs_contour)


def sum_residual(sol):
    """|sum a_i| normalized by max(1, max |a_i|)."""
    return abs(sum(sol.a)) / _scale(sol.a)


def _pole_spec(m, i, n):
    return IntegrandSpec(n=n, pole_flags=tuple(1 if q == i else 0 for q in range(m)))


def _coefficient(sol, engine, points, i):
    """a_i of the family evaluated at a (possibly perturbed) branch-point tuple,
    using the engine's frozen contours and panel plans."""
    points = tuple(points)
    if sol.case == "case1":
        return engine.period(sol.cycle, _pole_spec(len(points), i, sol.n), points=points)[0]
    return _coefficient_case2(engine, sol.cycle, points, i)


def _potential(sol, engine, points):
    """The potential f with a_i = df/du_i, at a perturbed branch-point tuple."""
    points = tuple(points)
    if sol.case == "case1":
        val = engine.period(sol.cycle, IntegrandSpec(n=sol.n), points=points)[0]
        return -2.0 / sol.n * val
    return 2.0 * engine.period(sol.cycle, IntegrandSpec(n=-1, m=1), points=points)[0]


def case1_coefficients(curve, cycle, n, quad=DEFAULT_QUAD, engine=None):
    """Family with alpha_i = n/4 and a_i = oint_gamma v^n du/(u - u_i)."""
    if int(n) != n or n == 0:
        raise DomainError("exponent n must be a nonzero integer")
    n = int(n)
    if engine is None:
        engine = PeriodEngine(curve, quad)
    m = len(curve.branch_points)
    a = tuple(engine.period(cycle, _pole_spec(m, i, n))[0] for i in range(m))
    alphas = (Fraction(n, 4),) * m
    return TriangularSolution(
        case="case1",
        curve=curve,
        cycle=cycle,
        alphas=alphas,
        alpha_inf=-Fraction(n * m, 4),
        a=a,
        n=n,
        degenerate=(n > 0 and n % 2 == 0),
    )


def case2_coefficients(curve, cycle, quad=DEFAULT_QUAD, engine=None):
    """Family on v^2 = u * prod_{i>=2}(u - u_i): a_1 = -oint du/v and
    a_i = oint du/v + u_i oint du/((u - u_i) v)."""
    if curve.branch_points[0] != 0:
        raise DomainError("Case 2 requires the first branch point at 0")
    if engine is None:
        engine = PeriodEngine(curve, quad)
    m = len(curve.branch_points)
    a = tuple(_coefficient_case2(engine, cycle, curve.branch_points, i) for i in range(m))
    alphas = (Fraction(1, 4),) + (Fraction(-1, 4),) * (m - 1)
    return TriangularSolution(
        case="case2",
        curve=curve,
        cycle=cycle,
        alphas=alphas,
        alpha_inf=Fraction(2 * curve.genus - 1, 4),
        a=a,
    )


def _coefficient_case2(engine, cycle, points, i):
    p0 = engine.period(cycle, IntegrandSpec(n=-1), points=points)[0]
    if i == 0:
        return -p0
    q = engine.period(cycle, _pole_spec(len(points), i, -1), points=points)[0]
    return p0 + points[i] * q


def residue_matrices(sol, tol=1e-9):
    """Assemble A^(1..2g+1) and A^(infinity), checking -sum A^(i) against
    diag(alpha_inf, -alpha_inf)."""
    mats = tuple(
        np.array([[float(al), a], [0.0, -float(al)]], dtype=complex)
        for al, a in zip(sol.alphas, sol.a)
    )
    expected = np.diag([float(sol.alpha_inf), -float(sol.alpha_inf)]).astype(complex)
    mismatch = float(np.max(np.abs(-sum(mats) - expected))) / _scale(sol.a)
    if mismatch > tol:
        raise NumericsError(
            f"-sum of residue matrices differs from diag(alpha_inf, -alpha_inf) "
            f"by {mismatch:.3e} (> {tol})"
        )
    return ResidueMatrices(mats, expected, mismatch)


def _admissible_indices(sol):
    """Branch-point indices whose derivative equations are part of the system
    (Case 2 freezes u_1 = 0, so j = 0 is excluded there)."""
    m = len(sol.curve.branch_points)
    return range(1, m) if sol.case == "case2" else range(m)


def verify_pde(builder, curve, quad=DEFAULT_QUAD, diff=None):
    """Residuals of da_i/du_j = 2(alpha_j a_i - alpha_i a_j)/(u_j - u_i).

    builder is one of the two constructors with everything but (curve, quad,
    engine) already bound, e.g. partial(case1_coefficients, cycle=cyc, n=-1).
    The finite differences reuse the base curve's frozen contours.
    """
    if diff is None:
        diff = DEFAULT_DIFF
    engine = PeriodEngine(curve, quad)
    sol = builder(curve, quad=quad, engine=engine)
    base = curve.branch_points
    scale = _scale(sol.a)
    residuals = {}
    for j in _admissible_indices(sol):
        for i in range(len(base)):
            if i == j:
                continue

            def a_i(uj, i=i, j=j):
                pts = list(base)
                pts[j] = uj
                return _coefficient(sol, engine, pts, i)

            fd, _ = central_derivative(a_i, base[j], k=1, spec=diff)
            rhs = (
                2.0
                * (float(sol.alphas[j]) * sol.a[i] - float(sol.alphas[i]) * sol.a[j])
                / (base[j] - base[i])
            )
            residuals[(i, j)] = abs(fd - rhs) / scale
    return PdeReport(sol.case, residuals, scale)


def epd_potential(sol, quad=DEFAULT_QUAD, diff=None, diff2=None, engine=None):
    """The potential f of the family plus finite-difference residual checks.

    Checks a_i = df/du_i for every admissible i, and the Euler-Poisson-Darboux
    equation d2f/du_j du_i = (beta_j df/du_i - beta_i df/du_j)/(u_i - u_j) on
    admissible pairs, with beta_i = -2 alpha_i.
    """
    if diff is None:
        diff = DEFAULT_DIFF
    if diff2 is None:
        diff2 = DEFAULT_DIFF_MIXED
    if engine is None:
        engine = PeriodEngine(sol.curve, quad)
    base = sol.curve.branch_points
    betas = EpdConfig.from_solution(sol).betas
    scale = _scale(sol.a)
    f0 = _potential(sol, engine, base)

    grad = {}
    for i in _admissible_indices(sol):

        def f_of_ui(ui, i=i):
            pts = list(base)
            pts[i] = ui
            return _potential(sol, engine, pts)

        fd, _ = central_derivative(f_of_ui, base[i], k=1, spec=diff)
        grad[i] = abs(fd - sol.a[i]) / scale

    cross = {}
    admissible = list(_admissible_indices(sol))
    for j in admissible:
        for i in admissible:
            if i >= j:
                continue

            def f_of_pair(ui, uj, i=i, j=j):
                pts = list(base)
                pts[i] = ui
                pts[j] = uj
                return _potential(sol, engine, pts)

            fd, _ = mixed_second_derivative(f_of_pair, base[i], base[j], spec=diff2)
            rhs = (float(betas[j]) * sol.a[i] - float(betas[i]) * sol.a[j]) / (base[i] - base[j])
            cross[(i, j)] = abs(fd - rhs) / scale

    return EpdReport(f0, betas, grad, cross, scale)


def separable_solution_check(points, probes, diff=None, diff2=None):
    """EPD residual of the separable solution f = prod_i (u - u_i)^(1/2).

    The product solves the Euler-Poisson-Darboux system in the variables u_i
    with every beta_i = -1/2; u plays the role of a spectator parameter and
    runs over the probe values.  All derivatives are finite differences of the
    closed-form product.  Returns the maximum normalized residual.
    """
    if diff is None:
        diff = DEFAULT_DIFF
    if diff2 is None:
        diff2 = DEFAULT_DIFF_MIXED
    pts = tuple(complex(p) for p in points)
    if len(pts) < 2:
        raise DomainError("need at least two points")
    diam = max(abs(a - b) for a in pts for b in pts)
    if diam == 0:
        raise DomainError("points coincide")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(pts[i] - pts[j]) <= 1e-8 * diam:
                raise DomainError(f"points {pts[i]} and {pts[j]} are too close")
    probes = tuple(complex(u) for u in probes)
    for u in probes:
        if min(abs(u - p) for p in pts) <= 1e-6 * max(1.0, diam):
            raise DomainError(f"probe {u} coincides with one of the points")

    beta = -0.5
    worst = 0.0
    for u in probes:

        def f_at(us):
            return complex(np.prod(np.sqrt(u - np.asarray(us, dtype=complex))))

        norm = max(1.0, abs(f_at(pts)))
        dfs = {}
        for i in range(len(pts)):

            def f_of_ui(ui, i=i):
                moved = list(pts)
                moved[i] = ui
                return f_at(moved)

            dfs[i], _ = central_derivative(f_of_ui, pts[i], k=1, spec=diff)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):

                def f_of_pair(ui, uj, i=i, j=j):
                    moved = list(pts)
                    moved[i] = ui
                    moved[j] = uj
                    return f_at(moved)

                fd, _ = mixed_second_derivative(f_of_pair, pts[i], pts[j], spec=diff2)
                rhs = beta * (dfs[i] - dfs[j]) / (pts[i] - pts[j])
                worst = max(worst, abs(fd - rhs) / norm)
    return worst


def verify_zero_relation(curve, cycle, quad=DEFAULT_QUAD, engine=None):
    """Normalized residual of
    (2g - 1) oint du/v + sum_i u_i oint du/((u - u_i) v) = 0,
    which holds on any curve of the family (u_1 = 0 is not needed)."""
    if engine is None:
        engine = PeriodEngine(curve, quad)
    m = len(curve.branch_points)
    p0 = engine.period(cycle, IntegrandSpec(n=-1))[0]
    terms = [(2 * curve.genus - 1) * p0]
    for i, u_i in enumerate(curve.branch_points):
        if u_i == 0:
            continue
        q = engine.period(cycle, _pole_spec(m, i, -1))[0]
        terms.append(u_i * q)
    scale = max(1.0, max(abs(t) for t in terms))
    return abs(sum(terms)) / scale


def tau_value(case, curve, n=None):
    """Closed-form tau function of the family, principal branch, constant
    factor fixed to 1.

    Case 1: (prod_{k<i} (u_i - u_k))^(n^2/8).
    Case 2: ((prod_{2<=k<i} (u_i - u_k)) / prod_{k>=2} u_k)^(1/8).
    """
    pts = curve.branch_points
    if case == "case1":
        if n is None or int(n) != n or n == 0:
            raise DomainError("Case 1 tau requires a nonzero integer n")
        prod = 1.0 + 0.0j
        for i in range(len(pts)):
            for k in range(i):
                prod *= pts[i] - pts[k]
        return prod ** (n * n / 8.0)
    if case == "case2":
        if pts[0] != 0:
            raise DomainError("Case 2 requires the first branch point at 0")
        ratio = 1.0 + 0.0j
        for i in range(1, len(pts)):
            for k in range(1, i):
                ratio *= pts[i] - pts[k]
        for p in pts[1:]:
            ratio /= p
        return ratio**0.125
    raise DomainError(f"unknown case tag {case!r}")


def _tr_a_squared(sol, z):
    """trace of A(z)^2 for A(z) = sum_i A^(i)/(z - u_i), with the full 2x2
    matrices (the a_i entries enter the algebra and cancel in the trace)."""
    z = np.asarray(z, dtype=complex)
    a11 = np.zeros_like(z)
    a12 = np.zeros_like(z)
    a21 = np.zeros_like(z)
    for al, a, u_i in zip(sol.alphas, sol.a, sol.curve.branch_points):
        a11 = a11 + float(al) / (z - u_i)
        a12 = a12 + a / (z - u_i)
    a22 = -a11
    return a11 * a11 + a12 * a21 + a21 * a12 + a22 * a22


def verify_tau(sol, quad=DEFAULT_QUAD, diff=None):
    """Three independent values of d ln(tau)/du_j for each admissible j:

    (a) finite difference of the closed-form tau (log of the ratio, so the
        principal branch never jumps inside the stencil);
    (b) the analytic residue sum_{k != j} 2 alpha_j alpha_k / (u_j - u_k);
    (c) (1/(2 pi i)) oint (1/2) tr A(z)^2 dz over a small circle around u_j.
    """
    if diff is None:
        diff = DEFAULT_DIFF
    base = sol.curve.branch_points
    tau0 = tau_value(sol.case, sol.curve, n=sol.n)
    rows = {}
    for j in _admissible_indices(sol):

        def log_tau(uj, j=j):
            pts = list(base)
            pts[j] = uj
            return np.log(tau_value(sol.case, HyperCurve(tuple(pts)), n=sol.n) / tau0)

        fd, _ = central_derivative(log_tau, base[j], k=1, spec=diff)

        analytic = sum(
            2.0 * float(sol.alphas[j]) * float(sol.alphas[k]) / (base[j] - base[k])
            for k in range(len(base))
            if k != j
        )

        radius = 0.4 * min(abs(base[j] - base[k]) for k in range(len(base)) if k != j)
        circle = circle_path(base[j], radius)
        val, _ = integrate_contour(circle, lambda z: 0.5 * _tr_a_squared(sol, z), quad)
        contour = val / (2j * np.pi)

        rows[j] = (fd, analytic, contour)
    return TauReport(sol.case, rows)
