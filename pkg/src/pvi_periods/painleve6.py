"""Genus-one specialization: Painleve VI solution families on v^2 = u(u-1)(u-x).

The two triangular families restrict to closed-form PVI solutions

    y = x a_1 / (x a_1 + (x - 1) a_2)

with the a_i periods of v^n du/(u - u_i) (family 1, parameters
((9n^2+12n+4)/8, -n^2/8, n^2/8, (4-n^2)/8)) or of du/((u - u_i) v) (family 2,
parameters (1/8, -1/8, 1/8, 3/8)).  Their first derivative is closed-form; the
second comes from the Schlesinger flow da_i/dx.  pvi_residual works in exact
rational arithmetic when fed rationals, which pins the machinery to an
arithmetic oracle independent of any quadrature.

The family-2 coefficient p = oint du/v satisfies the hypergeometric equation
x(x-1)p'' + (2x-1)p' + p/4 = 0 (the Picard-Fuchs equation of the pencil), and
q = 2xp' satisfies x(x-1)q'' + 2xq' + q/4 = 0; both residuals are checked with
finite differences of the periods.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curve import Cycle, HyperCurve, IntegrandSpec, PeriodEngine
from .errors import DomainError, PoleEncountered
from .numerics import DEFAULT_DIFF2, DEFAULT_QUAD, central_derivative

__all__ = [
    "PviParams",
    "PviFamily",
    "PqState",
    "pvi_params_from_alphas",
    "y_case1",
    "y_case2",
    "pvi_residual",
    "hypergeometric_residual",
    "pq_relation_residual",
    "pq_system_residual",
]

_POLE_TOL = 1e-8


@dataclass(frozen=True)
class PviParams:
    """The four constants of the Painleve VI equation."""

    alpha_hat: object
    beta_hat: object
    gamma_hat: object
    delta_hat: object

    def as_tuple(self):
        return (self.alpha_hat, self.beta_hat, self.gamma_hat, self.delta_hat)


PVI_18 = PviParams(Fraction(1, 8), Fraction(-1, 8), Fraction(1, 8), Fraction(3, 8))


def pvi_params_from_alphas(alpha_1, alpha_2, alpha_3, alpha_inf):
    """Map residue-matrix eigenvalues to PVI constants:
    ((2 alpha_inf - 1)^2/2, -2 alpha_1^2, 2 alpha_2^2, 1/2 - 2 alpha_3^2)."""
    half = Fraction(1, 2)
    return PviParams(
        (2 * alpha_inf - 1) ** 2 * half,
        -2 * alpha_1**2,
        2 * alpha_2**2,
        half - 2 * alpha_3**2,
    )


@dataclass(frozen=True)
class PviFamily:
    """A tagged PVI solution family with its parameter quadruple.

    Cycle-based tags ("case1", "case2") carry the contour coefficients
    (c_1, c_2); the reference tags ("picard-okamoto", "hitchin", "kk") carry
    the constants of the corresponding classical general solution.
    """

    tag: str
    c1: complex = 1.0
    c2: complex = 0.0
    n: int | None = None

    def __post_init__(self):
        if self.tag not in ("case1", "case2", "picard-okamoto", "hitchin", "kk"):
            raise DomainError(f"unknown family tag {self.tag!r}")
        if self.tag in ("case1", "case2") and self.c1 == 0 and self.c2 == 0:
            raise DomainError("cycle coefficients (c_1, c_2) must not both vanish")
        if self.tag == "case1" and (self.n is None or self.n == 0):
            raise DomainError("family case1 requires a nonzero integer n")

    @property
    def params(self):
        if self.tag == "case1":
            q = Fraction(self.n, 4)
            return pvi_params_from_alphas(q, q, q, -3 * q)
        if self.tag == "case2":
            q = Fraction(1, 4)
            return pvi_params_from_alphas(q, -q, -q, q)
        return PVI_18

    def evaluate(self, x, quad=DEFAULT_QUAD):
        if self.tag == "case1":
            return y_case1(x, self.c1, self.c2, self.n, quad)
        if self.tag == "case2":
            return y_case2(x, self.c1, self.c2, quad)
        raise DomainError(f"family {self.tag!r} is evaluated by the reference module")


@dataclass(frozen=True)
class PqState:
    """Triangular-reduction data (p, q) with eigenvalue parameters.

    delta is pinned to alpha + beta + gamma, matching the residue matrix at
    infinity diag(-delta, delta)."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    p: complex
    q: complex

    @property
    def delta(self):
        return self.alpha + self.beta + self.gamma


def _legendre_periods(x, c1, c2, n, quad):
    """(a_1, a_2, a_3) = periods of v^n du/(u - u_i) on v^2 = u(u-1)(u-x)
    over the cycle c_1 delta_1 + c_2 delta_2, plus the engine for reuse."""
    x = complex(x)
    if x == 0 or x == 1:
        raise DomainError("x must avoid the fixed singular points 0 and 1")
    curve = HyperCurve((0.0, 1.0, x))
    engine = PeriodEngine(curve, quad)
    cycle = Cycle((c1, c2))
    a = tuple(
        engine.period(cycle, IntegrandSpec(n=n, pole_flags=tuple(int(q == i) for q in range(3))))[0]
        for i in range(3)
    )
    return a, engine


def _check_denominator(x, a1, a2):
    d = x * a1 + (x - 1) * a2
    scale = max(1.0, abs(x * a1), abs((x - 1) * a2))
    if abs(d) < _POLE_TOL * scale:
        raise PoleEncountered(
            f"solution pole: denominator x*a_1 + (x-1)*a_2 = {d:.3e} at x = {x}"
        )
    return d


def y_case1(x, c1, c2, n, quad=DEFAULT_QUAD):
    """(y, y', y'') of the family-1 solution at x.

    y and y' are the displayed closed forms; y'' is the closed form for
    n = -1 and otherwise comes from differentiating y' along the Schlesinger
    flow da_1/dx = (n/2)(a_1 - a_3)/x, da_2/dx = (n/2)(a_2 - a_3)/(x - 1).
    """
    if int(n) != n or n == 0:
        raise DomainError("exponent n must be a nonzero integer")
    n = int(n)
    if c1 == 0 and c2 == 0:
        raise DomainError("cycle coefficients (c_1, c_2) must not both vanish")
    (a1, a2, a3), _ = _legendre_periods(x, c1, c2, n, quad)
    x = complex(x)
    d = _check_denominator(x, a1, a2)
    y = x * a1 / d
    num = n * (x - 1) * a2**2 - n * x * a1**2 - 2 * (n + 1) * a1 * a2
    yp = num / (2 * d**2)
    if n == -1:
        ypp = -a1 * a2 * a3 / (2 * d**3)
        return y, yp, ypp
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
    ypp = (nump * d - 2 * num * dp) / (2 * d**3)
    return y, yp, ypp


def y_case2(x, c1, c2, quad=DEFAULT_QUAD):
    """(y, y', y'') of the family-2 solution at x, from the simplified
    coefficients a_1 = -oint du/v, a_2 = -x oint du/((u-x)v),
    a_3 = -oint du/((u-1)v)."""
    if c1 == 0 and c2 == 0:
        raise DomainError("cycle coefficients (c_1, c_2) must not both vanish")
    x = complex(x)
    if x == 0 or x == 1:
        raise DomainError("x must avoid the fixed singular points 0 and 1")
    engine = PeriodEngine(HyperCurve((0.0, 1.0, x)), quad)
    cycle = Cycle((c1, c2))
    p0 = engine.period(cycle, IntegrandSpec(n=-1))[0]
    q1 = engine.period(cycle, IntegrandSpec(n=-1, pole_flags=(0, 1, 0)))[0]
    qx = engine.period(cycle, IntegrandSpec(n=-1, pole_flags=(0, 0, 1)))[0]
    a1 = -p0
    a2 = -x * qx
    a3 = -q1
    d = _check_denominator(x, a1, a2)
    y = x * a1 / d
    yp = (x * a1**2 + (x - 1) * a2**2 + 2 * (x - 1) * a1 * a2) / (2 * d**2)
    ypp = (a2**3 / x + x * a3**3 - 2 * a1 * a2 * a3) / (2 * d**3)
    return y, yp, ypp


def pvi_residual(x, y, yp, ypp, params):
    """y'' minus the Painleve VI right-hand side.

    Exact when every argument (and every parameter) is rational; complex
    arguments give the usual floating evaluation.
    """
    if x == 0 or x == 1:
        raise DomainError("x must avoid 0 and 1")
    scale = max(1.0, abs(x), abs(y))
    if min(abs(y), abs(y - 1), abs(y - x)) < _POLE_TOL * scale:
        raise PoleEncountered(
            f"solution value y = {complex(y):.6g} sits on a fixed singular point "
            f"(0, 1 or x = {complex(x):.6g}) of the equation"
        )
    ah, bh, gh, dh = params.as_tuple()
    half = Fraction(1, 2)
    rhs = (
        half * (1 / y + 1 / (y - 1) + 1 / (y - x)) * yp**2
        - (1 / x + 1 / (x - 1) + 1 / (y - x)) * yp
        + (y * (y - 1) * (y - x))
        / (x**2 * (x - 1) ** 2)
        * (ah + bh * x / y**2 + gh * (x - 1) / (y - 1) ** 2 + dh * x * (x - 1) / (y - x) ** 2)
    )
    return ypp - rhs


def _pq_values(x, c1, c2, quad):
    """p = oint du/v and q = x oint du/((u-x)v) as functions usable in
    frozen-contour finite differences; returns (p, q, engine, cycle)."""
    x = complex(x)
    if x == 0 or x == 1:
        raise DomainError("x must avoid the fixed singular points 0 and 1")
    curve = HyperCurve((0.0, 1.0, x))
    engine = PeriodEngine(curve, quad)
    cycle = Cycle((c1, c2))

    def p_at(t):
        return engine.period(cycle, IntegrandSpec(n=-1), points=(0.0, 1.0, t))[0]

    def q_at(t):
        val = engine.period(
            cycle, IntegrandSpec(n=-1, pole_flags=(0, 0, 1)), points=(0.0, 1.0, t)
        )[0]
        return t * val

    return p_at, q_at


def hypergeometric_residual(which, x, c1, c2, quad=DEFAULT_QUAD, diff=None):
    """Residual of the second-order equation satisfied by the periods:

    which = "p":  x(x-1) p'' + (2x-1) p' + p/4   (Picard-Fuchs)
    which = "q":  x(x-1) q'' + 2x q' + q/4

    with p = oint du/v, q = x oint du/((u-x)v) and finite-difference
    derivatives over frozen contours.
    """
    if which not in ("p", "q"):
        raise DomainError("which must be 'p' or 'q'")
    if diff is None:
        diff = DEFAULT_DIFF2
    p_at, q_at = _pq_values(x, c1, c2, quad)
    f = p_at if which == "p" else q_at
    x = complex(x)
    val = f(x)
    fp, _ = central_derivative(f, x, k=1, spec=diff)
    fpp, _ = central_derivative(f, x, k=2, spec=diff)
    if which == "p":
        return x * (x - 1) * fpp + (2 * x - 1) * fp + val / 4
    return x * (x - 1) * fpp + 2 * x * fp + val / 4


def pq_relation_residual(x, c1, c2, quad=DEFAULT_QUAD, diff=None):
    """|q - 2x p'| with p' a finite difference of the period p."""
    if diff is None:
        diff = DEFAULT_DIFF2
    p_at, q_at = _pq_values(x, c1, c2, quad)
    x = complex(x)
    fp, _ = central_derivative(p_at, x, k=1, spec=diff)
    return abs(q_at(x) - 2 * x * fp)


def pq_system_residual(alpha, beta, gamma, p, pp, q, qp, x):
    """Residuals of the first-order triangular system

    p_x = (2/x)(gamma p + alpha (p + q)),
    q_x = (2/(x-1))(gamma q + beta (p + q)).
    """
    if x == 0 or x == 1:
        raise DomainError("x must avoid 0 and 1")
    r1 = pp - 2 * (gamma * p + alpha * (p + q)) / x
    r2 = qp - 2 * (gamma * q + beta * (p + q)) / (x - 1)
    return r1, r2
