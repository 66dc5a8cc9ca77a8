"""Classical closed-form solutions of PVI(1/8, -1/8, 1/8, 3/8).

Three independent constructions are implemented on top of a Jacobi
theta-series engine and AGM elliptic integrals:

  * the Picard solution y_0 = x sn^2(2 c_1 K + 2 c_2 iK', k^2 = x) of
    PVI(0, 0, 0, 1/2), written as the theta quotient
    y_0 = x (theta_3(0) theta_1(z_0) / theta_2(0) theta_4(z_0))^2 with
    z_0 = c_1 + c_2 mu, and its image under the Okamoto transformation
    y = y_0 + y_0(y_0-1)(y_0-x) / (x(x-1) y_0' - y_0(y_0-1));

  * Hitchin's solution in theta-derivative form at nu = c_1 mu + c_2.  The
    branch points of the curve sit at the half-periods, so shifting the
    elliptic argument of the Picard solution by mu/2 and pushing it through
    the Okamoto transformation collapses, via the heat equation and the
    classical quotient identities, to an expression in theta_1 alone; that
    closed form is what hitchin_y evaluates, and it agrees with the
    transformed Picard route to machine precision;

  * the Kitaev-Korotkin tau function
    tau = theta_{p,q}(0) (x(x-1))^{-1/8} P^{-1/2}, where P is the complete
    integral 2K(x) (half the basis-cycle period of du/v), and the solution
    y built from the logarithmic-derivative operator
    D(.) = x(x-1) d/dx ln(.), with D^2 read as the iterated operator.
    theta_{p,q}(0|mu) equals theta_3((p mu + q)|mu) up to an exponential
    factor, so this family is the same two-parameter family at the shifted
    argument nu = (p+1/2) mu + (q+1/2); kk_y is validated against that
    member pointwise as well as against the residual gate.

All three live on the modular point mu = i K(1-x)/K(x) with the quartic
ratio x = theta_2^4(0|mu) / theta_3^4(0|mu).  Everything here is built
without the period engine, so agreement of the three families with the
pvi_residual gate is an end-to-end cross-check of the cycle-based
constructions; the single engine-facing function (segment_period) is itself
pinned against the AGM value.

Derivatives in x are taken in closed form wherever a derivative feeds
another derivative (nested stencils lose too many digits for the residual
gates): mu'(x) = -i pi / (4 x (1-x) K^2), the heat equation
4 pi i dtheta/dmu = d^2theta/dz^2 for every characteristic, and the
hypergeometric equation m(1-m)K'' + (1-2m)K' - K/4 = 0 supply exact
ladders up to third order.  Only the outermost derivative of a returned
solution value is ever a stencil.

Theta convention: theta_{p,q}(z|mu) = sum_n exp(i pi mu (n+p)^2
+ 2 pi i (n+p)(z+q)), unit period in z, with theta_1 = -theta_{1/2,1/2},
theta_2 = theta_{1/2,0}, theta_3 = theta_{0,0}, theta_4 = theta_{0,1/2}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .curve import Cycle, HyperCurve, IntegrandSpec, PeriodEngine
from .errors import DomainError, NumericsError, PoleEncountered
from .numerics import DEFAULT_QUAD, DiffSpec, central_derivative, five_point_derivative

__all__ = [
    "ModularPoint",
    "ThetaValue",
    "REFERENCE_DIFF",
    "REFERENCE_DIFF2",
    "PICARD_PARAMS",
    "agm_ellipk",
    "agm_ellipe",
    "mu_from_x",
    "x_from_mu",
    "theta",
    "theta_record",
    "jacobi_theta",
    "picard_y0",
    "okamoto_transform",
    "picard_okamoto_y",
    "hitchin_y",
    "segment_period",
    "kk_tau",
    "kk_y",
    "d_operator",
    "reference_step",
    "set_theta_cap",
]

_AGM_MAX_ITER = 64
_THETA_CAP = 64
_THETA_RTOL = 1e-16
_POLE_TOL = 1e-10


def set_theta_cap(cap):
    """Set the shell cap of the theta series; returns the previous value.

    The cap bounds how many lattice shells n = 0, ±1, ±2, ... the series
    may sum before the truncation criterion must hold; runs closer to the
    real-mu boundary (|nome| near 1) need a larger cap.
    """
    global _THETA_CAP
    if int(cap) != cap or cap < 8:
        raise DomainError("theta shell cap must be an integer >= 8")
    previous = _THETA_CAP
    _THETA_CAP = int(cap)
    return previous

# Numerical differentiation for the reference families (no closed-form
# derivatives are displayed for them): Richardson level 3 for first
# derivatives, a wider two-level spec for second differences.  Steps are
# scaled by the distance to the fixed singular points 0 and 1 via
# reference_step.
REFERENCE_DIFF = DiffSpec(h=1e-4, levels=3, scale_mode="absolute")
REFERENCE_DIFF2 = DiffSpec(h=6e-3, levels=2, scale_mode="absolute")

# (alpha_hat, beta_hat, gamma_hat, delta_hat) of the equation solved by the
# untransformed Picard solution.
PICARD_PARAMS = (0, 0, 0, 0.5)


def reference_step(x):
    """Distance from x to the fixed singular points, capped at 1; multiplies
    the base finite-difference step so stencils never straddle 0 or 1."""
    return min(1.0, abs(x), abs(x - 1))


# ---------------------------------------------------------------------------
# AGM elliptic integrals


def agm_ellipk(m):
    """Complete elliptic integral K(m) (parameter convention, m = k^2) by the
    arithmetic-geometric mean: K = pi / (2 AGM(1, sqrt(1-m)))."""
    m = complex(m)
    if m.imag == 0 and m.real >= 1:
        raise DomainError("K(m) requires m outside the ray [1, oo)")
    a, b = 1.0 + 0.0j, cmath.sqrt(1.0 - m)
    gap = abs(a - b)
    for _ in range(_AGM_MAX_ITER):
        if gap <= 4e-16 * abs(a):
            return math.pi / (2.0 * a)
        a, b = (a + b) / 2.0, cmath.sqrt(a * b)
        # keep the square root on the branch nearest the arithmetic mean
        if abs(a - b) > abs(a + b):
            b = -b
        new_gap = abs(a - b)
        if new_gap >= gap:  # stagnated at roundoff
            return math.pi / (2.0 * a)
        gap = new_gap
    raise DomainError(f"AGM did not converge for m = {m}")


def agm_ellipe(m):
    """Complete elliptic integral E(m) from the AGM deficit sums:
    E = K (1 - sum_k 2^{k-1} c_k^2) with c_0 = sqrt(m), c_{k+1} = (a_k-b_k)/2."""
    m = complex(m)
    if m.imag == 0 and m.real >= 1:
        raise DomainError("E(m) requires m outside the ray [1, oo)")
    a, b = 1.0 + 0.0j, cmath.sqrt(1.0 - m)
    deficit = 0.5 * m
    power = 0.5
    gap = abs(a - b)
    for _ in range(_AGM_MAX_ITER):
        if gap <= 4e-16 * abs(a):
            return (math.pi / (2.0 * a)) * (1.0 - deficit)
        c = (a - b) / 2.0
        a, b = (a + b) / 2.0, cmath.sqrt(a * b)
        if abs(a - b) > abs(a + b):
            b = -b
        power *= 2.0
        deficit += power * c * c
        new_gap = abs(a - b)
        if new_gap >= gap:
            return (math.pi / (2.0 * a)) * (1.0 - deficit)
        gap = new_gap
    raise DomainError(f"AGM did not converge for m = {m}")


def _dk_dm(m, k_val, e_val):
    return (e_val - (1.0 - m) * k_val) / (2.0 * m * (1.0 - m))


def _d2k_dm2(m, k_val, dk_val):
    # K satisfies the hypergeometric equation m(1-m)K'' + (1-2m)K' - K/4 = 0.
    return (k_val / 4.0 - (1.0 - 2.0 * m) * dk_val) / (m * (1.0 - m))


def _d3k_dm3(m, dk_val, d2k_val):
    # Derivative of the hypergeometric equation:
    # m(1-m)K''' + 2(1-2m)K'' - (9/4)K' = 0.
    return (2.25 * dk_val - 2.0 * (1.0 - 2.0 * m) * d2k_val) / (m * (1.0 - m))


# ---------------------------------------------------------------------------
# Theta series


@dataclass(frozen=True)
class ThetaValue:
    """One evaluated theta term: argument, modulus, characteristics,
    z-derivative order and the summed value."""

    z: complex
    mu: complex
    p: float
    q: float
    order: int
    value: complex


def _theta_sum(z, mu, p, q, order):
    mu = complex(mu)
    if mu.imag <= 0:
        raise DomainError("theta series needs Im mu > 0 (|nome| < 1)")
    z = complex(z)
    total = 0.0 + 0.0j
    for shell in range(_THETA_CAP):
        shell_mag = 0.0
        for n in (shell, -shell) if shell else (0,):
            c = n + p
            term = cmath.exp(1j * math.pi * mu * c * c + 2j * math.pi * c * (z + q))
            if order:
                term *= (2j * math.pi * c) ** order
            total += term
            shell_mag = max(shell_mag, abs(term))
        if shell >= 2 and shell_mag < _THETA_RTOL * abs(total):
            return total
    raise NumericsError(
        f"theta series did not meet the truncation criterion within {_THETA_CAP} shells"
    )


def theta(z, mu, p=0.0, q=0.0, order=0):
    """theta_{p,q}(z|mu) or its z-derivative of the given order (0..3)."""
    if not 0 <= order <= 3:
        raise DomainError("theta derivative order must be between 0 and 3")
    return _theta_sum(z, mu, p, q, order)


def theta_record(z, mu, p=0.0, q=0.0, order=0):
    """Same evaluation as theta(), packaged with its inputs."""
    return ThetaValue(complex(z), complex(mu), p, q, order, theta(z, mu, p, q, order))


_JACOBI_CHARS = {1: (0.5, 0.5), 2: (0.5, 0.0), 3: (0.0, 0.0), 4: (0.0, 0.5)}


def jacobi_theta(index, z, mu, order=0):
    """Jacobi thetas via their characteristics; theta_1 = -theta_{1/2,1/2}."""
    if index not in _JACOBI_CHARS:
        raise DomainError("Jacobi theta index must be 1, 2, 3 or 4")
    p, q = _JACOBI_CHARS[index]
    val = theta(z, mu, p, q, order)
    return -val if index == 1 else val


# ---------------------------------------------------------------------------
# Modular point


@dataclass(frozen=True)
class ModularPoint:
    """x together with the period data of v^2 = u(u-1)(u-x): half-periods
    w_1 = 2K(x), w_2 = 2iK(1-x) and the ratio mu = w_2/w_1, Im mu > 0."""

    x: complex
    mu: complex
    w1: complex
    w2: complex

    @classmethod
    def from_x(cls, x):
        x = complex(x)
        if x == 0 or x == 1:
            raise DomainError("x must avoid 0 and 1")
        w1 = 2.0 * agm_ellipk(x)
        w2 = 2j * agm_ellipk(1.0 - x)
        mu = w2 / w1
        if mu.imag <= 0:
            raise DomainError(f"period ratio {mu} is not in the upper half plane")
        point = cls(x, mu, w1, w2)
        back = x_from_mu(mu)
        if abs(back - x) > 1e-10 * max(1.0, abs(x)):
            raise NumericsError(
                f"modular round trip failed: x = {x} came back as {back}"
            )
        return point


def mu_from_x(x, convention="lambda"):
    """ModularPoint for x, optionally under an alternate reading of the
    quartic ratio ("one-minus": 1-x, "inverse": 1/x)."""
    if convention == "lambda":
        return ModularPoint.from_x(x)
    if convention == "one-minus":
        return ModularPoint.from_x(1.0 - complex(x))
    if convention == "inverse":
        return ModularPoint.from_x(1.0 / complex(x))
    raise DomainError(f"unknown modular convention {convention!r}")


def x_from_mu(mu):
    """The quartic theta ratio theta_2^4(0|mu) / theta_3^4(0|mu)."""
    t2 = jacobi_theta(2, 0.0, mu)
    t3 = jacobi_theta(3, 0.0, mu)
    return (t2 / t3) ** 4


# ---------------------------------------------------------------------------
# Picard solution and Okamoto transformation


def picard_y0(x, c1, c2):
    """The Picard solution of PVI(0, 0, 0, 1/2): the rescaled Weierstrass
    value at z_0 = c_1 + c_2 mu, as a theta quotient."""
    point = ModularPoint.from_x(x)
    z0 = c1 + c2 * point.mu
    t1 = jacobi_theta(1, z0, point.mu)
    t4 = jacobi_theta(4, z0, point.mu)
    scale = abs(t1) + abs(t4)
    if abs(t4) < _POLE_TOL * max(1.0, scale):
        raise PoleEncountered(f"Picard solution pole: theta_4({z0}) ~ 0")
    ratio = jacobi_theta(3, 0.0, point.mu) * t1 / (jacobi_theta(2, 0.0, point.mu) * t4)
    return complex(x) * ratio * ratio


def okamoto_transform(x, y0, y0_prime):
    """y = y_0 + y_0(y_0-1)(y_0-x) / (x(x-1) y_0' - y_0(y_0-1))."""
    x = complex(x)
    num = y0 * (y0 - 1.0) * (y0 - x)
    den = x * (x - 1.0) * y0_prime - y0 * (y0 - 1.0)
    if abs(den) < _POLE_TOL * max(1.0, abs(num), abs(y0)):
        raise PoleEncountered(f"Okamoto transformation pole at x = {x}")
    return y0 + num / den


def _picard_y0_and_prime(x, c1, c2):
    """(y_0, dy_0/dx) in closed form.  Writing y_0 = x (theta_3(0) theta_1(z_0)
    / theta_2(0) theta_4(z_0))^2 with z_0 = c_1 + c_2 mu(x), the x-derivative
    is y_0 (1/x + 2 mu'(x) G) where G collects the logarithmic mu-derivatives:
    the moving argument contributes c_2 theta'/theta and the modulus
    dependence theta''/(4 pi i theta) by the heat equation."""
    x = complex(x)
    point = ModularPoint.from_x(x)
    mu = point.mu
    z0 = c1 + c2 * mu
    th = jacobi_theta
    t1 = th(1, z0, mu)
    t4 = th(4, z0, mu)
    scale = abs(t1) + abs(t4)
    if abs(t4) < _POLE_TOL * max(1.0, scale):
        raise PoleEncountered(f"Picard solution pole: theta_4({z0}) ~ 0")
    k_val = agm_ellipk(x)
    mu_x = -1j * math.pi / (4.0 * x * (1.0 - x) * k_val * k_val)
    four_pi_i = 4j * math.pi
    y0 = x * (th(3, 0.0, mu) * t1 / (th(2, 0.0, mu) * t4)) ** 2
    g = (
        th(3, 0.0, mu, 2) / (four_pi_i * th(3, 0.0, mu))
        - th(2, 0.0, mu, 2) / (four_pi_i * th(2, 0.0, mu))
        + (c2 * th(1, z0, mu, 1) + th(1, z0, mu, 2) / four_pi_i) / t1
        - (c2 * th(4, z0, mu, 1) + th(4, z0, mu, 2) / four_pi_i) / t4
    )
    return y0, y0 * (1.0 / x + 2.0 * mu_x * g)


def picard_okamoto_y(x, c1, c2, diff=None):
    """(y, y') of the Okamoto-transformed Picard solution, a solution of
    PVI(1/8, -1/8, 1/8, 3/8).  y_0' inside the transform is the closed-form
    derivative (a stencil there would sit under the caller's own stencils
    and drown the residual gate in noise); the returned y' is a Richardson
    finite difference with the step scaled by the distance to {0, 1}."""
    if diff is None:
        diff = REFERENCE_DIFF
    x = complex(x)
    step = DiffSpec(h=diff.h * reference_step(x), levels=diff.levels, scale_mode="absolute")

    def transformed(t):
        y0, y0p = _picard_y0_and_prime(t, c1, c2)
        return okamoto_transform(t, y0, y0p)

    y = transformed(x)
    yp, _ = central_derivative(transformed, x, k=1, spec=step)
    return y, yp


# ---------------------------------------------------------------------------
# Hitchin's solution


def hitchin_y(x, c1, c2, convention="lambda"):
    """Hitchin's solution of PVI(1/8, -1/8, 1/8, 3/8) at nu = c_1 mu + c_2:

        y = theta_1'''(0) / (3 pi^2 theta_3^4(0) theta_1'(0))  +  (1 + x)/3
            - [theta_1''' theta_1 - theta_1'' theta_1'
               + 4 pi i c_1 (theta_1'' theta_1 - theta_1'^2)](nu)
              / (2 pi^2 theta_3^4(0) theta_1(nu)
                 (theta_1'(nu) + 2 pi i c_1 theta_1(nu)))

    This is the Okamoto-transformed Picard solution with elliptic argument
    nu + mu/2, reduced to theta_1 by the half-period shift; the two routes
    agree to machine precision, which fixes the normalisation of every
    term above (in particular the coefficient of theta_1'' theta_1', the
    sign of the fraction and the theta_3^4(0) normalisation that other
    theta-label conventions move around)."""
    point = mu_from_x(x, convention)
    mu = point.mu
    nu = c1 * mu + c2
    t1 = jacobi_theta(1, nu, mu)
    t1p = jacobi_theta(1, nu, mu, 1)
    t1pp = jacobi_theta(1, nu, mu, 2)
    t1ppp = jacobi_theta(1, nu, mu, 3)
    two_pi_i_c1 = 2j * math.pi * c1
    den_factor = t1p + two_pi_i_c1 * t1
    scale = abs(t1p) + abs(two_pi_i_c1 * t1)
    if abs(t1) < _POLE_TOL or abs(den_factor) < _POLE_TOL * max(1.0, scale):
        raise PoleEncountered(f"Hitchin solution pole at nu = {nu}")
    t3deg4 = jacobi_theta(3, 0.0, mu) ** 4
    pi2 = math.pi * math.pi
    lead = jacobi_theta(1, 0.0, mu, 3) / (3.0 * pi2 * t3deg4 * jacobi_theta(1, 0.0, mu, 1))
    shift = (1.0 + point.x) / 3.0
    frac = (
        t1ppp * t1
        - t1pp * t1p
        + 2.0 * two_pi_i_c1 * (t1pp * t1 - t1p * t1p)
    ) / (2.0 * pi2 * t3deg4 * t1 * den_factor)
    return lead + shift - frac


# ---------------------------------------------------------------------------
# Kitaev-Korotkin tau function


def segment_period(x, quad=DEFAULT_QUAD):
    """The complete integral P = 2K(x) entering the tau function, computed
    from the period engine as minus half the delta_1 period of du/v on
    v^2 = u(u-1)(u-x) (the cycle around the branch cut [0, x]); this is the
    real branch of int_0^1 du/v and continues off x in (0, 1)."""
    x = complex(x)
    if x == 0 or x == 1:
        raise DomainError("x must avoid the fixed singular points 0 and 1")
    engine = PeriodEngine(HyperCurve((0.0, 1.0, x)), quad)
    val = engine.period(Cycle((1, 0)), IntegrandSpec(n=-1))[0]
    return -0.5 * val


def _segment_period_agm(x):
    return 2.0 * agm_ellipk(x)


def kk_tau(x, p, q, convention="lambda"):
    """tau = theta_{p,q}(0|mu) (x(x-1))^{-1/8} P^{-1/2} (principal roots),
    with P = 2K(x) from the AGM closed form."""
    point = mu_from_x(x, convention)
    x = complex(x)
    t0 = theta(0.0, point.mu, p, q)
    if abs(t0) < _POLE_TOL:
        raise DomainError(
            f"tau vanishes at x = {x}: theta_({p},{q})(0) = {t0:.3e} (Malgrange divisor)"
        )
    return t0 * (x * (x - 1.0)) ** (-0.125) * _segment_period_agm(x) ** (-0.5)


def _log_sigma_ladder(x, p, q, convention="lambda"):
    """First, second and third x-derivatives of
    W = ln(theta_{p,q}(0|mu(x))) - ln(2K(x))/2, i.e. of
    ln((x(x-1))^{1/8} tau), all in closed form.

    The mu-derivatives of ln theta come from the heat equation
    4 pi i dtheta/dmu = theta'' (z-derivatives of order up to six), the
    K-derivatives from dK/dm = (E - (1-m)K)/(2m(1-m)) and the
    hypergeometric equation for K, and mu'(x) = -i pi/(4 x (1-x) K^2(x))
    with its derivatives taken through those ladders.
    """
    point = mu_from_x(x, convention)
    mu = point.mu
    x = complex(x)
    k_val = agm_ellipk(x)
    e_val = agm_ellipe(x)
    dk = _dk_dm(x, k_val, e_val)
    d2k = _d2k_dm2(x, k_val, dk)
    d3k = _d3k_dm3(x, dk, d2k)

    # logarithmic K-ladder: (ln K)', (ln K)'', (ln K)'''
    lk1 = dk / k_val
    lk2 = d2k / k_val - lk1 * lk1
    lk3 = d3k / k_val - 3.0 * lk1 * lk2 - lk1 ** 3

    # mu(x) ladder via mu' = -i pi / (4 x(1-x) K^2)
    phi = x * (1.0 - x)
    r = (1.0 - 2.0 * x) / phi + 2.0 * lk1
    r_x = -2.0 / phi - ((1.0 - 2.0 * x) / phi) ** 2 + 2.0 * lk2
    mu_x = -1j * math.pi / (4.0 * phi * k_val * k_val)
    mu_xx = -mu_x * r
    mu_xxx = -mu_xx * r - mu_x * r_x

    t0 = theta(0.0, mu, p, q)
    if abs(t0) < _POLE_TOL:
        raise DomainError(f"tau vanishes at x = {x} (Malgrange divisor)")
    four_pi_i = 4j * math.pi
    t_1 = _theta_sum(0.0, mu, p, q, 2) / four_pi_i
    t_2 = _theta_sum(0.0, mu, p, q, 4) / four_pi_i ** 2
    t_3 = _theta_sum(0.0, mu, p, q, 6) / four_pi_i ** 3
    l1 = t_1 / t0
    l2 = (t_2 * t0 - t_1 * t_1) / (t0 * t0)
    l3 = (t_3 * t0 * t0 - 3.0 * t_2 * t_1 * t0 + 2.0 * t_1 ** 3) / t0 ** 3

    w_x = l1 * mu_x - 0.5 * lk1
    w_xx = l2 * mu_x * mu_x + l1 * mu_xx - 0.5 * lk2
    w_xxx = (
        l3 * mu_x ** 3
        + 3.0 * l2 * mu_x * mu_xx
        + l1 * mu_xxx
        - 0.5 * lk3
    )
    return w_x, w_xx, w_xxx


def d_operator(fn, x, h=None):
    """D(f) = x(x-1) d/dx ln f, with the logarithmic derivative taken by the
    five-point stencil (step scaled by the distance to {0, 1})."""
    x = complex(x)
    if h is None:
        h = REFERENCE_DIFF.h * reference_step(x)
    fp = five_point_derivative(fn, x, h)
    return x * (x - 1.0) * fp / fn(x)


def _kk_bracket(x, p, q, convention="lambda"):
    """The bracket of the solution formula at one point:

        D( (d/dx D(tau)) / (d/dx D(sigma)) ) + x(x-1) / D(D(sigma))

    with sigma = (x(x-1))^{1/8} tau, evaluated entirely through the closed
    ladder.  D(tau) = D(sigma) - (2x-1)/8, so the inner quotient is
    Q = 1 - 1/(4 d/dx D(sigma)) and D(Q) = x(x-1) Q'/Q with
    Q' = (d^2/dx^2 D(sigma)) / (4 (d/dx D(sigma))^2)."""
    x = complex(x)
    w_x, w_xx, w_xxx = _log_sigma_ladder(x, p, q, convention)
    d_sigma = x * (x - 1.0) * w_x
    ds1 = (2.0 * x - 1.0) * w_x + x * (x - 1.0) * w_xx
    ds2 = 2.0 * w_x + 2.0 * (2.0 * x - 1.0) * w_xx + x * (x - 1.0) * w_xxx
    if abs(ds1) < _POLE_TOL:
        raise PoleEncountered(f"d/dx D(sigma) vanishes at x = {x}")
    quotient = 1.0 - 0.25 / ds1
    if abs(quotient) < _POLE_TOL or abs(d_sigma) < _POLE_TOL:
        raise PoleEncountered(f"solution formula degenerates at x = {x}")
    d_of_quotient = x * (x - 1.0) * ds2 / (4.0 * ds1 * ds1 * quotient)
    return d_of_quotient + d_sigma / ds1


def kk_y(x, p, q, convention="lambda"):
    """The Kitaev-Korotkin solution of PVI(1/8, -1/8, 1/8, 3/8):
    y = x - x(x-1) / bracket.  Equals the theta-argument-shifted family
    member at nu = (p+1/2) mu + (q+1/2) (see the module docstring)."""
    x = complex(x)
    bracket = _kk_bracket(x, p, q, convention)
    if abs(bracket) < _POLE_TOL:
        raise PoleEncountered(f"Kitaev-Korotkin bracket vanishes at x = {x}")
    return x - x * (x - 1.0) / bracket
