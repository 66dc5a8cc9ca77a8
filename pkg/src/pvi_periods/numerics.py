"""Quadrature and finite-difference kernels used by every verification suite.

Integrals are taken over parametrized paths t in [0, 1]; integrands are
complex-valued callables that accept numpy arrays of t.  Differentiation is
Richardson-extrapolated central differencing and always returns an error
estimate alongside the value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, QuadratureConvergenceError

__all__ = [
    "QuadratureSpec",
    "DiffSpec",
    "DEFAULT_QUAD",
    "DEFAULT_DIFF",
    "DEFAULT_DIFF2",
    "DEFAULT_DIFF_MIXED",
    "composite_quadrature",
    "integrate_path",
    "central_derivative",
    "mixed_second_derivative",
    "five_point_derivative",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre parameters.

    order: nodes per panel; panels: initial panel count; refinement doubles
    the panel count until two consecutive composite values agree to
    refine_tol relative to max(1, |I|).
    """

    order: int = 12
    panels: int = 8
    refine_tol: float = 1e-12
    max_refinements: int = 8

    def __post_init__(self):
        if self.order < 2:
            raise DomainError("quadrature order must be >= 2")
        if self.panels < 1:
            raise DomainError("panel count must be >= 1")
        if self.refine_tol <= 0:
            raise DomainError("refine_tol must be positive")
        if self.max_refinements < 0:
            raise DomainError("max_refinements must be >= 0")


@dataclass(frozen=True)
class DiffSpec:
    """Central-difference parameters.

    h is the base step; levels is the number of Richardson extrapolation
    levels (>= 1), using steps h, h/2, ..., h/2^levels.  scale_mode
    "relative-to-argument" multiplies h by max(1, |at|).
    """

    h: float = 1e-5
    levels: int = 2
    scale_mode: str = "relative-to-argument"

    def __post_init__(self):
        if self.h <= 0:
            raise DomainError("step h must be positive")
        if self.levels < 1:
            raise DomainError("Richardson levels must be >= 1")
        if self.scale_mode not in ("absolute", "relative-to-argument"):
            raise DomainError(f"unknown scale_mode {self.scale_mode!r}")


DEFAULT_QUAD = QuadratureSpec()
DEFAULT_DIFF = DiffSpec()
# Second differences divide roundoff by h^2, so they need a much larger step.
DEFAULT_DIFF2 = DiffSpec(h=1e-2, levels=2)
DEFAULT_DIFF_MIXED = DiffSpec(h=3e-3, levels=2)


@lru_cache(maxsize=64)
def _gl_nodes(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def composite_quadrature(f, order, panels):
    """Composite Gauss-Legendre value of integral_0^1 f(t) dt at a fixed panel count."""
    x, w = _gl_nodes(order)
    width = 1.0 / panels
    starts = np.arange(panels) * width
    # nodes shape (panels, order) flattened so f is called once
    t = (starts[:, None] + (x[None, :] + 1.0) * (0.5 * width)).ravel()
    vals = np.asarray(f(t), dtype=complex)
    if vals.shape != t.shape:
        raise DomainError("integrand must return one value per node")
    return complex(np.sum(vals * np.tile(w, panels)) * 0.5 * width)


def integrate_path(f, spec=DEFAULT_QUAD):
    """Integrate f over t in [0, 1], refining panels until agreement.

    Returns (value, error_estimate) where the estimate is the difference of
    the last two refinement values.  Raises QuadratureConvergenceError with
    both values attached if max_refinements is exhausted.
    """
    panels = spec.panels
    prev = None
    val = None
    for _ in range(spec.max_refinements + 1):
        prev = val
        val = composite_quadrature(f, spec.order, panels)
        if prev is not None:
            err = abs(val - prev)
            if err <= spec.refine_tol * max(1.0, abs(val)):
                return val, err
        panels *= 2
    raise QuadratureConvergenceError(
        f"quadrature did not converge after {spec.max_refinements} refinements: "
        f"last two values {prev} and {val} differ by {abs(val - prev):.3e}",
        last=val,
        previous=prev,
    )


def _stencil_points(at, k, steps):
    pts = []
    for h in steps:
        pts.extend([at + h, at - h])
    if k == 2:
        pts.append(at)
    return pts


def central_derivative(f, at, k=1, spec=None, singularities=()):
    """k-th derivative (k in {1, 2}) of f at a point by Richardson-extrapolated
    central differences.

    Returns (value, error_estimate).  Declared singularities are checked
    against every stencil point before any evaluation.  When spec is omitted,
    k=1 uses DEFAULT_DIFF and k=2 uses the wider-step DEFAULT_DIFF2.
    """
    if k not in (1, 2):
        raise DomainError("only first and second derivatives are supported")
    if spec is None:
        spec = DEFAULT_DIFF if k == 1 else DEFAULT_DIFF2
    h0 = spec.h
    if spec.scale_mode == "relative-to-argument":
        h0 *= max(1.0, abs(at))
    steps = [h0 / 2**i for i in range(spec.levels + 1)]
    for p in _stencil_points(at, k, steps):
        for s in singularities:
            if abs(p - s) <= 1e-12 * max(1.0, abs(s)):
                raise DomainError(f"stencil point {p} coincides with declared singularity {s}")

    def base(h):
        if k == 1:
            return (f(at + h) - f(at - h)) / (2.0 * h)
        return (f(at + h) - 2.0 * f(at) + f(at - h)) / (h * h)

    # Neville tableau in powers of h^2
    tableau = [[base(h)] for h in steps]
    for j in range(1, len(steps)):
        fac = 4.0**j
        for i in range(j, len(steps)):
            tableau[i].append((fac * tableau[i][j - 1] - tableau[i - 1][j - 1]) / (fac - 1.0))
    value = tableau[-1][-1]
    estimate = abs(value - tableau[-2][-1]) if len(steps) > 1 else abs(value - tableau[-1][0])
    return value, estimate


def mixed_second_derivative(f, at_x, at_y, spec=None, singularities=()):
    """Mixed partial d^2 f / dx dy of f(x, y) by the four-point cross stencil,
    Richardson-extrapolated like central_derivative.

    Returns (value, error_estimate).  Steps in x and y are scaled per argument
    when the DiffSpec uses relative steps.
    """
    if spec is None:
        spec = DEFAULT_DIFF_MIXED
    hx = hy = spec.h
    if spec.scale_mode == "relative-to-argument":
        hx *= max(1.0, abs(at_x))
        hy *= max(1.0, abs(at_y))
    steps = [(hx / 2**i, hy / 2**i) for i in range(spec.levels + 1)]
    for a, b in steps:
        for p in (at_x + a, at_x - a, at_y + b, at_y - b):
            for s in singularities:
                if abs(p - s) <= 1e-12 * max(1.0, abs(s)):
                    raise DomainError(f"stencil point {p} coincides with declared singularity {s}")

    def base(a, b):
        return (f(at_x + a, at_y + b) - f(at_x + a, at_y - b)
                - f(at_x - a, at_y + b) + f(at_x - a, at_y - b)) / (4.0 * a * b)

    tableau = [[base(a, b)] for a, b in steps]
    for j in range(1, len(steps)):
        fac = 4.0**j
        for i in range(j, len(steps)):
            tableau[i].append((fac * tableau[i][j - 1] - tableau[i - 1][j - 1]) / (fac - 1.0))
    value = tableau[-1][-1]
    estimate = abs(value - tableau[-2][-1]) if len(steps) > 1 else abs(value - tableau[-1][0])
    return value, estimate


def five_point_derivative(f, at, h):
    """First derivative by the 4th-order five-point central stencil (no extrapolation)."""
    return (-f(at + 2 * h) + 8 * f(at + h) - 8 * f(at - h) + f(at - 2 * h)) / (12.0 * h)
