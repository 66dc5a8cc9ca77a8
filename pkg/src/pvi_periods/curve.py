"""Hyperelliptic curves v^2 = prod_i (u - u_i) and their period integrals.

The homology basis loop delta_k encircles the k-th and (k+1)-th branch points
of the curve in lexicographic order (real part, then imaginary part); loops
are counterclockwise ellipses around the connecting segment, falling back to
a stadium (segment thickened by the margin) when the ellipse would be too
thin.  The square root v is continued along each loop from the principal
value at the base point, flipping sign whenever the principal branch jumps.

PeriodEngine freezes contour geometry and quadrature panel plans on first
use, so that periods of perturbed branch-point configurations are smooth
functions of the perturbation; every finite-difference check in the package
relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContourGeometryError,
    DomainError,
    QuadratureConvergenceError,
    StepDensityError,
)
from .numerics import DEFAULT_QUAD, _gl_nodes

__all__ = [
    "HyperCurve",
    "Cycle",
    "IntegrandSpec",
    "ContourPath",
    "build_contour",
    "adaptive_margin",
    "circle_path",
    "continue_v",
    "PeriodEngine",
    "period",
    "period_u_derivative",
    "winding_number",
]

_AMBIGUITY_RATIO = 0.8


@dataclass(frozen=True)
class HyperCurve:
    """Branch points (u_1, ..., u_{2g+1}) of v^2 = prod (u - u_i), all distinct."""

    branch_points: tuple

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.branch_points)
        object.__setattr__(self, "branch_points", pts)
        if len(pts) < 3 or len(pts) % 2 == 0:
            raise DomainError("need an odd number >= 3 of branch points")
        diam = max(abs(a - b) for a in pts for b in pts)
        if diam == 0:
            raise DomainError("branch points coincide")
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if abs(pts[i] - pts[j]) <= 1e-8 * diam:
                    raise DomainError(
                        f"branch points {pts[i]} and {pts[j]} are too close "
                        f"(min separation 1e-8 of the diameter)"
                    )

    @property
    def genus(self):
        return (len(self.branch_points) - 1) // 2

    def sorted_order(self):
        """Indices of branch points in lexicographic (Re, Im) order."""
        return tuple(
            sorted(range(len(self.branch_points)),
                   key=lambda i: (self.branch_points[i].real, self.branch_points[i].imag))
        )

    def basis_pair(self, k):
        """Input indices (0-based) of the two branch points encircled by delta_k."""
        if not 1 <= k <= 2 * self.genus:
            raise DomainError(f"basis index k={k} outside 1..{2 * self.genus}")
        order = self.sorted_order()
        return order[k - 1], order[k]


@dataclass(frozen=True)
class Cycle:
    """Integer or complex combination sum_k c_k delta_k of the basis loops."""

    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(complex(c) for c in self.coefficients))

    @staticmethod
    def basis(k, genus):
        c = [0.0] * (2 * genus)
        c[k - 1] = 1.0
        return Cycle(tuple(c))

    @property
    def is_trivial(self):
        return all(c == 0 for c in self.coefficients)


@dataclass(frozen=True)
class IntegrandSpec:
    """Differential u^m * prod_i (u - u_i)^(-e_i) * v^n du.

    n may be any integer, m >= 0, pole flags e_i in {0, 1} (empty tuple means
    no poles at branch points).
    """

    n: int = -1
    m: int = 0
    pole_flags: tuple = ()

    def __post_init__(self):
        if self.m < 0:
            raise DomainError("u-power m must be >= 0")
        if any(e not in (0, 1) for e in self.pole_flags):
            raise DomainError("pole flags must be 0 or 1")

    def key(self):
        return (self.n, self.m, self.pole_flags)


@dataclass(frozen=True)
class ContourPath:
    """Closed counterclockwise loop in the u-plane with a branch seed.

    kind is "ellipse" (p1, p2 = semi-axes along direction phi), "stadium"
    (p1 = half-length of the straight section, p2 = cap radius) or "circle"
    (p1 = radius).  pieces are parameter boundaries of the smooth arcs;
    quadrature panels never straddle them.
    """

    kind: str
    center: complex
    phi: float
    p1: float
    p2: float
    start_angle: float
    margin: float
    enclosed: tuple
    pieces: tuple
    base_seed: complex | None = None

    def point(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "circle":
            return self.center + self.p1 * np.exp(1j * (self.start_angle + 2 * np.pi * t))
        if self.kind == "ellipse":
            th = self.start_angle + 2 * np.pi * t
            xi = self.p1 * np.cos(th) + 1j * self.p2 * np.sin(th)
            return self.center + np.exp(1j * self.phi) * xi
        return self.center + np.exp(1j * self.phi) * self._stadium_local(t)[0]

    def velocity(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "circle":
            return 2j * np.pi * self.p1 * np.exp(1j * (self.start_angle + 2 * np.pi * t))
        if self.kind == "ellipse":
            th = self.start_angle + 2 * np.pi * t
            dxi = (-self.p1 * np.sin(th) + 1j * self.p2 * np.cos(th)) * 2 * np.pi
            return np.exp(1j * self.phi) * dxi
        return np.exp(1j * self.phi) * self._stadium_local(t)[1]

    def _stadium_local(self, t):
        d, m = self.p1, self.p2
        length = 4 * d + 2 * np.pi * m
        f_e = 2 * d / length
        # start_angle stores 0.0 (base on +side) or 0.5 (base on -side)
        s = np.mod(t + self.start_angle, 1.0)
        xi = np.empty(s.shape, dtype=complex)
        dxi = np.empty(s.shape, dtype=complex)
        top = s < f_e
        left = (s >= f_e) & (s < 0.5)
        bottom = (s >= 0.5) & (s < 0.5 + f_e)
        right = s >= 0.5 + f_e
        xi[top] = d - s[top] * length + 1j * m
        dxi[top] = -length
        th = np.pi / 2 + (s[left] - f_e) * length / m
        xi[left] = -d + m * np.exp(1j * th)
        dxi[left] = 1j * length * np.exp(1j * th)
        xi[bottom] = -d + (s[bottom] - 0.5) * length - 1j * m
        dxi[bottom] = length
        th = -np.pi / 2 + (s[right] - 0.5 - f_e) * length / m
        xi[right] = d + m * np.exp(1j * th)
        dxi[right] = 1j * length * np.exp(1j * th)
        return xi, dxi


def _dist_point_segment(p, a, b):
    ab = b - a
    denom = abs(ab) ** 2
    tt = ((p - a) * np.conj(ab)).real / denom
    tt = min(1.0, max(0.0, tt))
    return abs(p - (a + tt * ab))


def _radicand(z, points):
    out = np.ones_like(np.asarray(z, dtype=complex))
    for p in points:
        out = out * (z - p)
    return out


def adaptive_margin(curve, k, scale=0.25):
    """Margin used by the period engine: scale times the distance from the
    segment [u_a, u_b] of delta_k to the nearest other branch point."""
    ia, ib = curve.basis_pair(k)
    a, b = curve.branch_points[ia], curve.branch_points[ib]
    others = [p for i, p in enumerate(curve.branch_points) if i not in (ia, ib)]
    dmin = min(_dist_point_segment(p, a, b) for p in others)
    if dmin <= 0:
        raise ContourGeometryError(
            "a branch point lies on the segment between the encircled pair; "
            "a homotopic detour would be required"
        )
    return scale * dmin


def build_contour(curve, k, margin=None):
    """Counterclockwise loop around the k-th sorted-adjacent pair of branch
    points, excluding all others.  Default margin is 0.2 times the segment
    length; raises ContourGeometryError when the requested margin cannot
    exclude the remaining branch points."""
    ia, ib = curve.basis_pair(k)
    a, b = curve.branch_points[ia], curve.branch_points[ib]
    seg = b - a
    ell = abs(seg)
    if margin is None:
        margin = 0.2 * ell
    if margin <= 0:
        raise ContourGeometryError("margin must be positive")
    others = [p for i, p in enumerate(curve.branch_points) if i not in (ia, ib)]
    dmin = min(_dist_point_segment(p, a, b) for p in others) if others else np.inf
    if dmin <= margin * (1 + 1e-9):
        raise ContourGeometryError(
            f"no contour with margin {margin:.6g} around pair ({a}, {b}): nearest other "
            f"branch point is {dmin:.6g} from the segment; a homotopic detour is required"
        )
    center = (a + b) / 2
    phi = float(np.angle(seg))
    d = ell / 2
    normal = np.exp(1j * (phi + np.pi / 2))
    # side of the segment for the base point: margin-independent probe so that
    # contours of different margins share a branch convention
    probe = {s: center + s * normal * (0.5 * ell) for s in (+1, -1)}
    clearance = {s: min(abs(p - probe[s]) for p in others) if others else 0.0 for s in (+1, -1)}
    side = +1 if clearance[+1] >= clearance[-1] else -1
    aspect = margin / (d + margin)
    if aspect >= 0.2:
        kind, p1, p2 = "ellipse", d + margin, margin
        start_angle = np.pi / 2 if side > 0 else -np.pi / 2
        pieces = (0.0, 1.0)
    else:
        kind, p1, p2 = "stadium", d, margin
        start_angle = 0.0 if side > 0 else 0.5
        length = 4 * d + 2 * np.pi * margin
        f_e = 2 * d / length
        pieces = (0.0, f_e, 0.5, 0.5 + f_e, 1.0)
    path = ContourPath(kind, center, phi, p1, p2, float(start_angle),
                       float(margin), (ia, ib), pieces)
    # Branch seed: principal square root at the segment midpoint, continued
    # along the straight ray to the base point.  Anchoring at the midpoint
    # makes the seed independent of the margin, so homotopic contours of the
    # same pair integrate the same branch of v.
    base_point = complex(path.point(np.array([0.0]))[0])
    ray = center + np.linspace(0.0, 1.0, 257) * (base_point - center)
    seed = complex(_tracked_sqrt(np.sqrt(_radicand(ray, curve.branch_points)))[-1])
    return ContourPath(kind, center, phi, p1, p2, float(start_angle),
                       float(margin), (ia, ib), pieces, seed)


def circle_path(center, radius, curve=None, start_angle=0.0):
    """Counterclockwise circle, mainly for monodromy tests and residue integrals."""
    if radius <= 0:
        raise ContourGeometryError("radius must be positive")
    path = ContourPath("circle", complex(center), 0.0, float(radius), 0.0,
                       float(start_angle), float(radius), (), (0.0, 1.0))
    if curve is None:
        return path
    seed = complex(np.sqrt(_radicand(path.point(np.array([0.0])), curve.branch_points))[0])
    return ContourPath("circle", complex(center), 0.0, float(radius), 0.0,
                       float(start_angle), float(radius), (), (0.0, 1.0), seed)


def _tracked_sqrt(w, seed=None):
    """Choose signs of the principal square roots w along a sampled path so the
    result is continuous, starting closest to seed (or at +w[0])."""
    scale = np.abs(w)
    if np.min(scale) == 0.0:
        raise DomainError("path passes through a branch point")
    dplus = np.abs(w[1:] - w[:-1])
    dminus = np.abs(w[1:] + w[:-1])
    near = np.minimum(dplus, dminus)
    far = np.maximum(dplus, dminus)
    bad = near > _AMBIGUITY_RATIO * far
    if np.any(bad):
        i = int(np.argmax(bad))
        raise StepDensityError(
            f"branch continuation ambiguous between samples {i} and {i + 1}: "
            f"|dv| = {near[i]:.3e} comparable to |v| = {scale[i]:.3e}; increase sampling density"
        )
    flips = np.where(dminus < dplus, -1.0, 1.0)
    signs = np.concatenate(([1.0], np.cumprod(flips)))
    if seed is not None:
        if abs(w[0] - seed) > abs(w[0] + seed):
            signs = -signs
    return signs * w


def continue_v(curve, path, ts=None, points=None, seed=None):
    """Values of v along the path at parameters ts (default: 2049 uniform
    samples of the full loop), continued from the principal square root at
    ts[0] or from the given seed value."""
    if ts is None:
        ts = np.linspace(0.0, 1.0, 2049)
    ts = np.asarray(ts, dtype=float)
    if points is None:
        points = curve.branch_points
    w = np.sqrt(_radicand(path.point(ts), points))
    return _tracked_sqrt(w, seed=seed)


def integrate_contour(path, g, quad=DEFAULT_QUAD):
    """Integral of g(z) dz over the path, one refinement run per smooth piece."""
    from .numerics import integrate_path

    total, err = 0.0 + 0.0j, 0.0
    for t0, t1 in zip(path.pieces[:-1], path.pieces[1:]):
        span = t1 - t0

        def f(s, t0=t0, span=span):
            t = t0 + s * span
            return span * path.velocity(t) * g(path.point(t))

        val, e = integrate_path(f, quad)
        total += val
        err += e
    return total, err


def winding_number(path, point, quad=DEFAULT_QUAD):
    """Winding number of the path around the point (rounded to int)."""
    val, _ = integrate_contour(path, lambda z: 1.0 / (z - point), quad)
    return int(round((val / (2j * np.pi)).real))


class PeriodEngine:
    """Period integrals over the basis loops of a fixed curve.

    Contours are built once with the adaptive margin (margin_scale * 0.25 *
    distance to the nearest outside branch point).  Panel plans are refined
    per (loop, integrand) on the unperturbed curve and then frozen, so
    evaluations at perturbed branch-point values differ smoothly.
    """

    def __init__(self, curve, quad=DEFAULT_QUAD, margin_scale=1.0, dense=2048):
        self.curve = curve
        self.quad = quad
        self.contours = tuple(
            build_contour(curve, k, margin=adaptive_margin(curve, k, 0.25 * margin_scale))
            for k in range(1, 2 * curve.genus + 1)
        )
        self._dense_ts = np.linspace(0.0, 1.0, dense + 1)
        self._tracks = {}
        self._plans = {}
        self._errors = {}

    # -- branch bookkeeping -------------------------------------------------

    def _dense_track(self, k, points):
        key = (k, points)
        track = self._tracks.get(key)
        if track is None:
            path = self.contours[k - 1]
            w = np.sqrt(_radicand(path.point(self._dense_ts), points))
            track = _tracked_sqrt(w, seed=path.base_seed)
            if len(self._tracks) > 256:
                self._tracks.clear()
            self._tracks[key] = track
        return track

    def _v_at(self, k, points, t_nodes):
        path = self.contours[k - 1]
        ref = self._dense_track(k, points)
        w = np.sqrt(_radicand(path.point(t_nodes), points))
        idx = np.clip(np.searchsorted(self._dense_ts, t_nodes, side="right") - 1,
                      0, len(self._dense_ts) - 1)
        anchor = ref[idx]
        signs = np.where(np.abs(w - anchor) <= np.abs(w + anchor), 1.0, -1.0)
        return signs * w

    # -- quadrature ---------------------------------------------------------

    def _piece_nodes(self, k, plan):
        path = self.contours[k - 1]
        x, wts = _gl_nodes(self.quad.order)
        all_t, all_w = [], []
        for (t0, t1), panels in zip(zip(path.pieces[:-1], path.pieces[1:]), plan):
            width = (t1 - t0) / panels
            starts = t0 + np.arange(panels) * width
            t = (starts[:, None] + (x[None, :] + 1.0) * (0.5 * width)).ravel()
            all_t.append(t)
            all_w.append(np.tile(wts * 0.5 * width, panels))
        return np.concatenate(all_t), np.concatenate(all_w)

    def _eval(self, k, ispec, points, plan):
        path = self.contours[k - 1]
        t, w = self._piece_nodes(k, plan)
        z = path.point(t)
        f = path.velocity(t).astype(complex)
        if ispec.m:
            f = f * z**ispec.m
        if ispec.pole_flags:
            if len(ispec.pole_flags) != len(points):
                raise DomainError("pole flags do not match the number of branch points")
            for e, p in zip(ispec.pole_flags, points):
                if e:
                    f = f / (z - p)
        if ispec.n:
            f = f * self._v_at(k, points, t) ** ispec.n
        return complex(np.sum(f * w))

    def _initial_plan(self, k):
        path = self.contours[k - 1]
        spans = np.diff(path.pieces)
        return tuple(max(2, int(round(self.quad.panels * s / max(spans)))) for s in spans)

    def basis_period(self, k, ispec, points=None):
        """(value, error estimate) of the integral over delta_k."""
        if points is None:
            points = self.curve.branch_points
        key = (k, ispec.key())
        plan = self._plans.get(key)
        if plan is not None:
            return self._eval(k, ispec, points, plan), self._errors[key]
        plan = self._initial_plan(k)
        base = self.curve.branch_points
        prev = None
        for _ in range(self.quad.max_refinements + 1):
            val = self._eval(k, ispec, base, plan)
            if prev is not None:
                err = abs(val - prev)
                if err <= self.quad.refine_tol * max(1.0, abs(val)):
                    self._plans[key] = plan
                    self._errors[key] = err
                    if points is base or points == base:
                        return val, err
                    return self._eval(k, ispec, points, plan), err
            prev = val
            plan = tuple(2 * p for p in plan)
        raise QuadratureConvergenceError(
            f"period over delta_{k} of {ispec} did not converge: last two values "
            f"{prev} and {val} differ by {abs(val - prev):.3e}",
            last=val,
            previous=prev,
        )

    def period(self, cycle, ispec, points=None):
        """(value, error estimate) of the integral over sum_k c_k delta_k."""
        if cycle.is_trivial:
            raise DomainError("cycle is trivial (all coefficients zero)")
        if len(cycle.coefficients) != 2 * self.curve.genus:
            raise DomainError("cycle length does not match the curve genus")
        total, err = 0.0 + 0.0j, 0.0
        for k, c in enumerate(cycle.coefficients, start=1):
            if c == 0:
                continue
            val, e = self.basis_period(k, ispec, points)
            total += c * val
            err += abs(c) * e
        return total, err


def period(curve, cycle, ispec, quad=DEFAULT_QUAD):
    """One-shot period integral (value, error estimate) over the given cycle."""
    return PeriodEngine(curve, quad).period(cycle, ispec)


def period_u_derivative(curve, cycle, n, i, quad=DEFAULT_QUAD, diff=None):
    """Finite-difference d/du_i of the period of v^n du, together with the
    closed-form value -(n/2) * period of v^n du/(u - u_i) and their relative
    discrepancy (normalized by max(1, |closed form|))."""
    from .numerics import DEFAULT_DIFF, central_derivative

    if diff is None:
        diff = DEFAULT_DIFF
    npts = len(curve.branch_points)
    if not 0 <= i < npts:
        raise DomainError(f"branch point index {i} outside 0..{npts - 1}")
    engine = PeriodEngine(curve, quad)
    plain = IntegrandSpec(n=n)
    flags = tuple(1 if j == i else 0 for j in range(npts))
    with_pole = IntegrandSpec(n=n, pole_flags=flags)

    def f(ui):
        pts = list(curve.branch_points)
        pts[i] = ui
        return engine.period(cycle, plain, points=tuple(pts))[0]

    fd, _ = central_derivative(f, curve.branch_points[i], k=1, spec=diff)
    closed = -0.5 * n * engine.period(cycle, with_pole)[0]
    residual = abs(fd - closed) / max(1.0, abs(closed))
    return fd, closed, residual
