"""Cosine-harmonic cavity boundaries and their differential geometry.

A boundary is the polar curve r(phi) = R0 * (1 + sum_m eps_m cos(m phi)).
Every curve of this form with r > 0 is automatically star-shaped about the
origin, so validity reduces to positivity of r on a fine grid.

Arc length is tabulated once per shape on a dense uniform grid (cubic-spline
antiderivative of the speed |dB/dphi|) and afterwards evaluated in O(1) by a
cubic Hermite interpolant; the same table drives the monotone inversion
s -> phi.  Ray-boundary intersections use a precomputed boundary-point table
to bracket the roots of the line equation along the curve, then polish each
bracket with safeguarded Newton on the exact trigonometric boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, RangeError, ShapeError

TWO_PI = 2.0 * math.pi

# Tolerance below which |cos chi| counts as grazing incidence.
GRAZING_COS = 1e-9

_TABLE_N = 8192   # arc-length Hermite knots (accuracy ~1e-12 relative)
_SCAN_N = 1024    # boundary samples used to bracket intersection roots
_VALIDITY_N = 16384


@dataclass(frozen=True)
class BoundaryPoint:
    """One point of the boundary with its local frame.

    ``tangent`` follows the counterclockwise orientation; ``normal`` points
    outward; ``curvature`` is positive where the wall curves toward the
    interior (everywhere, for convex shapes).
    """

    phi: float
    position: np.ndarray
    s: float
    tangent: np.ndarray
    normal: np.ndarray
    curvature: float

    @property
    def x(self):
        return self.position[0]

    @property
    def y(self):
        return self.position[1]


@dataclass(frozen=True)
class Intersection:
    """Result of a ray-boundary query; ``grazing`` flags near-tangency."""

    point: BoundaryPoint
    distance: float
    grazing: bool


class BoundaryShape:
    """Immutable star-shaped cavity boundary with cached geometry tables."""

    def __init__(self, R0=1.0, harmonics=()):
        if not (R0 > 0):
            raise ShapeError(f"R0 must be positive, got {R0}")
        ms, eps = [], []
        for i, (m, e) in enumerate(harmonics):
            if int(m) != m or m < 1:
                raise ShapeError(f"harmonics[{i}]: m must be a positive integer, got {m}")
            ms.append(int(m))
            eps.append(float(e))
        self.R0 = float(R0)
        self.ms = np.asarray(ms, dtype=np.int64)
        self.eps = np.asarray(eps, dtype=np.float64)

        phi_fine = np.linspace(0.0, TWO_PI, _VALIDITY_N, endpoint=False)
        r_fine = self.radius(phi_fine)
        if not (r_fine.min() > 0):
            i = int(np.argmin(r_fine))
            raise ShapeError(
                f"boundary radius non-positive near phi={phi_fine[i]:.4f} "
                f"(min r = {r_fine.min():.4g}); reduce the harmonic amplitudes")
        self.r_min = float(r_fine.min())
        self.r_max = float(r_fine.max())

        # Arc-length table: cumulative integral of the speed, spline-accurate.
        knots = np.linspace(0.0, TWO_PI, _TABLE_N + 1)
        speed = self._speed(knots)
        anti = CubicSpline(knots, speed, bc_type="periodic").antiderivative()
        self._phi_step = TWO_PI / _TABLE_N
        self._s_knots = anti(knots)
        self._g_knots = speed
        self.perimeter = float(self._s_knots[-1])

        # Boundary-point table for intersection bracketing; the wrap entry
        # duplicates index 0 exactly so the seam cell brackets correctly.
        scan = np.linspace(0.0, TWO_PI, _SCAN_N + 1)
        r_scan = self.radius(scan)
        self._scan_bx = r_scan * np.cos(scan)
        self._scan_by = r_scan * np.sin(scan)
        self._scan_bx[-1] = self._scan_bx[0]
        self._scan_by[-1] = self._scan_by[0]

    # -- radial profile and derivatives ------------------------------------

    def radius(self, phi):
        phi = np.asarray(phi, dtype=np.float64)
        r = np.ones_like(phi)
        for m, e in zip(self.ms, self.eps):
            r = r + e * np.cos(m * phi)
        return self.R0 * r

    def dradius(self, phi):
        phi = np.asarray(phi, dtype=np.float64)
        dr = np.zeros_like(phi)
        for m, e in zip(self.ms, self.eps):
            dr = dr - e * m * np.sin(m * phi)
        return self.R0 * dr

    def d2radius(self, phi):
        phi = np.asarray(phi, dtype=np.float64)
        d2 = np.zeros_like(phi)
        for m, e in zip(self.ms, self.eps):
            d2 = d2 - e * m * m * np.cos(m * phi)
        return self.R0 * d2

    def _speed(self, phi):
        r = self.radius(phi)
        dr = self.dradius(phi)
        return np.sqrt(r * r + dr * dr)

    # -- arc length ---------------------------------------------------------

    def arc_length(self, phi):
        """s(phi) via the cached cubic Hermite table; phi wrapped to [0, 2pi)."""
        phi = np.asarray(phi, dtype=np.float64)
        wraps = np.floor(phi / TWO_PI)
        phi_w = phi - wraps * TWO_PI
        s = _hermite_eval(phi_w, self._phi_step, self._s_knots, self._g_knots)
        return s + wraps * self.perimeter

    def arc_length_inverse(self, s):
        """Monotone inverse of ``arc_length`` on one period.

        Raises RangeError unless 0 <= s < perimeter.
        """
        s = float(s)
        if not (0.0 <= s < self.perimeter):
            raise RangeError(
                f"arc length {s} outside [0, {self.perimeter})")
        sk = self._s_knots
        j = int(np.searchsorted(sk, s, side="right") - 1)
        j = min(max(j, 0), _TABLE_N - 1)
        h = self._phi_step
        lo, hi = j * h, (j + 1) * h
        phi = lo + (s - sk[j]) / max(sk[j + 1] - sk[j], 1e-300) * h
        for _ in range(60):
            f = _hermite_eval_scalar(phi, h, sk, self._g_knots) - s
            if f > 0.0:
                hi = phi
            else:
                lo = phi
            g = _hermite_deriv_scalar(phi, h, sk, self._g_knots)
            step = f / g
            phi_new = phi - step
            if not (lo < phi_new < hi):
                phi_new = 0.5 * (lo + hi)
            if abs(phi_new - phi) < 1e-15:
                phi = phi_new
                break
            phi = phi_new
        return min(phi, TWO_PI * (1.0 - 1e-16))

    # -- local frame ----------------------------------------------------------

    def boundary_point(self, phi):
        """Position, frame, curvature and arc length at polar angle ``phi``."""
        phi_w = float(phi) % TWO_PI
        r = float(self.radius(phi_w))
        dr = float(self.dradius(phi_w))
        d2r = float(self.d2radius(phi_w))
        c, sn = math.cos(phi_w), math.sin(phi_w)
        pos = np.array([r * c, r * sn])
        # dB/dphi, of norm sqrt(r^2 + r'^2)
        vx = dr * c - r * sn
        vy = dr * sn + r * c
        g = math.hypot(vx, vy)
        tangent = np.array([vx / g, vy / g])
        normal = np.array([tangent[1], -tangent[0]])
        curv = (r * r + 2.0 * dr * dr - r * d2r) / g**3
        return BoundaryPoint(phi=phi_w, position=pos, s=float(self.arc_length(phi_w)),
                             tangent=tangent, normal=normal, curvature=curv)

    # -- ray intersection -----------------------------------------------------

    def contains(self, point):
        x, y = float(point[0]), float(point[1])
        rho = math.hypot(x, y)
        if rho == 0.0:
            return True
        return rho < float(self.radius(math.atan2(y, x)))

    def next_intersection(self, origin, direction):
        """First boundary crossing of the ray ``origin + t*direction``, t > 0.

        ``origin`` must lie strictly inside.  Near-tangent hits are returned
        with ``grazing=True`` so the caller can decide how to proceed.
        """
        ox, oy = float(origin[0]), float(origin[1])
        dx, dy = float(direction[0]), float(direction[1])
        norm = math.hypot(dx, dy)
        if norm == 0.0:
            raise DomainError("direction must be a nonzero vector")
        dx, dy = dx / norm, dy / norm
        if not self.contains((ox, oy)):
            raise DomainError(f"ray origin ({ox}, {oy}) is not strictly inside the boundary")
        from . import backend
        phi, t = backend.kernels.intersect_ray(
            self.R0, self.ms, self.eps, self._scan_bx, self._scan_by,
            ox, oy, dx, dy, 1e-12 * self.R0)
        if not math.isfinite(phi):
            raise DomainError("no forward boundary intersection found")
        point = self.boundary_point(phi)
        grazing = abs(dx * point.normal[0] + dy * point.normal[1]) < GRAZING_COS
        return Intersection(point=point, distance=t, grazing=grazing)

    # -- kernel plumbing --------------------------------------------------------

    @property
    def tables(self):
        """Flat arrays consumed by the trace kernels (immutable views)."""
        return (self.R0, self.ms, self.eps, self._s_knots, self._g_knots,
                self._scan_bx, self._scan_by)

    def __repr__(self):
        hs = ", ".join(f"({m}, {e})" for m, e in zip(self.ms, self.eps))
        return f"BoundaryShape(R0={self.R0}, harmonics=[{hs}])"


# -- cached-table cubic Hermite (uniform knots) --------------------------------

def _hermite_eval(phi, h, s_knots, g_knots):
    phi = np.asarray(phi, dtype=np.float64)
    j = np.minimum((phi / h).astype(np.int64), len(s_knots) - 2)
    u = phi / h - j
    u2 = u * u
    u3 = u2 * u
    return ((2 * u3 - 3 * u2 + 1) * s_knots[j]
            + (u3 - 2 * u2 + u) * h * g_knots[j]
            + (-2 * u3 + 3 * u2) * s_knots[j + 1]
            + (u3 - u2) * h * g_knots[j + 1])


def _hermite_eval_scalar(phi, h, s_knots, g_knots):
    j = min(int(phi / h), len(s_knots) - 2)
    u = phi / h - j
    u2 = u * u
    u3 = u2 * u
    return ((2 * u3 - 3 * u2 + 1) * s_knots[j]
            + (u3 - 2 * u2 + u) * h * g_knots[j]
            + (-2 * u3 + 3 * u2) * s_knots[j + 1]
            + (u3 - u2) * h * g_knots[j + 1])


def _hermite_deriv_scalar(phi, h, s_knots, g_knots):
    j = min(int(phi / h), len(s_knots) - 2)
    u = phi / h - j
    u2 = u * u
    return ((6 * u2 - 6 * u) * s_knots[j] / h
            + (3 * u2 - 4 * u + 1) * g_knots[j]
            + (-6 * u2 + 6 * u) * s_knots[j + 1] / h
            + (3 * u2 - 2 * u) * g_knots[j + 1])


# -- presets --------------------------------------------------------------------

def circle(R0=1.0):
    return BoundaryShape(R0=R0)


def quadrupole(eps2, R0=1.0):
    return BoundaryShape(R0=R0, harmonics=[(2, eps2)])


def onigiri(eps3, R0=1.0):
    return BoundaryShape(R0=R0, harmonics=[(3, eps3)])


def limacon(eps1, R0=1.0):
    return BoundaryShape(R0=R0, harmonics=[(1, eps1)])


SHAPE_PRESETS = {
    "circle": circle,
    "quadrupole": quadrupole,
    "onigiri": onigiri,
    "limacon": limacon,
}
