"""Ray dynamics with a non-circular dispersion (Fermi) contour.

Propagation is a straight flight along the group velocity (the outward
contour normal); a wall reflection conserves the wavevector component along
the boundary tangent and selects, among on-contour solutions with inward
group velocity, the one whose normal wavevector magnitude is closest to the
incoming one.  The PSOS ordinate is k_par normalized by the contour maximum,
so p is in [-1, 1].

The default trigonal contour phase is pi/2 (k_F = k0(1 - beta sin 3*theta)),
which makes the theta -> -theta mirror of the contour coincide with its
time reverse; the union of a run with its mirrored-contour partner then
restores the up-down symmetry of the PSOS that a single orientation breaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .dynamics import PsosSeries
from .errors import DomainError, GrazingError, NumericalError, ReflectionFailureError
from .geometry import BoundaryShape

TWO_PI = 2.0 * math.pi

_CONTOUR_SCAN_N = 2048
_CONTOUR_VALIDITY_N = 8192


class FermiContour:
    """Polar dispersion contour k_F(theta) = k0(1 + sum beta_m cos(m theta + delta_m))."""

    def __init__(self, k0=1.0, harmonics=()):
        if not (k0 > 0):
            raise DomainError(f"k0 must be positive, got {k0}")
        ms, beta, delta = [], [], []
        for i, h in enumerate(harmonics):
            if len(h) == 2:
                m, b = h
                d = 0.0
            else:
                m, b, d = h
            if int(m) != m or m < 1:
                raise DomainError(f"harmonics[{i}]: m must be a positive integer, got {m}")
            ms.append(int(m))
            beta.append(float(b))
            delta.append(float(d))
        self.k0 = float(k0)
        self.ms = np.asarray(ms, dtype=np.int64)
        self.beta = np.asarray(beta, dtype=np.float64)
        self.delta = np.asarray(delta, dtype=np.float64)

        th = np.linspace(0.0, TWO_PI, _CONTOUR_VALIDITY_N, endpoint=False)
        kf = self.k_f(th)
        if not (kf.min() > 0):
            raise DomainError(
                f"contour radius non-positive (min k_F = {kf.min():.4g})")
        self.k_min = float(kf.min())
        self.k_max = float(kf.max())

        scan = np.linspace(0.0, TWO_PI, _CONTOUR_SCAN_N + 1)
        k_scan = self.k_f(scan)
        self._scan_kx = k_scan * np.cos(scan)
        self._scan_ky = k_scan * np.sin(scan)
        self._scan_kx[-1] = self._scan_kx[0]
        self._scan_ky[-1] = self._scan_ky[0]

    @property
    def is_circular(self):
        return len(self.ms) == 0

    def k_f(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        k = np.ones_like(theta)
        for m, b, d in zip(self.ms, self.beta, self.delta):
            k = k + b * np.cos(m * theta + d)
        return self.k0 * k

    def mirrored(self):
        """Contour reflected about the k_x axis (theta -> -theta)."""
        return FermiContour(self.k0, [(m, b, -d) for m, b, d
                                      in zip(self.ms, self.beta, self.delta)])

    @property
    def tables(self):
        return (self.k0, self.ms, self.beta, self.delta,
                self._scan_kx, self._scan_ky)

    def __repr__(self):
        hs = ", ".join(f"({m}, {b}, {d})" for m, b, d
                       in zip(self.ms, self.beta, self.delta))
        return f"FermiContour(k0={self.k0}, harmonics=[{hs}])"


def trigonal_contour(beta3=0.2, k0=1.0, delta3=math.pi / 2):
    return FermiContour(k0=k0, harmonics=[(3, beta3, delta3)])


def elliptic_contour(beta2, k0=1.0, delta2=0.0):
    """Two-fold contour standing in for a birefringent (elliptical) dispersion."""
    return FermiContour(k0=k0, harmonics=[(2, beta2, delta2)])


@dataclass(frozen=True)
class AnisoRayState:
    boundary_phi: float
    wavevector: np.ndarray
    group_direction: np.ndarray


def contour_state(contour: FermiContour, theta):
    """Wavevector on the contour at angle theta and its group direction."""
    theta = float(theta)
    k = float(contour.k_f(theta))
    wavevector = np.array([k * math.cos(theta), k * math.sin(theta)])
    gx, gy = backend.kernels.contour_group_dir(
        contour.k0, contour.ms, contour.beta, contour.delta, theta)
    return wavevector, np.array([gx, gy])


def aniso_launch(shape: BoundaryShape, contour: FermiContour, phi, theta) -> AnisoRayState:
    """State at boundary angle phi with wavevector at contour angle theta.

    The group velocity must point into the cavity at that boundary point.
    """
    bp = shape.boundary_point(phi)
    wavevector, group = contour_state(contour, theta)
    if float(group @ bp.normal) >= 0.0:
        raise DomainError(
            "group velocity does not point into the cavity at this launch")
    return AnisoRayState(boundary_phi=bp.phi, wavevector=wavevector,
                         group_direction=group)


def aniso_reflect(contour: FermiContour, incoming: AnisoRayState,
                  tangent, normal) -> AnisoRayState:
    """Tangential-wavevector-conserving reflection at a wall element."""
    t = np.asarray(tangent, dtype=float)
    n = np.asarray(normal, dtype=float)
    kin = incoming.wavevector
    if float(incoming.group_direction @ n) <= 0.0:
        raise DomainError("incoming group velocity must have an outgoing normal component")
    gin = incoming.group_direction
    ok, kx, ky, gx, gy = backend.kernels.aniso_reflect_kernel(
        *contour.tables, float(kin[0]), float(kin[1]),
        float(gin[0]), float(gin[1]),
        float(t[0]), float(t[1]), float(n[0]), float(n[1]))
    if not ok:
        raise ReflectionFailureError(
            "no on-contour outgoing wavevector with inward group velocity")
    return AnisoRayState(boundary_phi=incoming.boundary_phi,
                         wavevector=np.array([kx, ky]),
                         group_direction=np.array([gx, gy]))


def aniso_trace(shape: BoundaryShape, contour: FermiContour,
                initial: AnisoRayState, n_bounces: int,
                on_failure="raise") -> PsosSeries:
    """PSOS record of the anisotropic bounce map; p = k_par / max k_F.

    Reflection failures (no admissible outgoing wavevector, possible on
    non-convex contours) terminate the trajectory: with on_failure="raise"
    they raise ReflectionFailureError, with "truncate" the partial series up
    to the failing bounce is returned.
    """
    if n_bounces < 1:
        raise DomainError("n_bounces must be >= 1")
    if on_failure not in ("raise", "truncate"):
        raise DomainError(f"on_failure must be 'raise' or 'truncate', got {on_failure!r}")
    bp = shape.boundary_point(initial.boundary_phi)
    s, kpar, phi, status, n_done, kx, ky = backend.kernels.trace_aniso(
        *shape.tables, *contour.tables,
        bp.position[0], bp.position[1],
        float(initial.wavevector[0]), float(initial.wavevector[1]),
        float(initial.group_direction[0]), float(initial.group_direction[1]),
        bp.phi, int(n_bounces))
    if status == 1:
        raise GrazingError("anisotropic trace hit grazing incidence", bounce=n_done)
    if status == 4 and on_failure == "raise":
        raise ReflectionFailureError(
            f"reflection failure at bounce {n_done}: no admissible outgoing wavevector")
    if status not in (0, 4):
        raise NumericalError(f"anisotropic trace failed at bounce {n_done}")
    return PsosSeries(s_norm=s, p=kpar / contour.k_max,
                      weight=np.ones_like(s), phi=phi)


def effective_index(contour_inner: FermiContour, k_outer: float):
    """Ratio max_theta k_F(theta) / k_outer (effective refractive index)."""
    if not (k_outer > 0):
        raise DomainError(f"k_outer must be positive, got {k_outer}")
    return contour_inner.k_max / k_outer
