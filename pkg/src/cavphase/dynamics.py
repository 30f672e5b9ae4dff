"""Hard-wall billiard dynamics: specular traces, PSOS records, Lyapunov.

Sign convention: the tangential momentum p = sin(chi) is the projection of
the post-flight direction on the counterclockwise boundary tangent, so
counterclockwise circulation has p > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import DomainError, GrazingError, NumericalError
from .geometry import BoundaryShape, GRAZING_COS

STATUS_MESSAGES = {
    1: "grazing incidence",
    2: "no forward intersection",
    4: "reflection failure",
}


@dataclass(frozen=True)
class RayState:
    """Ray at a reflection point, after the bounce.

    ``chi`` is the unsigned angle of incidence; ``orientation`` is the sign
    of sin(chi) (+1 for counterclockwise circulation).
    """

    boundary_phi: float
    direction: np.ndarray
    chi: float
    orientation: int

    @property
    def sin_chi(self):
        return self.orientation * math.sin(self.chi)


def launch_state(shape: BoundaryShape, phi, sin_chi) -> RayState:
    """Boundary launch at polar angle ``phi`` with signed sin(chi)."""
    if not -1.0 < sin_chi < 1.0:
        raise DomainError(f"sin_chi must lie in (-1, 1), got {sin_chi}")
    bp = shape.boundary_point(phi)
    cos_chi = math.sqrt(1.0 - sin_chi * sin_chi)
    d = sin_chi * bp.tangent - cos_chi * bp.normal
    return RayState(boundary_phi=bp.phi, direction=d,
                    chi=math.asin(abs(sin_chi)),
                    orientation=1 if sin_chi >= 0 else -1)


def launch_from_interior(shape: BoundaryShape, origin, direction) -> RayState:
    """Normalize an interior point + direction to a boundary RayState."""
    hit = shape.next_intersection(origin, direction)
    if hit.grazing:
        raise GrazingError("interior launch is tangent to the wall", bounce=0)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    bp = hit.point
    p = float(d @ bp.tangent)
    cos_in = float(d @ bp.normal)
    d_refl = d - 2.0 * cos_in * bp.normal
    return RayState(boundary_phi=bp.phi, direction=d_refl,
                    chi=math.asin(min(abs(p), 1.0)),
                    orientation=1 if p >= 0 else -1)


def specular_reflect(direction, normal):
    """d' = d - 2 (d.n) n for an outgoing d (d.n > 0); unit in, unit out."""
    d = np.asarray(direction, dtype=float)
    n = np.asarray(normal, dtype=float)
    dn = float(d @ n)
    if abs(dn) < 1e-12:
        raise GrazingError("direction is tangent to the wall")
    if dn < 0:
        raise DomainError("direction must have an outgoing normal component")
    return d - 2.0 * dn * n


@dataclass
class PsosSeries:
    """Reflection-event record: arrays indexed by bounce."""

    s_norm: np.ndarray
    p: np.ndarray
    weight: np.ndarray
    phi: np.ndarray = None
    chord: np.ndarray = None

    def __len__(self):
        return len(self.s_norm)

    @property
    def mean_free_path(self):
        return float(np.mean(self.chord)) if self.chord is not None else math.nan


def trace(shape: BoundaryShape, initial: RayState, n_bounces: int) -> PsosSeries:
    """Iterate the bounce map; exactly ``n_bounces`` PSOS points, weights 1.

    Raises GrazingError (with the bounce index) if the trajectory becomes
    tangent to the wall within tolerance.
    """
    if n_bounces < 1:
        raise DomainError("n_bounces must be >= 1")
    bp = shape.boundary_point(initial.boundary_phi)
    x, y = bp.position
    dx, dy = float(initial.direction[0]), float(initial.direction[1])
    s, p, phi, chord, status, n_done, *_ = backend.kernels.trace_closed(
        *shape.tables, x, y, dx, dy, bp.phi, int(n_bounces))
    if status == 1:
        raise GrazingError("trace hit grazing incidence", bounce=n_done)
    if status != 0:
        raise NumericalError(
            f"trace failed at bounce {n_done}: {STATUS_MESSAGES.get(status, status)}")
    return PsosSeries(s_norm=s, p=p, weight=np.ones_like(s), phi=phi, chord=chord)


def final_state(shape: BoundaryShape, initial: RayState, n_bounces: int) -> RayState:
    """State after ``n_bounces`` reflections (direction is post-reflection)."""
    bp = shape.boundary_point(initial.boundary_phi)
    x, y = bp.position
    dx, dy = float(initial.direction[0]), float(initial.direction[1])
    s, p, phi, chord, status, n_done, x1, y1, dx1, dy1 = backend.kernels.trace_closed(
        *shape.tables, x, y, dx, dy, bp.phi, int(n_bounces))
    if status != 0:
        raise NumericalError(f"trace failed at bounce {n_done}")
    return RayState(boundary_phi=float(phi[-1]),
                    direction=np.array([dx1, dy1]),
                    chi=math.asin(min(abs(p[-1]), 1.0)),
                    orientation=1 if p[-1] >= 0 else -1)


@dataclass
class LyapunovResult:
    lam: float                 # mean exponent per bounce
    stderr: float
    n_used: int
    n_skipped: int
    mean_free_path: float
    quality_warning: bool = False
    log_growth: np.ndarray = field(default=None, repr=False)


def lyapunov(shape: BoundaryShape, initial: RayState, n_bounces: int,
             delta0: float = None) -> LyapunovResult:
    """Benettin two-trajectory estimate of the maximal exponent per bounce.

    A shadow trajectory, offset by delta0 in normalized Birkhoff coordinates
    (s/perimeter, p), is renormalized to that separation after every bounce;
    the exponent is the mean log growth.  Bounces where either trajectory
    grazes are skipped (shadow reseeded); above 1% skips the result carries a
    quality warning.
    """
    if n_bounces < 10:
        raise DomainError("n_bounces must be >= 10 for a Lyapunov estimate")
    if delta0 is None:
        delta0 = 1e-8 * shape.R0
    d0 = delta0 / shape.perimeter
    kern = backend.kernels
    tables = shape.tables

    def embed(s_norm, p):
        phi = shape.arc_length_inverse((s_norm % 1.0) * shape.perimeter)
        bp = shape.boundary_point(phi)
        cos_chi = math.sqrt(max(1.0 - p * p, 0.0))
        d = p * bp.tangent - cos_chi * bp.normal
        return bp.position[0], bp.position[1], d[0], d[1], phi

    bp = shape.boundary_point(initial.boundary_phi)
    ref = (bp.position[0], bp.position[1],
           float(initial.direction[0]), float(initial.direction[1]), bp.phi)
    s_ref = bp.s / shape.perimeter
    p_ref = initial.sin_chi
    u = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))
    sh_s, sh_p = s_ref + d0 * u[0], p_ref + d0 * u[1]
    if abs(sh_p) >= 1.0:
        sh_p = p_ref - d0 * u[1]
    shadow = embed(sh_s, sh_p)

    logs = []
    chords = []
    skipped = 0
    while len(logs) < n_bounces:
        st_r, phi_r, s_r, p_r, xr, yr, dxr, dyr, ch = kern.step_closed(*tables, *ref)
        st_s, phi_s, s_s, p_s, xs, ys, dxs, dys, _ = kern.step_closed(*tables, *shadow)
        if st_r != 0 or st_s != 0:
            skipped += 1
            if st_r != 0:
                raise GrazingError("reference trajectory failed", bounce=len(logs))
            # reseed the shadow next to the current reference state
            shadow = embed(s_ref + d0 * u[0], min(max(p_ref + d0 * u[1], -0.999999), 0.999999))
            if skipped > max(10, n_bounces):
                raise NumericalError("lyapunov: too many skipped bounces")
            continue
        ds = s_s - s_r
        ds -= round(ds)          # circular distance in s_norm
        dp = p_s - p_r
        dist = math.hypot(ds, dp)
        if dist == 0.0:
            skipped += 1
            shadow = embed(s_r + d0 * u[0], min(max(p_r + d0 * u[1], -0.999999), 0.999999))
            ref = (xr, yr, dxr, dyr)
            s_ref, p_ref = s_r, p_r
            continue
        logs.append(math.log(dist / d0))
        chords.append(ch)
        # renormalize the shadow to distance d0 along the current offset
        scale = d0 / dist
        ns = s_r + ds * scale
        np_ = p_r + dp * scale
        if abs(np_) >= 1.0:
            np_ = p_r - dp * scale
        shadow = embed(ns, np_)
        ref = (xr, yr, dxr, dyr, phi_r)
        s_ref, p_ref = s_r, p_r

    logs = np.asarray(logs)
    lam = float(np.mean(logs))
    stderr = float(np.std(logs, ddof=1) / math.sqrt(len(logs)))
    return LyapunovResult(
        lam=lam, stderr=stderr, n_used=len(logs), n_skipped=skipped,
        mean_free_path=float(np.mean(chords)),
        quality_warning=skipped > 0.01 * n_bounces,
        log_growth=logs)
