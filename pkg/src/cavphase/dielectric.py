"""Open dielectric cavity: Fresnel escape, steady distribution, far field.

Polarization naming follows the microcavity convention used throughout this
package and documented in the README: TE has the magnetic field out of plane
(electric field in plane), so its internal-reflection coefficient has a
Brewster zero at tan(chi_B) = 1/n and a step-like transmission; TM has the
electric field out of plane and no Brewster zero.  The escape model splits
intensity deterministically: a fraction R of the arriving weight survives
each sub-critical bounce, the remainder refracts to the far field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import DomainError, EmptyDistributionError, GrazingError
from .geometry import BoundaryPoint, BoundaryShape

POLARIZATIONS = ("TE", "TM")


@dataclass(frozen=True)
class OpticalMedium:
    n: float
    polarization: str = "TE"

    def __post_init__(self):
        if self.n < 1.0:
            raise DomainError(f"refractive index must be >= 1, got {self.n}")
        if self.polarization not in POLARIZATIONS:
            raise DomainError(f"polarization must be TE or TM, got {self.polarization!r}")

    @property
    def critical_sin_chi(self):
        return 1.0 / self.n

    @property
    def is_te(self):
        return self.polarization == "TE"


def fresnel_amplitude(n, chi, polarization):
    """Complex amplitude reflection coefficient, medium n -> vacuum.

    Above the critical angle the transmitted normal wavevector is evanescent
    (+i branch), giving |r| = 1 with the total-internal-reflection phase.
    """
    chi = np.asarray(chi, dtype=float)
    sin_chi = np.sin(chi)
    cos_chi = np.cos(chi)
    arg = 1.0 - (n * sin_chi) ** 2
    cos_t = np.where(arg >= 0.0,
                     np.sqrt(np.abs(arg)) + 0.0j,
                     1j * np.sqrt(np.abs(arg)))
    if polarization == "TE":
        r = (cos_chi / n - cos_t) / (cos_chi / n + cos_t)
    elif polarization == "TM":
        r = (n * cos_chi - cos_t) / (n * cos_chi + cos_t)
    else:
        raise DomainError(f"unknown polarization {polarization!r}")
    return r


def fresnel_transmittance(n, chi, polarization):
    """Energy transmittance matching ``fresnel_amplitude`` (flux-corrected)."""
    chi = np.asarray(chi, dtype=float)
    r = fresnel_amplitude(n, chi, polarization)
    t = 1.0 + r
    arg = 1.0 - (n * np.sin(chi)) ** 2
    cos_t = np.sqrt(np.clip(arg, 0.0, None))
    cos_chi = np.cos(chi)
    with np.errstate(invalid="ignore", divide="ignore"):
        if polarization == "TE":
            # H_z formulation: flux ~ Re(k_z/eps) |H|^2
            T = (cos_t * np.abs(t) ** 2) / (cos_chi / n)
        else:
            T = (cos_t * np.abs(t) ** 2) / (n * cos_chi)
    return np.where(arg > 0.0, T, 0.0)


def fresnel_reflectance(n, chi, polarization):
    """Intensity reflectance in [0, 1]; exactly 1 for sin(chi) >= 1/n."""
    chi_arr = np.asarray(chi, dtype=float)
    if np.any(chi_arr < 0) or np.any(chi_arr >= 0.5 * math.pi):
        raise DomainError("chi must lie in [0, pi/2)")
    R = np.abs(fresnel_amplitude(n, chi_arr, polarization)) ** 2
    R = np.where(np.sin(chi_arr) >= 1.0 / n, 1.0, np.minimum(R, 1.0))
    if np.isscalar(chi) or np.ndim(chi) == 0:
        return float(R)
    return R


def brewster_angle(n):
    """Internal Brewster angle of the TE (in-plane E) polarization."""
    return math.atan2(1.0, n)


def refract_to_farfield(shape: BoundaryShape, point: BoundaryPoint, chi, n, side):
    """Far-field angle of the ray refracted at ``point``; Snell about the normal.

    ``side`` (+1/-1) selects the tangential sense (sign of sin chi).
    Raises DomainError when the incidence is totally internally reflected.
    """
    sin_chi = math.sin(float(chi))
    if n * sin_chi >= 1.0:
        raise DomainError(
            f"total internal reflection: n sin(chi) = {n * sin_chi:.6f} >= 1")
    sin_out = n * sin_chi
    cos_out = math.sqrt(1.0 - sin_out * sin_out)
    sgn = 1.0 if side >= 0 else -1.0
    d = sgn * sin_out * point.tangent + cos_out * point.normal
    return math.atan2(d[1], d[0]) % (2.0 * math.pi)


# -- ensemble simulations -----------------------------------------------------

@dataclass
class ConservationAudit:
    launched: float
    emitted: float
    surviving: float

    @property
    def relative_error(self):
        return abs(self.launched - self.emitted - self.surviving) / self.launched

    def as_dict(self):
        return {"launched": self.launched, "emitted": self.emitted,
                "surviving": self.surviving, "relative_error": self.relative_error}


@dataclass
class SteadyResult:
    hist: np.ndarray               # (s_bins, p_bins), unit total mass
    s_edges: np.ndarray
    p_edges: np.ndarray
    audit: ConservationAudit
    n_grazing: int
    seed: int


@dataclass
class FarFieldResult:
    intensity: np.ndarray          # per theta bin, recorded window
    theta_edges: np.ndarray
    directionality: float          # max 90-degree window mass / total
    directionality_stderr: float
    audit: ConservationAudit
    n_grazing: int
    seed: int
    per_batch_u: np.ndarray = field(default=None, repr=False)
    per_traj_theta: list = field(default=None, repr=False)


_CHUNK = 256   # fixed chunk size: reductions are ordered by chunk index, so
               # results are identical for any worker count


def launch_point(seed, index, band):
    """Launch (s_norm, p) for one trajectory: its own Philox substream."""
    rng = np.random.Generator(np.random.Philox(
        key=np.array([np.uint64(seed), np.uint64(index)], dtype=np.uint64)))
    s_norm = rng.uniform()
    mag = rng.uniform(band[0], band[1])
    sign = 1.0 if rng.uniform() < 0.5 else -1.0
    return s_norm, sign * mag


def _check_band(band):
    lo, hi = band
    if not (0.0 <= lo < hi <= 1.0):
        raise DomainError(f"launch band must satisfy 0 <= lo < hi <= 1, got {band}")
    return float(lo), float(hi)


def _chunked(total):
    for start in range(0, total, _CHUNK):
        yield start, min(start + _CHUNK, total)


def _run_chunks(worker, ensemble, n_threads):
    """Evaluate worker(start, stop) over fixed chunks, results in chunk order."""
    spans = list(_chunked(ensemble))
    if n_threads <= 1 or len(spans) <= 1:
        return [worker(a, b) for a, b in spans]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        futures = [pool.submit(worker, a, b) for a, b in spans]
        return [f.result() for f in futures]


def _open_trajectory(shape, medium, s_norm, p0, transient, record, w_floor=1e-12):
    phi0 = shape.arc_length_inverse(s_norm * shape.perimeter)
    bp = shape.boundary_point(phi0)
    cos_chi = math.sqrt(1.0 - p0 * p0)
    d = p0 * bp.tangent - cos_chi * bp.normal
    return backend.kernels.trace_open(
        *shape.tables, bp.position[0], bp.position[1], d[0], d[1], bp.phi,
        medium.n, medium.is_te, transient + record, w_floor)


def default_launch_band(medium, margin=0.05):
    """Confined-region band: |p| above the critical line plus a margin."""
    return (min(medium.critical_sin_chi + margin, 0.95), 1.0)


def steady_distribution(shape, medium, ensemble, transient, record, seed,
                        launch_band=None, s_bins=128, p_bins=128, n_threads=1):
    """Intensity-weighted PSOS histogram after the transient (unit mass).

    Launches are uniform in (s_norm, p) over ``launch_band`` (by default the
    totally-internally-reflected region, so the distribution is populated by
    transport along the unstable directions rather than by the launch).
    """
    if ensemble < 1:
        raise DomainError("ensemble must be >= 1")
    if transient < 0 or record < 1:
        raise DomainError("transient must be >= 0 and record >= 1")
    band = _check_band(launch_band or default_launch_band(medium))
    s_edges = np.linspace(0.0, 1.0, s_bins + 1)
    p_edges = np.linspace(-1.0, 1.0, p_bins + 1)

    def worker(start, stop):
        hist = np.zeros((s_bins, p_bins))
        launched = emitted = surviving = 0.0
        n_grazing = 0
        acc_s, acc_p, acc_w = [], [], []
        for i in range(start, stop):
            s0, p0 = launch_point(seed, i, band)
            s, p, w, th, em, status, n_done, w_final = _open_trajectory(
                shape, medium, s0, p0, transient, record)
            launched += 1.0
            emitted += em.sum()
            surviving += w_final
            if status == 1:
                n_grazing += 1
            if n_done > transient:
                sl = slice(transient, n_done)
                acc_s.append(s[sl])
                acc_p.append(p[sl])
                acc_w.append(w[sl])
        if acc_s:
            hist += np.histogram2d(np.concatenate(acc_s), np.concatenate(acc_p),
                                   bins=(s_edges, p_edges),
                                   weights=np.concatenate(acc_w))[0]
        return hist, launched, emitted, surviving, n_grazing

    hist = np.zeros((s_bins, p_bins))
    launched = emitted = surviving = 0.0
    n_grazing = 0
    for h, la, em_, su, gr in _run_chunks(worker, ensemble, n_threads):
        hist += h
        launched += la
        emitted += em_
        surviving += su
        n_grazing += gr
    if hist.sum() <= 0.0:
        raise EmptyDistributionError(
            "all intensity decayed before the recording window",
            diagnostics={"ensemble": ensemble, "transient": transient,
                         "emitted": emitted, "surviving": surviving})
    hist /= hist.sum()
    return SteadyResult(hist=hist, s_edges=s_edges, p_edges=p_edges,
                        audit=ConservationAudit(launched, emitted, surviving),
                        n_grazing=n_grazing, seed=seed)


def directionality(intensity, theta_edges):
    """Max intensity in any 90-degree sliding window over total intensity."""
    total = intensity.sum()
    if total <= 0:
        return 0.0
    bins = len(intensity)
    win = max(1, bins // 4)
    ext = np.concatenate([intensity, intensity[:win - 1]])
    sums = np.convolve(ext, np.ones(win), mode="valid")[:bins]
    return float(sums.max() / total)


def farfield_emission(shape, medium, ensemble, transient, record, bins, seed,
                      launch_band=None, n_batches=20, n_threads=1):
    """Far-field histogram of refracted escape plus the directionality metric.

    The histogram collects emission during the recording window; the
    conservation audit covers the whole run.  The directionality standard
    error comes from batching trajectories.
    """
    if bins < 4:
        raise DomainError("bins must be >= 4")
    band = _check_band(launch_band or default_launch_band(medium))
    theta_edges = np.linspace(0.0, 2.0 * math.pi, bins + 1)

    def worker(start, stop):
        launched = emitted = surviving = 0.0
        n_grazing = 0
        acc_th, acc_em, acc_batch = [], [], []
        for i in range(start, stop):
            s0, p0 = launch_point(seed, i, band)
            s, p, w, th, em, status, n_done, w_final = _open_trajectory(
                shape, medium, s0, p0, transient, record)
            launched += 1.0
            emitted += em.sum()
            surviving += w_final
            if status == 1:
                n_grazing += 1
            if n_done > transient:
                sl = slice(transient, n_done)
                mask = em[sl] > 0.0
                if mask.any():
                    acc_th.append(th[sl][mask])
                    acc_em.append(em[sl][mask])
                    acc_batch.append(np.full(int(mask.sum()), i % n_batches))
        if acc_th:
            bh, _, _ = np.histogram2d(
                np.concatenate(acc_batch), np.concatenate(acc_th),
                bins=(np.arange(n_batches + 1), theta_edges),
                weights=np.concatenate(acc_em))
        else:
            bh = np.zeros((n_batches, bins))
        return bh, launched, emitted, surviving, n_grazing

    batch_hists = np.zeros((n_batches, bins))
    launched = emitted = surviving = 0.0
    n_grazing = 0
    for bh, la, em_, su, gr in _run_chunks(worker, ensemble, n_threads):
        batch_hists += bh
        launched += la
        emitted += em_
        surviving += su
        n_grazing += gr
    hist = batch_hists.sum(axis=0)
    if hist.sum() <= 0.0:
        raise EmptyDistributionError(
            "no emission recorded",
            diagnostics={"ensemble": ensemble, "transient": transient,
                         "emitted": emitted, "surviving": surviving})
    u = directionality(hist, theta_edges)
    per_batch = np.array([directionality(bh, theta_edges) if bh.sum() > 0 else np.nan
                          for bh in batch_hists])
    valid = per_batch[np.isfinite(per_batch)]
    stderr = float(np.std(valid, ddof=1) / math.sqrt(len(valid))) if len(valid) > 1 else math.inf
    return FarFieldResult(intensity=hist, theta_edges=theta_edges,
                          directionality=u, directionality_stderr=stderr,
                          audit=ConservationAudit(launched, emitted, surviving),
                          n_grazing=n_grazing, seed=seed, per_batch_u=batch_hists)
