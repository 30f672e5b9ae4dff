"""Boundary Husimi functions of open cavities.

The boundary wave data (psi, psi') is projected onto periodized coherent
states to build the four phase-space densities: incident/emergent on the
inside/outside of the interface.  The combination for one sheet is

    H = (k / 2 pi) * | -F h  +/-  (i / (k F)) h' |^2,      F = sqrt(n_j cos chi_j)

with '+' for the incident and '-' for the emergent sheet, h and h' the
coherent-state overlaps of psi and psi'.  The inside sheet uses the cavity
index n and the grid variable sin chi directly; the outside sheet replaces n
by 1 and maps the grid through Snell's law, sin chi_out = n sin chi, masking
the evanescent region |n sin chi| > 1 (masked cells carry NaN, never zero).
psi' is the outward normal derivative; for the outside sheets its sign is
flipped so that "incident" means propagation toward the interface in both
media.  Wavenumber factors use Re(k) when k carries a resonance decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diskwave import BoundaryWaveData, nyquist_min_samples
from .errors import DomainError, EmptyDistributionError, SamplingError

TWO_PI = 2.0 * math.pi

SHEETS = ("incident-inside", "emergent-inside",
          "incident-outside", "emergent-outside")


@dataclass(frozen=True)
class CoherentStateSpec:
    """Periodized boundary Gaussian with tangential wavenumber k_parallel.

    sigma sets the squared positional width (exponent (S-s)^2 / (2 sigma));
    image terms are summed until their Gaussian tail drops below 1e-14.
    """

    sigma: float
    perimeter: float
    k_parallel: float
    s_center: float

    def __post_init__(self):
        if not (self.sigma > 0):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not (self.perimeter > 0):
            raise DomainError("perimeter must be positive")


def default_sigma(perimeter, n, k_real, R0=None):
    """Balanced-width default: sigma = (s0/2pi) sqrt(2/(n k R0))."""
    if R0 is None:
        R0 = perimeter / TWO_PI
    return (perimeter / TWO_PI) * math.sqrt(2.0 / (n * abs(k_real) * R0))


def coherent_state(spec: CoherentStateSpec, S_p, tail=1e-14):
    """Periodized coherent state evaluated at boundary positions ``S_p``.

    xi(S_p) = (sigma pi)^(-1/4) sum_l exp(-(S_p - s + l s0)^2 / (2 sigma)
                                          - i k_par (S_p - s + l s0))
    """
    S_p = np.asarray(S_p, dtype=float)
    s0 = spec.perimeter
    # number of images so the farthest Gaussian tail is below `tail`
    width = math.sqrt(2.0 * spec.sigma * math.log(1.0 / tail))
    l_max = int(math.ceil((width + s0) / s0))
    u0 = S_p - spec.s_center
    out = np.zeros_like(S_p, dtype=complex)
    for l in range(-l_max, l_max + 1):
        u = u0 + l * s0
        out += np.exp(-u * u / (2.0 * spec.sigma) - 1j * spec.k_parallel * u)
    return (spec.sigma * math.pi) ** (-0.25) * out


def _check_sampling(data: BoundaryWaveData):
    n_min = nyquist_min_samples(data.n, data.k, data.perimeter)
    if len(data.s) < n_min:
        raise SamplingError(
            f"{len(data.s)} boundary samples, need >= {n_min}")


def husimi_h(data: BoundaryWaveData, s, k_par, sigma):
    """Coherent-state overlap of psi: closed trapezoidal quadrature."""
    _check_sampling(data)
    spec = CoherentStateSpec(sigma=sigma, perimeter=data.perimeter,
                             k_parallel=k_par, s_center=s)
    xi = coherent_state(spec, data.s)
    ds = data.perimeter / len(data.s)
    return complex(np.sum(data.psi * xi) * ds)


def husimi_hprime(data: BoundaryWaveData, s, k_par, sigma):
    """Coherent-state overlap of the normal derivative psi'."""
    _check_sampling(data)
    spec = CoherentStateSpec(sigma=sigma, perimeter=data.perimeter,
                             k_parallel=k_par, s_center=s)
    xi = coherent_state(spec, data.s)
    ds = data.perimeter / len(data.s)
    return complex(np.sum(data.dpsi * xi) * ds)


@dataclass
class HusimiGrid:
    sheet: str
    values: np.ndarray           # (n_s, n_sinchi); NaN where masked
    s_edges: np.ndarray
    sinchi_edges: np.ndarray
    k: complex
    n: float
    sigma: float

    @property
    def mask(self):
        return ~np.isfinite(self.values)

    @property
    def s_centers(self):
        return 0.5 * (self.s_edges[:-1] + self.s_edges[1:])

    @property
    def sinchi_centers(self):
        return 0.5 * (self.sinchi_edges[:-1] + self.sinchi_edges[1:])


def husimi_four(data: BoundaryWaveData, side="inside", sigma=None,
                n_s=256, n_sinchi=256):
    """The (incident, emergent) Husimi pair on one side of the interface.

    The grid spans (s/perimeter in [0,1)) x (sin chi in [-1,1]), sin chi
    being the inside angle; evanescent outside cells are NaN-masked.
    """
    _check_sampling(data)
    if side not in ("inside", "outside"):
        raise DomainError(f"side must be 'inside' or 'outside', got {side!r}")
    k_real = float(np.real(data.k))
    if sigma is None:
        sigma = default_sigma(data.perimeter, data.n, k_real)
    s_edges = np.linspace(0.0, 1.0, n_s + 1)
    sinchi_edges = np.linspace(-1.0, 1.0, n_sinchi + 1)
    s_cent = 0.5 * (s_edges[:-1] + s_edges[1:]) * data.perimeter
    chi_cent = 0.5 * (sinchi_edges[:-1] + sinchi_edges[1:])

    if side == "inside":
        n_j = data.n
        sin_j = chi_cent
        dpsi = data.dpsi
    else:
        n_j = 1.0
        sin_j = data.n * chi_cent          # Snell: conserved k_parallel
        # outward normal derivative -> derivative along the approach
        # direction of the outside medium
        dpsi = -data.dpsi
    valid = np.abs(sin_j) <= 1.0
    cos_j = np.sqrt(np.clip(1.0 - sin_j * sin_j, 0.0, None))
    F = np.sqrt(n_j * cos_j)
    # k_par is shared by both sides (tangential phase matching)
    k_par = data.n * k_real * chi_cent

    ds = data.perimeter / len(data.s)
    inc = np.full((n_s, n_sinchi), np.nan)
    em = np.full((n_s, n_sinchi), np.nan)
    pref = abs(k_real) / TWO_PI
    s0 = data.perimeter
    # image window for the periodized Gaussian
    tail = 1e-14
    width = math.sqrt(2.0 * sigma * math.log(1.0 / tail))
    l_max = int(math.ceil((width + s0) / s0))
    ls = np.arange(-l_max, l_max + 1)
    norm = (sigma * math.pi) ** (-0.25)
    # xi(S_p; s, k)= norm * sum_l G_l(S_p; s) e^{-ik(S_p - s)} e^{-ik l s0}
    EK = np.exp(-1j * np.outer(k_par, data.s))            # (n_k, N)
    phase_l = np.exp(-1j * np.outer(k_par, ls * s0))      # (n_k, n_l)
    phase_s = np.exp(1j * np.outer(k_par, s_cent))        # (n_k, n_s)
    F_safe = np.where(F > 0.0, F, np.nan)
    for i, s in enumerate(s_cent):
        u = data.s[:, None] - s + ls[None, :] * s0        # (N, n_l)
        G = np.exp(-u * u / (2.0 * sigma))
        h = ((EK @ (data.psi[:, None] * G)) * phase_l).sum(axis=1)
        hp = ((EK @ (dpsi[:, None] * G)) * phase_l).sum(axis=1)
        h = norm * ds * phase_s[:, i] * h
        hp = norm * ds * phase_s[:, i] * hp
        with np.errstate(invalid="ignore", divide="ignore"):
            a = -F_safe * h
            b = (1j / (k_real * F_safe)) * hp
        inc[i, :] = pref * np.abs(a + b) ** 2
        em[i, :] = pref * np.abs(a - b) ** 2
    inc[:, ~valid] = np.nan
    em[:, ~valid] = np.nan
    grids = (HusimiGrid(sheet=f"incident-{side}", values=inc, s_edges=s_edges,
                        sinchi_edges=sinchi_edges, k=data.k, n=data.n, sigma=sigma),
             HusimiGrid(sheet=f"emergent-{side}", values=em, s_edges=s_edges,
                        sinchi_edges=sinchi_edges, k=data.k, n=data.n, sigma=sigma))
    return grids


def husimi_diagnostics(grids):
    """Half-plane masses, chirality ratio and argmax cell of a grid pair."""
    if isinstance(grids, HusimiGrid):
        grids = (grids,)
    total = np.zeros_like(grids[0].values)
    finite_any = False
    for g in grids:
        v = np.where(np.isfinite(g.values), g.values, 0.0)
        finite_any = finite_any or np.isfinite(g.values).any()
        total = total + v
    if not finite_any or total.sum() <= 0.0:
        raise EmptyDistributionError("all-zero or fully masked Husimi grids")
    g0 = grids[0]
    chi_c = g0.sinchi_centers
    upper = float(total[:, chi_c > 0].sum())
    lower = float(total[:, chi_c < 0].sum())
    i, j = np.unravel_index(np.argmax(total), total.shape)
    return {
        "upper_mass": upper,
        "lower_mass": lower,
        "chirality_ratio": upper / lower if lower > 0 else math.inf,
        "argmax_s_norm": float(g0.s_centers[i]),
        "argmax_sin_chi": float(chi_c[j]),
    }
