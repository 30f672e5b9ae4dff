"""Analytic wave solutions of the circular dielectric disk.

Modes carry exp(i m phi) angular dependence with J_m(n k r) inside and the
outgoing H^(1)_m(k r) outside (time convention exp(-i omega t), so decaying
resonances have Im(k R0) < 0).  Matching at r = R0:

    TM (E out of plane):  psi and psi' continuous
        f(x) = n J'_m(n x) H_m(x) - J_m(n x) H'_m(x) = 0,   x = k R0
    TE (H out of plane):  psi continuous, psi'/n^2 matches psi' outside
        f(x) = (1/n) J'_m(n x) H_m(x) - J_m(n x) H'_m(x) = 0

Roots are found by secant iteration in the complex plane from a real-axis
guess; each stored resonance keeps its normalized matching residual.

The generalized Fresnel coefficient is evaluated as
R = exp(4 n Im(kR0) cos chi), which lies in (0, 1) under the Im < 0 decay
convention (the equivalent textbook form quotes the exponent with the
opposite sign for the opposite sign convention of Im k).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError, SamplingError

TWO_PI = 2.0 * math.pi


def _matching(m, n, pol, x):
    """Normalized matching determinant at complex x = k R0; also a scale."""
    nx = n * x
    jm = special.jv(m, nx)
    jp = special.jvp(m, nx)
    hm = special.hankel1(m, x)
    hp = special.h1vp(m, x)
    fac = n if pol == "TM" else 1.0 / n
    a = fac * jp * hm
    b = jm * hp
    scale = abs(a) + abs(b)
    return a - b, scale


def matching_residual(res):
    """|f(kR0)| normalized by the magnitude of its two terms."""
    f, scale = _matching(res.m, res.n, res.polarization, res.kR0)
    return abs(f) / scale


def q_factor(kR0):
    """Q = -Re(kR0) / (2 Im(kR0)); requires a decaying resonance (Im < 0)."""
    kR0 = complex(kR0)
    if not (kR0.imag < 0.0):
        raise DomainError(f"Im(kR0) must be negative, got {kR0.imag}")
    return -kR0.real / (2.0 * kR0.imag)


@dataclass(frozen=True)
class ComplexResonance:
    m: int
    kR0: complex
    n: float
    polarization: str
    radial_order: int
    residual: float

    @property
    def q(self):
        return q_factor(self.kR0)

    @property
    def sin_chi(self):
        """Angular-momentum incidence relation sin chi = m / (n Re kR0)."""
        return self.m / (self.n * self.kR0.real)


def disk_resonance(m, n, pol, k_guess, max_iter=100, tol=1e-12,
                   min_neg_imag=1e-14):
    """Secant root of the matching determinant near ``k_guess`` (in kR0 units).

    Raises ConvergenceError (with the iterate trace) if the iteration stalls,
    diverges, or lands at Im >= 0 within resolution; the latter typically
    means the true |Im| underflows double precision for this (m, n) family.
    """
    m = int(abs(m))
    if n <= 1.0:
        raise DomainError(f"refractive index must be > 1, got {n}")
    if pol not in ("TE", "TM"):
        raise DomainError(f"polarization must be TE or TM, got {pol!r}")
    z0 = complex(k_guess)
    if z0.imag > 0:
        raise DomainError("k_guess must be on the physical sheet (Im <= 0)")
    z1 = z0 * (1.0 - 1e-5) - 1e-4j
    f0, _ = _matching(m, n, pol, z0)
    f1, _ = _matching(m, n, pol, z1)
    iterates = [z0, z1]
    converged = False
    for _ in range(max_iter):
        denom = f1 - f0
        if denom == 0:
            break
        z2 = z1 - f1 * (z1 - z0) / denom
        iterates.append(z2)
        if not (abs(z2) < 1e6) or not cmath.isfinite(z2):
            raise ConvergenceError(
                f"resonance iteration diverged for m={m}, n={n}, {pol}",
                iterates=iterates)
        if abs(z2 - z1) < tol:
            z1 = z2
            converged = True
            break
        z0, f0 = z1, f1
        z1 = z2
        f1, _ = _matching(m, n, pol, z1)
    if not converged:
        raise ConvergenceError(
            f"resonance iteration did not converge for m={m}, n={n}, {pol}",
            iterates=iterates)
    if z1.imag >= -min_neg_imag:
        raise ConvergenceError(
            f"root at kR0={z1} has Im >= -{min_neg_imag}: decay rate below "
            "double-precision resolution for this mode family",
            iterates=iterates)
    f, scale = _matching(m, n, pol, z1)
    residual = abs(f) / scale
    return ComplexResonance(m=m, kR0=z1, n=float(n), polarization=pol,
                            radial_order=_radial_order(m, n, z1),
                            residual=residual)


def _radial_order(m, n, kR0):
    """Interior radial nodes + 1: J_m zeros passed by the argument n Re(kR0)."""
    nodes = special.jn_zeros(m, max(1, int(n * kR0.real / math.pi) + 2))
    return int(np.searchsorted(nodes, n * kR0.real)) + 1


def resonance_family(m, n, pol, x_max=None, x_min=None, scan_density=40):
    """All resonances of angular momentum m with Re(kR0) in the scan window.

    Seeds come from local minima of the matching-determinant magnitude on a
    real-axis grid (the roots sit close below the axis for confined modes);
    each seed is polished by the complex secant iteration.  Returns a list
    sorted by Re(kR0) with duplicates removed.
    """
    if x_max is None:
        x_max = (special.jn_zeros(m, 8)[-1] + 2.0) / n
    if x_min is None:
        x_min = max(0.3 * (m + 1) / n, 0.2)
    n_grid = max(64, int(scan_density * n * (x_max - x_min)))
    xs = np.linspace(x_min, x_max, n_grid)
    mags = np.empty(n_grid)
    for i, x in enumerate(xs):
        f, scale = _matching(m, n, pol, complex(x))
        mags[i] = abs(f) / scale
    found = []
    for i in range(1, n_grid - 1):
        # every local minimum seeds the secant: broad (low-Q) resonances dip
        # only shallowly on the real axis
        if mags[i] <= mags[i - 1] and mags[i] <= mags[i + 1]:
            try:
                res = disk_resonance(m, n, pol, complex(xs[i]))
            except ConvergenceError:
                continue
            if not (x_min - 0.5 <= res.kR0.real <= x_max + 0.5):
                continue
            if any(abs(res.kR0 - r.kR0) < 1e-8 * max(1.0, abs(r.kR0))
                   for r in found):
                continue
            found.append(res)
    found.sort(key=lambda r: r.kR0.real)
    return found


def find_wg_resonance(m, n, pol, radial_order=1):
    """Resonance of the given radial order via the real-axis family scan."""
    zeros = special.jn_zeros(m, radial_order + 1)
    x_hi = (zeros[-1] + 1.0) / n
    family = resonance_family(m, n, pol, x_max=x_hi)
    for res in family:
        if res.radial_order == radial_order:
            return res
    raise ConvergenceError(
        f"no radial order {radial_order} resonance found for m={m}, n={n}, {pol} "
        f"(found orders {[r.radial_order for r in family]})")


def find_resolvable_wg_resonance(m, n, pol, min_neg_imag=1e-13, max_order=40):
    """Smallest radial order whose decay rate is resolvable in double precision.

    High-m, high-n whispering-gallery modes of low radial order have |Im kR0|
    far below machine resolution; walking up in radial order reduces Q until
    the root is numerically meaningful.
    """
    last_err = None
    for q in range(1, max_order + 1):
        try:
            res = find_wg_resonance(m, n, pol, radial_order=q)
        except ConvergenceError as err:
            last_err = err
            continue
        if res.kR0.imag < -min_neg_imag and res.sin_chi <= 1.0:
            return res
        last_err = None
    raise ConvergenceError(
        f"no resolvable whispering-gallery resonance for m={m}, n={n}, {pol}",
        iterates=getattr(last_err, "iterates", []))


def generalized_fresnel(res: ComplexResonance):
    """Reflectance deduced from the resonance decay rate.

    R = exp(4 n Im(kR0) cos chi) with sin chi = m/(n Re kR0); in (0, 1) for
    any decaying resonance and -> 1 in the lossless limit.
    """
    sin_chi = res.sin_chi
    if sin_chi > 1.0:
        raise DomainError(
            f"sin chi = {sin_chi:.4f} > 1: angular momentum below barrier")
    cos_chi = math.sqrt(1.0 - sin_chi * sin_chi)
    return math.exp(4.0 * res.n * res.kR0.imag * cos_chi)


@dataclass(frozen=True)
class BoundaryWaveData:
    """Complex boundary wave samples psi, psi' at uniform arc-length nodes.

    ``dpsi`` is the outward normal derivative.  ``k`` may be complex (the
    resonance wavenumber); transforms that need a real wavenumber use Re(k).
    """

    s: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    k: complex
    n: float
    perimeter: float

    def __post_init__(self):
        n_min = nyquist_min_samples(self.n, self.k)
        if len(self.s) < n_min:
            raise SamplingError(
                f"{len(self.s)} samples below the Nyquist margin {n_min} "
                f"for n={self.n}, Re(kR0)={abs(self.k.real) * self.perimeter / TWO_PI:.1f}")


def nyquist_min_samples(n, k, perimeter=TWO_PI):
    """Sampling floor 8 n |Re(k R0)| with R0 = perimeter / 2 pi."""
    kR0 = abs(complex(k).real) * perimeter / TWO_PI
    return int(math.ceil(8.0 * n * kR0))


def disk_boundary_wave(res: ComplexResonance, n_samples, R0=1.0):
    """Boundary samples of the interior mode: psi = exp(i m phi), psi' its
    outward normal derivative (log-derivative of J_m(n k r) at R0)."""
    perimeter = TWO_PI * R0
    k = complex(res.kR0) / R0
    s = np.arange(n_samples) * (perimeter / n_samples)
    phi = s / R0
    nx = res.n * res.kR0
    log_deriv = res.n * k * special.jvp(res.m, nx) / special.jv(res.m, nx)
    psi = np.exp(1j * res.m * phi)
    return BoundaryWaveData(s=s, psi=psi, dpsi=log_deriv * psi,
                            k=k, n=res.n, perimeter=perimeter)
