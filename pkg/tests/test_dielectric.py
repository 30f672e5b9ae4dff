import math

import numpy as np
import pytest
from scipy.optimize import brentq

from cavphase import dielectric as diel
from cavphase.errors import DomainError, EmptyDistributionError


def test_total_internal_reflection():
    assert diel.fresnel_reflectance(3.3, math.asin(0.5), "TE") == 1.0
    assert diel.fresnel_reflectance(3.3, math.asin(0.5), "TM") == 1.0


def test_normal_incidence():
    expected = ((1.5 - 1) / (1.5 + 1)) ** 2
    for pol in ("TE", "TM"):
        assert diel.fresnel_reflectance(1.5, 0.0, pol) == pytest.approx(expected,
                                                                        abs=1e-12)


def test_brewster_zero_te_only():
    # locate the TE reflectance zero by root-finding on its derivative sign
    n = 1.5
    chi_b = brentq(lambda c: diel.fresnel_amplitude(n, c, "TE").real,
                   0.01, math.asin(1 / n) - 0.01)
    assert chi_b == pytest.approx(math.atan(1 / n), abs=1e-10)
    assert diel.fresnel_reflectance(n, chi_b, "TE") < 1e-20
    # TM has no zero below the critical angle
    chi = np.linspace(0.0, math.asin(1 / n) - 1e-6, 2000)
    assert diel.fresnel_reflectance(n, chi, "TM").min() > 1e-3


def test_reflectance_continuity_and_limit():
    chi = np.linspace(0.0, math.pi / 2 - 1e-9, 10_000)
    chi2 = np.linspace(0.0, math.pi / 2 - 1e-9, 20_000)
    for pol in ("TE", "TM"):
        R = diel.fresnel_reflectance(3.3, chi, pol)
        assert np.all(R >= 0.0) and np.all(R <= 1.0)
        # the slope diverges like 1/sqrt at the critical angle but R stays
        # continuous: the largest grid jump must shrink under refinement
        jump = np.abs(np.diff(R)).max()
        jump2 = np.abs(np.diff(diel.fresnel_reflectance(3.3, chi2, pol))).max()
        assert jump2 < 0.8 * jump
        # away from the critical angle the curve is smooth
        away = np.abs(chi[:-1] - math.asin(1 / 3.3)) > 0.01
        assert np.abs(np.diff(R))[away].max() < 5e-3
        # R -> 1 approaching the critical angle from below
        assert diel.fresnel_reflectance(3.3, math.asin(1 / 3.3) - 1e-12, pol) > 1 - 1e-4


def test_energy_conservation_below_critical():
    chi = np.linspace(0.0, math.asin(1 / 3.3) - 1e-9, 5000)
    for pol in ("TE", "TM"):
        R = diel.fresnel_reflectance(3.3, chi, pol)
        T = diel.fresnel_transmittance(3.3, chi, pol)
        assert np.abs(R + T - 1.0).max() < 1e-12


def test_refract_normal_incidence(circle):
    bp = circle.boundary_point(1.0)
    theta = diel.refract_to_farfield(circle, bp, 0.0, 3.3, +1)
    assert theta == pytest.approx(1.0, abs=1e-12)   # along the outward normal


def test_refract_snell(circle):
    bp = circle.boundary_point(0.0)
    chi = math.asin(0.3)
    theta = diel.refract_to_farfield(circle, bp, chi, 3.3, +1)
    d = np.array([math.cos(theta), math.sin(theta)])
    assert d @ bp.tangent == pytest.approx(0.99, abs=1e-12)


def test_refract_tir_error(circle):
    bp = circle.boundary_point(0.0)
    with pytest.raises(DomainError):
        diel.refract_to_farfield(circle, bp, math.asin(0.5), 3.3, +1)


def test_medium_validation():
    with pytest.raises(DomainError):
        diel.OpticalMedium(0.5, "TE")
    with pytest.raises(DomainError):
        diel.OpticalMedium(1.5, "TEM")
    assert diel.OpticalMedium(3.3).critical_sin_chi == pytest.approx(1 / 3.3)


def test_circle_steady_uniform(circle):
    med = diel.OpticalMedium(3.3, "TE")
    res = diel.steady_distribution(circle, med, ensemble=2000, transient=20,
                                   record=80, seed=42, launch_band=(0.31, 0.9),
                                   s_bins=50, p_bins=64)
    s_mass = res.hist.sum(axis=1)
    assert s_mass.std() / s_mass.mean() < 0.05
    assert res.hist.sum() == pytest.approx(1.0, abs=1e-12)


def test_weight_monotone_along_trajectory(limacon):
    med = diel.OpticalMedium(3.3, "TE")
    s, p, w, th, em, status, n_done, w_final = diel._open_trajectory(
        limacon, med, 0.2, 0.5, 0, 200)
    assert np.all(np.diff(w) <= 1e-15)
    assert w[0] <= 1.0


def test_limacon_steady_filaments(limacon):
    # regression: leaky-region mass concentrates in few cells
    med = diel.OpticalMedium(3.3, "TE")
    res = diel.steady_distribution(limacon, med, ensemble=3000, transient=30,
                                   record=100, seed=5)
    pc = 0.5 * (res.p_edges[:-1] + res.p_edges[1:])
    leaky = res.hist[:, np.abs(pc) < 1 / 3.3]
    leaky = leaky / leaky.sum()
    flat = np.sort(leaky.ravel())[::-1]
    top10 = flat[:max(1, len(flat) // 10)].sum()
    assert top10 > 0.6


def test_steady_stationarity(limacon):
    # doubling the transient leaves the leaky-region histogram unchanged
    # within 2% total variation
    med = diel.OpticalMedium(3.3, "TE")
    kw = dict(ensemble=16_000, record=100, seed=5, s_bins=24, p_bins=24)
    r1 = diel.steady_distribution(limacon, med, transient=20, **kw)
    r2 = diel.steady_distribution(limacon, med, transient=40, **kw)
    pc = 0.5 * (r1.p_edges[:-1] + r1.p_edges[1:])
    leaky = np.abs(pc) < 1 / 3.3
    l1 = r1.hist[:, leaky]
    l2 = r2.hist[:, leaky]
    tv = 0.5 * np.abs(l1 / l1.sum() - l2 / l2.sum()).sum()
    assert tv < 0.02


def test_empty_distribution_error(circle):
    med = diel.OpticalMedium(1.5, "TE")
    # every launch is sub-critical on the circle: all intensity escapes long
    # before a huge transient
    with pytest.raises(EmptyDistributionError):
        diel.steady_distribution(circle, med, ensemble=50, transient=500,
                                 record=10, seed=1, launch_band=(0.05, 0.3))


def test_circle_farfield_isotropic(circle):
    med = diel.OpticalMedium(3.3, "TE")
    res = diel.farfield_emission(circle, med, ensemble=4000, transient=0,
                                 record=100, bins=90, seed=7,
                                 launch_band=(0.0, 1.0))
    assert abs(res.directionality - 0.25) < 3 * res.directionality_stderr
    assert res.audit.relative_error < 1e-6


def test_limacon_directionality_ordering(limacon):
    te = diel.farfield_emission(limacon, diel.OpticalMedium(3.3, "TE"),
                                ensemble=4000, transient=30, record=100,
                                bins=180, seed=7)
    tm = diel.farfield_emission(limacon, diel.OpticalMedium(3.3, "TM"),
                                ensemble=4000, transient=30, record=100,
                                bins=180, seed=7)
    assert te.directionality > 0.5          # far above the 0.25 uniform level
    assert te.directionality >= tm.directionality
    assert te.audit.relative_error < 1e-6
    assert tm.audit.relative_error < 1e-6


def test_farfield_mirror_symmetry(limacon):
    med = diel.OpticalMedium(3.3, "TE")
    res = diel.farfield_emission(limacon, med, ensemble=8000, transient=30,
                                 record=100, bins=60, seed=11)
    I = res.intensity / res.intensity.sum()
    bh = res.per_batch_u / res.per_batch_u.sum()
    diff = I - I[::-1]
    per_batch_diff = (bh - bh[:, ::-1]) * len(bh)
    sig = np.std(per_batch_diff, axis=0, ddof=1) / math.sqrt(len(bh))
    z = np.abs(diff) / np.maximum(sig, 1e-12)
    assert z.max() < 3.0


def test_intensity_conservation(limacon):
    med = diel.OpticalMedium(3.3, "TM")
    res = diel.farfield_emission(limacon, med, ensemble=2000, transient=10,
                                 record=50, bins=36, seed=3)
    assert res.audit.relative_error < 1e-6


def test_thread_count_invariance(limacon):
    med = diel.OpticalMedium(3.3, "TE")
    kw = dict(ensemble=600, transient=10, record=40, bins=36, seed=9)
    r1 = diel.farfield_emission(limacon, med, n_threads=1, **kw)
    r3 = diel.farfield_emission(limacon, med, n_threads=3, **kw)
    assert np.array_equal(r1.intensity, r3.intensity)
