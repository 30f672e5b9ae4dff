import cmath
import math

import numpy as np
import pytest
from scipy import special

from cavphase import _cylinder as cyl
from cavphase import diskwave as dw
from cavphase.errors import ConvergenceError, DomainError, SamplingError


def test_q_formula_exact():
    assert dw.q_factor(20 - 0.001j) == 10000.0


def test_q_scales_linearly():
    q1 = dw.q_factor(10 - 0.01j)
    q2 = dw.q_factor(20 - 0.01j)
    assert q2 == pytest.approx(2 * q1, rel=1e-14)


def test_q_requires_decay():
    with pytest.raises(DomainError):
        dw.q_factor(20 + 0.001j)
    with pytest.raises(DomainError):
        dw.q_factor(20 + 0j)


@pytest.mark.parametrize("n,pol", [(1.54, "TE"), (1.54, "TM"),
                                   (3.3, "TE"), (3.3, "TM")])
def test_fundamental_resonances(n, pol):
    for m in (6, 8, 10):
        res = dw.find_wg_resonance(m, n, pol, radial_order=1)
        assert res.kR0.imag < 0
        assert res.residual < 1e-10
        assert res.radial_order == 1
        assert res.q > 0
        assert 0 < res.sin_chi <= 1


def test_resonance_m_symmetry():
    r_pos = dw.disk_resonance(8, 1.54, "TM", 7.0 - 0.2j)
    r_neg = dw.disk_resonance(-8, 1.54, "TM", 7.0 - 0.2j)
    assert r_pos.kR0 == pytest.approx(r_neg.kR0, rel=1e-12)


def test_monotone_family_in_m():
    prev = 0.0
    for m in (6, 8, 10, 12):
        res = dw.find_wg_resonance(m, 3.3, "TM", radial_order=1)
        assert res.kR0.real > prev
        prev = res.kR0.real


def test_confinement_grows_with_index():
    # same angular momentum: higher index confines better (smaller |Im|)
    lo = dw.find_wg_resonance(10, 1.54, "TM", radial_order=1)
    hi = dw.find_wg_resonance(10, 3.3, "TM", radial_order=1)
    assert hi.sin_chi > 1 / 3.3                   # above the critical line
    assert abs(hi.kR0.imag) < abs(lo.kR0.imag)
    assert hi.q > 1e3                             # whispering-gallery confinement


def test_independent_cylinder_crosscheck():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = int(rng.integers(0, 40))
        z = complex(rng.uniform(3, 35), -rng.uniform(0, 0.8))
        H_ref = special.hankel1(m, z)
        assert abs(cyl.hankel1_integral(m, z) - H_ref) / abs(H_ref) < 1e-8
        J_ref = special.jv(m, z)
        # the quadrature is absolutely accurate to ~1e-15; relative checks
        # need a value above that floor
        if abs(J_ref) > 1e-6:
            assert abs(cyl.bessel_j_integral(m, z) - J_ref) / abs(J_ref) < 1e-8


def test_residual_with_independent_implementation():
    for n, pol, m in ((1.54, "TM", 10), (3.3, "TE", 8)):
        res = dw.find_wg_resonance(m, n, pol)
        x = res.kR0
        fac = n if pol == "TM" else 1 / n
        a = fac * cyl.bessel_jp_integral(m, n * x) * cyl.hankel1_integral(m, x)
        b = cyl.bessel_j_integral(m, n * x) * cyl.hankel1p_integral(m, x)
        assert abs(a - b) / (abs(a) + abs(b)) < 1e-8


def test_generalized_fresnel_lossless_limit():
    res = dw.ComplexResonance(m=10, kR0=8.0 - 1e-12j, n=1.54,
                              polarization="TM", radial_order=1, residual=0.0)
    assert dw.generalized_fresnel(res) == pytest.approx(1.0, abs=1e-10)


def test_generalized_fresnel_in_unit_interval():
    for m in (8, 10, 12):
        res = dw.find_wg_resonance(m, 1.54, "TM")
        R = dw.generalized_fresnel(res)
        assert 0.0 < R < 1.0


def test_generalized_fresnel_trend_with_size():
    # narrow incidence band, growing kR0: losses shrink toward the ray step
    band = [dw.find_wg_resonance(m, 1.54, "TM", radial_order=1)
            for m in (9, 10, 11, 12)]
    sin_chis = [r.sin_chi for r in band]
    assert max(sin_chis) - min(sin_chis) < 0.03
    rs = [dw.generalized_fresnel(r) for r in band]
    res_re = [r.kR0.real for r in band]
    assert np.all(np.diff(res_re) > 0)
    assert np.all(np.diff(rs) > 0)      # R increases monotonically toward 1
    assert rs[-1] > rs[0]


def test_generalized_fresnel_below_barrier_error():
    res = dw.ComplexResonance(m=40, kR0=8.0 - 0.1j, n=1.54,
                              polarization="TM", radial_order=1, residual=0.0)
    with pytest.raises(DomainError):
        dw.generalized_fresnel(res)


def test_generalized_fresnel_vs_planar():
    # near-critical resonance reflectance is within an order of magnitude of
    # the planar Fresnel value at the same incidence
    from cavphase.dielectric import fresnel_reflectance
    res = dw.find_wg_resonance(6, 1.54, "TM", radial_order=2)
    if res.sin_chi < 1 / 1.54:
        R_planar = fresnel_reflectance(1.54, math.asin(res.sin_chi), "TM")
        R_gen = dw.generalized_fresnel(res)
        assert 0.1 < R_gen / max(R_planar, 1e-6) < 10


def test_boundary_wave_uniform_modulus():
    res = dw.find_wg_resonance(10, 3.3, "TM")
    data = dw.disk_boundary_wave(res, 512)
    assert np.abs(np.abs(data.psi) - 1.0).max() < 1e-12


def test_boundary_wave_phase_winding():
    res = dw.find_wg_resonance(10, 3.3, "TM")
    data = dw.disk_boundary_wave(res, 512)
    phase = np.unwrap(np.angle(data.psi))
    winding = (phase[-1] - phase[0]) / (2 * math.pi) * len(data.s) / (len(data.s) - 1)
    assert winding == pytest.approx(10.0, abs=1e-6)


def test_boundary_wave_log_derivative():
    res = dw.find_wg_resonance(8, 1.54, "TE")
    data = dw.disk_boundary_wave(res, 512)
    ratio = data.dpsi / data.psi
    expected = (res.n * data.k * special.jvp(res.m, res.n * res.kR0)
                / special.jv(res.m, res.n * res.kR0))
    assert np.abs(ratio - expected).max() < 1e-10


def test_boundary_wave_nyquist_guard():
    res = dw.find_wg_resonance(12, 3.3, "TM")
    with pytest.raises(SamplingError):
        dw.disk_boundary_wave(res, 16)


def test_upper_half_plane_guess_rejected():
    with pytest.raises(DomainError):
        dw.disk_resonance(8, 1.54, "TM", 7.0 + 0.5j)


def test_nonconvergent_iteration_raises_with_trace():
    # next to a decay rate far below double precision the secant has no basin
    # to converge into
    guess = complex(special.jn_zeros(30, 1)[0] / 3.3 - 0.01)
    with pytest.raises(ConvergenceError) as err:
        dw.disk_resonance(30, 3.3, "TM", guess)
    assert len(err.value.iterates) >= 2


def test_decay_resolution_floor():
    guess = complex(special.jn_zeros(8, 1)[0] / 1.54)
    with pytest.raises(ConvergenceError):
        dw.disk_resonance(8, 1.54, "TM", guess, min_neg_imag=2.0)


def test_find_resolvable_walks_radial_orders():
    res = dw.find_resolvable_wg_resonance(30, 3.3, "TM")
    assert res.kR0.imag < -1e-13
    assert res.radial_order > 1
    assert res.sin_chi > 1 / 3.3
