import math

import numpy as np
import pytest

from cavphase import diskwave as dw
from cavphase import husimi as hu
from cavphase.errors import EmptyDistributionError, SamplingError

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def wg_mode():
    res = dw.find_wg_resonance(10, 3.3, "TM")
    return res, dw.disk_boundary_wave(res, 512)


def test_coherent_state_periodicity():
    spec = hu.CoherentStateSpec(sigma=0.2, perimeter=TWO_PI,
                                k_parallel=3.0, s_center=1.0)
    S = np.random.default_rng(0).uniform(0, TWO_PI, 100)
    err = np.abs(hu.coherent_state(spec, S + TWO_PI) - hu.coherent_state(spec, S))
    assert err.max() < 1e-12


def test_coherent_state_centered_maximum():
    spec = hu.CoherentStateSpec(sigma=0.15, perimeter=TWO_PI,
                                k_parallel=0.0, s_center=2.0)
    S = np.linspace(0, TWO_PI, 4096, endpoint=False)
    vals = np.abs(hu.coherent_state(spec, S))
    assert abs(S[np.argmax(vals)] - 2.0) < TWO_PI / 4096 * 2


def test_coherent_state_norm_converges():
    spec = hu.CoherentStateSpec(sigma=0.1, perimeter=TWO_PI,
                                k_parallel=5.0, s_center=1.0)
    norms = []
    for n_samp in (2048, 4096):
        S = np.arange(n_samp) * (TWO_PI / n_samp)
        xi = hu.coherent_state(spec, S)
        norms.append(np.sum(np.abs(xi) ** 2) * TWO_PI / n_samp)
    assert abs(norms[1] - norms[0]) / norms[0] < 1e-8


def test_overlap_zero_field(wg_mode):
    res, data = wg_mode
    zero = dw.BoundaryWaveData(s=data.s, psi=0 * data.psi, dpsi=0 * data.dpsi,
                               k=data.k, n=data.n, perimeter=data.perimeter)
    assert hu.husimi_h(zero, 1.0, 5.0, 0.2) == 0


def test_overlap_plane_wave_gaussian(wg_mode):
    # analytic oracle: psi = exp(iqS) gives |h| = norm * sqrt(2 pi sigma)
    # * exp(-sigma (k_par - q)^2 / 2)
    res, data = wg_mode
    q = 12.0
    sigma = 0.2
    psi = np.exp(1j * q * data.s)
    pw = dw.BoundaryWaveData(s=data.s, psi=psi, dpsi=0 * psi, k=data.k,
                             n=data.n, perimeter=data.perimeter)
    for k_par in (q, q + 1.0, q + 2.5):
        h = hu.husimi_h(pw, 1.3, k_par, sigma)
        pred = ((sigma * math.pi) ** (-0.25) * math.sqrt(2 * math.pi * sigma)
                * math.exp(-sigma * (k_par - q) ** 2 / 2))
        assert abs(h) == pytest.approx(pred, rel=1e-10)
    # maximum at k_par = q
    vals = [abs(hu.husimi_h(pw, 1.3, kp, sigma)) for kp in (q - 1, q, q + 1)]
    assert vals[1] > vals[0] and vals[1] > vals[2]


def test_overlap_linearity(wg_mode):
    res, data = wg_mode
    rng = np.random.default_rng(1)
    psi1 = rng.normal(size=len(data.s)) + 1j * rng.normal(size=len(data.s))
    psi2 = rng.normal(size=len(data.s)) + 1j * rng.normal(size=len(data.s))
    a, b = 1.7 - 0.3j, -0.4 + 2.2j
    mk = lambda p: dw.BoundaryWaveData(s=data.s, psi=p, dpsi=0 * p, k=data.k,
                                       n=data.n, perimeter=data.perimeter)
    h12 = hu.husimi_h(mk(a * psi1 + b * psi2), 2.0, 8.0, 0.2)
    h1 = hu.husimi_h(mk(psi1), 2.0, 8.0, 0.2)
    h2 = hu.husimi_h(mk(psi2), 2.0, 8.0, 0.2)
    assert h12 == pytest.approx(a * h1 + b * h2, abs=1e-12)


def test_hprime_uses_derivative(wg_mode):
    res, data = wg_mode
    h = hu.husimi_h(data, 1.0, 10.0, 0.2)
    hp = hu.husimi_hprime(data, 1.0, 10.0, 0.2)
    log_deriv = data.dpsi[0] / data.psi[0]
    assert hp == pytest.approx(log_deriv * h, rel=1e-10)


def test_undersampled_raises(wg_mode):
    res, data = wg_mode
    coarse = dw.BoundaryWaveData.__new__(dw.BoundaryWaveData)
    object.__setattr__(coarse, "s", data.s[::8])
    object.__setattr__(coarse, "psi", data.psi[::8])
    object.__setattr__(coarse, "dpsi", data.dpsi[::8])
    object.__setattr__(coarse, "k", data.k)
    object.__setattr__(coarse, "n", data.n)
    object.__setattr__(coarse, "perimeter", data.perimeter)
    with pytest.raises(SamplingError):
        hu.husimi_h(coarse, 1.0, 10.0, 0.2)


def test_four_sheets_positive_and_peaked(wg_mode):
    res, data = wg_mode
    inc, em = hu.husimi_four(data, side="inside")
    for grid in (inc, em):
        vals = grid.values[np.isfinite(grid.values)]
        assert np.all(vals >= 0)
    dia = hu.husimi_diagnostics((inc, em))
    cell = 2.0 / 256
    width = 1.0 / (res.n * res.kR0.real * math.sqrt(2 * inc.sigma))
    assert abs(dia["argmax_sin_chi"] - res.sin_chi) < cell + width
    # rotational symmetry: uniform along the boundary
    tot = np.where(np.isfinite(inc.values), inc.values, 0.0).sum(axis=1)
    assert tot.std() / tot.mean() < 0.05


def test_outside_sheet_masked_evanescent(wg_mode):
    res, data = wg_mode
    inc, em = hu.husimi_four(data, side="outside", n_s=32, n_sinchi=64)
    chi_c = 0.5 * (inc.sinchi_edges[:-1] + inc.sinchi_edges[1:])
    evanescent = np.abs(data.n * chi_c) > 1.0
    assert np.all(~np.isfinite(inc.values[:, evanescent]))
    assert np.all(np.isfinite(inc.values[:, ~evanescent]))


def test_outside_radiating_field_is_emergent(wg_mode):
    # synthetic outgoing exterior field registers on the emergent sheet
    res, data = wg_mode
    k = float(np.real(data.k))
    m_rad = 2
    cos_out = math.sqrt(1 - (m_rad / k) ** 2)
    psi = np.exp(1j * m_rad * data.s)
    rad = dw.BoundaryWaveData(s=data.s, psi=psi, dpsi=1j * k * cos_out * psi,
                              k=data.k, n=data.n, perimeter=data.perimeter)
    inc, em = hu.husimi_four(rad, side="outside", n_s=32, n_sinchi=128)
    j = np.argmin(np.abs(inc.sinchi_centers - m_rad / (data.n * k)))
    assert np.nansum(em.values[:, j]) > 1e3 * np.nansum(inc.values[:, j])


def test_standing_wave_symmetric(wg_mode):
    res, data = wg_mode
    psi = data.psi + np.conj(data.psi)          # m and -m superposition
    dpsi = data.dpsi + np.conj(data.dpsi)
    standing = dw.BoundaryWaveData(s=data.s, psi=psi, dpsi=dpsi, k=data.k,
                                   n=data.n, perimeter=data.perimeter)
    inc, em = hu.husimi_four(standing, side="inside", n_s=64, n_sinchi=128)
    dia = hu.husimi_diagnostics((inc, em))
    assert dia["chirality_ratio"] == pytest.approx(1.0, abs=0.01)


def test_chirality_of_rotating_mode(wg_mode):
    res, data = wg_mode
    inc, em = hu.husimi_four(data, side="inside", n_s=64, n_sinchi=128)
    dia = hu.husimi_diagnostics((inc, em))
    assert dia["chirality_ratio"] > 100.0


def test_noise_data_balanced(wg_mode):
    res, data = wg_mode
    rng = np.random.default_rng(7)
    psi = rng.normal(size=len(data.s)) + 1j * rng.normal(size=len(data.s))
    dpsi = rng.normal(size=len(data.s)) + 1j * rng.normal(size=len(data.s))
    noise = dw.BoundaryWaveData(s=data.s, psi=psi, dpsi=dpsi * abs(data.k),
                                k=data.k, n=data.n, perimeter=data.perimeter)
    inc, em = hu.husimi_four(noise, side="inside", n_s=32, n_sinchi=64)
    dia = hu.husimi_diagnostics((inc, em))
    assert 0.5 < dia["chirality_ratio"] < 2.0


def test_global_phase_invariance(wg_mode):
    res, data = wg_mode
    rot = dw.BoundaryWaveData(s=data.s, psi=np.exp(0.7j) * data.psi,
                              dpsi=np.exp(0.7j) * data.dpsi, k=data.k,
                              n=data.n, perimeter=data.perimeter)
    a = hu.husimi_four(data, side="inside", n_s=32, n_sinchi=64)
    b = hu.husimi_four(rot, side="inside", n_s=32, n_sinchi=64)
    for ga, gb in zip(a, b):
        # equality up to floating-point roundoff of the rotated amplitudes
        np.testing.assert_allclose(gb.values, ga.values, rtol=0,
                                   atol=1e-12 * np.nanmax(ga.values))


def test_linear_phase_translates_momentum(wg_mode):
    res, data = wg_mode
    q = -5.0     # integer multiple of 2 pi / perimeter, shifting the peak
                 # downward so it stays inside the momentum window
    shifted = dw.BoundaryWaveData(s=data.s, psi=np.exp(1j * q * data.s) * data.psi,
                                  dpsi=np.exp(1j * q * data.s) * data.dpsi,
                                  k=data.k, n=data.n, perimeter=data.perimeter)
    a_inc, _ = hu.husimi_four(data, side="inside")
    b_inc, _ = hu.husimi_four(shifted, side="inside")
    da = hu.husimi_diagnostics((a_inc,))
    db = hu.husimi_diagnostics((b_inc,))
    expected_shift = q / (data.n * float(np.real(data.k)))
    cell = 2.0 / 256
    assert (db["argmax_sin_chi"] - da["argmax_sin_chi"]
            == pytest.approx(expected_shift, abs=1.5 * cell))


def test_uncertainty_floor(wg_mode):
    # fitted momentum width x boundary-position spread beats the coherent
    # state bound 1/(2 n k), and shrinks as kR0 grows
    products = []
    for m in (10, 14):
        res = dw.find_wg_resonance(m, 3.3, "TM")
        data = dw.disk_boundary_wave(res, 512)
        inc, _ = hu.husimi_four(data, side="inside", n_s=32, n_sinchi=256)
        marg = np.where(np.isfinite(inc.values), inc.values, 0.0).sum(axis=0)
        cc = inc.sinchi_centers
        mu = np.sum(cc * marg) / marg.sum()
        width = math.sqrt(np.sum((cc - mu) ** 2 * marg) / marg.sum())
        s_width = 1.0 / math.sqrt(12.0)    # uniform boundary marginal
        nk = res.n * res.kR0.real
        floor = 1.0 / (2.0 * nk) / data.perimeter
        products.append((s_width * width, floor, nk))
    for prod, floor, nk in products:
        assert prod > 0.9 * floor
    assert products[1][0] < products[0][0]


def test_diagnostics_empty_error(wg_mode):
    res, data = wg_mode
    g, _ = hu.husimi_four(data, side="inside", n_s=8, n_sinchi=8)
    g.values[:] = 0.0
    with pytest.raises(EmptyDistributionError):
        hu.husimi_diagnostics((g,))
