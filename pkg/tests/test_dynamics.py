import math

import numpy as np
import pytest

from cavphase import dynamics
from cavphase.errors import DomainError, GrazingError

P_DIAMOND = 0.95 / math.hypot(1.05, 0.95)   # stable period-4 orbit launch


def test_specular_head_on():
    out = dynamics.specular_reflect((1.0, 0.0), (1.0, 0.0))
    assert out == pytest.approx([-1.0, 0.0], abs=1e-15)


def test_specular_mirror():
    r = math.sqrt(0.5)
    out = dynamics.specular_reflect((r, r), (0.0, 1.0))
    assert out == pytest.approx([r, -r], abs=1e-15)


def test_specular_preserves_tangential():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b = rng.uniform(0, 2 * math.pi, 2)
        n = np.array([math.cos(a), math.sin(a)])
        d = np.array([math.cos(b), math.sin(b)])
        if abs(d @ n) < 1e-6:
            continue
        if d @ n < 0:
            d = -d
        t = np.array([-n[1], n[0]])
        out = dynamics.specular_reflect(d, n)
        assert out @ t == pytest.approx(d @ t, abs=1e-14)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-14)


def test_specular_grazing_raises():
    with pytest.raises(GrazingError):
        dynamics.specular_reflect((0.0, 1.0), (1.0, 0.0))


def test_circle_conserves_sin_chi(circle):
    tr = dynamics.trace(circle, dynamics.launch_state(circle, 0.3, 0.75), 100_000)
    assert len(tr) == 100_000
    assert np.abs(tr.p - 0.75).max() <= 1e-9
    assert np.all(tr.weight == 1.0)


def test_circle_diameter_orbit(circle):
    tr = dynamics.trace(circle, dynamics.launch_state(circle, 0.0, 0.0), 20)
    assert np.abs(tr.p).max() < 1e-12
    s_vals = np.unique(np.round(tr.s_norm, 9)) % 1.0
    assert len(s_vals) == 2
    assert abs(s_vals[1] - s_vals[0]) == pytest.approx(0.5, abs=1e-9)


def test_onigiri_chaotic_spread(onigiri):
    # regression: a chaotic trajectory covers most of the section grid
    tr = dynamics.trace(onigiri, dynamics.launch_state(onigiri, 0.7, 0.15), 1000)
    H, _, _ = np.histogram2d(tr.s_norm, tr.p, bins=16, range=((0, 1), (-1, 1)))
    assert (H > 0).mean() > 0.5


def test_launch_from_interior(circle):
    st = dynamics.launch_from_interior(circle, (0.0, 0.0), (1.0, 0.0))
    assert st.boundary_phi == pytest.approx(0.0, abs=1e-12)
    assert st.sin_chi == pytest.approx(0.0, abs=1e-12)
    # radial launch reflects straight back
    assert st.direction == pytest.approx([-1.0, 0.0], abs=1e-12)


def test_trace_requires_positive_bounces(circle):
    with pytest.raises(DomainError):
        dynamics.trace(circle, dynamics.launch_state(circle, 0.0, 0.5), 0)


def test_time_reversal_quadrupole(quadrupole):
    st = dynamics.launch_state(quadrupole, 0.001, P_DIAMOND + 0.003)
    fin = dynamics.final_state(quadrupole, st, 50)
    bp = quadrupole.boundary_point(fin.boundary_phi)
    d_in = fin.direction - 2 * float(fin.direction @ bp.normal) * bp.normal
    rev = dynamics.RayState(boundary_phi=fin.boundary_phi, direction=-d_in,
                            chi=fin.chi, orientation=-fin.orientation)
    back = dynamics.final_state(quadrupole, rev, 50)
    p0 = quadrupole.boundary_point(st.boundary_phi).position
    p1 = quadrupole.boundary_point(back.boundary_phi).position
    assert np.linalg.norm(p0 - p1) < 1e-6 * quadrupole.R0


def test_bounce_map_area_preservation(quadrupole):
    # an affine fit to the one-bounce image of a small rectangle has unit
    # Jacobian in (s_norm, p)
    rng = np.random.default_rng(5)
    s0, p0, ds, dp = 0.13, 0.35, 1e-3, 1e-3
    pts_in = np.column_stack([rng.uniform(s0, s0 + ds, 10_000),
                              rng.uniform(p0, p0 + dp, 10_000)])
    pts_out = np.empty_like(pts_in)
    for i, (s, p) in enumerate(pts_in):
        phi = quadrupole.arc_length_inverse(s * quadrupole.perimeter)
        tr = dynamics.trace(quadrupole, dynamics.launch_state(quadrupole, phi, p), 1)
        pts_out[i] = (tr.s_norm[0], tr.p[0])
    assert len(pts_out) == len(pts_in)
    # least-squares affine map: out = A @ in + b
    X = np.column_stack([pts_in, np.ones(len(pts_in))])
    coef, *_ = np.linalg.lstsq(X, pts_out, rcond=None)
    A = coef[:2].T
    assert abs(np.linalg.det(A)) == pytest.approx(1.0, abs=0.05)


def test_island_vs_chaos_excursion(quadrupole):
    # near a stable periodic point the tangential momentum stays confined;
    # a launch in the chaotic sea wanders
    island = dynamics.trace(quadrupole,
                            dynamics.launch_state(quadrupole, 0.001, P_DIAMOND + 0.003),
                            10_000)
    chaos = dynamics.trace(quadrupole,
                           dynamics.launch_state(quadrupole, 0.7, 0.15), 10_000)
    exc_island = island.p.max() - island.p.min()
    exc_chaos = chaos.p.max() - chaos.p.min()
    assert exc_island < 0.15
    assert exc_chaos > 2 * exc_island


def test_lyapunov_circle_zero(circle):
    res = dynamics.lyapunov(circle, dynamics.launch_state(circle, 0.1, 0.6), 20_000)
    assert res.lam < 1e-3
    assert res.n_used == 20_000
    assert not res.quality_warning


def test_lyapunov_limacon_positive(limacon):
    res = dynamics.lyapunov(limacon, dynamics.launch_state(limacon, 1.0, 0.2), 4000)
    assert res.lam > 5 * res.stderr
    assert res.lam > 0.1


def test_lyapunov_island_consistent_with_zero(quadrupole):
    res = dynamics.lyapunov(quadrupole,
                            dynamics.launch_state(quadrupole, 0.0, P_DIAMOND), 4000)
    assert abs(res.lam) < 5 * max(res.stderr, 1e-6)


def test_lyapunov_reports_mean_free_path(circle):
    res = dynamics.lyapunov(circle, dynamics.launch_state(circle, 0.0, 0.75), 500)
    assert res.mean_free_path == pytest.approx(2 * math.cos(math.asin(0.75)),
                                               rel=1e-6)
