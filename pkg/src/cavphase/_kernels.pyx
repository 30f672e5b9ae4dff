# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounce-map kernels; mirrors _kernels_py (same API, status codes)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, fabs, hypot, isfinite, sin, sqrt, NAN, INFINITY

cnp.import_array()

TWO_PI = 6.283185307179586
GRAZING_COS = 1e-9

STATUS_OK = 0
STATUS_GRAZING = 1
STATUS_NO_HIT = 2
STATUS_DECAYED = 3
STATUS_REFLECTION_FAILURE = 4

BACKEND = "compiled"

cdef double _TWO_PI = 6.283185307179586
cdef double _GRAZING = 1e-9

cdef int _OK = 0
cdef int _GRAZE = 1
cdef int _NO_HIT = 2
cdef int _DECAY = 3
cdef int _REFL_FAIL = 4


cdef inline double _radius(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                           double phi) noexcept nogil:
    cdef double r = 1.0
    cdef Py_ssize_t i
    for i in range(ms.shape[0]):
        r += eps[i] * cos(ms[i] * phi)
    return R0 * r


cdef inline double _dradius(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                            double phi) noexcept nogil:
    cdef double dr = 0.0
    cdef Py_ssize_t i
    for i in range(ms.shape[0]):
        dr -= eps[i] * ms[i] * sin(ms[i] * phi)
    return R0 * dr


cdef inline double _line_h(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                           double phi, double nx, double ny, double c) noexcept nogil:
    cdef double r = _radius(R0, ms, eps, phi)
    return nx * r * cos(phi) + ny * r * sin(phi) - c


cdef inline double _line_dh(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                            double phi, double nx, double ny) noexcept nogil:
    cdef double r = _radius(R0, ms, eps, phi)
    cdef double dr = _dradius(R0, ms, eps, phi)
    cdef double cp = cos(phi), sp = sin(phi)
    return nx * (dr * cp - r * sp) + ny * (dr * sp + r * cp)


cdef double _refine_root(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                         double phi_a, double phi_b,
                         double nx, double ny, double c) noexcept nogil:
    cdef double ha = _line_h(R0, ms, eps, phi_a, nx, ny, c)
    cdef double lo = phi_a, hi = phi_b
    cdef double phi = 0.5 * (lo + hi)
    cdef double h, dh, cand
    cdef int it
    for it in range(80):
        h = _line_h(R0, ms, eps, phi, nx, ny, c)
        if (h > 0.0) == (ha > 0.0):
            lo = phi
        else:
            hi = phi
        dh = _line_dh(R0, ms, eps, phi, nx, ny)
        if dh != 0.0:
            cand = phi - h / dh
        else:
            cand = 0.5 * (lo + hi)
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if fabs(cand - phi) < 1e-15:
            phi = cand
            break
        phi = cand
    return phi


cdef double _deflated_root(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                           double phi_src, double a, double b,
                           double nx, double ny, double c) noexcept nogil:
    # bisection on q = h/(phi - phi_src): second root in the source cell
    cdef double qa = _line_h(R0, ms, eps, a, nx, ny, c) / (a - phi_src)
    cdef double qb = _line_h(R0, ms, eps, b, nx, ny, c) / (b - phi_src)
    cdef double lo, hi, mid, qm
    cdef int it
    if not (qa * qb < 0.0):
        return NAN
    lo = a
    hi = b
    for it in range(90):
        mid = 0.5 * (lo + hi)
        qm = _line_h(R0, ms, eps, mid, nx, ny, c) / (mid - phi_src)
        if (qm > 0.0) == (qa > 0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


cdef inline void _consider(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                           double phi, double nx, double ny, double c,
                           double ox, double oy, double dx, double dy,
                           double t_min, double h_tol,
                           double* best_phi, double* best_t) noexcept nogil:
    cdef double r, px, py, t
    if not isfinite(phi):
        return
    if fabs(_line_h(R0, ms, eps, phi, nx, ny, c)) > h_tol:
        return
    r = _radius(R0, ms, eps, phi)
    px = r * cos(phi)
    py = r * sin(phi)
    t = (px - ox) * dx + (py - oy) * dy
    if t > t_min and t < best_t[0]:
        best_t[0] = t
        best_phi[0] = phi


cdef int _intersect(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                    double[::1] scan_bx, double[::1] scan_by,
                    double ox, double oy, double dx, double dy, double t_min,
                    double phi_src,
                    double* out_phi, double* out_t) noexcept nogil:
    cdef double nx = -dy, ny = dx
    cdef double c = nx * ox + ny * oy
    cdef Py_ssize_t n_scan = scan_bx.shape[0] - 1
    cdef double dphi = _TWO_PI / n_scan
    cdef double h_tol = 1e-9 * R0
    cdef double best_phi = NAN, best_t = INFINITY
    cdef double h0, h1, phi
    cdef bint have_root
    cdef Py_ssize_t j
    h0 = nx * scan_bx[0] + ny * scan_by[0] - c
    for j in range(n_scan):
        h1 = nx * scan_bx[j + 1] + ny * scan_by[j + 1] - c
        have_root = 0
        if h0 * h1 < 0.0:
            phi = _refine_root(R0, ms, eps, j * dphi, (j + 1) * dphi, nx, ny, c)
            have_root = 1
        elif h0 == 0.0:
            phi = j * dphi
            have_root = 1
        if have_root:
            _consider(R0, ms, eps, phi, nx, ny, c, ox, oy, dx, dy,
                      t_min, h_tol, &best_phi, &best_t)
        h0 = h1
    if isfinite(phi_src):
        phi = _deflated_root(R0, ms, eps, phi_src,
                             phi_src - dphi, phi_src - 1e-12, nx, ny, c)
        _consider(R0, ms, eps, phi, nx, ny, c, ox, oy, dx, dy,
                  t_min, h_tol, &best_phi, &best_t)
        phi = _deflated_root(R0, ms, eps, phi_src,
                             phi_src + 1e-12, phi_src + dphi, nx, ny, c)
        _consider(R0, ms, eps, phi, nx, ny, c, ox, oy, dx, dy,
                  t_min, h_tol, &best_phi, &best_t)
    if not isfinite(best_phi):
        return 0
    if best_phi >= _TWO_PI:
        best_phi -= _TWO_PI
    elif best_phi < 0.0:
        best_phi += _TWO_PI
    out_phi[0] = best_phi
    out_t[0] = best_t
    return 1


def intersect_ray(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                  double[::1] scan_bx, double[::1] scan_by,
                  double ox, double oy, double dx, double dy, double t_min,
                  double phi_src=NAN):
    cdef double phi = 0.0, t = 0.0
    if _intersect(R0, ms, eps, scan_bx, scan_by, ox, oy, dx, dy, t_min,
                  phi_src, &phi, &t):
        return phi, t
    return NAN, NAN


cdef inline double _arc_s(double phi, double h_step, double[::1] s_knots,
                          double[::1] g_knots) noexcept nogil:
    cdef Py_ssize_t j = <Py_ssize_t>(phi / h_step)
    if j > s_knots.shape[0] - 2:
        j = s_knots.shape[0] - 2
    cdef double u = phi / h_step - j
    cdef double u2 = u * u
    cdef double u3 = u2 * u
    return ((2 * u3 - 3 * u2 + 1) * s_knots[j]
            + (u3 - 2 * u2 + u) * h_step * g_knots[j]
            + (-2 * u3 + 3 * u2) * s_knots[j + 1]
            + (u3 - u2) * h_step * g_knots[j + 1])


cdef inline void _frame(double R0, cnp.int64_t[::1] ms, double[::1] eps, double phi,
                        double* px, double* py, double* tx, double* ty,
                        double* nx, double* ny) noexcept nogil:
    cdef double r = _radius(R0, ms, eps, phi)
    cdef double dr = _dradius(R0, ms, eps, phi)
    cdef double cp = cos(phi), sp = sin(phi)
    cdef double vx = dr * cp - r * sp
    cdef double vy = dr * sp + r * cp
    cdef double g = hypot(vx, vy)
    px[0] = r * cp
    py[0] = r * sp
    tx[0] = vx / g
    ty[0] = vy / g
    nx[0] = ty[0]
    ny[0] = -tx[0]


def trace_closed(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                 double[::1] s_knots, double[::1] g_knots,
                 double[::1] scan_bx, double[::1] scan_by,
                 double x, double y, double dx, double dy, double phi_src,
                 Py_ssize_t n_bounces):
    cdef double h_step = _TWO_PI / (s_knots.shape[0] - 1)
    cdef double perim = s_knots[s_knots.shape[0] - 1]
    cdef double t_min = 1e-12 * R0
    s_np = np.empty(n_bounces)
    p_np = np.empty(n_bounces)
    phi_np = np.empty(n_bounces)
    chord_np = np.empty(n_bounces)
    cdef double[::1] s_arr = s_np
    cdef double[::1] p_arr = p_np
    cdef double[::1] phi_arr = phi_np
    cdef double[::1] chord_arr = chord_np
    cdef int status = _OK
    cdef Py_ssize_t n_done = 0, b
    cdef double phi = 0.0, t = 0.0
    cdef double px = 0.0, py = 0.0, tx = 0.0, ty = 0.0, nx = 0.0, ny = 0.0
    cdef double cos_in, s_norm
    with nogil:
        for b in range(n_bounces):
            if not _intersect(R0, ms, eps, scan_bx, scan_by, x, y, dx, dy,
                              t_min, phi_src, &phi, &t):
                status = _NO_HIT
                break
            _frame(R0, ms, eps, phi, &px, &py, &tx, &ty, &nx, &ny)
            cos_in = dx * nx + dy * ny
            if fabs(cos_in) < _GRAZING:
                status = _GRAZE
                break
            s_norm = _arc_s(phi, h_step, s_knots, g_knots) / perim
            if s_norm >= 1.0:
                s_norm -= 1.0
            s_arr[b] = s_norm
            p_arr[b] = dx * tx + dy * ty
            phi_arr[b] = phi
            chord_arr[b] = t
            dx = dx - 2.0 * cos_in * nx
            dy = dy - 2.0 * cos_in * ny
            x = px
            y = py
            phi_src = phi
            n_done = b + 1
    return (s_np[:n_done], p_np[:n_done], phi_np[:n_done], chord_np[:n_done],
            status, n_done, x, y, dx, dy)


def step_closed(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                double[::1] s_knots, double[::1] g_knots,
                double[::1] scan_bx, double[::1] scan_by,
                double x, double y, double dx, double dy, double phi_src=NAN):
    cdef double h_step = _TWO_PI / (s_knots.shape[0] - 1)
    cdef double perim = s_knots[s_knots.shape[0] - 1]
    cdef double phi = 0.0, t = 0.0
    cdef double px = 0.0, py = 0.0, tx = 0.0, ty = 0.0, nx = 0.0, ny = 0.0
    cdef double cos_in, p, s_norm
    if not _intersect(R0, ms, eps, scan_bx, scan_by, x, y, dx, dy,
                      1e-12 * R0, phi_src, &phi, &t):
        return STATUS_NO_HIT, 0.0, 0.0, 0.0, x, y, dx, dy, 0.0
    _frame(R0, ms, eps, phi, &px, &py, &tx, &ty, &nx, &ny)
    cos_in = dx * nx + dy * ny
    if fabs(cos_in) < _GRAZING:
        return STATUS_GRAZING, phi, 0.0, 0.0, x, y, dx, dy, t
    p = dx * tx + dy * ty
    s_norm = _arc_s(phi, h_step, s_knots, g_knots) / perim
    if s_norm >= 1.0:
        s_norm -= 1.0
    return (STATUS_OK, phi, s_norm, p, px, py,
            dx - 2.0 * cos_in * nx, dy - 2.0 * cos_in * ny, t)


cdef inline double _fresnel_R(double n, double p_abs, double cos_in,
                              bint pol_te) noexcept nogil:
    cdef double cos_t, r
    if n * p_abs >= 1.0:
        return 1.0
    cos_t = sqrt(1.0 - n * n * p_abs * p_abs)
    if pol_te:
        r = (cos_in / n - cos_t) / (cos_in / n + cos_t)
    else:
        r = (n * cos_in - cos_t) / (n * cos_in + cos_t)
    return r * r


def trace_open(double R0, cnp.int64_t[::1] ms, double[::1] eps,
               double[::1] s_knots, double[::1] g_knots,
               double[::1] scan_bx, double[::1] scan_by,
               double x, double y, double dx, double dy, double phi_src,
               double n_index, bint pol_te, Py_ssize_t n_total, double w_floor):
    cdef double h_step = _TWO_PI / (s_knots.shape[0] - 1)
    cdef double perim = s_knots[s_knots.shape[0] - 1]
    cdef double t_min = 1e-12 * R0
    s_np = np.empty(n_total)
    p_np = np.empty(n_total)
    w_np = np.empty(n_total)
    th_np = np.full(n_total, np.nan)
    em_np = np.zeros(n_total)
    cdef double[::1] s_arr = s_np
    cdef double[::1] p_arr = p_np
    cdef double[::1] w_arr = w_np
    cdef double[::1] th_arr = th_np
    cdef double[::1] em_arr = em_np
    cdef double w = 1.0
    cdef int status = _OK
    cdef Py_ssize_t n_done = 0, b
    cdef double phi = 0.0, t = 0.0
    cdef double px = 0.0, py = 0.0, tx = 0.0, ty = 0.0, nx = 0.0, ny = 0.0
    cdef double cos_in, p, p_abs, R, sin_out, cos_out, sgn, ex, ey, th, s_norm
    with nogil:
        for b in range(n_total):
            if not _intersect(R0, ms, eps, scan_bx, scan_by, x, y, dx, dy,
                              t_min, phi_src, &phi, &t):
                status = _NO_HIT
                break
            _frame(R0, ms, eps, phi, &px, &py, &tx, &ty, &nx, &ny)
            cos_in = dx * nx + dy * ny
            if fabs(cos_in) < _GRAZING:
                status = _GRAZE
                break
            p = dx * tx + dy * ty
            p_abs = fabs(p)
            R = _fresnel_R(n_index, p_abs, cos_in, pol_te)
            if R < 1.0:
                sin_out = n_index * p_abs
                cos_out = sqrt(1.0 - sin_out * sin_out)
                sgn = 1.0 if p >= 0.0 else -1.0
                ex = sgn * sin_out * tx + cos_out * nx
                ey = sgn * sin_out * ty + cos_out * ny
                th = atan2(ey, ex)
                if th < 0.0:
                    th += _TWO_PI
                th_arr[b] = th
                em_arr[b] = w * (1.0 - R)
            w = w * R
            s_norm = _arc_s(phi, h_step, s_knots, g_knots) / perim
            if s_norm >= 1.0:
                s_norm -= 1.0
            s_arr[b] = s_norm
            p_arr[b] = p
            w_arr[b] = w
            dx = dx - 2.0 * cos_in * nx
            dy = dy - 2.0 * cos_in * ny
            x = px
            y = py
            phi_src = phi
            n_done = b + 1
            if w < w_floor:
                status = _DECAY
                break
    return (s_np[:n_done], p_np[:n_done], w_np[:n_done], th_np[:n_done],
            em_np[:n_done], status, n_done, w)


# -- anisotropic ------------------------------------------------------------

cdef inline double _kf(double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                       double[::1] cdelta, double theta) noexcept nogil:
    cdef double k = 1.0
    cdef Py_ssize_t i
    for i in range(cms.shape[0]):
        k += cbeta[i] * cos(cms[i] * theta + cdelta[i])
    return k0 * k


cdef inline double _dkf(double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                        double[::1] cdelta, double theta) noexcept nogil:
    cdef double dk = 0.0
    cdef Py_ssize_t i
    for i in range(cms.shape[0]):
        dk -= cbeta[i] * cms[i] * sin(cms[i] * theta + cdelta[i])
    return k0 * dk


cdef inline void _group_dir(double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                            double[::1] cdelta, double theta,
                            double* gx, double* gy) noexcept nogil:
    cdef double k = _kf(k0, cms, cbeta, cdelta, theta)
    cdef double dk = _dkf(k0, cms, cbeta, cdelta, theta)
    cdef double ct = cos(theta), st = sin(theta)
    cdef double tx_ = dk * ct - k * st
    cdef double ty_ = dk * st + k * ct
    cdef double ggx = ty_, ggy = -tx_
    cdef double norm
    if ggx * ct + ggy * st < 0.0:
        ggx = -ggx
        ggy = -ggy
    norm = hypot(ggx, ggy)
    gx[0] = ggx / norm
    gy[0] = ggy / norm


def contour_group_dir(double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                      double[::1] cdelta, double theta):
    cdef double gx = 0.0, gy = 0.0
    _group_dir(k0, cms, cbeta, cdelta, theta, &gx, &gy)
    return gx, gy


cdef inline double _kpar_res(double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                             double[::1] cdelta, double theta,
                             double tx, double ty, double kpar) noexcept nogil:
    cdef double k = _kf(k0, cms, cbeta, cdelta, theta)
    return k * (cos(theta) * tx + sin(theta) * ty) - kpar


cdef inline double _kpar_res_d(double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                               double[::1] cdelta, double theta,
                               double tx, double ty) noexcept nogil:
    cdef double k = _kf(k0, cms, cbeta, cdelta, theta)
    cdef double dk = _dkf(k0, cms, cbeta, cdelta, theta)
    cdef double ct = cos(theta), st = sin(theta)
    return (dk * ct - k * st) * tx + (dk * st + k * ct) * ty


cdef int _aniso_reflect(double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                        double[::1] cdelta, double[::1] ctab_x, double[::1] ctab_y,
                        double kin_x, double kin_y, double gin_x, double gin_y,
                        double tx, double ty, double nx, double ny,
                        double* kox, double* koy, double* gox, double* goy) noexcept nogil:
    cdef double kn, kx, ky, norm, kpar, kn_in
    cdef Py_ssize_t n_scan, j
    cdef double dth, g0, g1, lo, hi, ga, theta, gm, dg, cand, k, gx, gy, score
    cdef double best_score = INFINITY
    cdef double bkx = 0.0, bky = 0.0, bgx = 0.0, bgy = 0.0
    cdef int found = 0, it
    if cms.shape[0] == 0:
        kn = kin_x * nx + kin_y * ny
        kox[0] = kin_x - 2.0 * kn * nx
        koy[0] = kin_y - 2.0 * kn * ny
        kn = gin_x * nx + gin_y * ny
        gox[0] = gin_x - 2.0 * kn * nx
        goy[0] = gin_y - 2.0 * kn * ny
        return 1
    kpar = kin_x * tx + kin_y * ty
    kn_in = fabs(kin_x * nx + kin_y * ny)
    n_scan = ctab_x.shape[0] - 1
    dth = _TWO_PI / n_scan
    g0 = ctab_x[0] * tx + ctab_y[0] * ty - kpar
    for j in range(n_scan):
        g1 = ctab_x[j + 1] * tx + ctab_y[j + 1] * ty - kpar
        if g0 * g1 < 0.0 or g0 == 0.0:
            lo = j * dth
            hi = (j + 1) * dth
            ga = _kpar_res(k0, cms, cbeta, cdelta, lo, tx, ty, kpar)
            theta = 0.5 * (lo + hi)
            for it in range(80):
                gm = _kpar_res(k0, cms, cbeta, cdelta, theta, tx, ty, kpar)
                if (gm > 0.0) == (ga > 0.0):
                    lo = theta
                else:
                    hi = theta
                dg = _kpar_res_d(k0, cms, cbeta, cdelta, theta, tx, ty)
                if dg != 0.0:
                    cand = theta - gm / dg
                else:
                    cand = 0.5 * (lo + hi)
                if not (lo < cand < hi):
                    cand = 0.5 * (lo + hi)
                if fabs(cand - theta) < 1e-15:
                    theta = cand
                    break
                theta = cand
            k = _kf(k0, cms, cbeta, cdelta, theta)
            kx = k * cos(theta)
            ky = k * sin(theta)
            _group_dir(k0, cms, cbeta, cdelta, theta, &gx, &gy)
            if gx * nx + gy * ny < -1e-12:
                score = fabs(fabs(kx * nx + ky * ny) - kn_in)
                if score < best_score:
                    best_score = score
                    bkx = kx
                    bky = ky
                    bgx = gx
                    bgy = gy
                    found = 1
        g0 = g1
    if not found:
        return 0
    kox[0] = bkx
    koy[0] = bky
    gox[0] = bgx
    goy[0] = bgy
    return 1


def aniso_reflect_kernel(double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                         double[::1] cdelta, double[::1] ctab_x, double[::1] ctab_y,
                         double kin_x, double kin_y, double gin_x, double gin_y,
                         double tx, double ty, double nx, double ny):
    cdef double kox = 0.0, koy = 0.0, gox = 0.0, goy = 0.0
    if _aniso_reflect(k0, cms, cbeta, cdelta, ctab_x, ctab_y,
                      kin_x, kin_y, gin_x, gin_y, tx, ty, nx, ny,
                      &kox, &koy, &gox, &goy):
        return True, kox, koy, gox, goy
    return False, 0.0, 0.0, 0.0, 0.0


def trace_aniso(double R0, cnp.int64_t[::1] ms, double[::1] eps,
                double[::1] s_knots, double[::1] g_knots,
                double[::1] scan_bx, double[::1] scan_by,
                double k0, cnp.int64_t[::1] cms, double[::1] cbeta,
                double[::1] cdelta, double[::1] ctab_x, double[::1] ctab_y,
                double x, double y, double kx, double ky, double gx, double gy,
                double phi_src, Py_ssize_t n_bounces):
    cdef double h_step = _TWO_PI / (s_knots.shape[0] - 1)
    cdef double perim = s_knots[s_knots.shape[0] - 1]
    cdef double t_min = 1e-12 * R0
    s_np = np.empty(n_bounces)
    kp_np = np.empty(n_bounces)
    phi_np = np.empty(n_bounces)
    cdef double[::1] s_arr = s_np
    cdef double[::1] kp_arr = kp_np
    cdef double[::1] phi_arr = phi_np
    cdef int status = _OK
    cdef Py_ssize_t n_done = 0, b
    cdef double phi = 0.0, t = 0.0
    cdef double px = 0.0, py = 0.0, tx = 0.0, ty = 0.0, nx = 0.0, ny = 0.0
    cdef double cos_in, kox, koy, gox, goy, s_norm
    with nogil:
        for b in range(n_bounces):
            if not _intersect(R0, ms, eps, scan_bx, scan_by, x, y, gx, gy,
                              t_min, phi_src, &phi, &t):
                status = _NO_HIT
                break
            _frame(R0, ms, eps, phi, &px, &py, &tx, &ty, &nx, &ny)
            cos_in = gx * nx + gy * ny
            if fabs(cos_in) < _GRAZING:
                status = _GRAZE
                break
            s_norm = _arc_s(phi, h_step, s_knots, g_knots) / perim
            if s_norm >= 1.0:
                s_norm -= 1.0
            s_arr[b] = s_norm
            kp_arr[b] = kx * tx + ky * ty
            phi_arr[b] = phi
            if not _aniso_reflect(k0, cms, cbeta, cdelta, ctab_x, ctab_y,
                                  kx, ky, gx, gy, tx, ty, nx, ny,
                                  &kox, &koy, &gox, &goy):
                n_done = b + 1
                status = _REFL_FAIL
                break
            kx = kox
            ky = koy
            gx = gox
            gy = goy
            x = px
            y = py
            phi_src = phi
            n_done = b + 1
    return (s_np[:n_done], kp_np[:n_done], phi_np[:n_done],
            status, n_done, kx, ky)
