"""Pure-Python bounce-map kernels (fallback for the compiled extension).

Same call signatures and numerics as ``_kernels.pyx``; per-bounce root
bracketing is vectorized with numpy, refinement is scalar.  Status codes
shared by both backends:

    0  completed
    1  grazing incidence (|cos chi| below tolerance)
    2  no forward intersection (should not happen for valid interior rays)
    3  intensity decayed below the floor (open traces)
    4  reflection failure (anisotropic: no admissible outgoing wavevector)
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi
GRAZING_COS = 1e-9

STATUS_OK = 0
STATUS_GRAZING = 1
STATUS_NO_HIT = 2
STATUS_DECAYED = 3
STATUS_REFLECTION_FAILURE = 4

BACKEND = "python"


# -- scalar boundary helpers ----------------------------------------------------

def _radius(R0, ms, eps, phi):
    r = 1.0
    for i in range(len(ms)):
        r += eps[i] * math.cos(ms[i] * phi)
    return R0 * r


def _dradius(R0, ms, eps, phi):
    dr = 0.0
    for i in range(len(ms)):
        dr -= eps[i] * ms[i] * math.sin(ms[i] * phi)
    return R0 * dr


def _line_h(R0, ms, eps, phi, nx, ny, c):
    """Signed distance of the boundary point at phi from the ray's line."""
    r = _radius(R0, ms, eps, phi)
    return nx * r * math.cos(phi) + ny * r * math.sin(phi) - c


def _line_dh(R0, ms, eps, phi, nx, ny):
    r = _radius(R0, ms, eps, phi)
    dr = _dradius(R0, ms, eps, phi)
    cp, sp = math.cos(phi), math.sin(phi)
    return nx * (dr * cp - r * sp) + ny * (dr * sp + r * cp)


def _refine_root(R0, ms, eps, phi_a, phi_b, nx, ny, c):
    """Safeguarded Newton for the line-crossing angle inside [phi_a, phi_b]."""
    ha = _line_h(R0, ms, eps, phi_a, nx, ny, c)
    lo, hi = phi_a, phi_b
    phi = 0.5 * (lo + hi)
    for _ in range(80):
        h = _line_h(R0, ms, eps, phi, nx, ny, c)
        if (h > 0.0) == (ha > 0.0):
            lo = phi
        else:
            hi = phi
        dh = _line_dh(R0, ms, eps, phi, nx, ny)
        if dh != 0.0:
            step = h / dh
            cand = phi - step
        else:
            cand = 0.5 * (lo + hi)
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if abs(cand - phi) < 1e-15:
            phi = cand
            break
        phi = cand
    return phi


def _deflated_root(R0, ms, eps, phi_src, a, b, nx, ny, c):
    """Root of h on [a, b] via bisection on q = h/(phi - phi_src).

    Deflates the known boundary-source root at phi_src so a second crossing
    in the same scan cell (near-tangent, short-chord flights) is found.
    Returns nan when q does not change sign.
    """
    qa = _line_h(R0, ms, eps, a, nx, ny, c) / (a - phi_src)
    qb = _line_h(R0, ms, eps, b, nx, ny, c) / (b - phi_src)
    if not (qa * qb < 0.0):
        return math.nan
    lo, hi = a, b
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        qm = _line_h(R0, ms, eps, mid, nx, ny, c) / (mid - phi_src)
        if (qm > 0.0) == (qa > 0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def intersect_ray(R0, ms, eps, scan_bx, scan_by, ox, oy, dx, dy, t_min,
                  phi_src=math.nan):
    """First boundary crossing along the ray, as (phi, t); (nan, nan) if none.

    The line through (ox, oy) with direction (dx, dy) is intersected with the
    boundary by locating sign changes of h(phi) = n_line . B(phi) - c over the
    precomputed boundary table, refining each bracket, and keeping the root of
    minimal travel distance t > t_min.  When the ray starts on the boundary,
    ``phi_src`` deflates that root so a same-cell second crossing is caught.
    """
    nx, ny = -dy, dx
    c = nx * ox + ny * oy
    h = nx * scan_bx + ny * scan_by - c
    n_scan = len(scan_bx) - 1
    dphi = TWO_PI / n_scan
    h_tol = 1e-9 * R0
    cells = np.nonzero(h[:-1] * h[1:] < 0.0)[0]
    candidates = [_refine_root(R0, ms, eps, j * dphi, (j + 1) * dphi, nx, ny, c)
                  for j in cells]
    candidates.extend(j * dphi for j in np.nonzero(h[:-1] == 0.0)[0])
    if math.isfinite(phi_src):
        eps_phi = 1e-12
        candidates.append(_deflated_root(R0, ms, eps, phi_src,
                                         phi_src - dphi, phi_src - eps_phi, nx, ny, c))
        candidates.append(_deflated_root(R0, ms, eps, phi_src,
                                         phi_src + eps_phi, phi_src + dphi, nx, ny, c))
    best_phi = math.nan
    best_t = math.inf
    for phi in candidates:
        if not math.isfinite(phi):
            continue
        if abs(_line_h(R0, ms, eps, phi, nx, ny, c)) > h_tol:
            continue
        r = _radius(R0, ms, eps, phi)
        px, py = r * math.cos(phi), r * math.sin(phi)
        t = (px - ox) * dx + (py - oy) * dy
        if t > t_min and t < best_t:
            best_t = t
            best_phi = phi
    if not math.isfinite(best_phi):
        return math.nan, math.nan
    best_phi = best_phi % TWO_PI
    return best_phi, best_t


def _arc_s(phi, h_step, s_knots, g_knots):
    """Cubic Hermite arc length on the cached uniform table."""
    j = min(int(phi / h_step), len(s_knots) - 2)
    u = phi / h_step - j
    u2 = u * u
    u3 = u2 * u
    return ((2 * u3 - 3 * u2 + 1) * s_knots[j]
            + (u3 - 2 * u2 + u) * h_step * g_knots[j]
            + (-2 * u3 + 3 * u2) * s_knots[j + 1]
            + (u3 - u2) * h_step * g_knots[j + 1])


def _frame(R0, ms, eps, phi):
    """Boundary point and local (tangent, normal) frame at phi."""
    r = _radius(R0, ms, eps, phi)
    dr = _dradius(R0, ms, eps, phi)
    cp, sp = math.cos(phi), math.sin(phi)
    px, py = r * cp, r * sp
    vx = dr * cp - r * sp
    vy = dr * sp + r * cp
    g = math.hypot(vx, vy)
    tx, ty = vx / g, vy / g
    return px, py, tx, ty, ty, -tx   # position, tangent, outward normal


# -- closed (hard-wall) trace ---------------------------------------------------

def trace_closed(R0, ms, eps, s_knots, g_knots, scan_bx, scan_by,
                 x, y, dx, dy, phi_src, n_bounces):
    """Specular billiard iteration from an interior ray.

    Returns (s_norm, p, phi, chord, status, n_done, x, y, dx, dy); the arrays
    are filled up to n_done.
    """
    h_step = TWO_PI / (len(s_knots) - 1)
    perim = s_knots[-1]
    t_min = 1e-12 * R0
    s_arr = np.empty(n_bounces)
    p_arr = np.empty(n_bounces)
    phi_arr = np.empty(n_bounces)
    chord_arr = np.empty(n_bounces)
    status = STATUS_OK
    n_done = 0
    for b in range(n_bounces):
        phi, t = intersect_ray(R0, ms, eps, scan_bx, scan_by, x, y, dx, dy, t_min,
                               phi_src)
        if not math.isfinite(phi):
            status = STATUS_NO_HIT
            break
        px, py, tx, ty, nx, ny = _frame(R0, ms, eps, phi)
        cos_in = dx * nx + dy * ny
        if abs(cos_in) < GRAZING_COS:
            status = STATUS_GRAZING
            break
        p = dx * tx + dy * ty
        s_norm = _arc_s(phi, h_step, s_knots, g_knots) / perim
        if s_norm >= 1.0:
            s_norm -= 1.0
        s_arr[b] = s_norm
        p_arr[b] = p
        phi_arr[b] = phi
        chord_arr[b] = t
        dx, dy = dx - 2.0 * cos_in * nx, dy - 2.0 * cos_in * ny
        x, y = px, py
        phi_src = phi
        n_done = b + 1
    return (s_arr[:n_done], p_arr[:n_done], phi_arr[:n_done],
            chord_arr[:n_done], status, n_done, x, y, dx, dy)


def step_closed(R0, ms, eps, s_knots, g_knots, scan_bx, scan_by, x, y, dx, dy,
                phi_src=float('nan')):
    """Single bounce; returns (status, phi, s_norm, p, x, y, dx, dy, chord)."""
    h_step = TWO_PI / (len(s_knots) - 1)
    perim = s_knots[-1]
    phi, t = intersect_ray(R0, ms, eps, scan_bx, scan_by, x, y, dx, dy, 1e-12 * R0,
                           phi_src)
    if not math.isfinite(phi):
        return STATUS_NO_HIT, 0.0, 0.0, 0.0, x, y, dx, dy, 0.0
    px, py, tx, ty, nx, ny = _frame(R0, ms, eps, phi)
    cos_in = dx * nx + dy * ny
    if abs(cos_in) < GRAZING_COS:
        return STATUS_GRAZING, phi, 0.0, 0.0, x, y, dx, dy, t
    p = dx * tx + dy * ty
    s_norm = _arc_s(phi, h_step, s_knots, g_knots) / perim
    if s_norm >= 1.0:
        s_norm -= 1.0
    dxr, dyr = dx - 2.0 * cos_in * nx, dy - 2.0 * cos_in * ny
    return STATUS_OK, phi, s_norm, p, px, py, dxr, dyr, t


# -- open (dielectric) trace ----------------------------------------------------

def _fresnel_R(n, p_abs, cos_in, pol_te):
    """Intensity reflectance, inside medium n -> vacuum; 1.0 beyond critical.

    pol_te=True: E in plane (out-of-plane H); carries the Brewster zero.
    """
    if n * p_abs >= 1.0:
        return 1.0
    cos_t = math.sqrt(1.0 - n * n * p_abs * p_abs)
    if pol_te:
        r = (cos_in / n - cos_t) / (cos_in / n + cos_t)
    else:
        r = (n * cos_in - cos_t) / (n * cos_in + cos_t)
    return r * r


def trace_open(R0, ms, eps, s_knots, g_knots, scan_bx, scan_by,
               x, y, dx, dy, phi_src, n_index, pol_te, n_total, w_floor):
    """Fresnel-weighted trace: intensity splits at each sub-critical bounce.

    Returns (s_norm, p, w_after, theta_ff, emitted, status, n_done, w_final).
    theta_ff is nan at totally-internally-reflected bounces.
    """
    h_step = TWO_PI / (len(s_knots) - 1)
    perim = s_knots[-1]
    t_min = 1e-12 * R0
    s_arr = np.empty(n_total)
    p_arr = np.empty(n_total)
    w_arr = np.empty(n_total)
    th_arr = np.full(n_total, math.nan)
    em_arr = np.zeros(n_total)
    w = 1.0
    status = STATUS_OK
    n_done = 0
    for b in range(n_total):
        phi, t = intersect_ray(R0, ms, eps, scan_bx, scan_by, x, y, dx, dy, t_min,
                               phi_src)
        if not math.isfinite(phi):
            status = STATUS_NO_HIT
            break
        px, py, tx, ty, nx, ny = _frame(R0, ms, eps, phi)
        cos_in = dx * nx + dy * ny
        if abs(cos_in) < GRAZING_COS:
            status = STATUS_GRAZING
            break
        p = dx * tx + dy * ty
        p_abs = abs(p)
        R = _fresnel_R(n_index, p_abs, cos_in, pol_te)
        if R < 1.0:
            sin_out = n_index * p_abs
            cos_out = math.sqrt(1.0 - sin_out * sin_out)
            sgn = 1.0 if p >= 0.0 else -1.0
            ex = sgn * sin_out * tx + cos_out * nx
            ey = sgn * sin_out * ty + cos_out * ny
            th_arr[b] = math.atan2(ey, ex) % TWO_PI
            em_arr[b] = w * (1.0 - R)
        w = w * R
        s_norm = _arc_s(phi, h_step, s_knots, g_knots) / perim
        if s_norm >= 1.0:
            s_norm -= 1.0
        s_arr[b] = s_norm
        p_arr[b] = p
        w_arr[b] = w
        dx, dy = dx - 2.0 * cos_in * nx, dy - 2.0 * cos_in * ny
        x, y = px, py
        phi_src = phi
        n_done = b + 1
        if w < w_floor:
            status = STATUS_DECAYED
            break
    return (s_arr[:n_done], p_arr[:n_done], w_arr[:n_done],
            th_arr[:n_done], em_arr[:n_done], status, n_done, w)


# -- anisotropic (Fermi-contour) trace ------------------------------------------

def _kf(k0, cms, cbeta, cdelta, theta):
    k = 1.0
    for i in range(len(cms)):
        k += cbeta[i] * math.cos(cms[i] * theta + cdelta[i])
    return k0 * k


def _dkf(k0, cms, cbeta, cdelta, theta):
    dk = 0.0
    for i in range(len(cms)):
        dk -= cbeta[i] * cms[i] * math.sin(cms[i] * theta + cdelta[i])
    return k0 * dk


def contour_group_dir(k0, cms, cbeta, cdelta, theta):
    """Unit outward normal of the contour at theta (group-velocity direction)."""
    k = _kf(k0, cms, cbeta, cdelta, theta)
    dk = _dkf(k0, cms, cbeta, cdelta, theta)
    ct, st = math.cos(theta), math.sin(theta)
    tx_, ty_ = dk * ct - k * st, dk * st + k * ct
    gx, gy = ty_, -tx_
    if gx * ct + gy * st < 0.0:
        gx, gy = -gx, -gy
    norm = math.hypot(gx, gy)
    return gx / norm, gy / norm


def _kpar_residual(k0, cms, cbeta, cdelta, theta, tx, ty, kpar):
    k = _kf(k0, cms, cbeta, cdelta, theta)
    return k * (math.cos(theta) * tx + math.sin(theta) * ty) - kpar


def _kpar_residual_deriv(k0, cms, cbeta, cdelta, theta, tx, ty):
    k = _kf(k0, cms, cbeta, cdelta, theta)
    dk = _dkf(k0, cms, cbeta, cdelta, theta)
    ct, st = math.cos(theta), math.sin(theta)
    return (dk * ct - k * st) * tx + (dk * st + k * ct) * ty


def aniso_reflect_kernel(k0, cms, cbeta, cdelta, ctab_x, ctab_y,
                         kin_x, kin_y, gin_x, gin_y, tx, ty, nx, ny):
    """Conserve the tangential wavevector at a wall reflection.

    Returns (ok, kout_x, kout_y, gx, gy).  Among on-contour solutions with
    inward group velocity, picks the one whose normal wavevector component is
    closest in magnitude to the incoming one.  On a circular contour the
    reflection is the exact specular image and the group direction is
    reflected with the same arithmetic as the isotropic kernel, so the two
    backends trace identical paths.
    """
    if len(cms) == 0:
        kn = kin_x * nx + kin_y * ny
        kx, ky = kin_x - 2.0 * kn * nx, kin_y - 2.0 * kn * ny
        gn = gin_x * nx + gin_y * ny
        return True, kx, ky, gin_x - 2.0 * gn * nx, gin_y - 2.0 * gn * ny
    kpar = kin_x * tx + kin_y * ty
    kn_in = abs(kin_x * nx + kin_y * ny)
    g = ctab_x * tx + ctab_y * ty - kpar
    sign_change = (g[:-1] * g[1:] < 0.0) | (g[:-1] == 0.0)
    cells = np.nonzero(sign_change)[0]
    n_scan = len(ctab_x) - 1
    dth = TWO_PI / n_scan
    best = None
    best_score = math.inf
    for j in cells:
        lo, hi = j * dth, (j + 1) * dth
        ga = _kpar_residual(k0, cms, cbeta, cdelta, lo, tx, ty, kpar)
        theta = 0.5 * (lo + hi)
        for _ in range(80):
            gm = _kpar_residual(k0, cms, cbeta, cdelta, theta, tx, ty, kpar)
            if (gm > 0.0) == (ga > 0.0):
                lo = theta
            else:
                hi = theta
            dg = _kpar_residual_deriv(k0, cms, cbeta, cdelta, theta, tx, ty)
            cand = theta - gm / dg if dg != 0.0 else 0.5 * (lo + hi)
            if not (lo < cand < hi):
                cand = 0.5 * (lo + hi)
            if abs(cand - theta) < 1e-15:
                theta = cand
                break
            theta = cand
        k = _kf(k0, cms, cbeta, cdelta, theta)
        kx, ky = k * math.cos(theta), k * math.sin(theta)
        gx, gy = contour_group_dir(k0, cms, cbeta, cdelta, theta)
        if gx * nx + gy * ny < -1e-12:   # group velocity back into the cavity
            score = abs(abs(kx * nx + ky * ny) - kn_in)
            if score < best_score:
                best_score = score
                best = (kx, ky, gx, gy)
    if best is None:
        return False, 0.0, 0.0, 0.0, 0.0
    return True, best[0], best[1], best[2], best[3]


def trace_aniso(R0, ms, eps, s_knots, g_knots, scan_bx, scan_by,
                k0, cms, cbeta, cdelta, ctab_x, ctab_y,
                x, y, kx, ky, gx, gy, phi_src, n_bounces):
    """Anisotropic billiard trace: straight flights along the group velocity,
    tangential-wavevector-conserving reflections.

    Returns (s_norm, kpar, phi, status, n_done, kx, ky).
    """
    h_step = TWO_PI / (len(s_knots) - 1)
    perim = s_knots[-1]
    t_min = 1e-12 * R0
    s_arr = np.empty(n_bounces)
    kp_arr = np.empty(n_bounces)
    phi_arr = np.empty(n_bounces)
    status = STATUS_OK
    n_done = 0
    for b in range(n_bounces):
        phi, t = intersect_ray(R0, ms, eps, scan_bx, scan_by, x, y, gx, gy, t_min,
                               phi_src)
        if not math.isfinite(phi):
            status = STATUS_NO_HIT
            break
        px, py, tx, ty, nx, ny = _frame(R0, ms, eps, phi)
        cos_in = gx * nx + gy * ny
        if abs(cos_in) < GRAZING_COS:
            status = STATUS_GRAZING
            break
        s_norm = _arc_s(phi, h_step, s_knots, g_knots) / perim
        if s_norm >= 1.0:
            s_norm -= 1.0
        s_arr[b] = s_norm
        kp_arr[b] = kx * tx + ky * ty
        phi_arr[b] = phi
        ok, kx, ky, gx, gy = aniso_reflect_kernel(
            k0, cms, cbeta, cdelta, ctab_x, ctab_y, kx, ky, gx, gy,
            tx, ty, nx, ny)
        n_done = b + 1
        if not ok:
            status = STATUS_REFLECTION_FAILURE
            break
        x, y = px, py
        phi_src = phi
    return (s_arr[:n_done], kp_arr[:n_done], phi_arr[:n_done],
            status, n_done, kx, ky)
