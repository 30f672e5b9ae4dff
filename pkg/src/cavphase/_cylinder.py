"""Independent cylinder-function implementations for cross-checking.

These deliberately avoid scipy's Amos/Cephes routines.  J_m uses the
periodic integral representation under the trapezoidal rule (spectrally
accurate); Y_m uses the Schlaefli-type representation

    Y_m(z) = (1/pi) int_0^pi sin(z sin a - m a) da
           - (1/pi) int_0^inf [e^{mt} + (-1)^m e^{-mt}] e^{-z sinh t} dt

with the infinite part evaluated after the substitution u = sinh t
(valid for Re z > 0, integer m).  H^(1)_m = J_m + i Y_m.  Accuracy is
~1e-9 relative over the disk-resonance range (Re z ~ 2..40, small |Im z|,
m up to ~50).
"""

import math

import numpy as np


def bessel_j_integral(m, z, n_nodes=8192):
    """J_m(z) = (1/2pi) int_{-pi}^{pi} exp(i(z sin t - m t)) dt, trapezoidal."""
    t = np.linspace(-np.pi, np.pi, n_nodes, endpoint=False)
    vals = np.exp(1j * (z * np.sin(t) - m * t))
    return complex(vals.mean())


def _simpson(vals, h):
    n = len(vals) - 1
    return (h / 3.0) * (vals[0] + vals[-1]
                        + 4.0 * vals[1:-1:2].sum() + 2.0 * vals[2:-2:2].sum())


def bessel_y_integral(m, z, n_nodes=16385):
    """Y_m(z) for integer m, Re z > 0, via the two-integral representation."""
    m = int(m)
    z = complex(z)
    if not (z.real > 0):
        raise ValueError("bessel_y_integral requires Re z > 0")
    a = np.linspace(0.0, np.pi, n_nodes)
    osc = np.sin(z * np.sin(a) - m * a)
    part1 = _simpson(osc, np.pi / (n_nodes - 1))
    # decaying part after u = sinh t: (w^m + (-1)^m w^-m) e^{-z u} / sqrt(1+u^2),
    # w = u + sqrt(1 + u^2)
    u_end = 1.0
    for _ in range(200):
        if z.real * u_end - m * math.asinh(u_end) > 50.0:
            break
        u_end *= 1.25
    u = np.linspace(0.0, u_end, n_nodes)
    root = np.sqrt(1.0 + u * u)
    w = u + root
    decay = (w ** m + (-1) ** m * w ** (-m)) * np.exp(-z * u) / root
    part2 = _simpson(decay, u_end / (n_nodes - 1))
    return complex((part1 - part2) / np.pi)


def hankel1_integral(m, z):
    return bessel_j_integral(m, z) + 1j * bessel_y_integral(m, z)


def bessel_jp_integral(m, z):
    """dJ_m/dz from the recurrence J'_m = (J_{m-1} - J_{m+1})/2."""
    return 0.5 * (bessel_j_integral(m - 1, z) - bessel_j_integral(m + 1, z))


def hankel1p_integral(m, z):
    """dH^(1)_m/dz from H'_m = (H_{m-1} - H_{m+1})/2."""
    if m == 0:
        return -hankel1_integral(1, z)
    return 0.5 * (hankel1_integral(m - 1, z) - hankel1_integral(m + 1, z))
