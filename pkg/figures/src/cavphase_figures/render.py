"""Deterministic matplotlib rendering of the toolkit's figure types.

Styles are fixed (no timestamps, fixed dpi), so rendering the same inputs
twice yields identical image bytes.
"""

import warnings

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import readers

DPI = 150


def _outline(shape, n_points=720):
    phi = np.linspace(0.0, 2 * np.pi, n_points)
    r = np.full_like(phi, float(shape["R0"]))
    for m, eps in shape.get("harmonics", []):
        r += shape["R0"] * eps * np.cos(m * phi)
    return r * np.cos(phi), r * np.sin(phi)


def _save(fig, out_path):
    fig.savefig(out_path, dpi=DPI, metadata={"Software": "cavphase-figures"})
    plt.close(fig)


def _critical_lines(ax, summary):
    if summary is None:
        warnings.warn("no run summary given: critical-line overlay skipped")
        return
    med = readers.medium_from_summary(summary)
    if med is None:
        warnings.warn("run has no optical medium: critical-line overlay skipped")
        return
    n, _ = med
    for sign in (+1, -1):
        ax.axhline(sign / n, color="crimson", lw=0.8, ls="--", zorder=3)


def render_psos(csv_path, out_path, summary=None):
    """Scatter of the surface of section, one color per trajectory."""
    cols, data = readers.read_csv(csv_path, "psos")
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    traj = data[:, 0].astype(int)
    cmap = plt.get_cmap("tab10")
    for t in np.unique(traj):
        sel = traj == t
        ax.plot(data[sel, 2], data[sel, 3], ".", ms=1.5,
                color=cmap(int(t) % 10), rasterized=False)
    _critical_lines(ax, summary)
    ax.set_xlim(0, 1)
    ax.set_ylim(-1.05, 1.05)
    ax.set_xlabel("s / perimeter")
    ax.set_ylabel("tangential momentum p")
    fig.tight_layout()
    _save(fig, out_path)


def render_husimi(csv_path, out_path, summary=None):
    """Heatmap of one Husimi sheet; masked (evanescent) cells in grey."""
    cols, data = readers.read_csv(csv_path, "husimi_grid")
    s_vals = np.unique(data[:, 0])
    chi_vals = np.unique(data[:, 1])
    grid = data[:, 2].reshape(len(s_vals), len(chi_vals))
    masked = np.ma.masked_invalid(grid.T)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    cmap = plt.get_cmap("inferno").copy()
    cmap.set_bad("0.75")
    im = ax.pcolormesh(s_vals, chi_vals, masked, cmap=cmap, shading="nearest")
    _critical_lines(ax, summary)
    fig.colorbar(im, ax=ax, label="Husimi density")
    ax.set_xlabel("s / perimeter")
    ax.set_ylabel("sin chi")
    fig.tight_layout()
    _save(fig, out_path)


def render_farfield(csv_path, out_path, summary=None):
    """Polar plot of the emitted intensity per far-field angle bin."""
    cols, data = readers.read_csv(csv_path, "farfield")
    bins = len(data)
    theta = (data[:, 0] + 0.5) * (2 * np.pi / bins)
    intensity = data[:, 1]
    fig = plt.figure(figsize=(5.6, 5.6))
    ax = fig.add_subplot(projection="polar")
    closed_t = np.concatenate([theta, theta[:1]])
    closed_i = np.concatenate([intensity, intensity[:1]])
    ax.plot(closed_t, closed_i, lw=1.2)
    ax.fill(closed_t, closed_i, alpha=0.25)
    if summary is not None:
        u = summary.get("resolved", {}).get("directionality_U")
        if u is not None:
            ax.set_title(f"directionality U = {u:.3f}")
    fig.tight_layout()
    _save(fig, out_path)


def render_trajectory(csv_path, out_path, summary=None):
    """Bounce-to-bounce chords drawn over the cavity outline."""
    cols, data = readers.read_csv(csv_path, "xy")
    fig, ax = plt.subplots(figsize=(5.6, 5.6))
    shape = readers.shape_from_summary(summary) if summary else None
    if shape is not None:
        bx, by = _outline(shape)
        ax.plot(bx, by, "k-", lw=1.2)
    else:
        warnings.warn("no run summary given: cavity outline skipped")
    traj = data[:, 0].astype(int)
    cmap = plt.get_cmap("tab10")
    for t in np.unique(traj):
        sel = traj == t
        ax.plot(data[sel, 2], data[sel, 3], "-", lw=0.6,
                color=cmap(int(t) % 10))
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    _save(fig, out_path)


def render_shift_scan(csv_path, out_path, summary=None):
    """Lateral and angular beam shifts against the central incidence angle."""
    cols, data = readers.read_csv(csv_path, "beam_shifts")
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(data[:, 0], data[:, 1], "o-", ms=3, label="z_GH / lambda")
    ax2 = ax.twinx()
    ax2.plot(data[:, 0], data[:, 2], "s-", ms=3, color="darkorange",
             label="delta chi")
    if summary is not None:
        chic = summary.get("resolved", {}).get("critical_chi")
        if chic is not None:
            ax.axvline(chic, color="crimson", lw=0.8, ls="--")
    ax.set_xlabel("central incidence chi0 (rad)")
    ax.set_ylabel("lateral shift (wavelengths)")
    ax2.set_ylabel("angular shift (rad)")
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], loc="upper left")
    fig.tight_layout()
    _save(fig, out_path)


RENDERERS = {
    "psos": render_psos,
    "husimi": render_husimi,
    "farfield": render_farfield,
    "trajectory": render_trajectory,
    "shift-scan": render_shift_scan,
}
