"""Batch command-line interface.

Every subcommand reads a JSON config, runs deterministically from
(config, seed) and writes schema-versioned CSV/JSON artifacts plus a
summary.json echoing the resolved configuration.  Exit codes: 0 success,
2 configuration error, 3 numerical failure.  Wall time goes to stderr only,
so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from . import __version__, backend
from . import anisotropic as aniso
from . import beams, config, dielectric, diskwave, dynamics, husimi, runio
from .errors import CavphaseError, ConfigError, NumericalError

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _resolve_launches(cfg, shape, seed, path="launches"):
    """Launch list for closed/open traces: explicit, grid, or random."""
    spec = cfg.get(path)
    if spec is None:
        raise ConfigError("missing launch specification", path)
    out = []
    if isinstance(spec, dict) and "random" in spec:
        config.expect_keys(spec, ["random"], ["random"], path)
        rnd = spec["random"]
        config.expect_keys(rnd, ["count", "band"], ["count"], f"{path}.random")
        count = config.positive_int(rnd, "count", path=f"{path}.random")
        band = rnd.get("band", [0.0, 1.0])
        for i in range(count):
            s_norm, p = dielectric.launch_point(seed, i, (band[0], band[1]))
            out.append((s_norm, p))
        return out
    if isinstance(spec, dict) and "grid" in spec:
        config.expect_keys(spec, ["grid"], ["grid"], path)
        grid = spec["grid"]
        config.expect_keys(grid, ["s_norm", "p"], ["s_norm", "p"], f"{path}.grid")
        for s_norm in grid["s_norm"]:
            for p in grid["p"]:
                out.append((float(s_norm), float(p)))
        return out
    if not isinstance(spec, list):
        raise ConfigError("launches must be a list, grid, or random spec", path)
    for i, one in enumerate(spec):
        where = f"{path}[{i}]"
        if not isinstance(one, dict):
            raise ConfigError("launch must be an object", where)
        if "phi" in one:
            config.expect_keys(one, ["phi", "sin_chi"], ["phi", "sin_chi"], where)
            bp = shape.boundary_point(float(one["phi"]))
            out.append((bp.s / shape.perimeter, float(one["sin_chi"])))
        else:
            config.expect_keys(one, ["s_norm", "p"], ["s_norm", "p"], where)
            out.append((float(one["s_norm"]), float(one["p"])))
    return out


def _launch_state_from(shape, s_norm, p):
    phi = shape.arc_length_inverse((s_norm % 1.0) * shape.perimeter)
    return dynamics.launch_state(shape, phi, p)


# -- subcommand runners -------------------------------------------------------

def run_psos(cfg, seed, outputs, threads):
    config.expect_keys(cfg, ["shape", "launches", "n_bounces", "emit_xy", "seed"],
                       ["shape", "launches", "n_bounces"])
    shape = config.parse_shape(cfg["shape"])
    n_bounces = config.positive_int(cfg, "n_bounces")
    launches = _resolve_launches(cfg, shape, seed)
    rows = []
    xy_rows = []
    emit_xy = bool(cfg.get("emit_xy", False))
    for traj, (s_norm, p) in enumerate(launches):
        series = dynamics.trace(shape, _launch_state_from(shape, s_norm, p),
                                n_bounces)
        for b in range(len(series)):
            rows.append((traj, b, float(series.s_norm[b]), float(series.p[b]),
                         float(series.weight[b])))
        if emit_xy:
            for b in range(len(series)):
                bp = shape.boundary_point(float(series.phi[b]))
                xy_rows.append((traj, b, float(bp.position[0]), float(bp.position[1])))
    runio.write_csv(outputs.path("psos.csv"), "psos", rows)
    artifacts = {"psos": "psos.csv"}
    if emit_xy:
        runio.write_csv(outputs.path("trajectory_xy.csv"), "xy", xy_rows)
        artifacts["trajectory_xy"] = "trajectory_xy.csv"
    return {"shape": config.shape_to_dict(shape), "n_bounces": n_bounces,
            "n_trajectories": len(launches)}, artifacts


def run_psos_aniso(cfg, seed, outputs, threads):
    config.expect_keys(cfg, ["shape", "contour", "launches", "n_bounces", "seed"],
                       ["shape", "contour", "launches", "n_bounces"])
    shape = config.parse_shape(cfg["shape"])
    contour = config.parse_contour(cfg["contour"])
    n_bounces = config.positive_int(cfg, "n_bounces")
    spec = cfg["launches"]
    launches = []
    if isinstance(spec, dict) and "random" in spec:
        rnd = spec["random"]
        config.expect_keys(rnd, ["count"], ["count"], "launches.random")
        count = config.positive_int(rnd, "count", path="launches.random")
        i = 0
        attempt = 0
        while i < count:
            rng = np.random.Generator(np.random.Philox(
                key=np.array([np.uint64(seed), np.uint64(attempt)], dtype=np.uint64)))
            phi = rng.uniform(0.0, 2.0 * math.pi)
            theta = rng.uniform(0.0, 2.0 * math.pi)
            attempt += 1
            try:
                launches.append(aniso.aniso_launch(shape, contour, phi, theta))
                i += 1
            except CavphaseError:
                continue
            if attempt > 100 * count:
                raise NumericalError("could not draw inward aniso launches")
    elif isinstance(spec, list):
        for i, one in enumerate(spec):
            config.expect_keys(one, ["phi", "theta"], ["phi", "theta"],
                               f"launches[{i}]")
            launches.append(aniso.aniso_launch(shape, contour,
                                               float(one["phi"]), float(one["theta"])))
    else:
        raise ConfigError("launches must be a list or random spec", "launches")
    rows = []
    for traj, state in enumerate(launches):
        series = aniso.aniso_trace(shape, contour, state, n_bounces,
                                   on_failure="truncate")
        for b in range(len(series)):
            rows.append((traj, b, float(series.s_norm[b]), float(series.p[b]),
                         float(series.weight[b])))
    runio.write_csv(outputs.path("psos.csv"), "psos", rows)
    return {"shape": config.shape_to_dict(shape),
            "contour": config.contour_to_dict(contour),
            "n_bounces": n_bounces, "n_trajectories": len(launches),
            "p_normalization": contour.k_max}, {"psos": "psos.csv"}


def run_lyapunov(cfg, seed, outputs, threads):
    config.expect_keys(cfg, ["shape", "launches", "n_bounces", "delta0", "seed"],
                       ["shape", "launches", "n_bounces"])
    shape = config.parse_shape(cfg["shape"])
    n_bounces = config.positive_int(cfg, "n_bounces", minimum=10)
    delta0 = cfg.get("delta0")
    launches = _resolve_launches(cfg, shape, seed)
    rows = []
    lams = []
    for traj, (s_norm, p) in enumerate(launches):
        res = dynamics.lyapunov(shape, _launch_state_from(shape, s_norm, p),
                                n_bounces, delta0=delta0)
        rows.append((traj, res.lam, res.stderr, res.mean_free_path, res.n_skipped))
        lams.append(res.lam)
    runio.write_csv(outputs.path("lyapunov.csv"), "lyapunov", rows)
    return {"shape": config.shape_to_dict(shape), "n_bounces": n_bounces,
            "mean_lambda": float(np.mean(lams)),
            "std_lambda": float(np.std(lams, ddof=1)) if len(lams) > 1 else 0.0,
            }, {"lyapunov": "lyapunov.csv"}


def run_steady(cfg, seed, outputs, threads):
    config.expect_keys(
        cfg, ["shape", "medium", "ensemble", "transient", "record",
              "launch_band", "s_bins", "p_bins", "seed"],
        ["shape", "medium", "ensemble"])
    shape = config.parse_shape(cfg["shape"])
    medium = config.parse_medium(cfg["medium"])
    ensemble = config.positive_int(cfg, "ensemble")
    transient = config.positive_int(cfg, "transient", default=20, minimum=0)
    record = config.positive_int(cfg, "record", default=100)
    s_bins = config.positive_int(cfg, "s_bins", default=128)
    p_bins = config.positive_int(cfg, "p_bins", default=128)
    band = cfg.get("launch_band")
    res = dielectric.steady_distribution(
        shape, medium, ensemble, transient, record, seed,
        launch_band=tuple(band) if band else None,
        s_bins=s_bins, p_bins=p_bins, n_threads=threads)
    rows = []
    for i in range(s_bins):
        for j in range(p_bins):
            rows.append((i, j, float(res.hist[i, j])))
    runio.write_csv(outputs.path("steady.csv"), "steady", rows)
    return {"shape": config.shape_to_dict(shape),
            "medium": {"n": medium.n, "polarization": medium.polarization},
            "ensemble": ensemble, "transient": transient, "record": record,
            "s_bins": s_bins, "p_bins": p_bins,
            "launch_band": list(band) if band else list(dielectric.default_launch_band(medium)),
            "critical_sin_chi": medium.critical_sin_chi,
            "audit": res.audit.as_dict(), "n_grazing": res.n_grazing,
            }, {"steady": "steady.csv"}


def run_farfield(cfg, seed, outputs, threads):
    config.expect_keys(
        cfg, ["shape", "medium", "ensemble", "transient", "record", "bins",
              "launch_band", "seed"],
        ["shape", "medium", "ensemble"])
    shape = config.parse_shape(cfg["shape"])
    medium = config.parse_medium(cfg["medium"])
    ensemble = config.positive_int(cfg, "ensemble")
    transient = config.positive_int(cfg, "transient", default=20, minimum=0)
    record = config.positive_int(cfg, "record", default=100)
    bins = config.positive_int(cfg, "bins", default=360, minimum=4)
    band = cfg.get("launch_band")
    res = dielectric.farfield_emission(
        shape, medium, ensemble, transient, record, bins, seed,
        launch_band=tuple(band) if band else None, n_threads=threads)
    rows = [(b, float(v)) for b, v in enumerate(res.intensity)]
    runio.write_csv(outputs.path("farfield.csv"), "farfield", rows)
    return {"shape": config.shape_to_dict(shape),
            "medium": {"n": medium.n, "polarization": medium.polarization},
            "ensemble": ensemble, "transient": transient, "record": record,
            "bins": bins,
            "launch_band": list(band) if band else list(dielectric.default_launch_band(medium)),
            "critical_sin_chi": medium.critical_sin_chi,
            "directionality_U": res.directionality,
            "directionality_stderr": res.directionality_stderr,
            "audit": res.audit.as_dict(), "n_grazing": res.n_grazing,
            }, {"farfield": "farfield.csv"}


def run_disk_modes(cfg, seed, outputs, threads):
    config.expect_keys(
        cfg, ["n", "polarization", "m_range", "radial_orders",
              "boundary_wave", "seed"],
        ["n", "polarization", "m_range"])
    n = float(cfg["n"])
    pol = cfg["polarization"]
    m_lo, m_hi = cfg["m_range"]
    orders = cfg.get("radial_orders", [1])
    modes = []
    for m in range(int(m_lo), int(m_hi) + 1):
        for q in orders:
            try:
                res = diskwave.find_wg_resonance(m, n, pol, radial_order=int(q))
            except CavphaseError:
                continue
            modes.append({
                "m": res.m, "re_kR0": res.kR0.real, "im_kR0": res.kR0.imag,
                "radial_order": res.radial_order, "Q": res.q,
                "sin_chi": res.sin_chi,
                "R_generalized": diskwave.generalized_fresnel(res),
                "residual": res.residual,
            })
    runio.write_json(outputs.path("disk_modes.json"), "disk_modes",
                     {"n": n, "polarization": pol, "modes": modes})
    artifacts = {"disk_modes": "disk_modes.json"}
    bw = cfg.get("boundary_wave")
    if bw:
        config.expect_keys(bw, ["m", "radial_order", "samples"], ["m"],
                           "boundary_wave")
        res = diskwave.find_wg_resonance(int(bw["m"]), n, pol,
                                         radial_order=int(bw.get("radial_order", 1)))
        n_samples = bw.get("samples") or max(
            512, diskwave.nyquist_min_samples(n, res.kR0))
        data = diskwave.disk_boundary_wave(res, int(n_samples))
        rows = [(float(s), float(p.real), float(p.imag), float(d.real), float(d.imag))
                for s, p, d in zip(data.s, data.psi, data.dpsi)]
        runio.write_csv(outputs.path("boundary_wave.csv"), "boundary_wave", rows)
        runio.write_json(outputs.path("boundary_wave.json"), "husimi_header",
                         {"k_re": data.k.real, "k_im": data.k.imag,
                          "n": data.n, "perimeter": data.perimeter,
                          "m": res.m, "radial_order": res.radial_order})
        artifacts["boundary_wave"] = "boundary_wave.csv"
        artifacts["boundary_wave_header"] = "boundary_wave.json"
    return {"n": n, "polarization": pol, "n_modes": len(modes)}, artifacts


def run_husimi(cfg, seed, outputs, threads):
    config.expect_keys(
        cfg, ["input_csv", "input_header", "side", "sigma", "s_cells",
              "sinchi_cells", "seed"],
        ["input_csv", "input_header"])
    import json as _json
    with open(cfg["input_header"]) as fh:
        header = _json.load(fh)
    if header.get("schema") != runio.SCHEMAS["husimi_header"][0]:
        raise ConfigError(
            f"unexpected header schema {header.get('schema')!r}", "input_header")
    _, cols, rows = runio.read_csv(cfg["input_csv"], "boundary_wave")
    arr = np.asarray(rows)
    data = diskwave.BoundaryWaveData(
        s=arr[:, 0], psi=arr[:, 1] + 1j * arr[:, 2], dpsi=arr[:, 3] + 1j * arr[:, 4],
        k=complex(header["k_re"], header["k_im"]), n=float(header["n"]),
        perimeter=float(header["perimeter"]))
    sides = {"inside": ("inside",), "outside": ("outside",),
             "both": ("inside", "outside")}[cfg.get("side", "both")]
    n_s = config.positive_int(cfg, "s_cells", default=256)
    n_chi = config.positive_int(cfg, "sinchi_cells", default=256)
    artifacts = {}
    diag_all = {}
    for side in sides:
        pair = husimi.husimi_four(data, side=side, sigma=cfg.get("sigma"),
                                  n_s=n_s, n_sinchi=n_chi)
        for grid in pair:
            rows_out = []
            sc = grid.s_centers
            cc = grid.sinchi_centers
            for i in range(n_s):
                for j in range(n_chi):
                    rows_out.append((float(sc[i]), float(cc[j]),
                                     float(grid.values[i, j])))
            name = f"husimi_{grid.sheet}.csv"
            runio.write_csv(outputs.path(name), "husimi_grid", rows_out)
            artifacts[grid.sheet] = name
        diag_all[side] = husimi.husimi_diagnostics(pair)
    runio.write_json(outputs.path("husimi_diagnostics.json"), "summary",
                     {"diagnostics": diag_all, "sigma": pair[0].sigma})
    artifacts["diagnostics"] = "husimi_diagnostics.json"
    return {"sides": list(sides), "s_cells": n_s, "sinchi_cells": n_chi,
            "sigma": pair[0].sigma}, artifacts


def run_beam_shifts(cfg, seed, outputs, threads):
    config.expect_keys(
        cfg, ["n", "polarization", "waist_lambda", "chi0", "chi0_range", "seed"],
        ["n", "polarization", "waist_lambda"])
    n = float(cfg["n"])
    pol = cfg["polarization"]
    lam = 1.0
    k = 2.0 * math.pi / lam
    waist = float(cfg["waist_lambda"]) * lam
    if "chi0" in cfg and "chi0_range" in cfg:
        raise ConfigError("give either chi0 or chi0_range, not both", "chi0")
    if "chi0" in cfg:
        chis = [float(cfg["chi0"])]
    elif "chi0_range" in cfg:
        lo, hi, count = cfg["chi0_range"]
        chis = list(np.linspace(float(lo), float(hi), int(count)))
    else:
        raise ConfigError("missing chi0 or chi0_range", "chi0")
    rows = []
    for chi0 in chis:
        spec = beams.BeamSpec(chi0=chi0, waist=waist, k=k, n=n, polarization=pol)
        r = beams.beam_reflection_shifts(spec)
        rows.append((chi0, r.z_gh_over_lambda, r.delta_chi))
    runio.write_csv(outputs.path("beam_shifts.csv"), "beam_shifts", rows)
    last_audit = {"energy_in": r.energy_in, "energy_reflected": r.energy_reflected,
                  "energy_transmitted": r.energy_transmitted,
                  "energy_error": r.energy_error,
                  "truncation_warning": r.truncation_warning}
    return {"n": n, "polarization": pol, "waist_lambda": cfg["waist_lambda"],
            "critical_chi": math.asin(1.0 / n), "n_angles": len(chis),
            "last_point_audit": last_audit}, {"beam_shifts": "beam_shifts.csv"}


RUNNERS = {
    "psos": run_psos,
    "psos-aniso": run_psos_aniso,
    "steady": run_steady,
    "farfield": run_farfield,
    "disk-modes": run_disk_modes,
    "husimi": run_husimi,
    "beam-shifts": run_beam_shifts,
    "lyapunov": run_lyapunov,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="cavphase",
        description="Phase-space toolkit for 2D billiard and microcavity dynamics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (overrides the config's seed)")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    t0 = time.monotonic()
    try:
        cfg = config.load_config(args.config)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        outputs = runio.OutputSet(args.out_dir)
        try:
            meta, artifacts = RUNNERS[args.subcommand](cfg, seed, outputs,
                                                       max(1, args.threads))
            summary = {
                "subcommand": args.subcommand,
                "seed": seed,
                "backend": backend.BACKEND,
                "versions": {"cavphase": __version__,
                             "numpy": np.__version__},
                "resolved": meta,
                "artifacts": artifacts,
            }
            runio.write_json(outputs.path("summary.json"), "summary", summary)
        except Exception:
            outputs.discard_all()
            raise
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CavphaseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"{args.subcommand}: wrote {len(outputs.paths)} files to "
          f"{args.out_dir} in {time.monotonic() - t0:.2f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
