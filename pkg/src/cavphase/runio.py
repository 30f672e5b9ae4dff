"""Deterministic output serialization: schema-versioned CSV and JSON.

Floats are written with repr (shortest round-trip), so a rerun with the same
config, seed and build produces byte-identical files.  Files are written to
a temporary path and atomically renamed; on failure the partial outputs of
the run are removed.
"""

from __future__ import annotations

import json
import os

SCHEMAS = {
    "psos": ("cavphase.psos.v1", ["traj_id", "bounce", "s_norm", "p", "weight"]),
    "xy": ("cavphase.xy.v1", ["traj_id", "bounce", "x", "y"]),
    "steady": ("cavphase.steady.v1", ["s_bin", "p_bin", "mass"]),
    "farfield": ("cavphase.farfield.v1", ["theta_bin", "intensity"]),
    "beam_shifts": ("cavphase.beam_shifts.v1",
                    ["chi0", "zGH_over_lambda", "delta_chi"]),
    "lyapunov": ("cavphase.lyapunov.v1",
                 ["launch_id", "lambda_per_bounce", "stderr",
                  "mean_free_path", "n_skipped"]),
    "boundary_wave": ("cavphase.boundary_wave.v1",
                      ["s", "Re_psi", "Im_psi", "Re_dpsi", "Im_dpsi"]),
    "husimi_grid": ("cavphase.husimi_grid.v1", ["s_norm", "sin_chi", "value"]),
    "disk_modes": ("cavphase.disk_modes.v1", None),     # JSON list
    "summary": ("cavphase.summary.v1", None),
    "husimi_header": ("cavphase.husimi_header.v1", None),
}


def _fmt(value):
    if isinstance(value, float):
        return repr(float(value))    # builtin float: shortest repr, no numpy wrapper
    return str(value)


def write_csv(path, kind, rows):
    """Rows of scalars under the named schema; see SCHEMAS for columns."""
    schema, columns = SCHEMAS[kind]
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(f"# schema: {schema}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    os.replace(tmp, path)


def write_json(path, kind, payload):
    schema, _ = SCHEMAS[kind]
    doc = {"schema": schema}
    doc.update(payload)
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def read_csv(path, kind=None):
    """Parse a schema-versioned CSV; returns (schema, columns, rows)."""
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema: "):
            raise ValueError(f"{path}: missing schema header line")
        schema = first[len("# schema: "):]
        if kind is not None and schema != SCHEMAS[kind][0]:
            raise ValueError(
                f"{path}: schema {schema!r}, expected {SCHEMAS[kind][0]!r}")
        columns = fh.readline().strip().split(",")
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split(",")])
    return schema, columns, rows


class OutputSet:
    """Tracks files written by one run so failures can clean up."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.paths = []
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name):
        p = os.path.join(self.out_dir, name)
        self.paths.append(p)
        return p

    def discard_all(self):
        for p in self.paths:
            try:
                os.remove(p)
            except FileNotFoundError:
                pass
