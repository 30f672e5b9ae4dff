"""Schema-checked readers for the primary toolkit's CSV/JSON artifacts.

This package never recomputes physics: it consumes files exactly as written
by the `cavphase` CLI.  Schema identifiers are matched verbatim; a mismatch
raises SchemaError with both versions.
"""

import json

import numpy as np

EXPECTED = {
    "psos": "cavphase.psos.v1",
    "xy": "cavphase.xy.v1",
    "farfield": "cavphase.farfield.v1",
    "husimi_grid": "cavphase.husimi_grid.v1",
    "beam_shifts": "cavphase.beam_shifts.v1",
    "summary": "cavphase.summary.v1",
}


class SchemaError(ValueError):
    pass


def read_csv(path, kind):
    """Parse one schema-versioned CSV into (columns, float ndarray)."""
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema: "):
            raise SchemaError(f"{path}: missing schema header")
        schema = first[len("# schema: "):]
        if schema != EXPECTED[kind]:
            raise SchemaError(
                f"{path}: schema {schema!r}, this reader expects {EXPECTED[kind]!r}")
        columns = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size and data.shape[1] != len(columns):
        raise SchemaError(f"{path}: {data.shape[1]} columns, header lists {len(columns)}")
    return columns, data


def read_summary(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != EXPECTED["summary"]:
        raise SchemaError(
            f"{path}: schema {doc.get('schema')!r}, expected {EXPECTED['summary']!r}")
    return doc


def medium_from_summary(summary):
    """(n, polarization) when the run had an optical medium, else None."""
    resolved = summary.get("resolved", {})
    med = resolved.get("medium")
    if med and "n" in med:
        return float(med["n"]), med.get("polarization", "")
    return None


def shape_from_summary(summary):
    """Boundary shape record {R0, harmonics} when present, else None."""
    resolved = summary.get("resolved", {})
    shape = resolved.get("shape")
    if shape and "R0" in shape:
        return shape
    return None
