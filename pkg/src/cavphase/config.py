"""Run-configuration parsing and validation.

Configs are JSON objects; every key is validated and unknown keys are
rejected with their full key path.  ``resolve`` fills the documented
defaults so the echoed config in the output metadata fully reproduces a run.
"""

from __future__ import annotations

import json
import re

from .anisotropic import FermiContour
from .dielectric import OpticalMedium
from .errors import ConfigError, ShapeError
from .geometry import SHAPE_PRESETS, BoundaryShape

_PRESET_RE = re.compile(r"^([a-z]+)\s*(?:\(\s*([-0-9.eE+]*)\s*\))?$")


def parse_shape(spec, path="shape"):
    """Shape from a preset string like 'limacon(0.43)' or an explicit dict."""
    try:
        if isinstance(spec, str):
            match = _PRESET_RE.match(spec.strip())
            if not match:
                raise ConfigError(f"unrecognized shape spec {spec!r}", path)
            name, arg = match.groups()
            if name not in SHAPE_PRESETS:
                raise ConfigError(
                    f"unknown preset {name!r} (choose from {sorted(SHAPE_PRESETS)})", path)
            if name == "circle":
                return SHAPE_PRESETS[name]() if not arg else SHAPE_PRESETS[name](float(arg))
            if not arg:
                raise ConfigError(f"preset {name!r} needs a deformation argument", path)
            return SHAPE_PRESETS[name](float(arg))
        if isinstance(spec, dict):
            allowed = {"R0", "harmonics"}
            unknown = set(spec) - allowed
            if unknown:
                raise ConfigError(f"unknown keys {sorted(unknown)}", path)
            harmonics = spec.get("harmonics", [])
            if not isinstance(harmonics, list):
                raise ConfigError("harmonics must be a list of [m, eps] pairs",
                                  f"{path}.harmonics")
            for i, h in enumerate(harmonics):
                if not (isinstance(h, (list, tuple)) and len(h) == 2):
                    raise ConfigError("expected [m, eps]", f"{path}.harmonics[{i}]")
            return BoundaryShape(R0=spec.get("R0", 1.0), harmonics=harmonics)
    except ShapeError as err:
        raise ConfigError(str(err), f"{path}.harmonics") from err
    raise ConfigError(f"shape must be a preset string or object, got {type(spec).__name__}",
                      path)


def parse_medium(spec, path="medium"):
    if not isinstance(spec, dict):
        raise ConfigError("medium must be an object with n and polarization", path)
    unknown = set(spec) - {"n", "polarization"}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", path)
    if "n" not in spec:
        raise ConfigError("missing refractive index n", path)
    try:
        return OpticalMedium(n=float(spec["n"]),
                             polarization=spec.get("polarization", "TE"))
    except Exception as err:
        raise ConfigError(str(err), path) from err


def parse_contour(spec, path="contour"):
    if not isinstance(spec, dict):
        raise ConfigError("contour must be an object with k0 and harmonics", path)
    unknown = set(spec) - {"k0", "harmonics"}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", path)
    harmonics = spec.get("harmonics", [])
    for i, h in enumerate(harmonics):
        if not (isinstance(h, (list, tuple)) and len(h) in (2, 3)):
            raise ConfigError("expected [m, beta] or [m, beta, delta]",
                              f"{path}.harmonics[{i}]")
    try:
        return FermiContour(k0=spec.get("k0", 1.0), harmonics=harmonics)
    except Exception as err:
        raise ConfigError(str(err), f"{path}.harmonics") from err


def expect_keys(cfg, allowed, required, path=""):
    if not isinstance(cfg, dict):
        raise ConfigError("expected an object", path or "<root>")
    unknown = set(cfg) - set(allowed)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError("unknown key", f"{path + '.' if path else ''}{key}")
    for key in required:
        if key not in cfg:
            raise ConfigError(f"missing required key {key!r}", path or "<root>")


def positive_int(cfg, key, default=None, minimum=1, path=""):
    val = cfg.get(key, default)
    if val is None:
        raise ConfigError(f"missing required key {key!r}", path or "<root>")
    if not isinstance(val, int) or isinstance(val, bool) or val < minimum:
        raise ConfigError(f"{key} must be an integer >= {minimum}, got {val!r}",
                          f"{path + '.' if path else ''}{key}")
    return val


def load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as err:
        raise ConfigError(f"config file not found: {path}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"malformed JSON in {path}: {err}") from err


def shape_to_dict(shape: BoundaryShape):
    return {"R0": shape.R0,
            "harmonics": [[int(m), float(e)] for m, e in zip(shape.ms, shape.eps)]}


def contour_to_dict(contour: FermiContour):
    return {"k0": contour.k0,
            "harmonics": [[int(m), float(b), float(d)] for m, b, d in
                          zip(contour.ms, contour.beta, contour.delta)]}
