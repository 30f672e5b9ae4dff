"""cavphase: phase-space toolkit for 2D billiard and microcavity dynamics."""

__version__ = "0.1.0"

from .backend import BACKEND  # noqa: F401
