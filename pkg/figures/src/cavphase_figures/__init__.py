"""Plotting layer for cavphase outputs."""

__version__ = "0.1.0"
