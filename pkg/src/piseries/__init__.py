"""Workbench for Ramanujan-type series for powers of pi and related congruences."""

__version__ = "0.1.0"
