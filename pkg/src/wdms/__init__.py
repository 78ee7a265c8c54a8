"""Weighted decorated marked surfaces: angulations, flips, S-graphs and hearts."""

__version__ = "0.1.0"
