"""Strictly f-degenerate transversals and DP-colourings of minor-free graphs."""

__version__ = "0.1.0"
