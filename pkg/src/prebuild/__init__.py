"""Reduction of flat sector complexes with scaffoldings to their core."""

__version__ = "0.1.0"
