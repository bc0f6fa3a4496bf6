"""Limiting mixed Hodge structures of one-parameter Calabi-Yau degenerations, checked numerically."""

__version__ = "0.1.0"
