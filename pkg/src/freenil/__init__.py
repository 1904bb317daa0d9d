"""Spectral analysis of the sub-Laplacian on the free two-step nilpotent group N(3,2)."""

__version__ = "0.1.0"
