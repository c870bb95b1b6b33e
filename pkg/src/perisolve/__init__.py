"""Spectral solvability analysis for periodic evolution operators D_t + c(t)P."""

__version__ = "0.1.0"
