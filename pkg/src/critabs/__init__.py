"""Radial p-Laplacian evolution with critical gradient absorption."""

__version__ = "0.1.0"
