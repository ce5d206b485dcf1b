"""Adaptive variational simulation of driven high-spin chains and their 2D coherent spectra."""

__version__ = "0.1.0"
