"""Numerical laboratory for mod-phi convergence and local limit theorems."""

__version__ = "0.1.0"
