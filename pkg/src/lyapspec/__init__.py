"""Lyapunov spectrum analysis for piecewise linear expanding maps."""

__version__ = "0.1.0"
