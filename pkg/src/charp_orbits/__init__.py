"""Orbit arithmetic in characteristic p."""

__version__ = "0.1.0"
