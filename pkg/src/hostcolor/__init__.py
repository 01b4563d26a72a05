"""Planted k-coloring on host graphs."""

__version__ = "0.1.0"
