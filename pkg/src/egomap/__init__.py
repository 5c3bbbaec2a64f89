"""Ego-perspective map engine: projections, transitions, interest filtering."""

__version__ = "0.1.0"
