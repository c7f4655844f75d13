"""Obstacle-surface sampling for probabilistic roadmaps and its integral-geometry model."""

__version__ = "0.1.0"
