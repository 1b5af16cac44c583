"""Streamline-based edge search and roadmap planning in steady 2D flows."""

__version__ = "0.1.0"
