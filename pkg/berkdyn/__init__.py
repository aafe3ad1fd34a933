"""Exact potential theory and dynamics on the Berkovich projective line over Q_p."""

__version__ = "1.0.0"
