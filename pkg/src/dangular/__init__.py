"""Exact enumeration, asymptotics and sampling of Delta-angular maps on surfaces with boundary."""

__version__ = "0.1.0"
