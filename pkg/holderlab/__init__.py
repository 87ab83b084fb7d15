"""Hölder thickness lab: conductivity schemes, level sets, bounds and witnesses."""

__version__ = "0.1.0"
