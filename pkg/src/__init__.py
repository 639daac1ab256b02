"""Busemann cocycle Poisson transform on regular trees, in exact arithmetic"""

__version__ = "1.0.0"
