"""Elimination of low-type Spector bar recursion from System T terms."""

__version__ = "0.1.0"
