"""Boogie to WhyML translation."""

__version__ = "0.1.0"
