"""Verification toolkit for an explicit central value formula for L(f x Ad g, k)."""

__version__ = "0.1.0"
