"""Sparse one-time sensing encryption with its security calculus and attacks."""
__version__ = "0.1.0"
