"""Invariants, decoupling functions and conformal gluing for small-step quadrant walks."""

__version__ = "0.1.0"
