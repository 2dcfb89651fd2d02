"""Numerics for threshold resolvent expansions of 2D magnetic Pauli and
Dirac operators with radial fields."""

from pauli2d.backend import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"
