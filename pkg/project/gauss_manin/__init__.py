"""Gauss-Manin connections of the two elliptic families and their modular foliations."""

__all__ = []
