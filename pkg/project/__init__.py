"""Elliptic modular foliations: exact Gauss-Manin algebra and a numeric period lab."""

__all__ = []
