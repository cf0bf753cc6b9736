"""Exact rational-function algebra, differential forms and the polynomial grammar."""

__all__ = []
