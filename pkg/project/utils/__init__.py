"""Utility helpers (logging, CLI argument types)."""

__all__ = []
