"""Service layer."""

__all__ = []
