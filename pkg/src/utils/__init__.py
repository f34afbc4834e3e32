"""Numerical and I/O helpers."""
