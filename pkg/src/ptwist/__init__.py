"""Exact-arithmetic workbench for P-objects, spherical objects and their twists."""

from __future__ import annotations

__version__ = "0.1.0"
