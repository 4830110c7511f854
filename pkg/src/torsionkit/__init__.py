"""Recomputation toolkit for torsion-order existence over small finite fields,
modular-curve cusp and Hecke bookkeeping, gonality bounds, and class-number
certificates.

Subpackages are imported lazily by name; see the README for a module map.
"""

__version__ = "0.1.0"

__all__ = [
    "algebra",
    "curves",
    "cusps",
    "existence",
    "family",
    "gonality",
    "classno",
    "hecke",
    "lmfdb",
    "reports",
    "acceptance",
    "cli",
]
