"""Borel equivariant Adams E2-terms from classical Ext of stunted projective modules."""

__version__ = "0.1.0"
