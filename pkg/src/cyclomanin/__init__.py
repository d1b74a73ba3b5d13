"""Exact mod-p verification of Manin-symbol, Hecke, and L-value identities."""

__version__ = "0.1.0"
