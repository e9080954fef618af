"""Exact homology of coloured posets, poset bundles, and link diagrams."""

__version__ = "0.1.0"
