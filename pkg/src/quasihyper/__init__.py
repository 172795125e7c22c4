"""Quasirandomness measures, separating constructions and identity checks for k-uniform hypergraphs."""

__version__ = "0.1.0"
