"""Cellular sheaf Laplacians on hypergraphs via their induced symmetric simplicial sets."""

__version__ = "0.1.0"
