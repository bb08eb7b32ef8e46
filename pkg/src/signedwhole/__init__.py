"""Whole-graph representation learning for signed graphs."""

__version__ = "0.1.0"

from .graph import GraphCollection, Sign, SignedGraph  # noqa: E402

__all__ = ["GraphCollection", "Sign", "SignedGraph", "__version__"]
