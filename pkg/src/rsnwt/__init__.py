"""Intersection matrices, tree packings and Reed-Solomon list-recovery tooling."""

__version__ = "0.1.0"

from . import codes, errors, fields, graphs, hypergraphs, intmat, sieve  # noqa: F401
