"""Exact workbench for I-degenerate pseudo-Riemannian metrics."""

__version__ = "0.1.0"
