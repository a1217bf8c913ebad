"""Kloosterman sums, Kloosterman-Salem numbers and hyperbola graphs over finite rings."""

__version__ = "0.1.0"
