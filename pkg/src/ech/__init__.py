"""Embedded contact homology toolkit for toric domains.

Capacity sequences, embedding obstructions, Conley-Zehnder partition
combinatorics and the combinatorial chain complex of the three-torus.
"""

from __future__ import annotations

from .numkit import ECHError, NonGenericError, Theta, parse_rational, parse_theta, weight_sequence

__version__ = "0.1.0"

__all__ = [
    "ECHError",
    "NonGenericError",
    "Theta",
    "parse_rational",
    "parse_theta",
    "weight_sequence",
]
