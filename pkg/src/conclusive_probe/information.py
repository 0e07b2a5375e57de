"""Overlap of the correlated probe states and the probe's Renyi information."""
from __future__ import annotations

import math

from .probe_model import ErrorRate, alpha_minus, alpha_plus

__all__ = ["overlap_from_vectors", "overlap_closed_form", "renyi_information", "renyi_from_error"]


def overlap_from_vectors(E: float) -> float:
    """Normalized inner product of the two correlated probe states.

    Computed from the explicit vectors, so the sign factor of the probe
    parameters actually takes part in the arithmetic.
    """
    plus, minus = alpha_plus(E), alpha_minus(E)
    q = plus.dot(minus) / (plus.norm() * minus.norm())
    # identical vectors at E = 0 can round to 1 + ulp
    return min(1.0, max(0.0, q))


def overlap_closed_form(E: float) -> float:
    E = ErrorRate(E)
    return (1.0 - 3.0 * E) / (1.0 - E)


def renyi_information(Q: float) -> float:
    """Order-2 information in bits, ``log2(2 - Q**2)``, for an overlap Q in [0, 1]."""
    Q = float(Q)
    if not (0.0 <= Q <= 1.0):
        raise ValueError(f"overlap must lie in [0, 1], got {Q!r}")
    return math.log2(2.0 - Q * Q)


def renyi_from_error(E: float) -> float:
    return renyi_information(overlap_closed_form(E))
