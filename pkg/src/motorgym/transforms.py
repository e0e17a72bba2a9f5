"""Coordinate transforms between the three-phase (a, b, c) domain, the
stationary (alpha, beta) frame and the rotor-fixed (d, q) frame.

All transforms are amplitude-invariant: a balanced three-phase set of
amplitude ``X`` maps to an (alpha, beta) vector of norm ``X``.  The zero
component is reported by :func:`clarke_forward` but carries no information
for a symmetric star-connected machine without neutral conductor; the
inverse transform consequently drops it.
"""

from __future__ import annotations

import math

import numpy as np

_SQRT3 = math.sqrt(3.0)
_SQRT2_3 = math.sqrt(2.0) / 3.0


def clarke_forward(x_abc) -> np.ndarray:
    """Map phase quantities (x_a, x_b, x_c) to (x_alpha, x_beta, x_0).

    The zero component vanishes for balanced inputs (x_a + x_b + x_c = 0)
    and is ``sqrt(2)/3`` times the phase sum otherwise.
    """
    x_a, x_b, x_c = (float(v) for v in x_abc)
    alpha = (2.0 * x_a - x_b - x_c) / 3.0
    beta = (x_b - x_c) / _SQRT3
    zero = _SQRT2_3 * (x_a + x_b + x_c)
    return np.array((alpha, beta, zero))


def clarke_inverse(x_alphabeta) -> np.ndarray:
    """Map (x_alpha, x_beta) back to phase quantities, assuming zero
    zero-sequence component."""
    alpha, beta = (float(v) for v in x_alphabeta)
    half_beta = 0.5 * _SQRT3 * beta
    return np.array((alpha, -0.5 * alpha + half_beta, -0.5 * alpha - half_beta))


def park_forward(x_alphabeta, epsilon: float) -> np.ndarray:
    """Rotate stationary-frame quantities into the rotor-fixed frame at the
    electrical angle ``epsilon``."""
    alpha, beta = (float(v) for v in x_alphabeta)
    c, s = math.cos(epsilon), math.sin(epsilon)
    return np.array((c * alpha + s * beta, -s * alpha + c * beta))


def park_inverse(x_dq, epsilon: float) -> np.ndarray:
    """Rotate rotor-fixed quantities back into the stationary frame."""
    d, q = (float(v) for v in x_dq)
    c, s = math.cos(epsilon), math.sin(epsilon)
    return np.array((c * d - s * q, s * d + c * q))


def abc_to_dq(x_abc, epsilon: float) -> np.ndarray:
    """Full forward chain: phase domain -> rotor-fixed frame."""
    return park_forward(clarke_forward(x_abc)[:2], epsilon)


def dq_to_abc(x_dq, epsilon: float) -> np.ndarray:
    """Full inverse chain: rotor-fixed frame -> phase domain."""
    return clarke_inverse(park_inverse(x_dq, epsilon))
