"""Reference data used by the scripts, tests and acceptance suite."""

from __future__ import annotations

import numpy as np

from . import poly as P

__all__ = [
    "GCD_P",
    "GCD_Q",
    "gcd_pair",
    "godunov",
    "nested_radical_matrix",
    "nested_radicals",
]

# noisy pair whose numerical GCD is a multiple of 1 + x^10
GCD_P = "1-.333*x+0.667*x^3+x^10-0.333*x^11+0.666*x^13"
GCD_Q = "-1.429-3.571*x-1.429*x^10-3.571*x^11"

_GODUNOV = [
    [289, 2064, 336, 128, 80, 32, 16],
    [1152, 30, 1312, 512, 288, 128, 32],
    [-29, -2000, 756, 384, 1008, 224, 48],
    [512, 128, 640, 0, 640, 512, 128],
    [1053, 2256, -504, -384, -756, 800, 208],
    [-287, -16, 1712, -128, 1968, -30, 2032],
    [-2176, -287, -1565, -512, -541, -1152, -289],
]

# integer entries, to be divided by 100000
_RADICAL = [
    [214636, 149815, -231707, -81521, -100000, -50185],
    [269034, 233854, 738068, 369034, 31336, 169034],
    [-75161, -43824, 8509, -75161, -68664, -112488],
    [-61796, -255806, 251061, 234361, 268664, 112858],
    [119219, -143454, 538438, 219219, 358830, 119219],
    [5757, 237093, -219823, -94243, -62673, 270577],
]


def gcd_pair() -> tuple[P.Polynomial, P.Polynomial]:
    return P.parse(GCD_P), P.parse(GCD_Q)


def godunov() -> np.ndarray:
    """7x7 integer matrix with eigenvalues 0, +-1, +-2, +-4 of condition ~1e12."""
    return np.array(_GODUNOV, dtype=float)


def nested_radical_matrix() -> np.ndarray:
    """6x6 matrix rounded near J3(r) + J2(s) + J1(t)."""
    return np.array(_RADICAL, dtype=float) / 100000


def nested_radicals() -> np.ndarray:
    """sqrt(k + sqrt(k + sqrt(k))) for k = 2, 3, 5."""
    k = np.array([2.0, 3.0, 5.0])
    return np.sqrt(k + np.sqrt(k + np.sqrt(k)))
