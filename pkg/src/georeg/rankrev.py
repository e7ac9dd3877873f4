"""Numerical rank and kernel.

Stage I fixes the rank r by an SVD threshold.  Stage II solves
``(C^H X - I, A X) = 0`` for a kernel basis X in the least-squares sense; C is
the orthonormal basis of the discarded right singular vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .gn import GnConfig, GnResult, LeastSquaresModel, gauss_newton, sensitivity
from .numlin import rank_decision, svd

__all__ = ["KernelResult", "kernel_model", "kernel_refine", "numerical_kernel", "principal_angles"]


@dataclass
class KernelResult:
    rank: int
    kernel_basis: np.ndarray
    normalizer: np.ndarray
    backward_error: float
    shape: tuple[int, int]
    gap_ratio: float = np.inf
    trace: GnResult | None = None
    condition: float = 0.0
    diagnostics: list[str] = field(default_factory=list)

    @property
    def nullity(self) -> int:
        return self.kernel_basis.shape[1]

    @property
    def codimension(self) -> int:
        m, n = self.shape
        return (m - self.rank) * (n - self.rank)

    @property
    def marginal(self) -> bool:
        return self.gap_ratio < 100

    @property
    def sigma_min_X(self) -> float:
        if self.nullity == 0:
            return np.inf
        return float(sla.svdvals(self.kernel_basis)[-1])


def kernel_model(A: np.ndarray, C: np.ndarray) -> LeastSquaresModel:
    """Model ``X -> (C^H X - I, A X)``; X is vectorized column-major."""
    A = np.asarray(A, dtype=complex)
    C = np.asarray(C, dtype=complex)
    m, n = A.shape
    k = C.shape[1]
    # vec(C^H X) = (I_k kron C^H) vec X, vec(A X) = (I_k kron A) vec X
    J = np.vstack([np.kron(np.eye(k), C.conj().T), np.kron(np.eye(k), A)])
    target = np.concatenate([np.eye(k).ravel(order="F"), np.zeros(m * k)])

    def residual(x):
        return J @ x - target

    def data_jacobian(x):
        # dA -> (0, dA X): spectral norm |X|_2
        X = x.reshape((n, k), order="F")
        return float(sla.svdvals(X)[0])

    return LeastSquaresModel(residual, lambda x: J, n * k, k * k + m * k,
                             data_jacobian=data_jacobian, name=f"kernel(k={k})")


def kernel_refine(A, C, X0=None, cfg: GnConfig | None = None) -> tuple[np.ndarray, GnResult, float]:
    """Solve the kernel model for fixed normalizer C; returns (X, trace, lipschitz)."""
    A = np.asarray(A, dtype=complex)
    C = np.asarray(C, dtype=complex)
    n, k = C.shape
    X0 = C if X0 is None else np.asarray(X0, dtype=complex)
    model = kernel_model(A, C)
    res = gauss_newton(model, X0.ravel(order="F"), cfg)
    cond, _ = sensitivity(model, res.solution)
    return res.solution.reshape((n, k), order="F"), res, cond


def numerical_kernel(A, tol: float, cfg: GnConfig | None = None) -> KernelResult:
    """Rank within relative tolerance ``tol`` and a refined kernel basis."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise ValueError("expected a nonempty matrix")
    m, n = A.shape
    dec = rank_decision(A, tol, "relative")
    r = dec.rank
    diags = [f"marginal rank gap {dec.gap_ratio:.3g}"] if dec.marginal else []
    s = dec.singular_values
    normA = float(np.linalg.norm(s))
    be = float(np.linalg.norm(s[r:]) / normA) if normA > 0 else 0.0
    if r == n:
        empty = np.zeros((n, 0), dtype=complex)
        return KernelResult(r, empty, empty, be, (m, n), dec.gap_ratio, diagnostics=diags)
    N0 = svd(A).right_vectors[:, r:]
    X, res, cond = kernel_refine(A, N0, cfg=cfg)
    return KernelResult(r, X, N0, be, (m, n), dec.gap_ratio, res, cond, diags)


def principal_angles(X, Y) -> np.ndarray:
    """Principal angles (radians) between the column spans of X and Y."""
    return sla.subspace_angles(np.asarray(X, dtype=complex), np.asarray(Y, dtype=complex))
