"""Dense complex linear algebra used throughout the package.

Thin, deterministic wrappers over LAPACK (via numpy/scipy): SVD with a fixed
sign convention, numerical rank with gap diagnostics, minimum-norm least
squares, and the matrix text format used by the command line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

__all__ = [
    "SvdResult",
    "RankDecision",
    "svd",
    "numerical_rank",
    "rank_decision",
    "lsq_min_norm",
    "pinv",
    "smallest_singular_pair",
    "spectral_norm",
    "parse_matrix",
    "format_matrix",
    "read_matrix",
    "MARGINAL_GAP",
]

# rank decisions with sigma_r / sigma_{r+1} below this are flagged marginal
MARGINAL_GAP = 100.0


@dataclass(frozen=True)
class SvdResult:
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray  # columns are right singular vectors (V, not V^H)

    def reconstruct(self) -> np.ndarray:
        k = self.singular_values.size
        return (self.left_vectors[:, :k] * self.singular_values) @ self.right_vectors[:, :k].conj().T


@dataclass(frozen=True)
class RankDecision:
    rank: int
    nullity: int
    threshold: float
    gap_ratio: float
    singular_values: np.ndarray

    @property
    def marginal(self) -> bool:
        return self.gap_ratio < MARGINAL_GAP


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.size == 0:
        raise ValueError("expected a nonempty 2-D matrix")
    return A


def svd(A) -> SvdResult:
    """Full SVD; each right vector's largest-magnitude entry is made real positive."""
    A = _as_matrix(A)
    try:
        U, s, Vh = sla.svd(A, full_matrices=True, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        U, s, Vh = sla.svd(A, full_matrices=True, lapack_driver="gesvd")
    V = Vh.conj().T
    k = s.size
    idx = np.argmax(np.abs(V[:, :k]), axis=0)
    piv = V[idx, np.arange(k)]
    phase = np.where(piv != 0, piv / np.abs(np.where(piv != 0, piv, 1)), 1.0)
    V[:, :k] = V[:, :k] / phase
    U[:, :k] = U[:, :k] / phase
    return SvdResult(s, U, V)


def singular_values(A) -> np.ndarray:
    return sla.svdvals(_as_matrix(A))


def rank_decision(A, tol: float, mode: str = "relative") -> RankDecision:
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = _as_matrix(A)
    s = singular_values(A)
    if mode == "relative":
        theta = tol * (s[0] if s.size else 0.0)
    elif mode == "absolute":
        theta = tol
    else:
        raise ValueError(f"unknown rank mode {mode!r}")
    r = int(np.count_nonzero(s > theta))
    # gap between the last kept and first discarded singular value
    full = np.concatenate([s, np.zeros(max(0, A.shape[1] - s.size))])
    if r == 0 or r >= full.size:
        gap = np.inf
    else:
        gap = np.inf if full[r] == 0 else full[r - 1] / full[r]
    return RankDecision(r, A.shape[1] - r, theta, float(gap), s)


def numerical_rank(A, tol: float, mode: str = "relative") -> int:
    """Number of singular values above ``tol`` (absolute) or ``tol*sigma_1``."""
    return rank_decision(A, tol, mode).rank


def lsq_min_norm(A, b) -> np.ndarray:
    """Minimum-norm least-squares solution ``A^+ b``.

    QR with column pivoting when A is safely of full column rank (R diagonal
    well above roundoff), SVD with cutoff ``max(m, n) * eps`` otherwise.
    """
    A = _as_matrix(A)
    b = np.asarray(b, dtype=complex)
    m, n = A.shape
    if b.shape[0] != m:
        raise ValueError("dimension mismatch between A and b")
    if m >= n:
        Q, R, perm = sla.qr(A, mode="economic", pivoting=True)
        d = np.abs(np.diag(R))
        # pivoted-R diagonals only bound singular values loosely: keep a margin
        if d.size and d[-1] > 1e3 * max(m, n) * np.finfo(float).eps * d[0]:
            y = sla.solve_triangular(R, Q.conj().T @ b)
            x = np.empty_like(y)
            x[perm] = y
            return x
    x, *_ = sla.lstsq(A, b, cond=max(m, n) * np.finfo(float).eps, lapack_driver="gelsd")
    return x


def pinv(A) -> np.ndarray:
    return sla.pinv(_as_matrix(A))


def smallest_singular_pair(A) -> tuple[float, np.ndarray]:
    """Smallest singular value over the column space and its right vector."""
    res = svd(A)
    n = _as_matrix(A).shape[1]
    if res.singular_values.size < n:
        return 0.0, res.right_vectors[:, -1]
    return float(res.singular_values[-1]), res.right_vectors[:, n - 1]


def spectral_norm(A) -> float:
    return float(singular_values(A)[0])


# --------------------------------------------------------------------------
# matrix text format: one row per line, entries separated by whitespace,
# complex entries written a+bi / a-bi.

def _parse_entry(tok: str) -> complex:
    t = tok.strip()
    if t.endswith("i") or t.endswith("j"):
        t = t[:-1] + "j"
        if t in ("j", "+j", "-j"):
            t = t.replace("j", "1j")
    return complex(t)


def parse_matrix(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([_parse_entry(t) for t in line.split()])
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse matrix entries") from None
    if not rows:
        raise ValueError("empty matrix")
    if len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix rows")
    A = np.array(rows, dtype=complex)
    return A


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return parse_matrix(fh.read())


def _fmt_entry(z: complex) -> str:
    z = complex(z.real + 0.0, z.imag + 0.0)
    if z.imag == 0:
        return f"{z.real:.15g}"
    return f"{z.real:.15g}{'-' if z.imag < 0 else '+'}{abs(z.imag):.15g}i"


def format_matrix(A) -> str:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    return "\n".join(" ".join(_fmt_entry(z) for z in row) for row in A) + "\n"
