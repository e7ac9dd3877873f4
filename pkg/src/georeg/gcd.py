"""Approximate GCD of a polynomial pair.

Stage I reads the GCD degree k off the numerical nullity of the Sylvester
matrix.  Stage II solves

    (r.u - beta, u*v - p, u*w - q) = 0

for (u, v, w) in P_k x P_{m-k} x P_{n-k} in the least-squares sense, with r a
fixed random vector and beta = r.u0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import poly as P
from .gn import GaussNewtonError, GnConfig, GnResult, LeastSquaresModel, gauss_newton, sensitivity
from .numlin import lsq_min_norm, rank_decision, svd

__all__ = [
    "GcdStructure",
    "GcdResult",
    "gcd_structure",
    "gcd_initial",
    "gcd_model",
    "gcd_refine",
    "pgcd",
    "random_unit_poly",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GcdStructure:
    k: int
    m: int
    n: int
    gap_ratio: float
    marginal: bool = False

    @property
    def codimension(self) -> int:
        return self.k


@dataclass
class GcdResult:
    u: P.Polynomial
    v: P.Polynomial
    w: P.Polynomial
    backward_error: float
    structure: GcdStructure
    r: P.Polynomial | None = None
    beta: complex = 0.0
    trace: GnResult | None = None
    condition: float = 0.0
    diagnostics: list[str] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.structure.k

    @property
    def u_normalized(self) -> P.Polynomial:
        """u scaled so its largest-magnitude coefficient equals 1."""
        c = self.u.coeffs
        return self.u / c[np.argmax(np.abs(c))]

    def unknowns(self) -> np.ndarray:
        return np.concatenate([self.u.coeffs, self.v.coeffs, self.w.coeffs])


def _degrees(p: P.Polynomial, q: P.Polynomial) -> tuple[int, int]:
    if p.is_zero() or q.is_zero():
        raise ValueError("zero polynomial input")
    return p.exact_degree, q.exact_degree


def backward_error(p, q, u, v, w) -> float:
    """Relative distance from (p, q) to the pair (u*v, u*w)."""
    m, n = p.nominal_degree, q.nominal_degree
    dp = (u * v).with_degree(max(m, (u * v).nominal_degree)) - p
    dq = (u * w).with_degree(max(n, (u * w).nominal_degree)) - q
    num = np.hypot(dp.norm(), dq.norm())
    return float(num / np.hypot(p.norm(), q.norm()))


def gcd_structure(p: P.Polynomial, q: P.Polynomial, tol: float) -> GcdStructure:
    """GCD degree as the Sylvester nullity at relative threshold ``tol*sqrt(m+n)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, n = _degrees(p, q)
    if m < 1 or n < 1:
        return GcdStructure(0, m, n, np.inf)
    S = P.sylvester_matrix(p, q, 1)
    dec = rank_decision(S, tol * np.sqrt(m + n), "relative")
    if dec.marginal:
        log.info("marginal Sylvester rank gap %.3g", dec.gap_ratio)
    return GcdStructure(dec.nullity, m, n, dec.gap_ratio, dec.marginal)


def gcd_initial(p: P.Polynomial, q: P.Polynomial, k: int):
    """Initial (u0, v0, w0) from the k-th subresultant null vector.

    Returns the triple and a flag that is True when sigma_min of the
    subresultant is not isolated (ratio to the next one below 10).
    """
    p, q = p.trimmed(), q.trimmed()
    m, n = p.nominal_degree, q.nominal_degree
    if not 1 <= k <= min(m, n):
        raise ValueError(f"k={k} outside 1..{min(m, n)}")
    S = P.sylvester_matrix(p, q, k)
    res = svd(S)
    s = res.singular_values
    x = res.right_vectors[:, -1]
    flagged = s.size >= 2 and s[-1] > 0 and s[-2] / s[-1] < 10
    if s.size < S.shape[1]:
        flagged = False
    v0 = P.Polynomial(x[: m - k + 1])
    w0 = P.Polynomial(-x[m - k + 1:])
    A = np.vstack([P.convolution_matrix(v0, k), P.convolution_matrix(w0, k)])
    u0 = P.Polynomial(lsq_min_norm(A, np.concatenate([p.coeffs, q.coeffs])))
    return u0, v0, w0, bool(flagged)


def random_unit_poly(degree: int, seed: int) -> P.Polynomial:
    """Real Gaussian direction of unit norm; real r keeps real data real."""
    c = np.random.default_rng(seed).standard_normal(degree + 1)
    return P.Polynomial(c / np.linalg.norm(c))


def gcd_model(p: P.Polynomial, q: P.Polynomial, k: int, r: P.Polynomial, beta: complex) -> LeastSquaresModel:
    """Least-squares model for the GCD triple of degree-k structure.

    Unknown vector is ``[u (k+1), v (m-k+1), w (n-k+1)]``.
    """
    m, n = p.nominal_degree, q.nominal_degree
    ku, kv, kw = k + 1, m - k + 1, n - k + 1
    rc = r.coeffs
    pc, qc = p.coeffs, q.coeffs

    def split(z):
        return z[:ku], z[ku:ku + kv], z[ku + kv:]

    def residual(z):
        u, v, w = split(z)
        return np.concatenate([[np.sum(rc * u) - beta], np.convolve(u, v) - pc, np.convolve(u, w) - qc])

    def jacobian(z):
        u, v, w = split(z)
        J = np.zeros((1 + (m + 1) + (n + 1), ku + kv + kw), dtype=complex)
        J[0, :ku] = rc
        J[1:m + 2, :ku] = P.convolution_matrix(v, k)
        J[1:m + 2, ku:ku + kv] = P.convolution_matrix(u, m - k)
        J[m + 2:, :ku] = P.convolution_matrix(w, k)
        J[m + 2:, ku + kv:] = P.convolution_matrix(u, n - k)
        return J

    # d(residual)/d(p, q) = [0; -I; -I], of unit spectral norm
    return LeastSquaresModel(residual, jacobian, ku + kv + kw, 3 + m + n,
                             data_jacobian=lambda z: 1.0, name=f"gcd(k={k})")


def gcd_refine(
    p: P.Polynomial,
    q: P.Polynomial,
    u0: P.Polynomial,
    v0: P.Polynomial,
    w0: P.Polynomial,
    seed: int = 0,
    *,
    r: P.Polynomial | None = None,
    beta: complex | None = None,
    cfg: GnConfig | None = None,
    structure: GcdStructure | None = None,
) -> GcdResult:
    """Gauss-Newton refinement of an initial GCD triple.

    ``r`` and ``beta`` may be passed to reuse the normalization of an earlier
    solve (needed when comparing solutions across perturbed data).
    """
    p, q = p.trimmed(), q.trimmed()
    m, n = p.nominal_degree, q.nominal_degree
    k = u0.nominal_degree
    if v0.nominal_degree != m - k or w0.nominal_degree != n - k:
        raise ValueError("cofactor degrees inconsistent with the GCD degree")
    if r is None:
        for attempt in range(10):
            r = random_unit_poly(k, seed + 7919 * attempt)
            beta = P.dot(r, u0)
            if abs(beta) > 1e-8 * max(u0.norm(), 1e-300):
                break
        else:
            raise GaussNewtonError("could not draw r with r.u0 != 0")
    elif beta is None:
        beta = P.dot(r, u0)
    if beta == 0:
        raise ValueError("beta must be nonzero")
    model = gcd_model(p, q, k, r, beta)
    z0 = np.concatenate([u0.coeffs, v0.coeffs, w0.coeffs])
    res = gauss_newton(model, z0, cfg)
    z = res.solution
    u = P.Polynomial(z[:k + 1])
    v = P.Polynomial(z[k + 1:m + 2])
    w = P.Polynomial(z[m + 2:])
    if structure is None:
        structure = GcdStructure(k, m, n, np.nan)
    cond, _ = sensitivity(model, z)
    return GcdResult(u, v, w, backward_error(p, q, u, v, w), structure, r, complex(beta), res, cond)


def _coprime(p: P.Polynomial, q: P.Polynomial, structure: GcdStructure) -> GcdResult:
    one = P.Polynomial([1.0])
    return GcdResult(one, p.trimmed(), q.trimmed(), 0.0, structure, condition=1.0)


def pgcd(p: P.Polynomial, q: P.Polynomial, tol: float, seed: int = 0, cfg: GnConfig | None = None) -> GcdResult:
    """Regularized GCD within ``tol`` (relative backward error).

    Tries the Stage-I degree first and lowers k until the refined triple has
    backward error at most ``tol``; k = 0 always succeeds.
    """
    st = gcd_structure(p, q, tol)
    diags = []
    if st.marginal:
        diags.append(f"marginal Sylvester gap {st.gap_ratio:.3g}")
    for k in range(min(st.k, st.m, st.n), 0, -1):
        try:
            u0, v0, w0, flagged = gcd_initial(p, q, k)
            if flagged:
                diags.append(f"k={k}: subresultant sigma_min not isolated")
            res = gcd_refine(p, q, u0, v0, w0, seed, cfg=cfg,
                             structure=GcdStructure(k, st.m, st.n, st.gap_ratio, st.marginal))
        except GaussNewtonError as exc:
            diags.append(f"k={k}: {exc}")
            continue
        if res.backward_error <= tol:
            res.diagnostics = diags
            return res
        diags.append(f"k={k}: backward error {res.backward_error:.3e} > tol")
    out = _coprime(p, q, GcdStructure(0, st.m, st.n, st.gap_ratio, st.marginal))
    out.diagnostics = diags
    return out
