"""Synthetic instances with known answers, shared across test modules."""

from __future__ import annotations

import numpy as np

from georeg import poly as P
from georeg.roots import expand


def unit_noise(rng, shape, size):
    """Gaussian direction scaled to 2-norm (Frobenius) ``size``."""
    e = rng.standard_normal(shape)
    return size * e / np.linalg.norm(e)


def well_separated(rng, k, radius=1.5, min_sep=0.6):
    """k complex points in a disc with pairwise distance at least ``min_sep``."""
    pts = []
    while len(pts) < k:
        z = complex(*rng.uniform(-radius, radius, 2))
        if abs(z) <= radius and all(abs(z - w) >= min_sep for w in pts):
            pts.append(z)
    return np.array(pts)


def gcd_instance(seed):
    """(u, v, w) with u monic of degree 1..4 and coprime random cofactors."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 5))
    m, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    # roots of u, v, w drawn jointly separated so the cofactors are coprime
    z = well_separated(rng, k + m + n, radius=1.2, min_sep=0.3)
    u = expand(1.0, z[:k], [1] * k)
    v = expand(complex(rng.uniform(0.5, 2)), z[k:k + m], [1] * m)
    w = expand(complex(rng.uniform(0.5, 2)), z[k + m:], [1] * n)
    return u, v, w


def kernel_instance(seed, m=8, n=6, r=4):
    """Rank-r matrix with singular values in [1, 3] and its exact kernel."""
    rng = np.random.default_rng(seed)
    U, _ = np.linalg.qr(rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    s = rng.uniform(1, 3, r)
    A = (U * s) @ V[:, :r].conj().T
    return A, V[:, r:]


def roots_instance(seed):
    """Polynomial with 1..3 well separated roots of multiplicities 1..3 (not all simple)."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    z = well_separated(rng, k, radius=1.0, min_sep=0.8)
    mult = [int(x) for x in rng.integers(1, 4, k)]
    if max(mult) == 1:
        mult[0] = 2
    return z, mult, expand(1.0, z, mult)


def perturb_poly(p: P.Polynomial, rng, size) -> P.Polynomial:
    """p plus a real perturbation of relative norm ``size``."""
    return P.Polynomial(p.coeffs + unit_noise(rng, p.coeffs.shape, size * p.norm()))


def jordan_instance(seed, groups=((3,), (2,)), eigenvalues=(0.5, -1.0), scale=0.3):
    """A = S J S^{-1} with S a mild perturbation of a random unitary."""
    from georeg.jcf import SegreStructure, jordan_matrix

    rng = np.random.default_rng(seed)
    st = SegreStructure(groups)
    J = jordan_matrix(st, eigenvalues)
    n = st.n
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    S = Q @ (np.eye(n) + scale * np.triu(rng.standard_normal((n, n)), 1))
    return S @ J @ np.linalg.inv(S), st
