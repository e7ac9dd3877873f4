"""Regularized Jordan canonical form.

Structures are Segre characteristics per eigenvalue group.  Stage II fits a
unitary staircase (Schur-Weyr) form

    A X = X T,   T upper triangular with lambda_g * I on the Weyr diagonal
                 blocks of group g and free entries strictly above them,

with X normalized against a fixed near-unitary C on the gauge positions.  The
excess of residual over unknown dimensions is the centralizer dimension
minus the number of groups, i.e. the codimension of the structure, and with
X near-unitary the residual is a Frobenius distance to the bundle.  Jordan
chains are recovered from the fitted T afterwards.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.cluster.hierarchy import fcluster, linkage

from .gn import GaussNewtonError, GnConfig, GnResult, LeastSquaresModel, gauss_newton, sensitivity

__all__ = [
    "SegreStructure",
    "Cluster",
    "JcfResult",
    "BundleModel",
    "conjugate_partition",
    "eigen_cluster",
    "segre_structure",
    "bundle_model",
    "bundle_refine",
    "jordan_matrix",
    "regularized_jcf",
]

log = logging.getLogger(__name__)

# candidates whose backward errors lie within this factor of the best in
# their codimension tier are treated as equally good fits
TIE_FACTOR = 1.5


def conjugate_partition(parts) -> tuple[int, ...]:
    parts = [int(p) for p in parts if p > 0]
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p > j) for j in range(max(parts)))


@dataclass(frozen=True)
class SegreStructure:
    """Jordan block sizes per eigenvalue group (each sorted descending)."""

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(sorted((int(s) for s in g), reverse=True)) for g in self.groups)
        if not groups or any(not g or min(g) < 1 for g in groups):
            raise ValueError("every group needs at least one positive block size")
        object.__setattr__(self, "groups", groups)

    @property
    def n(self) -> int:
        return sum(sum(g) for g in self.groups)

    @property
    def s(self) -> int:
        return len(self.groups)

    @property
    def weyr(self) -> tuple[tuple[int, ...], ...]:
        return tuple(conjugate_partition(g) for g in self.groups)

    @property
    def centralizer_dim(self) -> int:
        return sum((2 * j + 1) * b for g in self.groups for j, b in enumerate(g))

    @property
    def codimension(self) -> int:
        return self.centralizer_dim - self.s

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(sum(g) for g in self.groups)

    def is_simple(self) -> bool:
        return all(g == (1,) for g in self.groups)

    @classmethod
    def simple(cls, n: int) -> SegreStructure:
        return cls(tuple((1,) for _ in range(n)))


@dataclass(frozen=True)
class Cluster:
    center: complex
    size: int


# --------------------------------------------------------------------------
# staircase form


def _pattern(structure: SegreStructure):
    """Group labels, Weyr block index per position, free set F, gauge set Gamma."""
    lab, wb = [], []
    for g, w in enumerate(structure.weyr):
        for k, wk in enumerate(w):
            lab += [g] * wk
            wb += [k] * wk
    lab, wb = np.array(lab), np.array(wb)
    n = lab.size
    free, gauge = [], []
    for r in range(n):
        for c in range(n):
            if lab[r] < lab[c] or (lab[r] == lab[c] and wb[r] < wb[c]):
                free.append((r, c))
                gauge.append((r, c))
            elif lab[r] == lab[c] and wb[r] == wb[c]:
                gauge.append((r, c))
    return lab, wb, free, gauge


def _staircase_basis(A: np.ndarray, eigenvalues, structure: SegreStructure) -> np.ndarray:
    """Unitary X0 whose leading columns span approximate Weyr kernels.

    For each group and each Weyr block w_k, take the w_k smallest right
    singular vectors of (A_k - lambda I) and deflate A_k by the complement.
    """
    n = A.shape[0]
    basis = np.eye(n, dtype=complex)
    Ak = np.asarray(A, dtype=complex)
    cols = []
    for lam, w in zip(eigenvalues, structure.weyr):
        for wk in w:
            _, _, Vh = np.linalg.svd(Ak - lam * np.eye(Ak.shape[0]))
            V = Vh.conj().T
            cols.append(basis @ V[:, -wk:])
            R = V[:, :-wk]
            basis = basis @ R
            Ak = R.conj().T @ Ak @ R
    return np.hstack(cols)


@dataclass(frozen=True)
class BundleModel(LeastSquaresModel):
    structure: SegreStructure | None = None
    z0: np.ndarray | None = None
    C: np.ndarray | None = None
    free: tuple = ()
    labels: np.ndarray | None = None

    def unpack(self, z):
        """Split an unknown vector into (eigenvalues, T, X)."""
        n, s = self.structure.n, self.structure.s
        nf = len(self.free)
        T = np.zeros((n, n), dtype=complex)
        T[np.arange(n), np.arange(n)] = z[:s][self.labels]
        for k, (r, c) in enumerate(self.free):
            T[r, c] = z[s + k]
        return z[:s].copy(), T, z[s + nf:].reshape((n, n), order="F")

    def pack(self, eigenvalues, T, X) -> np.ndarray:
        return np.concatenate([np.asarray(eigenvalues, dtype=complex),
                               [T[r, c] for r, c in self.free],
                               np.asarray(X, dtype=complex).ravel(order="F")])


def bundle_model(A, structure: SegreStructure, eigenvalues, seed: int = 0, *,
                 X0=None, C=None) -> BundleModel:
    """Staircase model for ``structure`` at initial ``eigenvalues``.

    Unknowns: one eigenvalue per group, the free upper entries of T, and
    X (column-major).  Residual: ``(C^H X - I)`` on the gauge positions
    followed by ``vec(A X - X T)``.  ``seed`` perturbs the normalizer C
    (``seed=0`` keeps C = X0) and is used on re-draws.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("A must be square")
    if structure.n != n:
        raise ValueError(f"structure describes {structure.n}x{structure.n}, A is {n}x{n}")
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    if eigenvalues.size != structure.s:
        raise ValueError("one eigenvalue per group required")
    lab, _, free, gauge = _pattern(structure)
    s, nf = structure.s, len(free)
    if X0 is None:
        X0 = _staircase_basis(A, eigenvalues, structure)
    X0 = np.asarray(X0, dtype=complex)
    if C is None:
        C = X0
        if seed:
            rng = np.random.default_rng(seed)
            pert = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            C, _ = np.linalg.qr(X0 + 0.1 * pert / np.sqrt(2 * n))
    C = np.asarray(C, dtype=complex)
    T0 = X0.conj().T @ A @ X0

    gr = np.array([r for r, _ in gauge])
    gc = np.array([c for _, c in gauge])
    E = (gr == gc).astype(complex)
    Nmat = np.zeros((len(gauge), n * n), dtype=complex)
    for k, (r, c) in enumerate(gauge):
        Nmat[k, c * n:(c + 1) * n] = C[:, r].conj()
    kronA = np.kron(np.eye(n), A)
    masks = [(lab == g) for g in range(s)]

    def unpack(z):
        T = np.zeros((n, n), dtype=complex)
        T[np.arange(n), np.arange(n)] = z[:s][lab]
        for k, (r, c) in enumerate(free):
            T[r, c] = z[s + k]
        return T, z[s + nf:].reshape((n, n), order="F")

    def residual(z):
        T, X = unpack(z)
        return np.concatenate([Nmat @ z[s + nf:] - E, (A @ X - X @ T).ravel(order="F")])

    def jacobian(z):
        T, X = unpack(z)
        J = np.zeros((len(gauge) + n * n, s + nf + n * n), dtype=complex)
        top = len(gauge)
        for g in range(s):
            J[top:, g] = -(X * masks[g]).ravel(order="F")
        for k, (r, c) in enumerate(free):
            J[top + c * n: top + (c + 1) * n, s + k] = -X[:, r]
        J[:top, s + nf:] = Nmat
        J[top:, s + nf:] = kronA - np.kron(T.T, np.eye(n))
        return J

    def data_jacobian(z):
        # dA -> (0, dA X): spectral norm |X|_2
        _, X = unpack(z)
        return float(sla.svdvals(X)[0])

    z0 = np.concatenate([eigenvalues, [T0[r, c] for r, c in free], X0.ravel(order="F")])
    model = BundleModel(residual, jacobian, s + nf + n * n, len(gauge) + n * n,
                        data_jacobian=data_jacobian, name=f"bundle{structure.groups}",
                        structure=structure, z0=z0, C=C, free=tuple(free), labels=lab)
    if model.dim_residual - model.dim_unknowns != structure.codimension:
        raise AssertionError("model dimension count disagrees with the structure codimension")
    return model


def bundle_refine(A, structure: SegreStructure, eigenvalues, seed: int = 0,
                  cfg: GnConfig | None = None, *, X0=None, C=None, z0=None):
    """Gauss-Newton on the staircase model; returns (model, GnResult).

    Re-draws the normalizer (up to 3 times) if the initial Jacobian is not
    injective.
    """
    last = None
    for attempt in range(4):
        model = bundle_model(A, structure, eigenvalues, seed + attempt if attempt else seed, X0=X0, C=C)
        start = model.z0 if z0 is None else np.asarray(z0, dtype=complex)
        try:
            return model, gauss_newton(model, start, cfg)
        except GaussNewtonError as exc:
            last = exc
            if C is not None or not str(exc).startswith("Jacobian not injective"):
                raise
            seed = seed + 1000
    raise last


# --------------------------------------------------------------------------
# Stage I


def _weyr_staircase(A: np.ndarray, lam: complex, size: int, threshold: float):
    """Weyr sequence at lam for a cluster of ``size`` eigenvalues.

    Each step counts singular values of the deflated ``A_k - lam I`` at or
    below ``threshold`` (at least 1, at most what is left).  Returns the
    sequence and whether it was monotone.
    """
    Ak = np.asarray(A, dtype=complex)
    weyr = []
    left = size
    while left > 0:
        m = Ak.shape[0]
        _, sv, Vh = np.linalg.svd(Ak - lam * np.eye(m))
        nul = int(np.count_nonzero(sv <= threshold))
        wk = min(max(nul, 1), left)
        if weyr and wk > weyr[-1]:
            return tuple(weyr + [wk]), False
        weyr.append(wk)
        left -= wk
        if left == 0:
            break
        R = Vh.conj().T[:, :-wk]
        Ak = R.conj().T @ Ak @ R
    return tuple(weyr), True


def segre_structure(A, cluster: Cluster, tol: float) -> tuple[int, ...]:
    """Jordan block sizes for one eigenvalue cluster.

    Numerical nullities of the staircase-deflated ``A - lambda I`` at absolute
    threshold ``tol*|A|_F`` give the Weyr characteristic, whose conjugate
    is returned.  A non-monotone sequence falls back to all-1 blocks.
    """
    A = np.asarray(A, dtype=complex)
    weyr, ok = _weyr_staircase(A, cluster.center, cluster.size, tol * np.linalg.norm(A))
    if not ok:
        log.warning("non-monotone Weyr sequence %s at %s; using 1x1 blocks", weyr, cluster.center)
        return (1,) * cluster.size
    return conjugate_partition(weyr)


@dataclass
class _Candidate:
    structure: SegreStructure
    eigenvalues: np.ndarray
    origin: str


def _canonical(structure: SegreStructure, eigenvalues, origin: str) -> _Candidate:
    """Order groups by multiplicity (descending), then real, then imaginary part."""
    lam = np.asarray(eigenvalues, dtype=complex)
    mult = structure.multiplicities
    order = sorted(range(structure.s), key=lambda g: (-mult[g], lam[g].real, lam[g].imag))
    return _Candidate(SegreStructure(tuple(structure.groups[g] for g in order)), lam[order], origin)


def _moment_candidates(A: np.ndarray) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Eigenvalue sets matching tr(A) and tr(A^2) for one or two groups.

    Power sums are well conditioned in the matrix entries even when the
    individual eigenvalues are not.
    """
    n = A.shape[0]
    t1 = np.trace(A)
    t2 = np.trace(A @ A)
    out = [((n,), np.array([t1 / n]))]
    for m1 in range(1, n):
        m2 = n - m1
        # m1*a + m2*b = t1, m1*a^2 + m2*b^2 = t2
        for a in np.roots([m1 * n, -2 * t1 * m1, t1 * t1 - m2 * t2]):
            b = (t1 - m1 * a) / m2
            if abs(a - b) > 1e-8 * (1 + abs(a)):
                out.append(((m1, m2), np.array([a, b])))
    return out


def _candidates(A: np.ndarray, tol: float) -> list[_Candidate]:
    n = A.shape[0]
    theta = tol * np.linalg.norm(A)
    cands = []

    def add(sizes, centers, origin):
        groups, lams = [], []
        for size, lam in zip(sizes, centers):
            weyr, ok = _weyr_staircase(A, lam, size, theta)
            groups.append(conjugate_partition(weyr) if ok else (1,) * size)
            lams.append(lam)
        cands.append(_canonical(SegreStructure(tuple(groups)), lams, origin))
        if any(len(g) > 1 for g in groups):
            cands.append(_canonical(SegreStructure(tuple((m,) for m in sizes)), lams, origin))

    for sizes, lams in _moment_candidates(A):
        add(sizes, lams, "moments")
    ev = np.linalg.eigvals(A)
    if n > 1:
        Z = linkage(np.column_stack([ev.real, ev.imag]), method="single")
        for k in range(1, n):
            lbl = fcluster(Z, k, criterion="maxclust")
            ids = sorted(set(lbl))
            add([int(np.sum(lbl == i)) for i in ids], [ev[lbl == i].mean() for i in ids], "clusters")
    # dedupe by structure and eigenvalues
    uniq: list[_Candidate] = []
    for c in cands:
        if not any(u.structure == c.structure and np.allclose(u.eigenvalues, c.eigenvalues, rtol=1e-10, atol=1e-12)
                   for u in uniq):
            uniq.append(c)
    return sorted(uniq, key=lambda c: -c.structure.codimension)


# --------------------------------------------------------------------------
# Jordan chains from the staircase form


def jordan_matrix(structure: SegreStructure, eigenvalues) -> np.ndarray:
    """Block-diagonal Jordan matrix with unit superdiagonals."""
    blocks = []
    for g, lam in zip(structure.groups, eigenvalues):
        for b in g:
            blocks.append(lam * np.eye(b, dtype=complex) + np.eye(b, k=1))
    return sla.block_diag(*blocks)


def _orth(M: np.ndarray, rank: int) -> np.ndarray:
    if rank == 0 or M.shape[1] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, _, _ = np.linalg.svd(M, full_matrices=False)
    return U[:, :rank]


def _kernel(M: np.ndarray, dim: int) -> np.ndarray:
    if dim == 0:
        return np.zeros((M.shape[1], 0), dtype=complex)
    _, _, Vh = np.linalg.svd(M)
    return Vh.conj().T[:, M.shape[1] - dim:]


def _nilpotent_chains(N: np.ndarray, sizes) -> np.ndarray:
    """Columns forming Jordan chains of the nilpotent N for block ``sizes``."""
    m = N.shape[0]
    sizes = list(sizes)
    powers = [np.eye(m, dtype=complex)]
    for _ in range(max(sizes)):
        powers.append(powers[-1] @ N)
    heads: list[tuple[int, np.ndarray]] = []
    for ell in sorted(set(sizes), reverse=True):
        cnt = sizes.count(ell)
        K = _kernel(powers[ell], sum(min(s, ell) for s in sizes))
        avoid = [_kernel(powers[ell - 1], sum(min(s, ell - 1) for s in sizes))]
        avoid += [(powers[L - ell] @ v)[:, None] for L, v in heads]
        S = np.hstack(avoid)
        S = _orth(S, min(S.shape[1], m))
        P = K - S @ (S.conj().T @ K)
        heads += [(ell, v) for v in _orth(P, cnt).T]
    cols = []
    for L, v in heads:
        cols += [powers[j] @ v for j in range(L - 1, -1, -1)]
    return np.column_stack(cols)


def _jordan_basis(T: np.ndarray, structure: SegreStructure, eigenvalues, labels) -> np.ndarray:
    """Jordan basis V with ``T V = V J`` for upper-triangular staircase T."""
    n = T.shape[0]
    cols = []
    for g in range(structure.s):
        idx = np.flatnonzero(labels == g)
        a = np.arange(idx[0])
        Tgg = T[np.ix_(idx, idx)]
        lift = np.zeros((n, idx.size), dtype=complex)
        lift[idx, :] = np.eye(idx.size)
        if a.size:
            lift[a, :] = sla.solve_sylvester(T[np.ix_(a, a)], -Tgg, -T[np.ix_(a, idx)])
        N = Tgg - eigenvalues[g] * np.eye(idx.size)
        cols.append(lift @ _nilpotent_chains(N, structure.groups[g]))
    return np.hstack(cols)


# --------------------------------------------------------------------------
# pipeline


@dataclass
class JcfResult:
    structure: SegreStructure
    eigenvalues: np.ndarray
    transform: np.ndarray
    J: np.ndarray
    backward_error: float
    condition: float
    sigma_min_X: float
    schur_basis: np.ndarray
    schur_form: np.ndarray
    trace: GnResult | None = None
    diagnostics: list[str] = field(default_factory=list)
    tried: list[tuple] = field(default_factory=list)

    @property
    def codimension(self) -> int:
        return self.structure.codimension

    @property
    def blocks(self) -> list[tuple[complex, tuple[int, ...]]]:
        return [(complex(l), g) for l, g in zip(self.eigenvalues, self.structure.groups)]

    def reconstruct(self) -> np.ndarray:
        Q, T = self.schur_basis, self.schur_form
        return Q @ T @ Q.conj().T


@dataclass
class _Fit:
    cand: _Candidate
    eigenvalues: np.ndarray
    Q: np.ndarray
    T: np.ndarray
    backward_error: float
    trace: GnResult | None
    labels: np.ndarray


def _fit(A: np.ndarray, cand: _Candidate, seed: int, cfg: GnConfig | None) -> _Fit:
    model, res = bundle_refine(A, cand.structure, cand.eigenvalues, seed, cfg)
    lam, T, X = model.unpack(res.solution)
    # re-gauge to a unitary basis: X T X^{-1} = Q (R T R^{-1}) Q^H
    Q, R = np.linalg.qr(X)
    T2 = R @ T @ np.linalg.inv(R)
    # R is upper triangular, so the staircase pattern survives; enforce it exactly
    keep = np.zeros(T2.shape, dtype=bool)
    for r, c in model.free:
        keep[r, c] = True
    T2 = np.where(keep, T2, 0)
    T2[np.arange(T2.shape[0]), np.arange(T2.shape[0])] = lam[model.labels]
    be = float(np.linalg.norm(A - Q @ T2 @ Q.conj().T) / np.linalg.norm(A))
    return _Fit(cand, lam, Q, T2, be, res, model.labels)


def _simple_fit(A: np.ndarray) -> _Fit:
    T, Q = sla.schur(A.astype(complex), output="complex")
    lam = np.diag(T).copy()
    st = SegreStructure.simple(A.shape[0])
    be = float(np.linalg.norm(A - Q @ T @ Q.conj().T) / np.linalg.norm(A))
    return _Fit(_Candidate(st, lam, "schur"), lam, Q, T, be, None, np.arange(A.shape[0]))


def _ascending_by_size(fit: _Fit) -> bool:
    re = fit.eigenvalues.real
    return bool(np.all(np.diff(re) >= 0))


def _pick(fits: list[_Fit]) -> _Fit:
    """Among near-equal fits prefer canonically ordered eigenvalues."""
    best = min(f.backward_error for f in fits)
    near = [f for f in fits if f.backward_error <= TIE_FACTOR * best]
    return min(near, key=lambda f: (not _ascending_by_size(f), f.backward_error))


def _search(A: np.ndarray, tol: float, seed: int, cfg: GnConfig | None):
    tried = []
    diags = []
    cands = _candidates(A, tol)
    for codim, tier in itertools.groupby(cands, key=lambda c: c.structure.codimension):
        if codim == 0:
            break
        fits = []
        for cand in tier:
            try:
                f = _fit(A, cand, seed, cfg)
            except (GaussNewtonError, np.linalg.LinAlgError, ValueError) as exc:
                tried.append((cand.structure.groups, None, str(exc)))
                continue
            tried.append((cand.structure.groups, f.backward_error, cand.origin))
            if f.backward_error <= tol:
                fits.append(f)
        if fits:
            return _pick(fits), tried, diags
        diags.append(f"no structure of codimension {codim} within tolerance")
    return _simple_fit(A), tried, diags


def eigen_cluster(A, tol: float, seed: int = 0, cfg: GnConfig | None = None) -> list[Cluster]:
    """Eigenvalue clusters of the most singular structure within ``tol``.

    Candidate clusterings (single-linkage levels of the computed spectrum and
    trace-moment matches) are ordered by codimension and accepted when the
    refined staircase fit passes the tolerance.
    """
    A = _square(A, tol)
    fit, _, _ = _search(A, tol, seed, cfg)
    return [Cluster(complex(l), m) for l, m in zip(fit.eigenvalues, fit.cand.structure.multiplicities)]


def _square(A, tol) -> np.ndarray:
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.size == 0:
        raise ValueError("A must be a nonempty square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("A has non-finite entries")
    return A


def regularized_jcf(A, tol: float, seed: int = 0, cfg: GnConfig | None = None) -> JcfResult:
    """Jordan structure of the most singular bundle within relative distance ``tol``.

    Candidate structures are tried in decreasing codimension; within a
    codimension all candidates are fitted and the closest acceptable one is
    kept.  The all-simple structure (Schur form) ends the search.
    """
    A = _square(A, tol)
    if np.linalg.norm(A) == 0:
        n = A.shape[0]
        st = SegreStructure(((1,) * n,))
        I = np.eye(n, dtype=complex)
        return JcfResult(st, np.zeros(1, dtype=complex), I, np.zeros((n, n), complex), 0.0, 1.0, 1.0, I,
                         np.zeros((n, n), complex))
    fit, tried, diags = _search(A, tol, seed, cfg)
    st = fit.cand.structure
    cond = 1.0
    if fit.trace is not None:
        model = bundle_model(A, st, fit.eigenvalues, X0=fit.Q, C=fit.Q)
        z = model.pack(fit.eigenvalues, fit.T, fit.Q)
        cond, _ = sensitivity(model, z)
    if st.is_simple():
        _, V = np.linalg.eig(fit.T)
    else:
        V = _jordan_basis(fit.T, st, fit.eigenvalues, fit.labels)
    X = fit.Q @ V
    Xn = X / np.linalg.norm(X, axis=0)
    smin = float(sla.svdvals(Xn)[-1])
    return JcfResult(st, fit.eigenvalues, X, jordan_matrix(st, fit.eigenvalues), fit.backward_error,
                     float(cond), smin, fit.Q, fit.T, fit.trace, diags, tried)
