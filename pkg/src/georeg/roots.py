"""Multiple roots of a univariate polynomial.

Stage I infers the multiplicity structure from a chain of approximate GCDs
``g_j = gcd(g_{j-1}, g_{j-1}')``.  Stage II fits the modified Viete equation

    z0 * prod_j (x - z_j)^l_j - p = 0

in the least-squares sense, which keeps multiple roots as well conditioned as
simple ones once the multiplicities are fixed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import poly as P
from .gcd import pgcd
from .gn import GaussNewtonError, GnConfig, GnResult, LeastSquaresModel, gauss_newton, sensitivity

__all__ = [
    "RootStructure",
    "Factorization",
    "RootCollisionError",
    "multiplicity_structure",
    "roots_initial",
    "viete_model",
    "roots_refine",
    "proots",
    "companion_roots",
    "expand",
]

log = logging.getLogger(__name__)

# pairwise root distance below which refinement is declared to have collapsed
COLLISION_DISTANCE = 1e-12


class RootCollisionError(GaussNewtonError):
    """Two roots merged during refinement: the multiplicity structure is wrong."""


def _canonical_order(mult, roots) -> np.ndarray:
    """Indices sorting by multiplicity (descending), then real, then imaginary part."""
    roots = np.asarray(roots, dtype=complex)
    return np.lexsort((roots.imag, roots.real, -np.asarray(mult)))


@dataclass(frozen=True)
class RootStructure:
    """Multiplicity vector, listed in descending order.

    ``estimates`` optionally carries Stage-I root estimates aligned with
    ``multiplicities``.
    """

    multiplicities: tuple[int, ...]
    estimates: tuple[complex, ...] | None = None
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.multiplicities or any(int(l) < 1 for l in self.multiplicities):
            raise ValueError("multiplicities must be positive integers")
        if self.estimates is not None and len(self.estimates) != len(self.multiplicities):
            raise ValueError("estimates must align with multiplicities")

    @property
    def degree(self) -> int:
        return int(sum(self.multiplicities))

    @property
    def k(self) -> int:
        return len(self.multiplicities)

    @property
    def codimension(self) -> int:
        return self.degree - self.k

    @classmethod
    def from_pairs(cls, mult, estimates=None, diagnostics=()) -> RootStructure:
        mult = [int(m) for m in mult]
        if estimates is None:
            return cls(tuple(sorted(mult, reverse=True)), None, tuple(diagnostics))
        order = _canonical_order(mult, estimates)
        return cls(tuple(mult[i] for i in order), tuple(complex(estimates[i]) for i in order),
                   tuple(diagnostics))


@dataclass
class Factorization:
    leading: complex
    roots: np.ndarray
    multiplicities: tuple[int, ...]
    backward_error: float
    trace: GnResult | None = None
    condition: float = 0.0
    diagnostics: list[str] = field(default_factory=list)

    @property
    def structure(self) -> RootStructure:
        return RootStructure(self.multiplicities, tuple(complex(z) for z in self.roots))

    @property
    def min_separation(self) -> float:
        z = self.roots
        if z.size < 2:
            return np.inf
        d = np.abs(z[:, None] - z[None, :])
        return float(d[~np.eye(z.size, dtype=bool)].min())

    def expand(self) -> P.Polynomial:
        return expand(self.leading, self.roots, self.multiplicities)


def expand(z0: complex, roots, mult) -> P.Polynomial:
    """Coefficients of ``z0 * prod (x - z_j)^l_j``."""
    c = np.array([z0], dtype=complex)
    for z, l in zip(roots, mult):
        for _ in range(int(l)):
            c = np.convolve(c, [-z, 1.0])
    return P.Polynomial(c)


def companion_roots(p: P.Polynomial) -> np.ndarray:
    """All roots of p as companion-matrix eigenvalues (unstructured)."""
    p = p.trimmed()
    if p.nominal_degree < 1:
        return np.zeros(0, dtype=complex)
    return np.roots(p.coeffs[::-1]).astype(complex)


def _all_simple(p: P.Polynomial, diagnostics=()) -> RootStructure:
    z = companion_roots(p)
    return RootStructure.from_pairs([1] * z.size, z, diagnostics)


def multiplicity_structure(p: P.Polynomial, tol: float, seed: int = 0) -> RootStructure:
    """Multiplicities from the approximate square-free GCD chain.

    The number of roots of multiplicity at least j is deg g_{j-1} - deg g_j.
    Root estimates come from the square-free part g_0/g_1; each root's
    multiplicity counts how many of the chain quotients g_{j-1}/g_j vanish
    near it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = p.trimmed()
    n = p.nominal_degree
    if n < 1:
        raise ValueError("polynomial must have degree at least 1")
    g = p
    degrees = [n]
    quotients = []
    while g.nominal_degree >= 1:
        res = pgcd(g, P.derivative(g), tol, seed)
        quotients.append(res.v.trimmed())
        g = res.u.trimmed()
        degrees.append(g.nominal_degree)
        if degrees[-1] >= degrees[-2]:
            break
    counts = [degrees[j - 1] - degrees[j] for j in range(1, len(degrees))]
    if any(c <= 0 for c in counts) or any(a < b for a, b in zip(counts, counts[1:])) or degrees[-1] != 0:
        log.info("inconsistent GCD chain %s; falling back to simple roots", degrees)
        return _all_simple(p, (f"inconsistent GCD chain degrees {degrees}",))
    base = companion_roots(quotients[0])
    mult = np.ones(base.size, dtype=int)
    for h in quotients[1:]:
        z = companion_roots(h)
        if z.size == 0:
            continue
        cost = np.abs(z[:, None] - base[None, :])
        _, cols = linear_sum_assignment(cost)
        mult[cols] += 1
    if mult.sum() != n:
        return _all_simple(p, (f"multiplicities {mult.tolist()} do not sum to degree {n}",))
    return RootStructure.from_pairs(mult, base)


def _clustered_estimates(p: P.Polynomial, mult) -> np.ndarray:
    """Estimates for a prescribed structure by grouping companion roots.

    Largest multiplicities first: take the l unassigned roots with the
    tightest neighbourhood and use their centroid.
    """
    z = companion_roots(p)
    free = np.ones(z.size, dtype=bool)
    est = np.empty(len(mult), dtype=complex)
    for i in np.argsort(-np.asarray(mult), kind="stable"):
        l = int(mult[i])
        idx = np.flatnonzero(free)
        best, spread = None, np.inf
        for c in idx:
            near = idx[np.argsort(np.abs(z[idx] - z[c]), kind="stable")[:l]]
            s = np.abs(z[near] - z[near].mean()).max()
            if s < spread:
                best, spread = near, s
        est[i] = z[best].mean()
        free[best] = False
    return est


def roots_initial(p: P.Polynomial, structure: RootStructure) -> np.ndarray:
    """Initial unknown vector ``(z0, z1, ..., zk)`` aligned with the structure."""
    p = p.trimmed()
    if structure.degree != p.nominal_degree:
        raise ValueError(f"structure degree {structure.degree} != deg p = {p.nominal_degree}")
    if structure.estimates is not None:
        est = np.array(structure.estimates, dtype=complex)
    else:
        est = _clustered_estimates(p, structure.multiplicities)
    return np.concatenate([[p.leading], est])


def viete_model(p: P.Polynomial, mult) -> LeastSquaresModel:
    """Residual ``z0*prod (x-z_j)^l_j - p`` in P_n; unknowns ``(z0, z_1..z_k)``."""
    p = p.trimmed()
    mult = [int(l) for l in mult]
    n = p.nominal_degree
    if sum(mult) != n:
        raise ValueError("multiplicities must sum to the degree")
    k = len(mult)
    pc = p.coeffs

    def residual(z):
        return expand(z[0], z[1:], mult).coeffs - pc

    def jacobian(z):
        J = np.zeros((n + 1, k + 1), dtype=complex)
        J[:, 0] = expand(1.0, z[1:], mult).coeffs
        for j in range(k):
            lj = mult.copy()
            lj[j] -= 1
            col = expand(-mult[j] * z[0], z[1:], lj).coeffs
            J[: col.size, j + 1] = col
        return J

    return LeastSquaresModel(residual, jacobian, k + 1, n + 1,
                             data_jacobian=lambda z: 1.0, name=f"viete{tuple(mult)}")


def _check_distinct(z) -> float:
    z = np.asarray(z)
    if z.size < 2:
        return np.inf
    d = np.abs(z[:, None] - z[None, :])
    return float(d[~np.eye(z.size, dtype=bool)].min())


def roots_refine(p: P.Polynomial, structure: RootStructure, z_init, cfg: GnConfig | None = None) -> Factorization:
    """Gauss-Newton on the Viete model from ``z_init = (z0, z1..zk)``."""
    p = p.trimmed()
    mult = list(structure.multiplicities)
    z_init = np.asarray(z_init, dtype=complex)
    if z_init.size != len(mult) + 1:
        raise ValueError("z_init must hold z0 followed by one estimate per distinct root")
    if _check_distinct(z_init[1:]) < COLLISION_DISTANCE:
        raise RootCollisionError("initial root estimates are not distinct")
    model = viete_model(p, mult)
    res = gauss_newton(model, z_init, cfg)
    z = res.solution
    sep = _check_distinct(z[1:])
    if sep < COLLISION_DISTANCE or res.stop_reason == "rank_deficient":
        raise RootCollisionError(f"roots collided during refinement (separation {sep:.2e})")
    order = _canonical_order(mult, z[1:])
    roots = z[1:][order]
    mult = tuple(mult[i] for i in order)
    be = float(np.linalg.norm(model.residual(z)) / p.norm())
    cond, _ = sensitivity(model, z)
    return Factorization(complex(z[0]), roots, mult, be, res, cond)


def _split_largest(mult) -> list[int] | None:
    mult = list(mult)
    i = int(np.argmax(mult))
    if mult[i] == 1:
        return None
    mult[i] -= 1
    return mult + [1]


def proots(p: P.Polynomial, tol: float, seed: int = 0, cfg: GnConfig | None = None) -> Factorization:
    """Regularized factorization within relative backward error ``tol``.

    On failure the largest multiplicity is split off one simple root at a time
    until the all-simple structure, which is returned unconditionally.
    """
    p = p.trimmed()
    st = multiplicity_structure(p, tol, seed)
    diags = list(st.diagnostics)
    mult = list(st.multiplicities)
    z_init = roots_initial(p, st)
    best = None
    while True:
        try:
            out = roots_refine(p, RootStructure(tuple(mult)), z_init, cfg)
            if out.backward_error <= tol or max(mult) == 1:
                out.diagnostics = diags
                return out
            diags.append(f"structure {tuple(mult)}: backward error {out.backward_error:.3e} > tol")
            best = out
        except GaussNewtonError as exc:
            diags.append(f"structure {tuple(mult)}: {exc}")
        nxt = _split_largest(mult)
        if nxt is None:
            break
        mult = sorted(nxt, reverse=True)
        z_init = roots_initial(p, RootStructure(tuple(mult)))
    if best is None:
        raise GaussNewtonError("refinement failed for every structure")
    best.diagnostics = diags
    return best
