"""Gauss-Newton iteration for holomorphic least-squares models.

A model bundles a residual map ``v -> f(u, v)`` (the data ``u`` is captured
inside) and its analytic Jacobian with respect to ``v``.  Unknowns and
residuals are flat complex vectors; the iteration is the undamped step
``v <- v - J(v)^+ f(v)`` with a small retreat safeguard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .numlin import lsq_min_norm

__all__ = [
    "LeastSquaresModel",
    "GnConfig",
    "GnResult",
    "GaussNewtonError",
    "RankDeficientJacobian",
    "DivergenceError",
    "gauss_newton",
    "check_critical_point",
    "jacobian_fd_check",
    "sensitivity",
]

_EPS = np.finfo(float).eps


class GaussNewtonError(RuntimeError):
    pass


class RankDeficientJacobian(GaussNewtonError):
    """The Jacobian lost injectivity: usually the wrong structure was chosen."""


class DivergenceError(GaussNewtonError):
    pass


@dataclass(frozen=True)
class LeastSquaresModel:
    residual: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    dim_unknowns: int
    dim_residual: int
    data_jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""

    def __post_init__(self):
        if self.dim_residual < self.dim_unknowns:
            raise ValueError(
                f"underdetermined model: {self.dim_residual} residuals < {self.dim_unknowns} unknowns"
            )


@dataclass(frozen=True)
class GnConfig:
    max_iterations: int = 50
    step_tolerance: float = 1e-12
    residual_stagnation: float = 1e-3
    injectivity_floor: float = 1e-10
    critical_tolerance: float = 1e-8
    max_halvings: int = 5

    def __post_init__(self):
        for name in ("max_iterations", "step_tolerance", "residual_stagnation",
                     "injectivity_floor", "critical_tolerance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class GnResult:
    solution: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    step_norms: list[float]
    jacobian_sigma_min: float
    critical_point: bool = False
    stop_reason: str = ""
    history: list[dict] = field(default_factory=list)

    @property
    def zeta(self) -> float:
        """1/sigma_min of the Jacobian at the solution."""
        return np.inf if self.jacobian_sigma_min == 0 else 1.0 / self.jacobian_sigma_min

    def trace(self) -> list[dict]:
        """Iteration history as plain JSON-ready records."""
        return [dict(h) for h in self.history]


def _svals(J: np.ndarray) -> np.ndarray:
    s = sla.svdvals(J)
    if s.size < J.shape[1]:
        s = np.concatenate([s, np.zeros(J.shape[1] - s.size)])
    return s


def gauss_newton(model: LeastSquaresModel, v0, cfg: GnConfig | None = None) -> GnResult:
    """Run the Gauss-Newton iteration from ``v0``.

    Stops when the step falls below ``step_tolerance*(1+|v|)`` (raised to the
    roundoff floor ``10*eps*cond(J)`` when the Jacobian is ill-conditioned),
    on residual stagnation, or after ``max_iterations``.  The final step that
    certifies convergence is applied but not counted as an iteration.
    """
    cfg = cfg or GnConfig()
    v = np.array(v0, dtype=complex).ravel()
    if v.size != model.dim_unknowns:
        raise ValueError(f"v0 has length {v.size}, model expects {model.dim_unknowns}")
    r = np.asarray(model.residual(v), dtype=complex)
    rn = float(np.linalg.norm(r))
    history: list[dict] = []
    steps: list[float] = []
    grew = 0
    stagnant = 0
    iterations = 0
    converged = False
    reason = "max_iterations"
    smin = np.nan
    for k in range(cfg.max_iterations + 1):
        J = np.asarray(model.jacobian(v), dtype=complex)
        s = _svals(J)
        smin = float(s[-1])
        if s[0] == 0 or smin <= cfg.injectivity_floor * s[0]:
            if k == 0:
                raise RankDeficientJacobian(
                    f"Jacobian not injective at the initial point (sigma_min/sigma_1 = {smin / s[0] if s[0] else 0:.2e})"
                )
            reason = "rank_deficient"
            break
        if k == cfg.max_iterations:
            break
        step = lsq_min_norm(J, r)
        t = 1.0
        v_new = v - step
        r_new = np.asarray(model.residual(v_new), dtype=complex)
        rn_new = float(np.linalg.norm(r_new))
        halvings = 0
        while rn_new > rn and halvings < cfg.max_halvings:
            t *= 0.5
            halvings += 1
            v_new = v - t * step
            r_new = np.asarray(model.residual(v_new), dtype=complex)
            rn_new = float(np.linalg.norm(r_new))
        sn = t * float(np.linalg.norm(step))
        grew = grew + 1 if rn_new > rn else 0
        rel_drop = (rn - rn_new) / rn if rn > 0 else 0.0
        contracting = not steps or sn <= 0.5 * steps[-1]
        v, r, prev_rn, rn = v_new, r_new, rn, rn_new
        floor = max(cfg.step_tolerance, 10 * _EPS * s[0] / smin)
        small = sn <= floor * (1 + np.linalg.norm(v))
        if not small:
            iterations += 1
        steps.append(sn)
        history.append({"iteration": k + 1, "residual_norm": rn, "step_norm": sn,
                        "sigma_min": smin, "halvings": halvings})
        if small:
            converged = True
            reason = "step_tolerance"
            break
        if grew >= 5:
            raise DivergenceError(f"residual grew for 5 consecutive steps (now {rn:.3e})")
        # a growing residual is left to the divergence test
        stagnant = stagnant + 1 if (0 <= rel_drop < cfg.residual_stagnation and not contracting) else 0
        if stagnant >= 3:
            reason = "stagnation"
            break
    J = np.asarray(model.jacobian(v), dtype=complex)
    smin = float(_svals(J)[-1])
    crit = check_critical_point(model, v, cfg.critical_tolerance)
    converged = converged and crit
    return GnResult(
        solution=v,
        residual_norm=rn,
        iterations=iterations,
        converged=converged,
        step_norms=steps,
        jacobian_sigma_min=smin,
        critical_point=crit,
        stop_reason=reason,
        history=history,
    )


def check_critical_point(model: LeastSquaresModel, v, tol: float) -> bool:
    """``|J^H f| <= tol * (1 + |J|_2 |f|)`` at ``v``."""
    v = np.asarray(v, dtype=complex)
    J = np.asarray(model.jacobian(v), dtype=complex)
    r = np.asarray(model.residual(v), dtype=complex)
    g = np.linalg.norm(J.conj().T @ r)
    return bool(g <= tol * (1 + np.linalg.norm(J, 2) * np.linalg.norm(r)))


def jacobian_fd_check(model: LeastSquaresModel, v, step: float = 1e-7) -> float:
    """Worst column-wise relative gap between J(v) and central differences.

    Holomorphy lets a real-direction difference stand in for the complex
    derivative.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    v = np.asarray(v, dtype=complex)
    J = np.asarray(model.jacobian(v), dtype=complex)
    scale = np.linalg.norm(J)
    worst = 0.0
    for j in range(v.size):
        e = np.zeros_like(v)
        e[j] = step
        fd = (np.asarray(model.residual(v + e)) - np.asarray(model.residual(v - e))) / (2 * step)
        denom = max(np.linalg.norm(J[:, j]), 1e-8 * scale, 1e-300)
        worst = max(worst, float(np.linalg.norm(fd - J[:, j]) / denom))
    return worst


def sensitivity(model: LeastSquaresModel, v_star) -> tuple[float, float]:
    """First-order Lipschitz constant ``|J_v^+|_2 |J_u|_2`` and ``sigma_min(J_v)``."""
    if model.data_jacobian is None:
        raise ValueError("model has no data Jacobian")
    v_star = np.asarray(v_star, dtype=complex)
    smin = float(_svals(np.asarray(model.jacobian(v_star), dtype=complex))[-1])
    Ju = model.data_jacobian(v_star)
    nu = float(Ju) if np.isscalar(Ju) else float(np.linalg.norm(np.asarray(Ju), 2))
    if smin == 0:
        return np.inf, 0.0
    return nu / smin, smin
