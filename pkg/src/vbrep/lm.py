"""Levenberg-Marquardt with multiplicative dynamic damping.

Two entry points share one damping loop:

  * lm_solve(residual_fn, x0, ...) for problems small enough to hold the full
    Jacobian (numeric forward differences unless jac_fn is given);
  * lm_core(cost_fn, normal_fn, x0, cfg) for large structured problems where
    the caller assembles the normal equations (J^T J, J^T r) blockwise.

Steps are accepted only when the cost decreases, so the recorded cost history
is monotone. A rejected step shrinks below step tolerance -> converged; too
many consecutive rejections without progress -> LmDiverged carrying the last
accepted state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import LmDiverged


@dataclass
class LmConfig:
    lambda0: float = 1e-3
    increase: float = 10.0
    decrease: float = 0.1
    max_iterations: int = 200
    cost_tolerance: float = 1e-10
    step_tolerance: float = 1e-12
    max_rejects: int = 20

    def __post_init__(self):
        if self.increase <= 1.0 or not 0.0 < self.decrease < 1.0:
            raise ValueError("damping factors must satisfy increase > 1, 0 < decrease < 1")
        if self.cost_tolerance <= 0 or self.step_tolerance <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class LmResult:
    x: np.ndarray
    cost: float
    iterations: int
    cost_history: list = field(default_factory=list)
    converged: bool = False


def _solve_damped(JtJ, Jtg, lam):
    diag = np.diag(JtJ).copy()
    diag[diag < 1e-12] = 1.0
    M = JtJ + lam * np.diag(diag)
    try:
        return np.linalg.solve(M, -Jtg)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(M, -Jtg, rcond=None)[0]


def lm_core(cost_fn: Callable, normal_fn: Callable, x0, cfg: Optional[LmConfig] = None) -> LmResult:
    """Damping loop over caller-supplied normal equations.

    normal_fn(x) must return (JtJ, Jtg) for the residual Jacobian at x;
    cost_fn(x) the scalar sum of squared residuals.
    """
    cfg = cfg or LmConfig()
    x = np.asarray(x0, dtype=float).copy()
    cost = float(cost_fn(x))
    history = [cost]
    if cost == 0.0:
        return LmResult(x, cost, 0, history, converged=True)
    lam = cfg.lambda0
    iterations = 0
    rejects = 0
    while iterations < cfg.max_iterations:
        JtJ, Jtg = normal_fn(x)
        stepped = False
        while True:
            delta = _solve_damped(JtJ, Jtg, lam)
            step_norm = float(np.linalg.norm(delta))
            x_try = x + delta
            cost_try = float(cost_fn(x_try))
            if cost_try < cost:
                improvement = cost - cost_try
                x = x_try
                cost = cost_try
                history.append(cost)
                lam = max(lam * cfg.decrease, 1e-14)
                iterations += 1
                rejects = 0
                stepped = True
                if improvement <= cfg.cost_tolerance * (1.0 + cost):
                    return LmResult(x, cost, iterations, history, converged=True)
                if step_norm <= cfg.step_tolerance * (1.0 + float(np.linalg.norm(x))):
                    return LmResult(x, cost, iterations, history, converged=True)
                break
            # Rejected: a vanishing step means no descent direction remains.
            if step_norm <= cfg.step_tolerance * (1.0 + float(np.linalg.norm(x))):
                return LmResult(x, cost, iterations, history, converged=True)
            lam *= cfg.increase
            rejects += 1
            if rejects >= cfg.max_rejects:
                raise LmDiverged(
                    f"no accepted step after {rejects} damping increases",
                    state=LmResult(x, cost, iterations, history),
                )
        if not stepped:  # pragma: no cover - loop above always breaks or returns
            break
    return LmResult(x, cost, iterations, history, converged=False)


def numeric_jacobian(residual_fn: Callable, x: np.ndarray, scale: float = 1e-6) -> np.ndarray:
    """Forward-difference Jacobian with per-component step 1e-6 * (1 + |x_i|)."""
    x = np.asarray(x, dtype=float)
    r0 = np.atleast_1d(np.asarray(residual_fn(x), dtype=float))
    J = np.empty((r0.size, x.size))
    for i in range(x.size):
        h = scale * (1.0 + abs(x[i]))
        xp = x.copy()
        xp[i] += h
        J[:, i] = (np.atleast_1d(np.asarray(residual_fn(xp), dtype=float)) - r0) / h
    return J


def lm_solve(residual_fn: Callable, x0, cfg: Optional[LmConfig] = None,
             jac_fn: Optional[Callable] = None) -> LmResult:
    """Minimize sum(residual_fn(x)^2) with LM; Jacobian numeric unless given."""
    def cost(x):
        r = np.atleast_1d(np.asarray(residual_fn(x), dtype=float))
        return float(r @ r)

    def normal(x):
        r = np.atleast_1d(np.asarray(residual_fn(x), dtype=float))
        J = jac_fn(x) if jac_fn is not None else numeric_jacobian(residual_fn, x)
        J = np.atleast_2d(np.asarray(J, dtype=float))
        return J.T @ J, J.T @ r

    return lm_core(cost, normal, x0, cfg)
