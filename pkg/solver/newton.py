"""
Newton Root Polishing

Solves F(y) = y - k + M (1/y) = 0 with Jacobian I - M diag(1/(y o y)).
Steps are damped so iterates stay in the positive orthant: a step may
shrink any component to no less than half its current value.
"""

from typing import Optional, Tuple

import numpy as np

from core.order import PositiveVector, VectorLike, as_positive
from infrastructure.config_manager import get_config
from infrastructure.logger import get_logger
from solver.iteration_engine import Problem

logger = get_logger(__name__)

_BACKTRACK = 30


def _residual(k: np.ndarray, M: np.ndarray, y: np.ndarray) -> float:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        value = np.max(np.abs(y - k + M @ (1.0 / y)))
    return float(value) if np.isfinite(value) else np.inf


def _boundary_fraction(y: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Largest alpha <= 1 with y - alpha*delta >= y/2 (works on stacks too)"""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(delta > 0, y / delta, np.inf)
    return np.minimum(1.0, 0.5 * ratio.min(axis=-1))


def polish(
    p: Problem,
    y0: VectorLike,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> Tuple[PositiveVector, float]:
    """
    Newton iteration with backtracking on the sup-norm residual.
    Returns the best point found and its residual; the input is returned
    unchanged when no step improves it (e.g. at a singular Jacobian).
    """
    config = get_config().certification
    tol = config.polish_tol if tol is None else tol
    max_iter = config.polish_max_iter if max_iter is None else max_iter

    k, M = p.k.entries, p.M.entries
    identity = np.eye(p.n)
    y = np.array(as_positive(y0).entries)
    res = _residual(k, M, y)

    for _ in range(max_iter):
        if res < tol:
            break
        F = y - k + M @ (1.0 / y)
        J = identity - M * (1.0 / (y * y))[np.newaxis, :]
        try:
            delta = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            logger.debug("Singular Jacobian while polishing", residual=res)
            break

        alpha = float(_boundary_fraction(y, delta))
        improved = False
        for _ in range(_BACKTRACK):
            candidate = y - alpha * delta
            cand_res = _residual(k, M, candidate)
            if np.all(candidate > 0) and cand_res < res:
                y, res = candidate, cand_res
                improved = True
                break
            alpha *= 0.5
        if not improved:
            break

    return PositiveVector(y), res


def batch_newton(
    p: Problem,
    starts: np.ndarray,
    iterations: int,
    tol: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Damped Newton from every row of `starts` at once (small n only).
    Returns the final points and their residuals; rows that hit a singular
    Jacobian or a non-finite value get residual inf.
    """
    k, M = p.k.entries, p.M.entries
    n = p.n
    Y = np.array(starts, dtype=float)
    alive = np.all(Y > 0, axis=1)
    identity = np.eye(n)

    for _ in range(iterations):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            inv = 1.0 / Y
            F = Y - k + inv @ M.T
        res = np.abs(F).max(axis=1)
        alive &= np.isfinite(res)
        active = alive & (res >= tol)
        if not np.any(active):
            break

        Ya, Fa, inva = Y[active], F[active], inv[active]
        J = identity[np.newaxis, :, :] - M[np.newaxis, :, :] * (inva * inva)[:, np.newaxis, :]
        det = np.linalg.det(J)
        solvable = np.abs(det) > 1e-14

        idx = np.flatnonzero(active)
        alive[idx[~solvable]] = False
        if not np.any(solvable):
            continue

        delta = np.linalg.solve(J[solvable], Fa[solvable][:, :, np.newaxis])[:, :, 0]
        alpha = _boundary_fraction(Ya[solvable], delta)
        Y[idx[solvable]] = Ya[solvable] - alpha[:, np.newaxis] * delta

    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        res = np.abs(Y - k + (1.0 / Y) @ M.T).max(axis=1)
    res[~alive | ~np.isfinite(res)] = np.inf
    return Y, res
