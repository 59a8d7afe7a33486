"""Shared damped Newton ascent used by both component-model fitters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NonConvergenceError, ProbabilityDomainError, SeparationError


@dataclass(frozen=True)
class FitOptions:
    """Controls for the inner Newton fits.

    Convergence is max|score| < ``score_tol`` or max|step| < ``param_tol``.
    A sup-norm parameter beyond ``divergence_bound`` while the score is
    still large is treated as separation (the likelihood has no interior
    maximum).
    """

    score_tol: float = 1e-8
    param_tol: float = 1e-10
    max_iter: int = 50
    max_halvings: int = 20
    divergence_bound: float = 30.0


def newton_maximize(eval_derivs, eval_value, x0: np.ndarray, options: FitOptions, stage: str):
    """Maximize a concave-ish objective by Newton steps with halving.

    ``eval_derivs(x) -> (f, score, neg_hess, feasible)`` and
    ``eval_value(x) -> (f, feasible)``. Returns
    ``(x, f, score_norm, iterations, neg_hess)`` or raises.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    f, score, nh, ok = eval_derivs(x)
    if not ok:
        raise ProbabilityDomainError(f"{stage}: infeasible starting point")

    for it in range(1, options.max_iter + 1):
        score_norm = float(np.max(np.abs(score)))
        if score_norm < options.score_tol:
            return x, f, score_norm, it - 1, nh
        if float(np.max(np.abs(x))) > options.divergence_bound:
            raise SeparationError(f"{stage}: estimates diverged beyond {options.divergence_bound}")
        try:
            step = np.linalg.solve(nh, score)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(nh, score, rcond=None)[0]

        t = 1.0
        accepted = False
        for _ in range(options.max_halvings + 1):
            x_new = x + t * step
            f_new, ok_new = eval_value(x_new)
            if ok_new and f_new >= f - 1e-13 * (1.0 + abs(f)):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            raise NonConvergenceError(
                f"{stage}: no ascent step found at iteration {it}", stage=stage, iterations=it
            )
        max_move = float(np.max(np.abs(t * step)))
        x = x_new
        f, score, nh, ok = eval_derivs(x)
        if not ok:
            raise ProbabilityDomainError(f"{stage}: accepted step left the domain")
        if max_move < options.param_tol:
            return x, f, float(np.max(np.abs(score))), it, nh

    score_norm = float(np.max(np.abs(score)))
    if score_norm < options.score_tol:
        return x, f, score_norm, options.max_iter, nh
    raise NonConvergenceError(
        f"{stage}: not converged after {options.max_iter} iterations (max|score|={score_norm:.3e})",
        stage=stage,
        iterations=options.max_iter,
    )
