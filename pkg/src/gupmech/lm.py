"""Damped least squares (Levenberg-Marquardt) with central-difference Jacobians.

Shared by every fitter in the package.  Parameters are expected to be
reasonably scaled by the caller; ``x_scale`` sets both the Marquardt
diagonal floor and the absolute part of the finite-difference step, so a
parameter sitting at zero still gets a sensible step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ITER = 200
XTOL = 1e-10
REL_STEP = 1e-6


@dataclass(eq=False)
class LMResult:
    x: np.ndarray
    covariance: np.ndarray
    residuals: np.ndarray
    jacobian: np.ndarray
    cost: float
    converged: bool
    iterations: int
    message: str

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))


def numeric_jacobian(fun, x, x_scale, rel_step=REL_STEP):
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        h = rel_step * (abs(x[j]) + x_scale[j])
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        cols.append((fun(xp) - fun(xm)) / (2 * h))
    return np.column_stack(cols)


def _covariance(jac, cost, n, p, absolute_sigma):
    jtj = jac.T @ jac
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        return np.full((p, p), np.inf)
    if not absolute_sigma:
        dof = n - p
        cov = cov * (cost / dof if dof > 0 else np.inf)
    return cov


def levenberg_marquardt(fun, x0, x_scale=None, *, max_iter=MAX_ITER, xtol=XTOL,
                        rel_step=REL_STEP, absolute_sigma=False, jac=None) -> LMResult:
    """Minimise ``sum(fun(x)**2)``.

    ``fun`` returns weighted residuals.  With ``absolute_sigma`` the weights
    are taken as true 1/sigma and the covariance is (J^T J)^-1; otherwise it is
    rescaled by the reduced chi-square.  Convergence: every parameter step
    below ``xtol * (|x| + x_scale)``.  Non-convergence is reported, never
    raised.
    """
    x = np.asarray(x0, dtype=float).copy()
    p = x.size
    x_scale = np.ones(p) if x_scale is None else np.asarray(x_scale, dtype=float)
    jac_fun = jac or (lambda v: numeric_jacobian(fun, v, x_scale, rel_step))
    r = np.asarray(fun(x), dtype=float)
    if not np.all(np.isfinite(r)):
        return LMResult(x, np.full((p, p), np.inf), r, np.zeros((r.size, p)), np.inf,
                        False, 0, "non-finite residuals at the initial guess")
    cost = float(r @ r)
    lam = 1e-3
    converged = False
    message = f"no convergence after {max_iter} iterations"
    it = 0
    J = jac_fun(x)
    for it in range(1, max_iter + 1):
        g = J.T @ r
        A = J.T @ J
        diag = np.maximum(np.diag(A), 1e-30 * np.max(np.diag(A), initial=1.0))
        improved = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(A + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            x_new = x + step
            r_new = np.asarray(fun(x_new), dtype=float)
            cost_new = float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
            if cost_new <= cost:
                improved = True
                break
            lam *= 10
        if not improved:
            # no downhill direction left: a stationary point to working precision
            converged = True
            message = "converged (no further decrease in cost)"
            break
        small = np.all(np.abs(step) <= xtol * (np.abs(x) + x_scale))
        x, r, cost = x_new, r_new, cost_new
        lam = max(lam / 10, 1e-12)
        J = jac_fun(x)
        if small:
            converged = True
            message = "converged (relative parameter change below tolerance)"
            break
    cov = _covariance(J, cost, r.size, p, absolute_sigma)
    return LMResult(x, cov, r, J, cost, converged, it, message)
