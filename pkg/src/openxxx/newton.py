"""Damped Newton iteration for small analytic systems in complex unknowns."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    converged: bool
    message: str = ""


def fd_jacobian(fun, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of an analytic map ``C^n -> C^n``.

    For analytic ``fun`` a real step gives the complex derivative.
    """
    n = len(x)
    J = np.empty((n, n), dtype=complex)
    for j in range(n):
        h = rel_step * max(1.0, abs(x[j]))
        e = np.zeros(n, dtype=complex)
        e[j] = h
        J[:, j] = (np.asarray(fun(x + e)) - np.asarray(fun(x - e))) / (2 * h)
    return J


def damped_newton(
    fun,
    x0,
    tol: float = 1e-10,
    maxiter: int = 200,
    jac=None,
    valid=None,
) -> NewtonResult:
    """Solve ``fun(x) = 0`` with backtracking on ``|fun|^2``.

    ``valid(x)`` may reject iterates (e.g. colliding roots); rejected trial
    points are treated like a failed line-search step.
    """
    x = np.array(x0, dtype=complex)
    jac = jac or (lambda z: fd_jacobian(fun, z))

    def safe_norm(z):
        if valid is not None and not valid(z):
            return np.inf
        try:
            with np.errstate(all="raise"):
                val = np.asarray(fun(z), dtype=complex)
        except (ArithmeticError, ValueError):
            return np.inf
        if not np.all(np.isfinite(val)):
            return np.inf
        return float(np.linalg.norm(val))

    r = safe_norm(x)
    if not np.isfinite(r):
        return NewtonResult(x, r, 0, False, "invalid starting point")
    for it in range(1, maxiter + 1):
        if r <= tol:
            return NewtonResult(x, r, it - 1, True)
        try:
            step = np.linalg.solve(jac(x), -np.asarray(fun(x), dtype=complex))
        except (np.linalg.LinAlgError, ArithmeticError, ValueError):
            return NewtonResult(x, r, it, False, "singular Jacobian")
        t = 1.0
        while t > 1e-10:
            trial = x + t * step
            rt = safe_norm(trial)
            if rt < r or rt <= tol:
                break
            t *= 0.5
        else:
            return NewtonResult(x, r, it, False, "line search stalled")
        x, r = trial, rt
    return NewtonResult(x, r, maxiter, r <= tol, "" if r <= tol else "max iterations")
