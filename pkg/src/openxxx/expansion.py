"""Taylor coefficients in ``η`` of analytic array-valued functions.

Two independent estimators are provided: a Cauchy contour integral on a
small circle in the complex ``η`` plane and a least-squares polynomial fit on
real sample points. Agreement of the two guards against grid artifacts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = ["ExpansionReport", "cauchy_coefficients", "polyfit_coefficients", "leading_ratio_rate"]


@dataclass
class ExpansionReport:
    """Coefficients ``c_0..c_K`` of a power series in ``η`` with fit diagnostics.

    Attributes
    ----------
    etas : tuple of complex
        Sample points used by the least-squares fit.
    coefficients : list of ndarray
        Contour-integral estimates of ``c_k``.
    fit_coefficients : list of ndarray
        Least-squares estimates of ``c_k`` from ``etas``.
    fit_residual : float
        Max-norm of the data minus the fitted polynomial, relative to the data.
    agreement : float
        Max-norm difference of the two estimates of the highest coefficient,
        relative to its size.
    checks : dict
        Named residuals of the expected coefficient values.
    """

    etas: tuple
    coefficients: list = field(repr=False)
    fit_coefficients: list = field(repr=False)
    fit_residual: float
    agreement: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v <= tol for v, tol in self.checks.values())


def cauchy_coefficients(fun: Callable[[complex], np.ndarray], order: int, radius: float,
                        n_points: int = 32) -> list[np.ndarray]:
    """Taylor coefficients ``c_0..c_order`` of ``fun`` around ``η = 0``.

    Uses the trapezoid rule on ``|η| = radius``; the error decays like
    ``(radius / R)^n_points`` with ``R`` the distance to the nearest singularity.
    """
    if n_points <= order:
        raise ValueError("n_points must exceed the requested order")
    nodes = radius * np.exp(2j * np.pi * (np.arange(n_points) + 0.5) / n_points)
    values = np.array([np.asarray(fun(z), dtype=complex) for z in nodes])
    out = []
    for k in range(order + 1):
        weights = nodes ** (-k) / n_points
        out.append(np.tensordot(weights, values, axes=(0, 0)))
    return out


def polyfit_coefficients(fun: Callable[[complex], np.ndarray], etas: Sequence[complex],
                         degree: int) -> tuple[list[np.ndarray], float]:
    """Least-squares fit of ``fun(η)`` by a degree-``degree`` polynomial.

    Returns the coefficients and the relative fit residual. The Vandermonde
    columns are rescaled so that the solve stays well conditioned for small η.
    """
    etas = np.asarray(etas, dtype=complex)
    if len(etas) <= degree:
        raise ValueError("need more sample points than the polynomial degree")
    values = np.array([np.asarray(fun(z), dtype=complex) for z in etas])
    shape = values.shape[1:]
    flat = values.reshape(len(etas), -1)
    scale = np.max(np.abs(etas))
    V = np.vander(etas / scale, degree + 1, increasing=True)
    sol, *_ = np.linalg.lstsq(V, flat, rcond=None)
    resid = np.max(np.abs(V @ sol - flat)) / max(np.max(np.abs(flat)), 1e-300)
    coeffs = [sol[k].reshape(shape) / scale**k for k in range(degree + 1)]
    return coeffs, float(resid)


def leading_ratio_rate(fun: Callable[[complex], np.ndarray], target: np.ndarray, power: int,
                       etas: Sequence[float] = (1e-2, 1e-3, 1e-4)) -> tuple[list[float], list[float]]:
    """Errors of ``fun(η)/η^power`` against ``target`` and the observed orders.

    The observed order between consecutive samples is
    ``log(err_i / err_{i+1}) / log(η_i / η_{i+1})``; it should be close to 1.
    """
    target = np.asarray(target)
    scale = max(np.max(np.abs(target)), 1e-300)
    errs = [float(np.max(np.abs(np.asarray(fun(e)) / e**power - target)) / scale) for e in etas]
    rates = [float(np.log(errs[i] / errs[i + 1]) / np.log(etas[i] / etas[i + 1]))
             for i in range(len(etas) - 1)]
    return errs, rates
