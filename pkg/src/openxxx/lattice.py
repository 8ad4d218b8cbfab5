"""Yang R-matrix, Lax operators and the two bulk monodromy matrices."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError
from .tensor import (
    Operator,
    SpaceLabel,
    SpinRep,
    aux,
    identity,
    kron,
    max_abs,
    permutation,
    relative_residual,
    site,
    spin_matrices,
)

__all__ = [
    "POLE_TOL",
    "ChainConfig",
    "MonodromyBlocks",
    "yang_R",
    "verify_ybe",
    "r_matrix_properties",
    "lax",
    "monodromy_T",
    "monodromy_T_tilde",
    "verify_rtt",
    "verify_mixed_rtt",
    "vacuum",
    "a_fn",
    "d_fn",
    "a_tilde_fn",
    "d_tilde_fn",
]

# spectral points closer than this to a pole are rejected
POLE_TOL = 1e-8


def check_pole(value: complex, what: str, tol: float = POLE_TOL) -> None:
    if abs(value) < tol:
        raise DomainError(f"{what} is singular (|{value:.3g}| < {tol:g})")


@dataclass(frozen=True)
class ChainConfig:
    """Inhomogeneous open chain: per-site spins, inhomogeneities and ``eta``.

    Sites are indexed from 0 in the Python API.
    """

    spins: tuple[Fraction, ...]
    inhomogeneities: tuple[complex, ...]
    eta: complex

    def __init__(self, spins: Sequence, inhomogeneities: Sequence, eta: complex):
        spins = tuple(SpinRep(s).s for s in spins)
        alphas = tuple(complex(a) for a in inhomogeneities)
        if len(spins) != len(alphas):
            raise ValueError("spins and inhomogeneities must have the same length")
        if not spins:
            raise ValueError("a chain needs at least one site")
        eta = complex(eta)
        if eta == 0:
            raise ValueError("eta must be nonzero for the spin chain; use the gaudin module")
        object.__setattr__(self, "spins", spins)
        object.__setattr__(self, "inhomogeneities", alphas)
        object.__setattr__(self, "eta", eta)

    @property
    def N(self) -> int:
        return len(self.spins)

    @property
    def site_spaces(self) -> tuple[SpaceLabel, ...]:
        return tuple(site(m, int(2 * s) + 1) for m, s in enumerate(self.spins))

    @property
    def dim(self) -> int:
        return int(np.prod([sp.dim for sp in self.site_spaces]))

    def with_eta(self, eta: complex) -> "ChainConfig":
        return ChainConfig(self.spins, self.inhomogeneities, eta)


@dataclass(frozen=True)
class MonodromyBlocks:
    """A monodromy matrix on ``aux ⊗ H`` and its four operator entries on ``H``."""

    operator: Operator
    aux: SpaceLabel

    def _block(self, i, j) -> Operator:
        rest = tuple(sp for sp in self.operator.spaces if sp != self.aux)
        return Operator(self.operator.blocks(self.aux)[i, j], rest)

    @property
    def A(self) -> Operator:
        return self._block(0, 0)

    @property
    def B(self) -> Operator:
        return self._block(0, 1)

    @property
    def C(self) -> Operator:
        return self._block(1, 0)

    @property
    def D(self) -> Operator:
        return self._block(1, 1)


def yang_R(lam: complex, eta: complex, spaces=(aux(0), aux(1))) -> Operator:
    """``R(λ) = λ·1 + η·P`` on two auxiliary spaces."""
    a, b = spaces
    return lam * identity((a, b)) + eta * permutation(a, b)


def verify_ybe(lam: complex, mu: complex, eta: complex) -> float:
    """Relative max-norm residual of the Yang-Baxter equation on ``C^2⊗C^2⊗C^2``."""
    v1, v2, v3 = aux(1), aux(2), aux(3)
    R12 = yang_R(lam - mu, eta, (v1, v2))
    R13 = yang_R(lam, eta, (v1, v3))
    R23 = yang_R(mu, eta, (v2, v3))
    lhs = (R12 @ R13 @ R23).reorder((v1, v2, v3))
    rhs = (R23 @ R13 @ R12).reorder((v1, v2, v3))
    return relative_residual(lhs, rhs, max_abs(R12) * max_abs(R13) * max_abs(R23))


def r_matrix_properties(lam: complex, eta: complex) -> dict[str, float]:
    """Residuals of unitarity, parity, temporal invariance and crossing symmetry.

    Crossing is checked in the form ``R(λ) = -J_1 R^{t_2}(-λ-η) J_1^{-1}`` with
    ``J = [[0, 1], [-1, 0]]``. Without the minus sign the relation cannot hold:
    conjugation preserves the spectrum ``{x+2η, x, x, x}`` of ``R^{t_2}(x)``,
    which never equals the spectrum ``{λ+η, λ+η, λ+η, λ-η}`` of ``R(λ)``.
    """
    v1, v2 = aux(1), aux(2)
    R12 = yang_R(lam, eta, (v1, v2))
    R21_neg = yang_R(-lam, eta, (v2, v1))
    out = {}
    out["unitarity"] = relative_residual(
        R12 @ R21_neg, (eta**2 - lam**2) * identity((v1, v2)), max_abs(R12) * max_abs(R21_neg)
    )
    out["parity"] = relative_residual(yang_R(lam, eta, (v2, v1)).reorder((v1, v2)), R12)
    out["temporal"] = relative_residual(Operator(R12.matrix.T, R12.spaces), R12)
    J = np.array([[0, 1], [-1, 0]], dtype=complex)
    J1 = kron(Operator(J, (v1,)), identity((v2,)))
    J1inv = kron(Operator(np.linalg.inv(J), (v1,)), identity((v2,)))
    crossed = J1 @ yang_R(-lam - eta, eta, (v1, v2)).transpose_on(v2) @ J1inv
    out["crossing"] = relative_residual(-1 * crossed, R12)
    return out


def _spin_ops(s):
    return spin_matrices(s)


def lax(lam: complex, m: int, config: ChainConfig, space: SpaceLabel = aux(0)) -> Operator:
    """Lax operator ``L_{0m}(λ) = 1 + (η/λ) σ_0·S_m`` on ``space ⊗ site m``."""
    check_pole(lam, f"Lax operator at site {m}")
    eta = config.eta
    S3, Sp, Sm = _spin_ops(config.spins[m])
    one = np.eye(S3.shape[0])
    mat = np.block([[lam * one + eta * S3, eta * Sm], [eta * Sp, lam * one - eta * S3]]) / lam
    return Operator(mat, (space, config.site_spaces[m]))


def _ordered_product(factors: list[Operator], spaces) -> Operator:
    out = identity(spaces)
    for f in factors:
        out = out @ f.expand(spaces)
    return out


def monodromy_T(lam: complex, config: ChainConfig, space: SpaceLabel = aux(0)) -> MonodromyBlocks:
    """``T(λ) = L_{0N}(λ-α_N) ... L_{01}(λ-α_1)``."""
    spaces = (space,) + config.site_spaces
    factors = [
        lax(lam - config.inhomogeneities[m], m, config, space) for m in reversed(range(config.N))
    ]
    return MonodromyBlocks(_ordered_product(factors, spaces), space)


def monodromy_T_tilde(
    lam: complex, config: ChainConfig, space: SpaceLabel = aux(0)
) -> MonodromyBlocks:
    """``T~(λ) = L_{01}(λ+α_1+η) ... L_{0N}(λ+α_N+η)``."""
    spaces = (space,) + config.site_spaces
    factors = [
        lax(lam + config.inhomogeneities[m] + config.eta, m, config, space)
        for m in range(config.N)
    ]
    return MonodromyBlocks(_ordered_product(factors, spaces), space)


def verify_rtt(lam: complex, mu: complex, config: ChainConfig) -> float:
    """Residual of ``R_{00'}(λ-μ) T_0(λ) T_{0'}(μ) = T_{0'}(μ) T_0(λ) R_{00'}(λ-μ)``."""
    a, b = aux(0), aux(1)
    R = yang_R(lam - mu, config.eta, (a, b))
    T0 = monodromy_T(lam, config, a).operator
    T1 = monodromy_T(mu, config, b).operator
    return relative_residual(R @ T0 @ T1, T1 @ T0 @ R)


def verify_mixed_rtt(lam: complex, mu: complex, config: ChainConfig) -> dict[str, float]:
    """Residuals of the two mixed relations between ``T`` and ``T~``."""
    a, b = aux(0), aux(1)
    eta = config.eta
    T0 = monodromy_T(lam, config, a).operator
    Tt1 = monodromy_T_tilde(mu, config, b).operator
    R_sum = yang_R(lam + mu, eta, (a, b))
    first = relative_residual(Tt1 @ R_sum @ T0, T0 @ R_sum @ Tt1)
    Tt0 = monodromy_T_tilde(lam, config, a).operator
    R_diff = yang_R(mu - lam, eta, (a, b))
    second = relative_residual(Tt0 @ Tt1 @ R_diff, R_diff @ Tt1 @ Tt0)
    return {"tTRT": first, "tTtTR": second}


def vacuum(config) -> np.ndarray:
    """The reference state: the highest-weight vector on every site."""
    v = np.zeros(int(np.prod([sp.dim for sp in config.site_spaces])), dtype=complex)
    v[0] = 1.0
    return v


def _site_product(config, lam, shift, sign) -> complex:
    out = 1.0 + 0j
    eta = config.eta
    for s, alpha in zip(config.spins, config.inhomogeneities):
        den = lam + shift(alpha)
        check_pole(den, "vacuum eigenvalue")
        out *= (den + sign * eta * float(s)) / den
    return out


def a_fn(lam: complex, config: ChainConfig) -> complex:
    return _site_product(config, lam, lambda a: -a, +1)


def d_fn(lam: complex, config: ChainConfig) -> complex:
    return _site_product(config, lam, lambda a: -a, -1)


def a_tilde_fn(lam: complex, config: ChainConfig) -> complex:
    return _site_product(config, lam, lambda a: a + config.eta, +1)


def d_tilde_fn(lam: complex, config: ChainConfig) -> complex:
    return _site_product(config, lam, lambda a: a + config.eta, -1)
