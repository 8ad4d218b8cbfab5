"""Boundary K-matrices: general solutions, their spectra and joint triangularization.

Two parameter containers are used:

* :class:`BoundaryParams` holds the general left/right solutions, with
  ``K~-(λ) = ξ- + λ [[-1, ψ~-], [φ~-, 1]]`` and
  ``K~+(λ) = ξ+ - (λ+η) [[-1, ψ~+], [φ~+, 1]]``.
* :class:`TriangularBoundary` holds the upper-triangular pair
  ``K-(λ) = [[ξ- - λν-, λψ-], [0, ξ- + λν-]]`` and
  ``K+(λ) = [[ξ+ + (λ+η)ν+, -ψ+(λ+η)], [0, ξ+ - (λ+η)ν+]]``.

Both expose ``k_minus(lam)`` and ``k_plus(lam, eta)`` so the Sklyanin
machinery accepts either.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryConditionError, DomainError
from .lattice import yang_R
from .tensor import Operator, aux, relative_residual

__all__ = [
    "COND_TOL",
    "BoundaryParams",
    "TriangularBoundary",
    "GaudinBoundary",
    "CotriangularCheck",
    "KDiagonalization",
    "k_minus_general",
    "k_plus_general",
    "reflection_residual",
    "dual_reflection_residual",
    "check_cotriangularizable",
    "triangularize",
    "similarity_matrix",
    "diagonalize_k_minus",
    "jordan_form_k_minus",
    "gaudin_boundary",
    "normalization_defect",
    "sample_cotriangularizable",
]

COND_TOL = 1e-10


@dataclass(frozen=True)
class BoundaryParams:
    """General reflection-matrix parameters for both ends of the chain."""

    xi_minus: complex = 1.0
    phi_tilde_minus: complex = 0.0
    psi_tilde_minus: complex = 0.0
    xi_plus: complex = 1.0
    phi_tilde_plus: complex = 0.0
    psi_tilde_plus: complex = 0.0

    @property
    def nu_minus(self) -> complex:
        return cmath.sqrt(1 + self.phi_tilde_minus * self.psi_tilde_minus)

    @property
    def nu_plus(self) -> complex:
        return cmath.sqrt(1 + self.phi_tilde_plus * self.psi_tilde_plus)

    def k_minus(self, lam: complex) -> np.ndarray:
        return k_minus_general(lam, self)

    def k_plus(self, lam: complex, eta: complex) -> np.ndarray:
        return k_plus_general(lam, self, eta)


@dataclass(frozen=True)
class TriangularBoundary:
    """Upper-triangular K-/K+ pair, optionally with the similarity matrix used."""

    xi_minus: complex
    nu_minus: complex
    psi_minus: complex
    xi_plus: complex
    nu_plus: complex
    psi_plus: complex
    M: np.ndarray | None = field(default=None, compare=False)

    def k_minus(self, lam: complex) -> np.ndarray:
        return np.array(
            [[self.xi_minus - lam * self.nu_minus, lam * self.psi_minus],
             [0.0, self.xi_minus + lam * self.nu_minus]],
            dtype=complex,
        )

    def k_plus(self, lam: complex, eta: complex) -> np.ndarray:
        x = lam + eta
        return np.array(
            [[self.xi_plus + x * self.nu_plus, -self.psi_plus * x],
             [0.0, self.xi_plus - x * self.nu_plus]],
            dtype=complex,
        )

    @property
    def is_diagonal(self) -> bool:
        return self.psi_minus == 0 and self.psi_plus == 0


@dataclass(frozen=True)
class GaudinBoundary:
    """Single triangular K-matrix ``[[ξ-λν, λψ], [0, ξ+λν]]`` shared by both ends."""

    xi: complex
    nu: complex
    psi: complex

    def k(self, lam: complex) -> np.ndarray:
        return np.array(
            [[self.xi - lam * self.nu, lam * self.psi], [0.0, self.xi + lam * self.nu]],
            dtype=complex,
        )

    def as_triangular(self) -> TriangularBoundary:
        return TriangularBoundary(self.xi, self.nu, self.psi, self.xi, self.nu, self.psi)


@dataclass(frozen=True)
class CotriangularCheck:
    satisfied: bool
    defect: complex


@dataclass(frozen=True)
class KDiagonalization:
    U: np.ndarray
    eigenvalues: tuple[complex, complex]
    # False when U is not the closed form with first row (ψ~, ψ~)
    standard_form: bool


def k_minus_general(lam: complex, p: BoundaryParams) -> np.ndarray:
    return np.array(
        [[p.xi_minus - lam, p.psi_tilde_minus * lam],
         [p.phi_tilde_minus * lam, p.xi_minus + lam]],
        dtype=complex,
    )


def k_plus_general(lam: complex, p: BoundaryParams, eta: complex) -> np.ndarray:
    x = lam + eta
    return np.array(
        [[p.xi_plus + x, -p.psi_tilde_plus * x],
         [-p.phi_tilde_plus * x, p.xi_plus - x]],
        dtype=complex,
    )


def _K_op(K: np.ndarray, space) -> Operator:
    return Operator(K, (space,))


def reflection_residual(lam: complex, mu: complex, k_minus, eta: complex) -> float:
    """Residual of ``R12(λ-μ) K1(λ) R21(λ+μ) K2(μ) = K2(μ) R12(λ+μ) K1(λ) R21(λ-μ)``.

    ``k_minus`` is a callable ``λ -> 2x2 array``.
    """
    v1, v2 = aux(1), aux(2)
    K1 = _K_op(k_minus(lam), v1)
    K2 = _K_op(k_minus(mu), v2)
    R12 = lambda x: yang_R(x, eta, (v1, v2))
    R21 = lambda x: yang_R(x, eta, (v2, v1))
    lhs = R12(lam - mu) @ K1 @ R21(lam + mu) @ K2
    rhs = K2 @ R12(lam + mu) @ K1 @ R21(lam - mu)
    return relative_residual(lhs.reorder((v1, v2)), rhs.reorder((v1, v2)))


def dual_reflection_residual(lam: complex, mu: complex, k_plus, eta: complex) -> float:
    """Residual of the dual reflection equation; ``k_plus`` is ``λ -> 2x2 array``."""
    v1, v2 = aux(1), aux(2)
    K1 = _K_op(k_plus(lam), v1)
    K2 = _K_op(k_plus(mu), v2)
    R12 = lambda x: yang_R(x, eta, (v1, v2))
    R21 = lambda x: yang_R(x, eta, (v2, v1))
    s = -lam - mu - 2 * eta
    lhs = R12(mu - lam) @ K1 @ R21(s) @ K2
    rhs = K2 @ R12(s) @ K1 @ R21(mu - lam)
    return relative_residual(lhs.reorder((v1, v2)), rhs.reorder((v1, v2)))


def check_cotriangularizable(p: BoundaryParams, tol: float = COND_TOL) -> CotriangularCheck:
    """Evaluate the condition for a single constant matrix to triangularize both K's."""
    fm, pm = p.phi_tilde_minus, p.psi_tilde_minus
    fp, pp = p.phi_tilde_plus, p.psi_tilde_plus
    defect = (fm * pp - fp * pm) ** 2 - 4 * (fm - fp) * (pm - pp)
    return CotriangularCheck(abs(defect) <= tol, complex(defect))


def similarity_matrix(p: BoundaryParams) -> np.ndarray:
    """``M = [[-1-ν-, φ~-], [φ~-, -1-ν-]]``; its first column is an eigenvector of K~-."""
    nu = p.nu_minus
    f = p.phi_tilde_minus
    return np.array([[-1 - nu, f], [f, -1 - nu]], dtype=complex)


def triangularize(p: BoundaryParams, eta: complex = 1.0, tol: float = COND_TOL) -> TriangularBoundary:
    """Bring both general K-matrices to upper-triangular form with one constant ``M``.

    ``ν-`` is the principal square root. The sign of ``ν+`` is the one that makes
    the transformed K+ take the displayed triangular form; it equals
    ``±sqrt(1 + φ~+ψ~+)`` depending on which eigenvector ``M`` selects.
    ``eta`` only sets the spectral point used for the consistency check.
    """
    check = check_cotriangularizable(p, tol)
    if not check.satisfied:
        raise BoundaryConditionError(
            f"parameters violate the co-triangularizability condition (defect {check.defect:.3g})"
        )
    M = similarity_matrix(p)
    if abs(np.linalg.det(M)) < tol:
        raise BoundaryConditionError("similarity matrix is singular: (1+ν-)^2 = (φ~-)^2")
    if abs(p.nu_minus) < tol:
        raise BoundaryConditionError("ν- = 0 (Jordan case) is not supported for the joint form")
    Minv = np.linalg.inv(M)
    # constant parts: K~-(λ) = ξ- + λ X-,  K~+(λ) = ξ+ - (λ+η) X+
    Xm = np.array([[-1, p.psi_tilde_minus], [p.phi_tilde_minus, 1]], dtype=complex)
    Xp = np.array([[-1, p.psi_tilde_plus], [p.phi_tilde_plus, 1]], dtype=complex)
    Ym = Minv @ Xm @ M
    Yp = Minv @ Xp @ M
    scale = max(1.0, np.abs(Xp).max())
    if abs(Yp[1, 0]) > 1e-9 * scale:
        raise BoundaryConditionError(
            "K+ is not triangularized by M: the condition holds on the other square-root branch"
        )
    nu_minus = -Ym[0, 0]
    psi_minus = Ym[0, 1]
    nu_plus = -Yp[0, 0]
    psi_plus = Yp[0, 1]
    tb = TriangularBoundary(
        complex(p.xi_minus), complex(nu_minus), complex(psi_minus),
        complex(p.xi_plus), complex(nu_plus), complex(psi_plus), M,
    )
    lam = 0.37 + 0.11j
    for K_t, K_g in ((tb.k_minus(lam), p.k_minus(lam)), (tb.k_plus(lam, eta), p.k_plus(lam, eta))):
        if relative_residual(K_t, Minv @ K_g @ M) > 1e-9:
            raise BoundaryConditionError("triangular form does not reproduce M^-1 K M")
    return tb


def diagonalize_k_minus(p: BoundaryParams, lam: complex | None = None) -> KDiagonalization:
    """Eigenvector matrix ``U`` with ``U^-1 K~-(λ) U = diag(ξ- - λν-, ξ- + λν-)``.

    For ``ψ~- ≠ 0`` the closed form ``U = [[ψ~-, ψ~-], [1-ν-, 1+ν-]]`` is used.
    For ``ψ~- = 0, φ~- ≠ 0`` an alternative eigenvector matrix is built and
    flagged with ``standard_form=False``.
    """
    nu = p.nu_minus
    if abs(nu) < COND_TOL:
        raise DomainError("ν- = 0: K- is not diagonalizable, use jordan_form_k_minus")
    f, s = p.phi_tilde_minus, p.psi_tilde_minus
    if s != 0:
        U = np.array([[s, s], [1 - nu, 1 + nu]], dtype=complex)
        standard_form = True
    elif f != 0:
        # ν = 1 here; columns are eigenvectors of [[-1, 0], [φ~, 1]] for -1 and +1
        U = np.array([[2, 0], [-f, 1]], dtype=complex)
        standard_form = False
    else:
        U = np.eye(2, dtype=complex)
        standard_form = False
    lam = 1.0 if lam is None else lam
    return KDiagonalization(U, (p.xi_minus - lam * nu, p.xi_minus + lam * nu), standard_form)


def jordan_form_k_minus(p: BoundaryParams) -> np.ndarray:
    """``U = [[ψ~-, 0], [1, -φ~-]]`` bringing a ν- = 0 matrix to Jordan form.

    ``U^-1 K-(λ) U = [[ξ-, -λφ~-], [0, ξ-]]``.
    """
    if abs(p.nu_minus) > COND_TOL:
        raise DomainError("ν- ≠ 0: use diagonalize_k_minus")
    return np.array([[p.psi_tilde_minus, 0], [1, -p.phi_tilde_minus]], dtype=complex)


def gaudin_boundary(tb: TriangularBoundary, tol: float = 1e-12) -> GaudinBoundary:
    """Collapse a matched left/right triangular pair to one ``(ξ, ν, ψ)`` triple."""
    pairs = {
        "xi": (tb.xi_minus, tb.xi_plus),
        "nu": (tb.nu_minus, tb.nu_plus),
        "psi": (tb.psi_minus, tb.psi_plus),
    }
    bad = {k: abs(a - b) for k, (a, b) in pairs.items() if abs(a - b) > tol}
    if bad:
        raise BoundaryConditionError(f"left/right boundary parameters differ: {bad}")
    return GaudinBoundary(tb.xi_minus, tb.nu_minus, tb.psi_minus)


def normalization_defect(gb: GaudinBoundary, lam: complex, etas=(1e-2, 5e-3, 2.5e-3)) -> float:
    """Distance of ``lim_{η→0} K+(λ)K-(λ)`` from ``(ξ²-λ²ν²)·1``.

    The limit is taken by Richardson extrapolation over three η values.
    """
    tb = gb.as_triangular()
    vals = [tb.k_plus(lam, e) @ tb.k_minus(lam) for e in etas]
    h = np.asarray(etas)
    # quadratic through the three samples, evaluated at η = 0
    w = [np.prod([h[j] / (h[j] - h[i]) for j in range(3) if j != i]) for i in range(3)]
    limit = sum(wi * v for wi, v in zip(w, vals))
    target = (gb.xi**2 - lam**2 * gb.nu**2) * np.eye(2)
    return float(np.abs(limit - target).max())


def sample_cotriangularizable(rng: np.random.Generator, scale: float = 1.0, attempts: int = 50) -> BoundaryParams:
    """Random general parameters obeying the co-triangularizability condition.

    ``φ~-, ψ~-, φ~+, ξ±`` are drawn at random and ``ψ~+`` is solved from the
    condition, which is quadratic in it. The root kept is one for which
    :func:`triangularize` succeeds.
    """
    c = lambda: complex(*(scale * rng.normal(size=2)))
    for _ in range(attempts):
        fm, pm, fp, xm, xp = c(), c(), c(), c(), c()
        # (fm x - fp pm)^2 - 4 (fm - fp)(pm - x) = 0
        coeffs = [fm**2, -2 * fm * fp * pm + 4 * (fm - fp), fp**2 * pm**2 - 4 * (fm - fp) * pm]
        for pp in np.roots(coeffs):
            p = BoundaryParams(xm, fm, pm, xp, fp, complex(pp))
            try:
                triangularize(p)
            except (BoundaryConditionError, DomainError):
                continue
            return p
    raise RuntimeError("could not sample co-triangularizable parameters")
