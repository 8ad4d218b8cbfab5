"""Open Gaudin model with a triangular boundary, as the ``η -> 0`` limit of the chain.

Conventions
-----------
The spin-vector contraction ``σ_0·S_m`` is the auxiliary 2×2 block operator
``[[S3_m, S-_m], [S+_m, -S3_m]]``. A boundary-conjugated spin vector is
realized in the auxiliary space: the Lax matrix uses
``K(λ) (σ_0·S_m) K(λ)^{-1}``, which is the ordering reproduced by the
``η^2`` coefficient of ``2λ t(λ) - Δ(λ)`` (see :func:`quasiclassical_check`).
Dot products of conjugated spins with ``S_n`` are defined through the trace,
``V·S_n = tr_0[(σ·V)(σ·S_n)] / 2``, which keeps the operator order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .boundary import GaudinBoundary, TriangularBoundary
from .errors import DomainError
from .expansion import ExpansionReport, cauchy_coefficients, polyfit_coefficients
from .lattice import ChainConfig, check_pole, vacuum
from .newton import damped_newton
from .sklyanin import sklyanin_determinant, transfer_matrix
from .tensor import (
    Operator, SpaceLabel, SpinRep, aux, embed_site, max_abs, relative_residual, site, spin_matrices,
)

__all__ = [
    "GaudinConfig",
    "GaudinState",
    "sigma_dot_S",
    "gaudin_lax",
    "tau",
    "gaudin_hamiltonians",
    "residue",
    "chi0",
    "chi_M",
    "gaudin_F_operator",
    "gaudin_bethe_vector",
    "gaudin_f",
    "gaudin_unwanted_prefactor",
    "gaudin_off_shell_residual",
    "solve_gaudin",
    "chain_from_gaudin",
    "quasiclassical_check",
]

COLLISION_TOL = 1e-7
ROOT_BOUND = 10.0


@dataclass(frozen=True)
class GaudinConfig:
    """Spins, inhomogeneities and the boundary ``(ξ, ν, ψ)`` of an open Gaudin model.

    Sites are indexed from 0.
    """

    spins: tuple[Fraction, ...]
    inhomogeneities: tuple[complex, ...]
    xi: complex
    nu: complex
    psi: complex

    def __init__(self, spins: Sequence, inhomogeneities: Sequence, xi: complex, nu: complex, psi: complex):
        spins = tuple(SpinRep(s).s for s in spins)
        alphas = tuple(complex(a) for a in inhomogeneities)
        if len(spins) != len(alphas) or not spins:
            raise ValueError("need one inhomogeneity per site and at least one site")
        for i, j in itertools.combinations_with_replacement(range(len(alphas)), 2):
            if i != j and abs(alphas[i] - alphas[j]) < COLLISION_TOL:
                raise ValueError(f"inhomogeneities {i} and {j} coincide")
            if abs(alphas[i] + alphas[j]) < COLLISION_TOL:
                raise ValueError(f"inhomogeneities {i} and {j} satisfy α_i = -α_j")
        object.__setattr__(self, "spins", spins)
        object.__setattr__(self, "inhomogeneities", alphas)
        object.__setattr__(self, "xi", complex(xi))
        object.__setattr__(self, "nu", complex(nu))
        object.__setattr__(self, "psi", complex(psi))

    @property
    def N(self) -> int:
        return len(self.spins)

    @property
    def site_spaces(self) -> tuple[SpaceLabel, ...]:
        return tuple(site(m, int(2 * s) + 1) for m, s in enumerate(self.spins))

    @property
    def dim(self) -> int:
        return int(np.prod([sp.dim for sp in self.site_spaces]))

    @property
    def boundary(self) -> GaudinBoundary:
        return GaudinBoundary(self.xi, self.nu, self.psi)

    def k(self, lam: complex) -> np.ndarray:
        return self.boundary.k(lam)

    def k_inv(self, lam: complex) -> np.ndarray:
        check_pole(self.xi**2 - lam**2 * self.nu**2, "K(λ)^{-1} at ξ² = λ²ν²")
        return np.linalg.inv(self.k(lam))


def _site_spin_ops(m: int, gc) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(embed_site(x, m, gc).matrix for x in spin_matrices(gc.spins[m]))


def sigma_dot_S(m: int, gc, space: SpaceLabel = aux(0)) -> Operator:
    """``σ_0·S_m`` as an operator on ``space ⊗ H``."""
    S3, Sp, Sm = _site_spin_ops(m, gc)
    return Operator(np.block([[S3, Sm], [Sp, -S3]]), (space,) + gc.site_spaces)


def _conj(g: np.ndarray, X: Operator) -> Operator:
    """``g X g^{-1}`` with ``g`` acting on the auxiliary factor of ``X``."""
    d = X.dim // 2
    G = np.kron(g, np.eye(d))
    Gi = np.kron(np.linalg.inv(g), np.eye(d))
    return Operator(G @ X.matrix @ Gi, X.spaces)


def _aux_trace(X: Operator) -> np.ndarray:
    d = X.dim // 2
    return X.matrix[:d, :d] + X.matrix[d:, d:]


def _check_lambda(lam, gc):
    for a in gc.inhomogeneities:
        check_pole(lam - a, "Gaudin Lax at λ = α_m")
        check_pole(lam + a, "Gaudin Lax at λ = -α_m")


def gaudin_lax(lam: complex, gc: GaudinConfig, space: SpaceLabel = aux(0)) -> Operator:
    """``𝓛(λ) = Σ_m σ·S_m/(λ-α_m) + K(λ)(σ·S_m)K(λ)^{-1}/(λ+α_m)``."""
    _check_lambda(lam, gc)
    K = gc.k(lam)
    gc.k_inv(lam)
    out = None
    for m, a in enumerate(gc.inhomogeneities):
        X = sigma_dot_S(m, gc, space)
        term = X / (lam - a) + _conj(K, X) / (lam + a)
        out = term if out is None else out + term
    return out


def tau(lam: complex, gc: GaudinConfig) -> Operator:
    """Generating function ``τ(λ) = tr_0 𝓛(λ)^2``."""
    L = gaudin_lax(lam, gc)
    return Operator(_aux_trace(L @ L), gc.site_spaces)


def _dot(Vs: Operator, Ws: Operator) -> np.ndarray:
    # V·W from auxiliary contractions σ·V and σ·W, operator order kept
    return 0.5 * _aux_trace(Vs @ Ws)


def gaudin_hamiltonians(gc: GaudinConfig, reading: str = "symmetric") -> tuple[list[Operator], list[Operator]]:
    """Hamiltonians ``H_m`` and ``H~_m`` (residues of ``τ/4`` at ``λ = ±α_m``).

    ``H_m`` pairs ``S_n`` with ``S_m`` conjugated by ``K(α_m)``;
    ``H~_m`` pairs ``S_n`` with ``S_m`` conjugated by ``K(-α_m)``, with the
    opposite overall sign that the residue at ``-α_m`` carries.

    ``reading="mixed"`` instead builds ``H~_m`` with ``S_n`` conjugated in
    the first product and a positive overall sign; it is kept for comparison
    and does not reproduce the residue.
    """
    alphas = gc.inhomogeneities
    N = gc.N
    sig = [sigma_dot_S(m, gc) for m in range(N)]
    spaces = gc.site_spaces
    H, Ht = [], []
    for m in range(N):
        am = alphas[m]
        bulk = sum(_dot(sig[m], sig[n]) / (am - alphas[n]) for n in range(N) if n != m) if N > 1 else 0
        Kp, Km = gc.k(am), gc.k(-am)
        gc.k_inv(am), gc.k_inv(-am)  # raises if K is singular at ±α_m
        Vp = _conj(np.linalg.inv(Kp), sig[m])
        h = bulk + sum((_dot(Vp, sig[n]) + _dot(sig[n], Vp)) / (2 * (am + alphas[n])) for n in range(N))
        H.append(Operator(h, spaces))
        if reading == "mixed":
            Vm_m = _conj(np.linalg.inv(Km), sig[m])
            ht = bulk + sum(
                (_dot(_conj(np.linalg.inv(Km), sig[n]), sig[n]) + _dot(sig[n], Vm_m)) / (2 * (am + alphas[n]))
                for n in range(N)
            )
        elif reading == "symmetric":
            Vm = _conj(Km, sig[m])
            ht = -(bulk + sum((_dot(Vm, sig[n]) + _dot(sig[n], Vm)) / (2 * (am + alphas[n])) for n in range(N)))
        else:
            raise ValueError(f"unknown reading {reading!r}")
        Ht.append(Operator(ht + 0 * np.eye(gc.dim), spaces))
    return H, Ht


def residue(lam0: complex, gc: GaudinConfig, offset: float = 1e-6) -> np.ndarray:
    """Two-point Richardson estimate of ``lim (λ-λ0) τ(λ)`` as ``λ -> λ0``.

    ``(λ-λ0)τ(λ)`` is analytic near ``λ0`` up to a double-pole term, so the
    symmetric combination of ``λ0 ± offset`` cancels it and the first-order
    error.
    """
    h = offset
    plus = h * tau(lam0 + h, gc).matrix
    minus = -h * tau(lam0 - h, gc).matrix
    return 0.5 * (plus + minus)


def _spin_sums(lam, gc):
    return sum(float(s) * (1 / (lam - a) + 1 / (lam + a)) for s, a in zip(gc.spins, gc.inhomogeneities))


def _site_block(lam, gc):
    out = 0j
    sp = [float(s) for s in gc.spins]
    al = gc.inhomogeneities
    for m, n in itertools.product(range(gc.N), repeat=2):
        w = sp[m] * sp[n] + (sp[m] if m == n else 0.0)
        out += w * (1 / ((lam - al[m]) * (lam - al[n])) + 2 / ((lam - al[m]) * (lam + al[n]))
                    + 1 / ((lam + al[m]) * (lam + al[n])))
    return 2 * out


def chi0(lam: complex, gc: GaudinConfig) -> complex:
    """Vacuum eigenvalue of ``τ(λ)``.

    The boundary term is ``4λν²/(ξ²-λ²ν²) Σ_m s_m(...)``; without the ``ν²``
    it agrees with ``τ(λ)Ω+`` only when ``ν² = 1``.
    """
    _check_lambda(lam, gc)
    den = gc.xi**2 - lam**2 * gc.nu**2
    check_pole(den, "χ at ξ² = λ²ν²")
    return 4 * lam * gc.nu**2 / den * _spin_sums(lam, gc) + _site_block(lam, gc)


def chi_M(lam: complex, roots: Sequence[complex], gc: GaudinConfig) -> complex:
    """Eigenvalue of ``τ(λ)`` on an on-shell Bethe vector with the given roots."""
    _check_lambda(lam, gc)
    for mu in roots:
        check_pole(lam - mu, "χ at λ = μ_j")
        check_pole(lam + mu, "χ at λ = -μ_j")
    den = gc.xi**2 - lam**2 * gc.nu**2
    check_pole(den, "χ at ξ² = λ²ν²")
    b = lam * gc.nu**2 / den
    out = -4 * lam**2 * gc.nu**4 / den**2
    roots = [complex(r) for r in roots]
    for j, k in itertools.permutations(range(len(roots)), 2):
        mj, mk = roots[j], roots[k]
        out += 2 * (1 / ((lam - mj) * (lam - mk)) + 2 / ((lam - mj) * (lam + mk)) + 1 / ((lam + mj) * (lam + mk)))
    out += _site_block(lam, gc)
    root_sum = sum(1 / (lam - m) + 1 / (lam + m) for m in roots)
    out -= 4 * (root_sum - b) * (_spin_sums(lam, gc) + b)
    return out


def _F_weight(mu, a, gc):
    return (gc.xi + mu * gc.nu) / (mu - a) + (gc.xi - mu * gc.nu) / (mu + a)


def gaudin_F_operator(mu: complex, gc: GaudinConfig) -> Operator:
    """Creation operator ``F(μ) = Σ_m w_m(μ)(ψ/ν S3_m + S-_m - ψ²/(4ν²) S+_m)``."""
    if gc.nu == 0:
        raise DomainError("ν = 0: the Gaudin creation operator is singular")
    _check_lambda(mu, gc)
    r = gc.psi / gc.nu
    out = np.zeros((gc.dim, gc.dim), dtype=complex)
    for m, a in enumerate(gc.inhomogeneities):
        S3, Sp, Sm = _site_spin_ops(m, gc)
        out += _F_weight(mu, a, gc) * (r * S3 + Sm - r**2 / 4 * Sp)
    return Operator(out, gc.site_spaces)


def _check_gaudin_roots(roots):
    for i, j in itertools.combinations(range(len(roots)), 2):
        if abs(roots[i] - roots[j]) < COLLISION_TOL or abs(roots[i] + roots[j]) < COLLISION_TOL:
            raise DomainError(f"roots {i} and {j} coincide up to sign")


def gaudin_bethe_vector(roots: Sequence[complex], gc: GaudinConfig) -> np.ndarray:
    """``φ_M = F(μ_1) ... F(μ_M) Ω+``."""
    roots = [complex(r) for r in roots]
    _check_gaudin_roots(roots)
    v = vacuum(gc)
    for mu in reversed(roots):
        v = gaudin_F_operator(mu, gc).matrix @ v
    return v


def gaudin_f(i: int, roots: Sequence[complex], gc: GaudinConfig) -> complex:
    """Left side of the Gaudin Bethe equation for root ``i``."""
    mu = complex(roots[i])
    check_pole(gc.xi + mu * gc.nu, "f at ξ + μν = 0")
    _check_lambda(mu, gc)
    pair = 0j
    for j, r in enumerate(roots):
        if j != i:
            check_pole(mu - r, "f at μ_i = μ_j")
            check_pole(mu + r, "f at μ_i = -μ_j")
            pair += 1 / (mu - r) + 1 / (mu + r)
    c = gc.xi - mu * gc.nu
    return 2 * mu * gc.nu**2 / (gc.xi + mu * gc.nu) - 2 * c * pair + 2 * c * _spin_sums(mu, gc)


def gaudin_unwanted_prefactor(lam: complex, mu: complex, gc: GaudinConfig) -> complex:
    return 4 * lam * (gc.xi + mu * gc.nu) / ((gc.xi**2 - lam**2 * gc.nu**2) * (lam**2 - mu**2))


def gaudin_off_shell_residual(lam: complex, roots: Sequence[complex], gc: GaudinConfig) -> float:
    """Relative residual of ``τ(λ)φ_M = χ_M φ_M + Σ_i c_i f_M(μ_i) φ_M(λ, {μ_j}_{j≠i})``.

    The denominator is floored by ``|τ(λ)| Π_j |F(μ_j)|``: when ``M`` exceeds
    the excitation capacity ``φ_M`` is zero up to round-off and dividing by
    ``|τ φ_M|`` alone would compare noise with noise.
    """
    roots = [complex(r) for r in roots]
    phi = gaudin_bethe_vector(roots, gc)
    T = tau(lam, gc).matrix
    lhs = T @ phi
    rhs = chi_M(lam, roots, gc) * phi
    for i, mu in enumerate(roots):
        swapped = [lam] + [r for j, r in enumerate(roots) if j != i]
        rhs = rhs + gaudin_unwanted_prefactor(lam, mu, gc) * gaudin_f(i, roots, gc) * gaudin_bethe_vector(swapped, gc)
    floor = max_abs(T) * float(np.prod([max_abs(gaudin_F_operator(mu, gc).matrix) for mu in roots]))
    return relative_residual(lhs, rhs, floor)


@dataclass
class GaudinState:
    """A converged solution of the Gaudin Bethe equations."""

    M: int
    roots: tuple[complex, ...]
    residuals: tuple[complex, ...]
    vector: np.ndarray | None = None
    null: bool = False
    iterations: int = 0

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals), default=0.0)


def _root_bound(gc) -> float:
    # f_M decays like 1/μ, so far-away points can pass the residual test
    # without being solutions; such sets are treated as roots at infinity
    scale = max([1.0] + [abs(a) for a in gc.inhomogeneities] + ([abs(gc.xi / gc.nu)] if gc.nu else []))
    return ROOT_BOUND * scale


def _gaudin_roots_valid(roots, gc, tol=COLLISION_TOL):
    if any(abs(mu) > _root_bound(gc) for mu in roots):
        return False
    for i, j in itertools.combinations(range(len(roots)), 2):
        if abs(roots[i] - roots[j]) < tol or abs(roots[i] + roots[j]) < tol:
            return False
    for mu in roots:
        if abs(gc.xi + mu * gc.nu) < tol:
            return False
        if any(abs(mu - a) < tol or abs(mu + a) < tol for a in gc.inhomogeneities):
            return False
    return True


def _canonical_gaudin(roots):
    out = []
    for z in roots:
        z = complex(z)
        if z.real < -1e-9 or (abs(z.real) <= 1e-9 and z.imag < 0):
            z = -z
        out.append(z)
    return tuple(sorted(out, key=lambda z: (round(z.real, 6), round(z.imag, 6))))


def solve_gaudin(
    M: int,
    gc: GaudinConfig,
    seeds: Sequence[Sequence[complex]] | None = None,
    n_random: int | None = None,
    rng_seed: int = 0,
    tol: float = 1e-10,
    maxiter: int = 200,
    null_tol: float = 1e-8,
) -> list[GaudinState]:
    """Solve ``f_M(μ_i; ·) = 0`` by damped Newton from explicit and random seeds.

    Solutions are deduplicated up to permutations and ``μ -> -μ``. Sets whose
    Bethe vector vanishes (e.g. a root at ``μ = 0``) are kept with ``null=True``.
    """
    if M == 0:
        return [GaudinState(0, (), (), vacuum(gc))]
    rng = np.random.default_rng(rng_seed)
    n_random = 150 * M if n_random is None else n_random
    radius = max(1.0, 2 * max(abs(a) for a in gc.inhomogeneities) + (2 * abs(gc.xi / gc.nu) if gc.nu else 0.0))
    all_seeds = [np.asarray(s, dtype=complex) for s in (seeds or [])]
    for _ in range(n_random):
        r = radius * np.sqrt(rng.uniform(size=M))
        all_seeds.append(r * np.exp(1j * rng.uniform(0, 2 * np.pi, size=M)))

    def fun(z):
        return np.array([gaudin_f(i, z, gc) for i in range(M)])

    def cleared(z):
        # denominator-free form: no poles for Newton to fall into
        out = []
        for i in range(M):
            d = gc.xi + z[i] * gc.nu
            for a in gc.inhomogeneities:
                d *= (z[i] - a) * (z[i] + a)
            for j in range(M):
                if j != i:
                    d *= (z[i] - z[j]) * (z[i] + z[j])
            out.append(gaudin_f(i, z, gc) * d)
        return np.array(out)

    valid = lambda z: _gaudin_roots_valid(z, gc)
    found: list[GaudinState] = []
    for s in all_seeds:
        if len(s) != M or not valid(s):
            continue
        pre = damped_newton(cleared, s, tol=tol * 1e-2, maxiter=maxiter, valid=valid)
        if not valid(pre.x):
            continue
        res = damped_newton(fun, pre.x, tol=tol, maxiter=maxiter, valid=valid)
        if not res.converged:
            continue
        key = _canonical_gaudin(res.x)
        if any(all(abs(x - y) < 1e-6 for x, y in zip(key, st.roots)) for st in found):
            continue
        vec = gaudin_bethe_vector(key, gc)
        scale = np.prod([max(1.0, max(abs(_F_weight(mu, a, gc)) for a in gc.inhomogeneities)) for mu in key])
        null = bool(np.linalg.norm(vec) <= null_tol * scale)
        found.append(GaudinState(M, key, tuple(complex(v) for v in fun(np.asarray(key))), vec, null,
                                 res.iterations))
    found.sort(key=lambda st: [(round(z.real, 8), round(z.imag, 8)) for z in st.roots])
    return found


def chain_from_gaudin(gc: GaudinConfig, eta: complex) -> tuple[ChainConfig, TriangularBoundary]:
    """Spin chain whose ``η -> 0`` limit is the given Gaudin model."""
    return ChainConfig(gc.spins, gc.inhomogeneities, eta), gc.boundary.as_triangular()


def _safe_radius(lam, gc, extra=()):
    # distance in η to the nearest singularity of the chain quantities, shrunk
    cands = [abs(2 * lam)] + [abs(lam + a) for a in gc.inhomogeneities]
    cands += [abs(x) for x in extra]
    return 0.1 * min(c for c in cands if c > 0)


def quasiclassical_check(
    lam: complex,
    gc: GaudinConfig,
    etas: Sequence[float] = tuple(np.geomspace(1e-2, 1e-4, 9)),
    n_points: int = 32,
    radius: float | None = None,
    tol_scalar: float = 1e-6,
    tol_tau: float = 1e-5,
) -> ExpansionReport:
    """Expand ``2λt(λ) - Δ(λ)`` in ``η`` and compare with the Gaudin model.

    The expected coefficients are ``c0 = 2λ(ξ²-λ²ν²)·1``, ``c1 = (ξ²-3λ²ν²)·1``
    and ``c2 = λ((ξ²-λ²ν²)τ(λ) - ν²/2·1)``. Coefficients come from a contour
    integral in complex ``η``; a degree-4 least-squares fit on ``etas`` gives
    an independent estimate of ``c2``.
    """
    xi, nu = gc.xi, gc.nu
    den = xi**2 - lam**2 * nu**2
    check_pole(den, "expansion at ξ² = λ²ν²")
    I = np.eye(gc.dim)
    tb = gc.boundary.as_triangular()

    def X(eta):
        cfg = ChainConfig(gc.spins, gc.inhomogeneities, eta)
        return 2 * lam * transfer_matrix(lam, cfg, tb).matrix - sklyanin_determinant(lam, cfg, tb).matrix

    r = _safe_radius(lam, gc) if radius is None else radius
    c = cauchy_coefficients(X, 2, r, n_points)
    fit, fit_res = polyfit_coefficients(X, etas, 4)
    tau_direct = tau(lam, gc).matrix
    tau_extracted = (c[2] / lam + nu**2 / 2 * I) / den
    rel = lambda a, b: float(max_abs(a - b) / max(max_abs(b), 1e-300))
    checks = {
        "c0": (rel(c[0], 2 * lam * den * I), tol_scalar),
        "c1": (rel(c[1], (xi**2 - 3 * lam**2 * nu**2) * I), tol_scalar),
        "tau": (rel(tau_extracted, tau_direct), tol_tau),
        "fit_c2": (rel(fit[2], c[2]), tol_tau),
    }
    return ExpansionReport(tuple(etas), c, fit[:3], fit_res, checks["fit_c2"][0], checks)
