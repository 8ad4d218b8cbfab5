"""Bethe vectors, eigenvalues and Bethe equations for triangular boundaries.

A Bethe vector with roots ``μ_1..μ_M`` is a sum over all subsets ``S`` of the
roots::

    Ψ_M = Σ_S  b(S^c ; S) · Π_{i∈S} ℬ(μ_i) Ω+

where ``b(∅ ; ·) = 1`` and, for ``k = |S^c| ≥ 1`` removed roots ``x_1..x_k``
and kept roots ``y``,

    b(x ; y) = (1/k!) Σ_{ρ∈S_k} Π_{l=1..k} b1_{M-l+1}(x_ρ(l) ; x_ρ(l+1..k) ∪ y)

with the single-root coefficient ``b1_M(x ; rest)`` (``len(rest) = M-1``).
The coefficient attached to a product of creation operators is always the
one whose first arguments are exactly the roots missing from that product.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boundary import TriangularBoundary
from .errors import DomainError
from .lattice import ChainConfig, check_pole, vacuum
from .newton import damped_newton
from .sklyanin import kappas, sklyanin_monodromy, transfer_matrix, vacuum_eigenvalues
from .tensor import max_abs, relative_residual

__all__ = [
    "COLLISION_TOL",
    "BetheCoefficients",
    "BetheState",
    "vacuum_eigenvalues",
    "b1",
    "b_single",
    "b_coefficients",
    "bethe_vector",
    "lambda_M",
    "bethe_F",
    "unwanted_prefactor",
    "off_shell_residual",
    "roots_valid",
    "solve_bethe",
    "spectral_match",
    "continue_roots",
]

COLLISION_TOL = 1e-7
# root sets beyond this multiple of the parameter scale count as roots at infinity
ROOT_BOUND = 10.0


def _f(x, y, eta):
    return (x + y) * (x - y - eta) / ((x - y) * (x + y + eta))


def _g(x, y, eta):
    return (x - y + eta) * (x + y + 2 * eta) / ((x - y) * (x + y + eta))


def _check_roots(roots: Sequence[complex], eta: complex) -> None:
    for i, j in itertools.combinations(range(len(roots)), 2):
        if abs(roots[i] - roots[j]) < COLLISION_TOL:
            raise DomainError(f"roots {i} and {j} coincide")
        if abs(roots[i] + roots[j] + eta) < COLLISION_TOL:
            raise DomainError(f"roots {i} and {j} are reflections of each other (μi+μj+η=0)")


def b_single(x: complex, others: Sequence[complex], config: ChainConfig, tb: TriangularBoundary,
             vac: tuple[complex, complex] | None = None) -> complex:
    """``b1_M(x ; others)`` with ``M = 1 + len(others)``."""
    eta = config.eta
    if tb.nu_plus == 0:
        raise DomainError("ν+ = 0: Bethe vector coefficients are singular")
    check_pole(2 * x + eta, "b-coefficient at 2μ+η = 0")
    al, dh = vacuum_eigenvalues(x, config, tb) if vac is None else vac
    pf = np.prod([_f(x, y, eta) for y in others]) if others else 1.0
    pg = np.prod([_g(x, y, eta) for y in others]) if others else 1.0
    return tb.psi_plus / (2 * tb.nu_plus) * (2 * x / (2 * x + eta) * al * pf - dh * pg)


def b1(mu: complex, config: ChainConfig, tb: TriangularBoundary) -> complex:
    """Coefficient making ``ℬ(μ)Ω+ + b1(μ)Ω+`` a one-excitation Bethe vector."""
    return b_single(mu, (), config, tb)


@dataclass(frozen=True)
class BetheCoefficients:
    """All subset coefficients of a Bethe vector, keyed by the removed root indices."""

    M: int
    roots: tuple[complex, ...]
    values: dict = field(repr=False)

    def __getitem__(self, removed) -> complex:
        return self.values[tuple(sorted(removed))]

    def coefficient(self, removed: Sequence[int]) -> complex:
        return self[removed]


def b_coefficients(roots: Sequence[complex], config: ChainConfig, tb: TriangularBoundary) -> BetheCoefficients:
    """Evaluate every ``b(S^c ; S)`` by explicit symmetrization over ``S_k``."""
    roots = tuple(complex(r) for r in roots)
    M = len(roots)
    _check_roots(roots, config.eta)
    vac = [vacuum_eigenvalues(r, config, tb) for r in roots]
    single_cache: dict = {}

    def single(i, rest):
        key = (i, rest)
        if key not in single_cache:
            single_cache[key] = b_single(roots[i], [roots[j] for j in rest], config, tb, vac[i])
        return single_cache[key]

    values = {(): 1.0 + 0j}
    for k in range(1, M + 1):
        for removed in itertools.combinations(range(M), k):
            kept = frozenset(range(M)) - frozenset(removed)
            total = 0j
            for perm in itertools.permutations(removed):
                term = 1.0 + 0j
                for l in range(k):
                    rest = tuple(sorted(frozenset(perm[l + 1:]) | kept))
                    term *= single(perm[l], rest)
                total += term
            values[removed] = total / math.factorial(k)
    return BetheCoefficients(M, roots, values)


def _creation_ops(roots, config, tb):
    return [sklyanin_monodromy(r, config, tb).B.matrix for r in roots]


def _bethe_vector_terms(roots, config, tb):
    roots = tuple(complex(r) for r in roots)
    M = len(roots)
    coeffs = b_coefficients(roots, config, tb)
    Bs = _creation_ops(roots, config, tb)
    omega = vacuum(config)
    products = {(): omega}

    def prod(kept):
        if kept not in products:
            products[kept] = Bs[kept[0]] @ prod(kept[1:])
        return products[kept]

    terms = []
    for r in range(M + 1):
        for kept in itertools.combinations(range(M), r):
            removed = tuple(i for i in range(M) if i not in kept)
            terms.append(coeffs[removed] * prod(kept))
    return terms


def bethe_vector(roots: Sequence[complex], config: ChainConfig, tb: TriangularBoundary) -> np.ndarray:
    """``Ψ_M(μ_1..μ_M)`` as a dense vector in the chain Hilbert space."""
    return np.sum(_bethe_vector_terms(roots, config, tb), axis=0)


def _root_factors(lam, roots, eta):
    pf = np.prod([_f(lam, m, eta) for m in roots]) if len(roots) else 1.0
    pg = np.prod([_g(lam, m, eta) for m in roots]) if len(roots) else 1.0
    return pf, pg


def lambda_M(lam: complex, roots: Sequence[complex], config: ChainConfig, tb: TriangularBoundary) -> complex:
    """Transfer-matrix eigenvalue attached to the root set ``roots``."""
    eta = config.eta
    for m in roots:
        check_pole(lam - m, "Λ at λ = μ_i")
        check_pole(lam + m + eta, "Λ at λ = -μ_i-η")
    k1, k2, _ = kappas(lam, tb, eta)
    al, dh = vacuum_eigenvalues(lam, config, tb)
    pf, pg = _root_factors(lam, roots, eta)
    return k1 * al * pf + k2 * dh * pg


def bethe_F(i: int, roots: Sequence[complex], config: ChainConfig, tb: TriangularBoundary) -> complex:
    """Left side of the Bethe equation for root ``i``; independent of ``ψ±``."""
    eta = config.eta
    mu = complex(roots[i])
    others = [complex(r) for j, r in enumerate(roots) if j != i]
    check_pole(2 * mu + eta, "F at 2μ+η = 0")
    check_pole(tb.xi_plus + mu * tb.nu_plus, "F at ξ+ + μν+ = 0")
    al, dh = vacuum_eigenvalues(mu, config, tb)
    pf, pg = _root_factors(mu, others, eta)
    ratio = (tb.xi_plus - (mu + eta) * tb.nu_plus) / (tb.xi_plus + mu * tb.nu_plus)
    return 2 * mu / (2 * mu + eta) * al * pf - ratio * dh * pg


def unwanted_prefactor(lam: complex, mu: complex, tb: TriangularBoundary, eta: complex) -> complex:
    return 2 * eta * (lam + eta) * (tb.xi_plus + mu * tb.nu_plus) / ((lam - mu) * (lam + mu + eta))


def off_shell_residual(lam: complex, roots: Sequence[complex], config: ChainConfig,
                       tb: TriangularBoundary, t_lam=None) -> float:
    """Relative residual of the off-shell action of ``t(λ)`` on ``Ψ_M``.

    Compares ``t(λ)Ψ_M`` with ``Λ_M Ψ_M + Σ_i c_i(λ) F_M(μ_i) Ψ_M(λ, {μ_j}_{j≠i})``.
    The denominator is floored by ``|t(λ)| Π_j |ℬ(μ_j)|`` so that states beyond
    the excitation capacity, which vanish up to round-off, are not scored on noise.
    """
    roots = [complex(r) for r in roots]
    eta = config.eta
    t = transfer_matrix(lam, config, tb) if t_lam is None else t_lam
    psi = bethe_vector(roots, config, tb)
    lhs = t.matrix @ psi
    rhs = lambda_M(lam, roots, config, tb) * psi
    for i, mu in enumerate(roots):
        swapped = [lam] + [r for j, r in enumerate(roots) if j != i]
        rhs = rhs + unwanted_prefactor(lam, mu, tb, eta) * bethe_F(i, roots, config, tb) * bethe_vector(
            swapped, config, tb
        )
    floor = max_abs(t.matrix) * float(np.prod([max_abs(sklyanin_monodromy(mu, config, tb).B.matrix)
                                                for mu in roots]))
    return relative_residual(lhs, rhs, floor)


@dataclass
class BetheState:
    """A converged (or attempted) solution of the Bethe equations."""

    M: int
    roots: tuple[complex, ...]
    residuals: tuple[complex, ...]
    converged: bool
    vector: np.ndarray | None = field(default=None, repr=False)
    null: bool = False
    iterations: int = 0
    message: str = ""

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals), default=0.0)


def roots_valid(roots: Sequence[complex], config: ChainConfig, tb: TriangularBoundary,
                tol: float = COLLISION_TOL) -> bool:
    """Reject root sets that collide, sit on reflections or hit explicit poles."""
    eta = config.eta
    bound = ROOT_BOUND * max([1.0, abs(eta), _boundary_scale(tb)] + [abs(a) for a in config.inhomogeneities])
    if any(abs(mu) > bound for mu in roots):
        return False
    for i, j in itertools.combinations(range(len(roots)), 2):
        if abs(roots[i] - roots[j]) < tol or abs(roots[i] + roots[j] + eta) < tol:
            return False
    for mu in roots:
        if abs(2 * mu + eta) < tol or abs(tb.xi_plus + mu * tb.nu_plus) < tol:
            return False
        for a in config.inhomogeneities:
            if abs(mu - a) < tol or abs(mu + a + eta) < tol:
                return False
    return True


def canonical_root(mu: complex, eta: complex) -> complex:
    """Representative of ``{μ, -μ-η}``: the one with ``Re(μ + η/2) ≥ 0`` (ties by Im)."""
    z = mu + eta / 2
    if z.real < -1e-9 or (abs(z.real) <= 1e-9 and z.imag < 0):
        return -mu - eta
    return mu


def _canonical_set(roots, eta):
    return tuple(sorted((canonical_root(complex(r), eta) for r in roots),
                        key=lambda z: (round(z.real, 6), round(z.imag, 6))))


def _same_set(a, b, tol=1e-6):
    return all(abs(x - y) < tol for x, y in zip(a, b))


def _boundary_scale(tb: TriangularBoundary) -> float:
    # roots gather around the zeros of ξ∓ ± μν∓, so |ξ/ν| sets a length scale
    return max([abs(x / n) for x, n in ((tb.xi_minus, tb.nu_minus), (tb.xi_plus, tb.nu_plus)) if n != 0],
               default=0.0)


def _random_seeds(M, config, tb, rng, count):
    radius = 2 * max((abs(a) for a in config.inhomogeneities), default=0.0) + abs(config.eta)
    radius = max(radius + 2 * _boundary_scale(tb), 1.0)
    seeds = []
    for _ in range(count):
        r = radius * np.sqrt(rng.uniform(size=M))
        th = rng.uniform(0, 2 * np.pi, size=M)
        seeds.append(r * np.exp(1j * th))
    return seeds


def solve_bethe(
    M: int,
    config: ChainConfig,
    tb: TriangularBoundary,
    seeds: Sequence[Sequence[complex]] | None = None,
    n_random: int | None = None,
    rng_seed: int = 0,
    tol: float = 1e-10,
    maxiter: int = 200,
    null_tol: float = 1e-8,
    workers: int | None = None,
) -> list[BetheState]:
    """Solve ``F_M(μ_i; ·) = 0`` for all ``i`` by damped Newton from many seeds.

    Explicit ``seeds`` are tried first, then ``n_random`` random complex
    seeds. Converged root sets are deduplicated up to permutations and the
    reflection ``μ -> -μ-η`` and returned in a deterministic order. Seeds that
    start on an invalid point are rejected before iteration; seeds that fail
    to converge are dropped. Every converged set is returned, including those
    whose Bethe vector vanishes (``null=True``), e.g. ``μ = 0`` or a pair with
    ``μ_j = μ_i + η``.
    """
    if M == 0:
        psi = vacuum(config)
        return [BetheState(0, (), (), True, psi)]
    eta = config.eta
    rng = np.random.default_rng(rng_seed)
    n_random = 40 * M if n_random is None else n_random
    all_seeds = [np.asarray(s, dtype=complex) for s in (seeds or [])]
    all_seeds += _random_seeds(M, config, tb, rng, n_random)

    def fun(z):
        return np.array([bethe_F(i, z, config, tb) for i in range(M)])

    valid = lambda z: roots_valid(z, config, tb)

    def cleared(z):
        return np.array([bethe_F(i, z, config, tb) * _denominator(i, z, config, tb) for i in range(M)])

    def attempt(s):
        if len(s) != M or not valid(s):
            return None
        # the denominator-free system has no poles to trap the iteration;
        # the result is then polished on F itself
        pre = damped_newton(cleared, s, tol=tol * 1e-2, maxiter=maxiter, valid=valid)
        if not valid(pre.x):
            return pre
        return damped_newton(fun, pre.x, tol=tol, maxiter=maxiter, valid=valid)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(attempt, all_seeds))

    # merge in seed order so the output does not depend on scheduling
    found: list[BetheState] = []
    for res in results:
        if res is None or not res.converged:
            continue
        key = _canonical_set(res.x, eta)
        if any(_same_set(key, st.roots) for st in found):
            continue
        residuals = tuple(complex(v) for v in fun(np.asarray(key)))
        vec = bethe_vector(key, config, tb)
        null = bool(np.linalg.norm(vec) <= null_tol * _vector_scale(key, config, tb))
        found.append(BetheState(M, key, residuals, True, vec, null, res.iterations))
    found.sort(key=lambda st: [(round(z.real, 8), round(z.imag, 8)) for z in st.roots])
    return found


def _denominator(i, z, config, tb):
    mu = z[i]
    eta = config.eta
    out = (2 * mu + eta) * (tb.xi_plus + mu * tb.nu_plus)
    for a in config.inhomogeneities:
        out *= (mu - a) * (mu + a + eta)
    for j, r in enumerate(z):
        if j != i:
            out *= (mu - r) * (mu + r + eta)
    return out


def _vector_scale(roots, config, tb):
    # typical size of Ψ_M: its vacuum-side factors at each root, floored at 1
    out = 1.0
    for r in roots:
        al, dh = vacuum_eigenvalues(r, config, tb)
        out *= max(1.0, abs(al), abs(dh))
    return out


def spectral_match(state: BetheState, config: ChainConfig, tb: TriangularBoundary,
                   lambdas: Sequence[complex]) -> list[dict]:
    """Compare ``Λ_M`` and ``Ψ_M`` with dense diagonalization of ``t(λ)``.

    Returns one row per ``λ`` with the eigenvalue distance (relative) and the
    eigenvector residual ``|t Ψ - Λ Ψ| / (|Λ| |Ψ|)`` (max-norms).
    """
    rows = []
    psi = state.vector if state.vector is not None else bethe_vector(state.roots, config, tb)
    for lam in lambdas:
        t = transfer_matrix(lam, config, tb).matrix
        ev = np.linalg.eigvals(t)
        Lam = lambda_M(lam, state.roots, config, tb)
        dist = float(np.min(np.abs(ev - Lam)) / max(1.0, abs(Lam)))
        vec_res = float(max_abs(t @ psi - Lam * psi) / (max(1.0, abs(Lam)) * max_abs(psi)))
        rows.append({"lambda": complex(lam), "Lambda": complex(Lam),
                     "eigenvalue_distance": dist, "eigenvector_residual": vec_res})
    return rows


def continue_roots(roots: Sequence[complex], config: ChainConfig, tb_start: TriangularBoundary,
                   tb_end: TriangularBoundary, steps: int = 10, tol: float = 1e-10) -> list[tuple[complex, ...]]:
    """Track a root set while the boundary parameters move linearly from start to end.

    Raises :class:`RuntimeError` if Newton fails at some step.
    """
    names = ("xi_minus", "nu_minus", "psi_minus", "xi_plus", "nu_plus", "psi_plus")
    x = np.asarray(roots, dtype=complex)
    path = [tuple(x)]
    for k in range(1, steps + 1):
        s = k / steps
        tb = TriangularBoundary(*[(1 - s) * getattr(tb_start, n) + s * getattr(tb_end, n) for n in names])
        fun = lambda z: np.array([bethe_F(i, z, config, tb) for i in range(len(z))])
        res = damped_newton(fun, x, tol=tol, valid=lambda z: roots_valid(z, config, tb))
        if not res.converged:
            raise RuntimeError(f"continuation lost the root set at step {k}/{steps}: {res.message}")
        x = res.x
        path.append(tuple(x))
    return path
