import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from openxxx.bethe import (
    b1, b_coefficients, b_single, bethe_F, bethe_vector, canonical_root, continue_roots, lambda_M,
    off_shell_residual, roots_valid, solve_bethe, spectral_match, unwanted_prefactor,
)
from openxxx.boundary import TriangularBoundary, sample_cotriangularizable, triangularize
from openxxx.errors import DomainError
from openxxx.lattice import ChainConfig, vacuum
from openxxx.sklyanin import kappas, sklyanin_monodromy, transfer_matrix, vacuum_eigenvalues

from conftest import rand_c, random_boundary, random_chain


def _setup(rng, spins):
    cfg = random_chain(rng, spins)
    return cfg, random_boundary(rng, cfg.eta)


def _diag(tb):
    return TriangularBoundary(tb.xi_minus, tb.nu_minus, 0.0, tb.xi_plus, tb.nu_plus, 0.0)


def test_b1_examples(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    mu = rand_c(rng)
    assert b1(mu, cfg, _diag(tb)) == 0
    al, dh = vacuum_eigenvalues(mu, cfg, tb)
    e = cfg.eta
    expected = tb.psi_plus / (2 * tb.nu_plus) * (2 * mu / (2 * mu + e) * al - dh)
    assert np.isclose(b1(mu, cfg, tb), expected, rtol=1e-14)
    with pytest.raises(DomainError):
        b1(mu, cfg, TriangularBoundary(1, 1, 0.3, 1, 0, 0.2))


def test_b1_on_shell(rng):
    cfg = ChainConfig([0.5], [0.1], 0.8)
    tb = TriangularBoundary(0.9, 1.1, 0.4, 1.3, 0.8, 0.6)
    states = [s for s in solve_bethe(1, cfg, tb) if not s.null]
    assert states
    for s in states:
        mu = s.roots[0]
        _, dh = vacuum_eigenvalues(mu, cfg, tb)
        ratio = (tb.xi_plus - (mu + cfg.eta) * tb.nu_plus) / (tb.xi_plus + mu * tb.nu_plus)
        expected = tb.psi_plus / (2 * tb.nu_plus) * dh * (ratio - 1)
        assert np.isclose(b1(mu, cfg, tb), expected, rtol=1e-9)


def test_two_root_coefficients(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    m1, m2 = rand_c(rng), rand_c(rng)
    c = b_coefficients([m1, m2], cfg, tb)
    b2 = 0.5 * (b_single(m1, [m2], cfg, tb) * b1(m2, cfg, tb) + b_single(m2, [m1], cfg, tb) * b1(m1, cfg, tb))
    assert np.isclose(c[(0, 1)], b2, rtol=1e-14)
    assert np.isclose(c[(1,)], b_single(m2, [m1], cfg, tb), rtol=1e-14)


def test_coefficients_vanish_without_psi_plus(rng):
    cfg, tb = _setup(rng, [0.5, 1, 0.5])
    tb0 = TriangularBoundary(tb.xi_minus, tb.nu_minus, tb.psi_minus, tb.xi_plus, tb.nu_plus, 0.0)
    c = b_coefficients([rand_c(rng) for _ in range(3)], cfg, tb0)
    assert all(v == 0 for k, v in c.values.items() if k)


def test_four_root_coefficient_bruteforce(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    mus = [rand_c(rng) for _ in range(4)]
    c = b_coefficients(mus, cfg, tb)
    m1, m2, m3, m4 = mus
    bs = lambda x, *rest: b_single(x, list(rest), cfg, tb)
    terms = []
    for a, b, d in itertools.permutations([m1, m2, m3]):
        terms.append(bs(a, b, d, m4) * bs(b, d, m4) * bs(d, m4))
    assert len(terms) == 6
    assert np.isclose(c[(0, 1, 2)], sum(terms) / 6, rtol=1e-12)
    full = sum(bs(a, b, d, f) * bs(b, d, f) * bs(d, f) * b1(f, cfg, tb)
               for a, b, d, f in itertools.permutations(mus))
    assert np.isclose(c[(0, 1, 2, 3)], full / 24, rtol=1e-12)


def test_coefficient_symmetry(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    mus = [rand_c(rng) for _ in range(4)]
    base = b_coefficients(mus, cfg, tb)
    for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 0, 1, 3)]:
        other = b_coefficients([mus[p] for p in perm], cfg, tb)
        for removed, v in base.values.items():
            # index i of the permuted list holds root perm[i]
            inv = tuple(perm.index(r) for r in removed)
            assert np.isclose(other[inv], v, rtol=1e-12)


def test_bethe_vector_one_root(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    mu = rand_c(rng)
    B = sklyanin_monodromy(mu, cfg, tb).B.matrix
    om = vacuum(cfg)
    assert np.allclose(bethe_vector([mu], cfg, tb), B @ om + b1(mu, cfg, tb) * om, rtol=1e-14)


@pytest.mark.parametrize("M", [2, 3])
def test_bethe_vector_symmetric(rng, M):
    cfg, tb = _setup(rng, [1, 0.5, 1])
    mus = [rand_c(rng) for _ in range(M)]
    ref = bethe_vector(mus, cfg, tb)
    for perm in itertools.permutations(range(M)):
        v = bethe_vector([mus[p] for p in perm], cfg, tb)
        assert np.abs(v - ref).max() <= 1e-12 * np.abs(ref).max()


def test_bethe_vector_diagonal(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    tb = _diag(tb)
    mus = [rand_c(rng) for _ in range(2)]
    om = vacuum(cfg)
    B = [sklyanin_monodromy(m, cfg, tb).B.matrix for m in mus]
    assert np.allclose(bethe_vector(mus, cfg, tb), B[0] @ B[1] @ om, rtol=1e-14)


def test_rejects_degenerate_roots(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    with pytest.raises(DomainError):
        bethe_vector([0.3, 0.3], cfg, tb)
    with pytest.raises(DomainError):
        b_coefficients([0.3, -0.3 - cfg.eta], cfg, tb)


def test_lambda_reduces_to_vacuum(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    lam = rand_c(rng)
    k1, k2, _ = kappas(lam, tb, cfg.eta)
    al, dh = vacuum_eigenvalues(lam, cfg, tb)
    assert np.isclose(lambda_M(lam, [], cfg, tb), k1 * al + k2 * dh, rtol=1e-15)
    mus = [rand_c(rng) for _ in range(3)]
    assert np.isclose(lambda_M(lam, mus, cfg, tb), lambda_M(lam, mus[::-1], cfg, tb), rtol=1e-13)
    with pytest.raises(DomainError):
        lambda_M(mus[0], mus, cfg, tb)


def test_F_psi_independent(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    mus = [rand_c(rng) for _ in range(3)]
    a = [bethe_F(i, mus, cfg, tb) for i in range(3)]
    b = [bethe_F(i, mus, cfg, _diag(tb)) for i in range(3)]
    assert a == b


@pytest.mark.parametrize("spins,M", [([0.5], 1), ([0.5, 0.5], 2), ([1, 0.5, 1], 3), ([0.5, 1, 0.5], 4)])
def test_off_shell_identity(rng, spins, M):
    cfg, tb = _setup(rng, spins)
    for _ in range(3):
        mus = [rand_c(rng) for _ in range(M)]
        assert off_shell_residual(rand_c(rng), mus, cfg, tb) <= 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_off_shell_identity_property(seed, M):
    g = np.random.default_rng(seed)
    cfg, tb = _setup(g, [0.5, 1][: 1 + seed % 2])
    mus = [rand_c(g) for _ in range(M)]
    assert off_shell_residual(rand_c(g), mus, cfg, tb) <= 1e-9


def _psi3_repeated_B(mus, cfg, tb):
    """Three-root vector with ℬ(μ2) in the term weighted by b(μ2, μ3; μ1)."""
    c = b_coefficients(mus, cfg, tb)
    om = vacuum(cfg)
    B = [sklyanin_monodromy(m, cfg, tb).B.matrix for m in mus]
    v = B[0] @ B[1] @ B[2] @ om
    v = v + c[(2,)] * (B[0] @ B[1] @ om) + c[(0,)] * (B[1] @ B[2] @ om) + c[(1,)] * (B[0] @ B[2] @ om)
    v = v + c[(0, 1)] * (B[2] @ om) + c[(0, 2)] * (B[1] @ om) + c[(1, 2)] * (B[1] @ om)
    return v + c[(0, 1, 2)] * om


def test_three_root_vector_reading(rng):
    cfg, tb = _setup(rng, [1, 0.5, 1])
    mus = [rand_c(rng) for _ in range(3)]
    repeated = _psi3_repeated_B(mus, cfg, tb)
    resolved = bethe_vector(mus, cfg, tb)
    assert np.abs(repeated - resolved).max() > 1e-3 * np.abs(resolved).max()
    # that vector is not symmetric in its roots
    swapped = _psi3_repeated_B([mus[1], mus[0], mus[2]], cfg, tb)
    assert np.abs(swapped - repeated).max() > 1e-3 * np.abs(repeated).max()


def test_four_root_repeated_argument_is_singular(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    m1, m3, m4 = rand_c(rng), rand_c(rng), rand_c(rng)
    with np.errstate(all="ignore"), pytest.raises(ZeroDivisionError):
        b_single(m1, [m1, m3, m4], cfg, tb)


def test_unwanted_prefactor_value():
    tb = TriangularBoundary(1, 1, 0, 2.0, 0.5, 0)
    assert np.isclose(unwanted_prefactor(1.0, 0.5, tb, 1.0), 2 * 2 * 2.25 / (0.5 * 2.5))


def test_canonical_root():
    assert canonical_root(-1.5, 1.0) == 0.5
    assert canonical_root(0.5, 1.0) == 0.5


def test_roots_valid(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    assert roots_valid([0.1, 0.7], cfg, tb)
    assert not roots_valid([0.1, 0.1], cfg, tb)
    assert not roots_valid([0.1, -0.1 - cfg.eta], cfg, tb)
    assert not roots_valid([cfg.inhomogeneities[0]], cfg, tb)
    assert not roots_valid([1e6], cfg, tb)


def test_solver_single_site_diagonal():
    cfg = ChainConfig([0.5], [0.0], 1.0)
    tb = TriangularBoundary(0.7, 1.0, 0.0, 1.3, 1.0, 0.0)
    states = [s for s in solve_bethe(1, cfg, tb) if not s.null]
    assert len(states) == 1
    for row in spectral_match(states[0], cfg, tb, [0.31 + 0.2j, -0.7 + 0.1j, 1.4 - 0.5j]):
        assert row["eigenvalue_distance"] <= 1e-8
        assert row["eigenvector_residual"] <= 1e-8


def test_solver_rejects_degenerate_seed(rng):
    cfg, tb = _setup(rng, [0.5, 0.5])
    states = solve_bethe(2, cfg, tb, seeds=[[0.2, 0.2]], n_random=0)
    assert states == []


def test_solver_deterministic(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    a = solve_bethe(2, cfg, tb, rng_seed=3, workers=1)
    b = solve_bethe(2, cfg, tb, rng_seed=3, workers=4)
    assert [s.roots for s in a] == [s.roots for s in b]


def test_solver_complete_and_on_shell():
    g = np.random.default_rng(5)
    cfg, tb = _setup(g, [0.5, 1])
    lambdas = [0.3 + 0.2j, -0.6 + 0.4j, 1.1 - 0.3j]
    for M, dim in ((1, 2), (2, 2)):
        states = [s for s in solve_bethe(M, cfg, tb) if not s.null]
        assert len(states) == dim
        for s in states:
            assert s.max_residual <= 1e-9
            for row in spectral_match(s, cfg, tb, lambdas):
                assert row["eigenvalue_distance"] <= 1e-8
                assert row["eigenvector_residual"] <= 1e-8
            # no pole of Λ at an on-shell root: the residue estimate ε(Λ(μ+ε)-Λ(μ-ε))/2
            # is O(ε²Λ') on shell and O(1) off shell
            mu, eps = s.roots[0], 1e-5
            res_on = eps * (lambda_M(mu + eps, s.roots, cfg, tb) - lambda_M(mu - eps, s.roots, cfg, tb)) / 2
            scale = abs(lambda_M(mu + eps, s.roots, cfg, tb))
            assert abs(res_on) <= 1e-6 * scale
            shifted = (mu + 0.05,) + s.roots[1:]
            res_off = eps * (lambda_M(mu + 0.05 + eps, shifted, cfg, tb)
                             - lambda_M(mu + 0.05 - eps, shifted, cfg, tb)) / 2
            assert abs(res_off) > 1e-3 * scale
            # ratio form of the Bethe equations
            al, dh = vacuum_eigenvalues(mu, cfg, tb)
            k1, k2, _ = kappas(mu, tb, cfg.eta)
            e = cfg.eta
            prod = np.prod([(mu - r + e) * (mu + r + 2 * e) / ((mu + r) * (mu - r - e)) for r in s.roots[1:]])
            assert np.isclose(al / dh, (mu + e) * k2 / (mu * k1) * prod, rtol=1e-9)


def test_null_sets_flagged():
    cfg = ChainConfig([0.5], [0.2], 0.9)
    tb = TriangularBoundary(0.7, 1.0, 0.3, 1.3, 1.0, 0.5)
    states = solve_bethe(1, cfg, tb)
    zero = [s for s in states if abs(s.roots[0]) < 1e-8]
    assert zero and all(s.null for s in zero)


def test_continuation_from_diagonal(rng):
    cfg, tb = _setup(rng, [0.5, 1])
    d = _diag(tb)
    states = [s for s in solve_bethe(1, cfg, d) if not s.null]
    path = continue_roots(states[0].roots, cfg, d, tb, steps=5)
    # F does not see ψ, so the roots stay put while ψ is switched on
    assert np.allclose(path[-1], path[0], atol=1e-9)
    v = bethe_vector(path[-1], cfg, tb)
    t = transfer_matrix(0.4 + 0.1j, cfg, tb).matrix
    lam = lambda_M(0.4 + 0.1j, path[-1], cfg, tb)
    assert np.abs(t @ v - lam * v).max() <= 1e-9 * abs(lam) * np.abs(v).max()


def test_solver_reaches_roots_set_by_boundary_scale():
    # |ξ+/ν+| ≈ 2.7 puts one M=1 root at |μ| ≈ 1.8, outside 2·max|α| + |η|
    g = np.random.default_rng(3)
    cfg = ChainConfig([0.5, 1], [0.2 - 0.1j, -0.35 + 0.05j], eta=0.7 + 0.2j)
    tb = triangularize(sample_cotriangularizable(g), cfg.eta)
    lam = 0.3 + 0.2j
    dense = np.linalg.eigvals(transfer_matrix(lam, cfg, tb).matrix)
    hits = set()
    for M, size in ((0, 1), (1, 2), (2, 2), (3, 1)):
        states = [s for s in solve_bethe(M, cfg, tb) if not s.null]
        assert len(states) == size
        hits.update(int(np.argmin(np.abs(dense - lambda_M(lam, s.roots, cfg, tb)))) for s in states)
    assert len(hits) == cfg.dim
