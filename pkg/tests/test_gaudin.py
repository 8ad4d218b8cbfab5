import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from openxxx.bethe import bethe_F, bethe_vector
from openxxx.errors import DomainError
from openxxx.gaudin import (
    GaudinConfig, chain_from_gaudin, chi0, chi_M, gaudin_bethe_vector, gaudin_F_operator, gaudin_f,
    gaudin_hamiltonians, gaudin_lax, gaudin_off_shell_residual, gaudin_unwanted_prefactor, residue,
    sigma_dot_S, solve_gaudin, tau,
)
from openxxx.lattice import vacuum
from openxxx.tensor import Operator, aux, spin_matrices

from conftest import rand_c

SPIN_SETS = [[0.5], [0.5, 1], [0.5, 1, 0.5]]


def make_gc(rng, spins, psi=None, nu=None):
    alphas = [0.3 + 0.4 * m + 0.1j * rng.normal() for m in range(len(spins))]
    xi = 1.0 + rand_c(rng, 0.3)
    nu = 1.0 + rand_c(rng, 0.3) if nu is None else nu
    psi = rand_c(rng, 0.5) if psi is None else psi
    return GaudinConfig(spins, alphas, xi, nu, psi)


def _comm(a, b):
    return np.abs(a @ b - b @ a).max() / (np.abs(a).max() * np.abs(b).max())


def test_config_validation():
    with pytest.raises(ValueError):
        GaudinConfig([0.5, 0.5], [0.3, 0.3], 1, 1, 0)
    with pytest.raises(ValueError):
        GaudinConfig([0.5, 0.5], [0.3, -0.3], 1, 1, 0)
    with pytest.raises(ValueError):
        GaudinConfig([0.5], [0.0], 1, 1, 0)


def test_lax_traceless_and_residue(rng):
    gc = make_gc(rng, [0.5])
    L = gaudin_lax(rand_c(rng), gc).matrix
    assert np.abs(L[:2, :2] + L[2:, 2:]).max() <= 1e-14
    gc = make_gc(rng, [0.5, 1])
    a = gc.inhomogeneities[1]
    h = 1e-7
    res = h * gaudin_lax(a + h, gc).matrix
    target = sigma_dot_S(1, gc).matrix
    assert np.abs(res - target).max() <= 1e-5


def test_lax_large_xi_limit(rng):
    gc = GaudinConfig([0.5, 1], [0.3, 0.8 + 0.1j], 1e6, 1.0, 0.0)
    lam = 0.4 + 0.3j
    L = gaudin_lax(lam, gc).matrix
    ref = sum(sigma_dot_S(m, gc).matrix * (1 / (lam - a) + 1 / (lam + a))
              for m, a in enumerate(gc.inhomogeneities))
    assert np.abs(L - ref).max() <= 1e-4


def test_tau_single_site_closed_form():
    for s in (0.5, 1):
        gc = GaudinConfig([s], [0.35], 0.8, 1.2, 0.0)
        lam = 0.6 + 0.25j
        a, b = 1 / (lam - 0.35), 1 / (lam + 0.35)
        k1, k2 = 0.8 - lam * 1.2, 0.8 + lam * 1.2
        r = k1 / k2
        S3, Sp, Sm = spin_matrices(s)
        closed = 2 * (a + b) ** 2 * S3 @ S3 + (a + b * r) * (a + b / r) * (Sm @ Sp + Sp @ Sm)
        assert np.allclose(tau(lam, gc).matrix, closed, atol=1e-12)


@pytest.mark.parametrize("spins", SPIN_SETS)
def test_vacuum_eigenvalue(rng, spins):
    gc = make_gc(rng, spins)
    om = vacuum(gc)
    for _ in range(3):
        lam = rand_c(rng)
        T = tau(lam, gc).matrix
        c = chi0(lam, gc)
        assert np.abs(T @ om - c * om).max() <= 1e-11 * abs(c)
        assert np.isclose(chi_M(lam, [], gc), c, rtol=1e-12)


def test_vacuum_eigenvalue_needs_nu_squared(rng):
    gc = make_gc(rng, [0.5, 1], nu=1.7)
    lam = 0.45 + 0.2j
    om = vacuum(gc)
    exact = (tau(lam, gc).matrix @ om)[0]
    den = gc.xi**2 - lam**2 * gc.nu**2
    sums = sum(float(s) * (1 / (lam - a) + 1 / (lam + a)) for s, a in zip(gc.spins, gc.inhomogeneities))
    without_nu2 = chi0(lam, gc) - 4 * lam * gc.nu**2 / den * sums + 4 * lam / den * sums
    assert abs(without_nu2 - exact) > 1e-3 * abs(exact)
    # with ν² = 1 the two agree
    gc1 = GaudinConfig(gc.spins, gc.inhomogeneities, gc.xi, 1.0, gc.psi)
    assert np.isclose(chi0(lam, gc1), (tau(lam, gc1).matrix @ vacuum(gc1))[0], rtol=1e-12)


@pytest.mark.parametrize("spins", SPIN_SETS)
@pytest.mark.parametrize("psi", [0.0, None])
def test_commuting_family(rng, spins, psi):
    gc = make_gc(rng, spins, psi=psi)
    l1, l2 = rand_c(rng), rand_c(rng)
    T1, T2 = tau(l1, gc).matrix, tau(l2, gc).matrix
    assert _comm(T1, T2) <= 1e-10
    H, Ht = gaudin_hamiltonians(gc)
    ops = [h.matrix for h in H + Ht]
    for a, b in itertools.combinations(ops, 2):
        assert np.abs(a @ b - b @ a).max() <= 1e-10 * max(1, np.abs(a).max() * np.abs(b).max())
    for a in ops:
        assert np.abs(a @ T1 - T1 @ a).max() <= 1e-10 * max(1, np.abs(a).max() * np.abs(T1).max())


@pytest.mark.parametrize("spins", SPIN_SETS)
def test_residues_give_hamiltonians(rng, spins):
    gc = make_gc(rng, spins)
    H, Ht = gaudin_hamiltonians(gc)
    for m, a in enumerate(gc.inhomogeneities):
        for lam0, target in ((a, H[m].matrix), (-a, Ht[m].matrix)):
            r = residue(lam0, gc, 1e-6)
            assert np.abs(r - 4 * target).max() <= 1e-4 * np.abs(4 * target).max()
            # a one-sided estimate carries the scalar double pole 2 s(s+1)/(λ-λ0)^2
            h, sm = 1e-6, float(gc.spins[m])
            one = h * tau(lam0 + h, gc).matrix - 2 * sm * (sm + 1) / h * np.eye(gc.dim)
            assert np.abs(one - 4 * target).max() <= 1e-4 * np.abs(4 * target).max()


def test_mixed_conjugation_boundary_hamiltonian_fails(rng):
    gc = make_gc(rng, [0.5, 1])
    _, Ht = gaudin_hamiltonians(gc, reading="mixed")
    for m, a in enumerate(gc.inhomogeneities):
        r = residue(-a, gc)
        assert np.abs(r - 4 * Ht[m].matrix).max() > 1e-2 * np.abs(r).max()
        assert np.abs(r + 4 * Ht[m].matrix).max() > 1e-2 * np.abs(r).max()
    with pytest.raises(ValueError):
        gaudin_hamiltonians(gc, reading="other")


def test_chi_symmetric_in_sign(rng):
    gc = make_gc(rng, [0.5, 1])
    mus = [rand_c(rng) for _ in range(2)]
    lam = rand_c(rng)
    assert np.isclose(chi_M(lam, mus, gc), chi_M(lam, [-mus[0], mus[1]], gc), rtol=1e-12)


def test_F_operator(rng):
    gc = make_gc(rng, [0.5, 1, 0.5])
    l1, l2 = rand_c(rng), rand_c(rng)
    F1, F2 = gaudin_F_operator(l1, gc).matrix, gaudin_F_operator(l2, gc).matrix
    assert np.abs(F1 @ F2 - F2 @ F1).max() <= 1e-13 * np.abs(F1).max() * np.abs(F2).max()
    gc0 = GaudinConfig(gc.spins, gc.inhomogeneities, gc.xi, gc.nu, 0.0)
    F = gaudin_F_operator(l1, gc0).matrix
    assert np.allclose(np.triu(F), 0)  # pure lowering
    with pytest.raises(DomainError):
        gaudin_F_operator(l1, GaudinConfig(gc.spins, gc.inhomogeneities, gc.xi, 0.0, gc.psi))


def _site_ops(gc):
    from openxxx.tensor import embed_site
    return [[embed_site(x, m, gc).matrix for x in spin_matrices(s)] for m, s in enumerate(gc.spins)]


def _w(mu, a, gc):
    return (gc.xi + a * gc.nu) / (mu - a) + (gc.xi + a * gc.nu) / (mu + a)


def test_one_and_two_root_vectors_explicit(rng):
    gc = make_gc(rng, [0.5, 1, 0.5])
    ops = _site_ops(gc)
    om = vacuum(gc)
    r = gc.psi / gc.nu
    I = np.eye(gc.dim)
    mu = rand_c(rng)
    phi1 = sum(_w(mu, a, gc) * (r * float(s) * I + ops[m][2]) for m, (s, a) in
               enumerate(zip(gc.spins, gc.inhomogeneities))) @ om
    assert np.abs(gaudin_bethe_vector([mu], gc) - phi1).max() <= 1e-12 * np.abs(phi1).max()
    m1, m2 = rand_c(rng), rand_c(rng)
    phi2 = np.zeros(gc.dim, dtype=complex)
    for m, n in itertools.product(range(gc.N), repeat=2):
        sm, sn = float(gc.spins[m]), float(gc.spins[n])
        X = (r * sm * I + ops[m][2]) @ (r * sn * I + ops[n][2])
        if m == n:
            X = X - r * (r * sn / 2 * I + ops[n][2])
        phi2 += _w(m1, gc.inhomogeneities[m], gc) * _w(m2, gc.inhomogeneities[n], gc) * (X @ om)
    v = gaudin_bethe_vector([m1, m2], gc)
    assert np.abs(v - phi2).max() <= 1e-11 * np.abs(phi2).max()
    assert np.allclose(gaudin_bethe_vector([m2, m1], gc), v, atol=1e-12 * np.abs(v).max())


def test_f_examples(rng):
    gc = make_gc(rng, [0.5, 1])
    mu = rand_c(rng)
    sums = sum(float(s) * (1 / (mu - a) + 1 / (mu + a)) for s, a in zip(gc.spins, gc.inhomogeneities))
    f1 = 2 * mu * gc.nu**2 / (gc.xi + mu * gc.nu) + 2 * (gc.xi - mu * gc.nu) * sums
    assert np.isclose(gaudin_f(0, [mu], gc), f1, rtol=1e-14)
    small = GaudinConfig(gc.spins, gc.inhomogeneities, gc.xi, 1e-4, gc.psi)
    first = gaudin_f(0, [mu], small) - 2 * (gc.xi - mu * 1e-4) * sums
    assert abs(first) <= 10 * 1e-8 * abs(mu / gc.xi)


@pytest.mark.parametrize("spins,M", [([0.5], 1), ([0.5, 1], 2), ([0.5, 1, 0.5], 3), ([1, 1, 0.5], 3)])
def test_off_shell_action(rng, spins, M):
    gc = make_gc(rng, spins)
    for _ in range(3):
        mus = [rand_c(rng) for _ in range(M)]
        assert gaudin_off_shell_residual(rand_c(rng), mus, gc) <= 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.booleans())
def test_off_shell_action_property(seed, M, diagonal):
    g = np.random.default_rng(seed)
    gc = make_gc(g, [0.5, 1, 0.5][: 1 + seed % 3], psi=0.0 if diagonal else None)
    mus = [rand_c(g) for _ in range(M)]
    assert gaudin_off_shell_residual(rand_c(g), mus, gc) <= 1e-9


def test_unwanted_prefactor():
    gc = GaudinConfig([0.5], [0.3], 2.0, 1.0, 0.0)
    assert np.isclose(gaudin_unwanted_prefactor(1.0, 0.5, gc), 4 * 2.5 / (3 * 0.75))


def test_solver_on_shell(rng):
    gc = make_gc(rng, [0.5, 1])
    states = [s for s in solve_gaudin(1, gc) if not s.null]
    assert len(states) == 2
    for s in states:
        assert s.max_residual <= 1e-9
        for lam in (0.3 + 0.2j, -0.5 + 0.7j, 1.1 + 0.1j):
            T = tau(lam, gc).matrix
            c = chi_M(lam, s.roots, gc)
            assert np.abs(T @ s.vector - c * s.vector).max() <= 1e-9 * abs(c) * np.abs(s.vector).max()
            ev = np.linalg.eigvals(T)
            assert np.min(np.abs(ev - c)) <= 1e-7 * max(1, abs(c))


def test_single_spin_half_has_no_finite_root(rng):
    # f_1 = 0 reduces to μ(ν²α² - ξ²) = 0: the only finite root gives a null vector
    gc = make_gc(rng, [0.5])
    states = solve_gaudin(1, gc)
    assert all(s.null for s in states)
    assert all(abs(s.roots[0]) < 1e-8 for s in states)


def test_chain_limit_of_vectors_and_equations(rng):
    from openxxx.expansion import leading_ratio_rate
    gc = make_gc(rng, [0.5, 1])
    mus = [0.7 + 0.2j, 1.3 - 0.4j]

    def chain(eta):
        return chain_from_gaudin(gc, eta)

    psi = lambda e: bethe_vector(mus, *chain(e))
    errs, rates = leading_ratio_rate(psi, gaudin_bethe_vector(mus, gc), 2)
    assert errs[-1] <= 1e-3
    assert all(abs(r - 1) <= 0.1 for r in rates)
    F = lambda e: np.array([bethe_F(i, mus, *chain(e)) for i in range(2)])
    f = np.array([gaudin_f(i, mus, gc) for i in range(2)])
    errs, rates = leading_ratio_rate(F, f, 1)
    assert errs[-1] <= 1e-3
    assert all(abs(r - 1) <= 0.1 for r in rates)


def test_off_shell_residual_beyond_capacity(rng):
    # one spin-1/2 site holds a single excitation: φ_2 vanishes up to round-off
    gc = make_gc(rng, [0.5])
    mus = [rand_c(rng), rand_c(rng)]
    assert np.abs(gaudin_bethe_vector(mus, gc)).max() <= 1e-13
    assert gaudin_off_shell_residual(rand_c(rng), mus, gc) <= 1e-12


def test_off_shell_floor_is_natural_scale(rng):
    # within capacity the denominator floor stays comparable to |τ φ_M|
    for spins, M in (([0.5, 1], 2), ([1, 0.5, 1], 3)):
        gc = make_gc(rng, spins)
        mus = [rand_c(rng) for _ in range(M)]
        T = tau(rand_c(rng), gc).matrix
        lhs = np.abs(T @ gaudin_bethe_vector(mus, gc)).max()
        floor = np.abs(T).max() * np.prod([np.abs(gaudin_F_operator(m, gc).matrix).max() for m in mus])
        assert floor <= 1e3 * lhs
