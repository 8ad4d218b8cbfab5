import numpy as np
import pytest
from fractions import Fraction

from openxxx.errors import DimensionError
from openxxx.lattice import ChainConfig
from openxxx.tensor import (
    Operator, SpinRep, aux, embed_site, identity, kron, partial_trace, permutation, site,
    spin_matrices,
)


@pytest.mark.parametrize("s", ["1/2", 1, "3/2", 2])
def test_spin_algebra(s):
    S3, Sp, Sm = spin_matrices(s)
    assert np.allclose(S3 @ Sp - Sp @ S3, Sp, atol=1e-14)
    assert np.allclose(S3 @ Sm - Sm @ S3, -Sm, atol=1e-14)
    assert np.allclose(Sp @ Sm - Sm @ Sp, 2 * S3, atol=1e-14)
    # highest weight is the first basis vector
    w = np.zeros(S3.shape[0]); w[0] = 1
    assert np.allclose(S3 @ w, float(Fraction(s)) * w)
    assert np.allclose(Sp @ w, 0)


def test_spin_half_is_pauli():
    S3, Sp, Sm = spin_matrices(0.5)
    assert np.array_equal(S3, np.diag([0.5, -0.5]))
    assert np.array_equal(Sp, np.array([[0, 1], [0, 0]]))
    assert np.array_equal(Sm, np.array([[0, 0], [1, 0]]))
    assert np.array_equal(Sp @ Sm - Sm @ Sp - 2 * S3, np.zeros((2, 2)))


def test_spin_one_casimir():
    S3, Sp, Sm = spin_matrices(1)
    cas = S3 @ S3 + (Sp @ Sm + Sm @ Sp) / 2
    assert np.allclose(cas, 2 * np.eye(3), atol=1e-14)


@pytest.mark.parametrize("bad", [0, -1, 0.3, "2/3"])
def test_rejects_bad_spin(bad):
    with pytest.raises(ValueError):
        SpinRep(bad)


def test_spinrep_dimension():
    assert SpinRep("3/2").dimension == 4


def test_kron_identity_and_diagonal():
    a, b = aux(0), aux(1)
    I = kron(identity((a,)), identity((b,)))
    assert np.array_equal(I.matrix, np.eye(4))
    half = kron(Operator(np.diag([0.5, -0.5]), (a,)), identity((b,)))
    e = np.zeros(4); e[1] = 1  # e1 ⊗ e2
    assert np.allclose(half.matrix @ e, 0.5 * e)


def test_kron_mixed_product(rng):
    a, b = aux(0), aux(1)
    A, B, C, D = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    lhs = kron(Operator(A, (a,)), Operator(B, (b,))) @ kron(Operator(C, (a,)), Operator(D, (b,)))
    rhs = kron(Operator(A @ C, (a,)), Operator(B @ D, (b,)))
    assert np.allclose(lhs.matrix, rhs.matrix, atol=1e-13)


def test_kron_dimension_cap():
    a, b = site(0, 8), site(1, 8)
    with pytest.raises(DimensionError):
        kron(identity((a,)), identity((b,)), max_dim=32)


def test_kron_overlapping_spaces():
    with pytest.raises(DimensionError):
        kron(identity((aux(0),)), identity((aux(0),)))


def test_embed_site():
    cfg = ChainConfig([0.5, 0.5], [0, 0.3], 1.0)
    S3, _, _ = spin_matrices(0.5)
    assert np.allclose(embed_site(S3, 0, cfg).matrix, np.diag([1, 1, -1, -1]) / 2)
    with pytest.raises(IndexError):
        embed_site(S3, 2, cfg)
    with pytest.raises(DimensionError):
        embed_site(np.eye(3), 0, cfg)


def test_embedded_sites_commute_and_casimir():
    cfg = ChainConfig([0.5, 1, "3/2"], [0, 0.3, 0.7], 1.0)
    ops = [[embed_site(x, m, cfg).matrix for x in spin_matrices(s)] for m, s in enumerate(cfg.spins)]
    for m in range(3):
        for n in range(3):
            if m != n:
                for X in ops[m]:
                    for Y in ops[n]:
                        assert np.array_equal(X @ Y, Y @ X)
        S3, Sp, Sm = ops[m]
        s = float(cfg.spins[m])
        cas = S3 @ S3 + (Sp @ Sm + Sm @ Sp) / 2
        assert np.allclose(cas, s * (s + 1) * np.eye(cfg.dim), atol=1e-13)


def test_partial_trace_examples(rng):
    a, b = aux(0), aux(1)
    A = rng.normal(size=(2, 2)) + 0j
    op = kron(identity((a,)), Operator(A, (b,)))
    assert np.allclose(partial_trace(op, a).matrix, 2 * A)
    P = permutation(a, b)
    assert np.allclose(partial_trace(P, a).matrix, np.eye(2))
    assert np.allclose(partial_trace(P, b).matrix, np.eye(2))
    full = partial_trace(partial_trace(op, a), b)
    assert np.isclose(full.matrix[0, 0], np.trace(op.matrix))


def test_partial_trace_second_factor(rng):
    a, b = site(0, 3), site(1, 2)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    out = partial_trace(kron(Operator(A, (a,)), Operator(B, (b,))), b)
    err = np.abs(out.matrix - np.trace(B) * A).max() / np.abs(A).max()
    assert err <= 1e-12
    with pytest.raises(DimensionError):
        partial_trace(out, b)


def test_operator_alignment(rng):
    # products of operators on different factor orders agree with explicit kron
    a, b = aux(0), site(1, 3)
    X = Operator(rng.normal(size=(6, 6)) + 0j, (a, b))
    Y = X.reorder((b, a))
    assert np.allclose((X - Y).matrix, 0)
    Z = Operator(rng.normal(size=(2, 2)) + 0j, (a,))
    assert np.allclose((Z @ X).matrix, np.kron(Z.matrix, np.eye(3)) @ X.matrix)
