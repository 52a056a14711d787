import random

import numpy as np
import pytest

from quatleft import QuaternionMatrix, annulus, right_eigenvalues, singular_values
from quatleft.errors import ConvergenceFailure
from quatleft.representation import p_map_float, random_matrix
from quatleft.spectra import (
    complex_adjoint, fold_conjugate_pairs, hessenberg, hessenberg_qr_eigenvalues, jacobi_singular_values,
    real_singular_values,
)

from cases import EX41, EX42, EX43, EX44, I, J, K, ONE, ZERO


@pytest.mark.parametrize("shape", [(1, 1), (3, 3), (5, 2), (2, 6), (8, 8)])
def test_jacobi_matches_numpy(shape):
    M = np.random.default_rng(sum(shape)).normal(size=shape)
    full = jacobi_singular_values(M)
    ref = np.linalg.svd(M, compute_uv=False)
    assert np.allclose(full[:len(ref)], ref, atol=1e-12)
    assert np.allclose(full[len(ref):], 0, atol=1e-12)


def test_jacobi_sweep_cap():
    M = np.random.default_rng(0).normal(size=(6, 6))
    with pytest.raises(ConvergenceFailure):
        jacobi_singular_values(M, max_sweeps=1)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_singular_values_come_in_fours(m):
    A = random_matrix(random.Random(m), m)
    raw = real_singular_values(A)
    assert np.allclose(raw.reshape(-1, 4), raw.reshape(-1, 4)[:, :1], atol=1e-10)
    assert np.allclose(singular_values(A), np.linalg.svd(p_map_float(A), compute_uv=False)[::4])


def test_annulus_flags_singular_matrix():
    A = QuaternionMatrix([[ONE, I], [J, -K]])
    assert not annulus(A).full_rank and annulus(A).sigma_min == 0.0
    # [[1, k], [k, 1]] is sqrt(2) times a unitary matrix
    ann = annulus(EX41)
    assert ann.full_rank
    assert ann.sigma_min == pytest.approx(2 ** 0.5) and ann.sigma_max == pytest.approx(2 ** 0.5)
    assert not annulus(EX42).full_rank


def test_hessenberg_is_similar():
    M = np.random.default_rng(3).normal(size=(6, 6)) + 1j * np.random.default_rng(4).normal(size=(6, 6))
    H = hessenberg(M)
    assert np.allclose(np.tril(H, -2), 0)
    assert np.allclose(np.sort_complex(np.linalg.eigvals(H)), np.sort_complex(np.linalg.eigvals(M)))


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_shifted_qr_matches_numpy(n):
    rng = np.random.default_rng(n)
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    got = np.sort_complex(hessenberg_qr_eigenvalues(M))
    ref = np.sort_complex(np.linalg.eigvals(M))
    assert np.allclose(got, ref, atol=1e-9)


def test_shifted_qr_jordan_block():
    M = np.diag(np.ones(3), 1) + 2 * np.eye(4)
    assert np.allclose(hessenberg_qr_eigenvalues(M), 2, atol=1e-3)


def test_adjoint_structure():
    A = random_matrix(random.Random(5), 3)
    X = complex_adjoint(A)
    ev = np.linalg.eigvals(X)
    # eigenvalues of the adjoint are closed under conjugation
    for z in ev:
        assert np.min(np.abs(ev - np.conj(z))) < 1e-9


def test_fold_pairs():
    vals = np.array([1 + 2j, 1 - 2j, 3 + 0j, 3 + 0j])
    assert fold_conjugate_pairs(vals) == [1 + 2j, 3 + 0j]


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_right_eigenvalues_match_numpy(m):
    for seed in range(5):
        A = random_matrix(random.Random(100 * m + seed), m)
        rs = right_eigenvalues(A)
        assert len(rs.eigenvalues) == m
        ref = np.linalg.eigvals(complex_adjoint(A))
        ref = np.sort_complex(ref[ref.imag >= 0]) if np.all(np.abs(ref.imag) > 1e-9) else None
        if ref is not None:
            assert np.allclose(np.sort_complex(np.array(rs.eigenvalues)), ref, atol=1e-8)
        assert rs.alpha == pytest.approx(min(rs.norms)) and rs.beta == pytest.approx(max(rs.norms))


def test_hermitian_right_eigenvalues_are_real():
    A = random_matrix(random.Random(9), 3)
    Hm = A + A.conj_transpose()
    assert all(abs(z.imag) < 1e-8 for z in right_eigenvalues(Hm).eigenvalues)


def test_example_right_spectra():
    # [[1, k], [k, 1]] has standard right eigenvalues 1 +- i folded to 1 + i twice
    rs = right_eigenvalues(EX41)
    assert np.allclose(rs.eigenvalues, [1 + 1j, 1 + 1j])
    rs = right_eigenvalues(QuaternionMatrix([[ZERO, ZERO], [ZERO, ZERO]]))
    assert rs.alpha == rs.beta == 0.0
    for A in (EX42, EX43, EX44):
        assert len(right_eigenvalues(A).eigenvalues) == A.rows
