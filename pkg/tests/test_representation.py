import random
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quatleft import NotInRepresentation, QuaternionMatrix, RankNotMultipleOfFour, Quaternion
from quatleft.representation import (
    N_FORMS, check_conjugations, check_determinants, check_form, convert_form, convert_scalar,
    elementary_conjugation_check, enumerate_forms, exact_det, exact_rank, get_form, p_map, p_map_float,
    p_rank, q_map, q_unmap, random_matrix, random_quaternion,
)

from cases import EX41, I, J, K, ONE


def test_forty_eight_distinct_hamiltonian_forms():
    forms = enumerate_forms()
    assert len(forms) == N_FORMS == 48
    assert len(set(forms)) == 48
    assert all(f.satisfies_hamiltonian() for f in forms)
    assert [f.index for f in forms] == list(range(1, 49))


def test_form_one_is_pinned():
    f = get_form(1)
    assert f.H.tolist() == [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    assert f.J.tolist() == [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
    assert (f.K == f.H @ f.J).all()
    assert (q_map(1, K) == f.K).all()


def test_form_index_bounds():
    for k in (0, 49):
        with pytest.raises(ValueError):
            get_form(k)


def test_unmap_round_trip_every_form():
    rng = random.Random(3)
    for f in enumerate_forms():
        q = random_quaternion(rng)
        assert q_unmap(f.index, q_map(f.index, q)) == q


def test_unmap_rejects_foreign_block():
    M = np.zeros((4, 4), dtype=object)
    M[0, 1] = Fr(1)
    with pytest.raises(NotInRepresentation):
        q_unmap(1, M)


@pytest.mark.parametrize("k", [1, 2, 17, 30, 48])
def test_homomorphism_and_determinant(k):
    assert check_form(k, n_samples=100, seed=5)
    assert check_determinants(k, n_samples=30, seed=5)


def test_conjugations_form_one():
    assert check_conjugations(200, seed=2)
    assert elementary_conjugation_check(Quaternion(Fr(1, 3), -2, 5, Fr(7, 2)))


def test_rank_examples():
    # [[1, i], [j, k]] is invertible; flipping the sign of k makes row 2 = j * row 1
    assert p_rank(p_map(1, QuaternionMatrix([[ONE, I], [J, K]]))) == 8
    assert p_rank(p_map(1, QuaternionMatrix([[ONE, I], [J, -K]]))) == 4
    assert p_rank(p_map(1, EX41)) == 8


def test_rank_rejects_non_image():
    M = np.zeros((4, 4), dtype=object)
    M[0, 0] = 1
    assert exact_rank(M) == 1
    with pytest.raises(RankNotMultipleOfFour):
        p_rank(M)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3), st.integers(1, 48))
def test_rank_matches_numpy_and_is_multiple_of_four(seed, m, n, k):
    rng = random.Random(seed)
    A = random_matrix(rng, m, n, bound=2, denom=2)
    if rng.random() < 0.5 and m > 1:
        # force a dependent row
        q = random_quaternion(rng)
        A = QuaternionMatrix([list(A[0, j] for j in range(n))] + [[q * A[0, j] for j in range(n)] for _ in range(m - 1)])
    P = p_map(k, A)
    r = p_rank(P)
    assert r == np.linalg.matrix_rank(P.astype(float))
    assert r % 4 == 0


def test_exact_det_matches_numpy():
    rng = random.Random(11)
    A = random_matrix(rng, 2)
    P = p_map(1, A)
    d = exact_det(P)
    assert isinstance(d, Fr)
    assert float(d) == pytest.approx(np.linalg.det(P.astype(float)), rel=1e-9)
    assert d >= 0


def test_float_map_matches_exact():
    rng = random.Random(4)
    A = random_matrix(rng, 2, 3)
    for k in (1, 9, 40):
        assert np.allclose(p_map_float(A, k), p_map(k, A).astype(float))


def test_convert_form_shares_span_with_form_one():
    # forms spanning the same algebra as form 1 convert; the rest refuse
    rng = random.Random(8)
    A = random_matrix(rng, 2)
    ok = 0
    for f in enumerate_forms():
        try:
            B = convert_form(A, 1, f.index)
        except NotInRepresentation:
            continue
        ok += 1
        assert (p_map(f.index, B) == p_map(1, A)).all()
        assert convert_form(B, f.index, 1) == A
    assert ok == 24


def test_convert_scalar_identity_form():
    q = Quaternion(1, 2, 3, 4)
    assert convert_scalar(q, 5, 5) == q
