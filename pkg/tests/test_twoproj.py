import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bcltriples.errors import CommutationFailure, LambdaOutOfRange, NotProjection, NotUnitary
from bcltriples.matcore import random_unitary, validate_structure
from bcltriples.twoproj import (
    CanonicalContraction,
    build_pq,
    complement_range_basis,
    halmos_blocks,
    projection_range_basis,
    range_projection,
)


def random_instance(rng, k, kernel=2, plus=1, minus=2):
    W = random_unitary(k, rng)
    mu = rng.uniform(0.05, 0.95, k)
    D = W @ np.diag(mu) @ W.conj().T
    U = W @ np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, k))) @ W.conj().T
    V = random_unitary(kernel, rng)
    E = V @ np.diag((rng.uniform(size=kernel) > 0.5).astype(float)) @ V.conj().T
    return CanonicalContraction(kernel, plus, minus, 0.5 * (D + D.conj().T)), E, U


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_pair_difference_is_a(k, seed):
    a, E, U = random_instance(np.random.default_rng(seed), k)
    pq = build_pq(a, E, U)
    assert validate_structure(pq.P, "Projection")
    assert validate_structure(pq.Q, "Projection")
    np.testing.assert_allclose(pq.P - pq.Q, a.matrix(), atol=1e-12)
    assert np.linalg.matrix_rank(pq.P_U, tol=1e-8) == k
    assert np.linalg.matrix_rank(pq.Q_U, tol=1e-8) == k


def test_scalar_case_exact():
    P_U, Q_U = halmos_blocks(np.array([[0.6]]), np.array([[1.0]]))
    assert np.abs(P_U - np.array([[0.8, 0.4], [0.4, 0.2]])).max() <= 1e-15
    assert np.abs(Q_U - np.array([[0.2, 0.4], [0.4, 0.8]])).max() <= 1e-15


def test_build_pq_errors():
    a = CanonicalContraction(1, 0, 0, np.diag([0.3, 0.7]))
    with pytest.raises(NotProjection):
        build_pq(a, E_kernel=np.array([[0.5]]))
    with pytest.raises(NotUnitary):
        build_pq(a, U_comm=np.diag([1.0, 2.0]))
    with pytest.raises(CommutationFailure):
        build_pq(a, U_comm=np.array([[0, 1], [1, 0]]))


def test_contraction_json():
    a = CanonicalContraction(1, 2, 0, np.diag([0.3]))
    b = CanonicalContraction.from_json(a.to_json())
    assert (b.kernel_dim, b.plus_dim, b.minus_dim, b.k_dim) == (1, 2, 0, 1)
    assert b.dim == 5


@pytest.mark.parametrize("lam", [0.1, 0.6, 0.95])
def test_range_bases_span_range_projection(lam):
    U = random_unitary(3, np.random.default_rng(5))
    R = range_projection(lam, U)
    assert validate_structure(R, "Projection")
    B = projection_range_basis(lam, U)
    C = complement_range_basis(lam, U)
    np.testing.assert_allclose(B @ B.conj().T, R, atol=1e-12)
    np.testing.assert_allclose(B @ B.conj().T + C @ C.conj().T, np.eye(6), atol=1e-12)


@pytest.mark.parametrize("lam", [0.0, 1.0, -0.2])
def test_lambda_out_of_range(lam):
    with pytest.raises(LambdaOutOfRange):
        range_projection(lam, np.eye(1))
