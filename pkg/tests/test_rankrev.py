"""Numerical rank and refined kernel basis."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from georeg import rankrev as K

from helpers import kernel_instance, unit_noise


def test_diagonal_rank_two():
    k = K.numerical_kernel(np.diag([1.0, 1.0, 0.0]), 1e-6)
    assert k.rank == 2 and k.nullity == 1
    x = k.kernel_basis[:, 0]
    assert np.allclose(np.abs(x), [0, 0, 1], atol=1e-14)
    assert k.backward_error == 0.0


def test_zero_matrix():
    k = K.numerical_kernel(np.zeros((3, 3)), 1e-6)
    assert k.rank == 0 and k.nullity == 3
    assert np.allclose(k.normalizer.conj().T @ k.kernel_basis, np.eye(3), atol=1e-14)
    assert abs(k.sigma_min_X - 1) <= 1e-14


def test_full_rank_has_empty_kernel():
    k = K.numerical_kernel(np.eye(4), 1e-8)
    assert k.rank == 4 and k.nullity == 0
    assert k.codimension == 0


def test_codimension_formula():
    A, _ = kernel_instance(0, 8, 6, 4)
    k = K.numerical_kernel(A, 1e-8)
    assert k.codimension == (8 - 4) * (6 - 4)


def test_input_validation():
    with pytest.raises(ValueError):
        K.numerical_kernel(np.eye(2), 0.0)
    with pytest.raises(ValueError):
        K.numerical_kernel(np.zeros((0, 3)), 1e-6)


def test_exact_data_idempotent():
    A, N = kernel_instance(1)
    k = K.numerical_kernel(A, 1e-8)
    X, res, _ = K.kernel_refine(A, k.normalizer, k.kernel_basis)
    assert np.linalg.norm(X - k.kernel_basis) <= 1e-12
    assert res.iterations == 0


def test_tolerance_decides_rank():
    A = np.diag([1.0, 1e-3, 1e-9])
    assert K.numerical_kernel(A, 1e-6).rank == 2
    assert K.numerical_kernel(A, 1e-2).rank == 1
    assert K.numerical_kernel(A, 1e-12).rank == 3


def test_principal_angles_identical_and_orthogonal():
    E = np.eye(4)
    assert np.allclose(K.principal_angles(E[:, :2], E[:, :2] @ np.array([[1, 1], [1, -1]])), 0, atol=1e-14)
    assert np.allclose(K.principal_angles(E[:, :2], E[:, 2:]), np.pi / 2)


def test_model_linear_and_sized():
    A, _ = kernel_instance(2)
    C = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 2)))[0]
    m = K.kernel_model(A, C)
    assert m.dim_unknowns == 12 and m.dim_residual == 4 + 16


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_noisy_kernel_recovered(seed):
    A, N = kernel_instance(seed)
    rng = np.random.default_rng(seed + 1)
    At = A + unit_noise(rng, A.shape, 1e-8) + 1j * unit_noise(rng, A.shape, 1e-8)
    k = K.numerical_kernel(At, 1e-6)
    assert k.rank == 4
    assert np.max(K.principal_angles(k.kernel_basis, N)) <= 1e-7
    # normalization and residual certificates
    assert np.linalg.norm(k.normalizer.conj().T @ k.kernel_basis - np.eye(2)) <= 1e-10
    s = np.linalg.svd(At, compute_uv=False)
    assert np.linalg.norm(At @ k.kernel_basis) <= np.linalg.norm(s[4:]) + 1e-10 * np.linalg.norm(At)
