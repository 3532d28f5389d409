import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomoqkd.errors import InvalidGramError, ValidationError
from tomoqkd.qmath import (
    as_hermitian,
    eig_hermitian,
    eigvals_hermitian,
    embed_gram,
    gram,
    is_psd,
    partial_transpose,
    psd_power,
)
from tomoqkd.source import SourceParams, coefficients, density_matrix_z


def test_identity_eigen():
    w, v = eig_hermitian(np.eye(2))
    assert np.allclose(w, [1, 1])
    assert np.allclose(v.conj().T @ v, np.eye(2))


def test_diagonal_eigen():
    assert np.allclose(eigvals_hermitian(np.diag([0.5, 0.5, 0, 0])), [0.5, 0.5, 0, 0])


def test_anticorrelated_gram_block():
    assert np.allclose(eigvals_hermitian([[1, -0.9], [-0.9, 1]]), [1.9, 0.1], atol=1e-14)


def test_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        eig_hermitian([[1, 2], [0, 1]])
    with pytest.raises(ValidationError):
        as_hermitian(np.ones((2, 3)))


def _random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_reconstruction_matches_numpy(rng):
    for _ in range(200):
        n = int(rng.integers(1, 5))
        m = _random_hermitian(rng, n)
        w, v = eig_hermitian(m)
        assert np.abs(v @ np.diag(w) @ v.conj().T - m).max() < 1e-10
        assert np.abs(v.conj().T @ v - np.eye(n)).max() < 1e-10
        assert np.allclose(w, np.linalg.eigvalsh(m)[::-1], atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4))
def test_real_diagonal_spectrum(diag):
    w = eigvals_hermitian(np.diag(diag))
    assert np.allclose(w, sorted(diag, reverse=True))


def test_degenerate_and_tiny_offdiagonal():
    m = np.array([[1, 1e-200], [1e-200, 1]], dtype=complex)
    assert np.allclose(eigvals_hermitian(m), [1, 1])


def test_is_psd():
    assert is_psd(np.eye(4))
    assert not is_psd(np.diag([1, -0.001]), tol=1e-9)
    assert is_psd(density_matrix_z(coefficients(SourceParams(1.1, 0.1, 0.9))))


def test_psd_power_inverse_sqrt(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    m = a @ a.conj().T
    r = psd_power(m, -0.5)
    assert np.allclose(r @ m @ r, np.eye(3), atol=1e-9)


def test_embed_identity_and_rank_one():
    vecs, rank = embed_gram(np.eye(2))
    assert rank == 2
    assert np.allclose(gram(vecs), np.eye(2))
    vecs, rank = embed_gram([[1, 1], [1, 1]])
    assert rank == 1
    assert np.allclose(vecs[0], vecs[1])
    assert np.isclose(np.linalg.norm(vecs[0]), 1)


def test_embed_reproduces_gram(rng):
    for _ in range(50):
        a = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
        g = a.conj() @ a.T
        vecs, rank = embed_gram(g)
        assert rank == 3
        assert np.abs(gram(vecs) - g).max() < 1e-10


def test_invalid_gram_names_eigenvalue():
    with pytest.raises(InvalidGramError, match="invalid Gram") as info:
        embed_gram([[1, 2], [2, 1]])
    assert info.value.eigenvalue == pytest.approx(-1)


def test_partial_transpose_of_bell_state():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(psi, psi)
    w = np.linalg.eigvalsh(partial_transpose(rho))
    assert np.isclose(w.min(), -0.5)
    # transposing either side gives the same spectrum
    assert np.allclose(np.linalg.eigvalsh(partial_transpose(rho, system=0)), w)
