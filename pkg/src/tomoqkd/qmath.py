"""Complex linear algebra for the tiny (dim <= 4) Hermitian matrices used throughout.

Matrices are plain ``numpy`` arrays. The eigensolver is a cyclic Jacobi
iteration with complex rotations; at these sizes it converges in a handful of
sweeps and needs no LAPACK call.
"""

import numpy as np

from tomoqkd.errors import InvalidGramError, ValidationError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-9
GRAM_TOL = 1e-10
OFFDIAG_TOL = 1e-14
MAX_SWEEPS = 64


def as_hermitian(m, tol=HERMITIAN_TOL):
    """Return ``m`` as a complex square array, symmetrized, or raise if it is not Hermitian."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    dev = np.abs(m - m.conj().T).max() if m.size else 0.0
    if dev > tol * max(1.0, np.abs(m).max()):
        raise ValidationError(f"matrix is not Hermitian (max |m - m^H| = {dev:.3e})")
    return (m + m.conj().T) / 2


def _offdiag_norm(a):
    return np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))


def eig_hermitian(m):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues real and sorted in
    descending order and eigenvectors as the columns of a unitary matrix, so
    ``m == V @ diag(w) @ V^H``.
    """
    a = as_hermitian(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(MAX_SWEEPS):
        if _offdiag_norm(a) < OFFDIAG_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = abs(a[p, q])
                if h < 1e-300:
                    continue
                # remove the phase of a[p, q], then a real symmetric rotation
                phase = a[p, q] / h
                theta = (a[q, q].real - a[p, p].real) / (2 * h)
                if abs(theta) > 1e150:
                    t = 0.5 / abs(theta)
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                u = np.eye(n, dtype=complex)
                u[p, p] = c
                u[p, q] = s
                u[q, p] = -s * np.conj(phase)
                u[q, q] = c * np.conj(phase)
                a = u.conj().T @ a @ u
                a[p, q] = a[q, p] = 0.0
                v = v @ u
    w = np.real(np.diag(a))
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvals_hermitian(m):
    return eig_hermitian(m)[0]


def is_psd(m, tol=PSD_TOL):
    """True iff the smallest eigenvalue of ``m`` is at least ``-tol``."""
    w = eigvals_hermitian(m)
    return bool(w.size == 0 or w[-1] >= -tol)


def psd_power(m, power, cutoff=1e-12):
    """``m**power`` for a PSD matrix, with eigenvalues below ``cutoff`` treated as zero.

    Negative powers act as the pseudo-inverse power on the support.
    """
    w, v = eig_hermitian(m)
    keep = w > cutoff
    wp = np.zeros_like(w)
    wp[keep] = w[keep] ** power
    return (v * wp) @ v.conj().T


def embed_gram(g, cutoff=1e-12):
    """Realize a Gram matrix as explicit vectors.

    Returns ``(vectors, rank)`` where ``vectors`` has one row per index of ``g``
    living in ``C**rank`` and ``vectors[i].conj() @ vectors[j] == g[i, j]``.
    Uses the eigendecomposition rather than Cholesky so rank-deficient Gram
    matrices embed without trouble.
    """
    w, v = eig_hermitian(g)
    if w.size and w[-1] < -GRAM_TOL:
        raise InvalidGramError(float(w[-1]))
    keep = w > cutoff
    rank = int(np.count_nonzero(keep))
    # row i of (V sqrt(W))^* is the coordinate vector of ket i
    vectors = (v[:, keep] * np.sqrt(w[keep])).conj()
    return vectors, rank


def gram(vectors):
    """Gram matrix ``G[i, j] = <v_i|v_j>`` of a stack of row vectors."""
    vectors = np.asarray(vectors)
    return vectors.conj() @ vectors.T


def partial_transpose(rho, dims=(2, 2), system=1):
    """Partial transpose of a bipartite density matrix on ``system`` (0 or 1)."""
    d0, d1 = dims
    r = np.asarray(rho).reshape(d0, d1, d0, d1)
    if system == 1:
        r = r.transpose(0, 3, 2, 1)
    else:
        r = r.transpose(2, 1, 0, 3)
    return r.reshape(d0 * d1, d0 * d1)
