"""Eve's measurement families on the ancilla span.

Two structured families:

* sigma_z key: project onto the correlated (a = 0) kets, which are
  orthonormal, and measure the anticorrelated pair with a square-root
  measurement rotated by ``theta``.
* sigma_x / sigma_y key: a four-outcome projective measurement whose kets are
  real combinations of the eigenbasis g_0..g_3 of Eve's total ancilla state,
  parameterized by ``(a_param, c_param)``.

Every POVM is expressed in the coordinates of ``AncillaEnsemble.vectors`` and
sums to the identity on that span.
"""

import math
from dataclasses import dataclass

import numpy as np

from tomoqkd.errors import ConstructionError, ValidationError
from tomoqkd.qmath import PSD_TOL, eigvals_hermitian, psd_power
from tomoqkd.source import Basis

HALF_ROOT = 1 / math.sqrt(2)
GAMMA_DEGENERATE = 1e-10
ORTHONORMAL_TOL = 1e-9
_NORM_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class Povm:
    outcomes: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.outcomes) != len(self.labels):
            raise ValidationError("one label per outcome required")

    @classmethod
    def from_kets(cls, kets, labels):
        return cls(tuple(np.outer(w, w.conj()) for w in kets), tuple(labels))

    @property
    def dim(self):
        return self.outcomes[0].shape[0]

    def probabilities(self, vectors):
        """p[i, j] = <f_i|E_j|f_i> for each row vector f_i."""
        vectors = np.asarray(vectors)
        ops = np.array(self.outcomes)
        return np.real(np.einsum("id,jde,ie->ij", vectors.conj(), ops, vectors))


@dataclass(frozen=True)
class ZFamilyParams:
    theta: float


@dataclass(frozen=True)
class XYFamilyParams:
    a_param: float
    c_param: float

    def __post_init__(self):
        for name in ("a_param", "c_param"):
            v = getattr(self, name)
            if not (math.isfinite(v) and abs(v) <= HALF_ROOT + 1e-12):
                raise ValidationError(f"{name} must lie in [-1/sqrt(2), 1/sqrt(2)], got {v}")

    @property
    def b(self):
        return math.sqrt(max(0.5 - self.a_param**2, 0.0))

    @property
    def d(self):
        return math.sqrt(max(0.5 - self.c_param**2, 0.0))


def srm_success(lam):
    """Success probability (1 + sqrt(1 - lam^2)) / 2 of the square-root measurement on two
    equiprobable pure states with overlap ``lam``."""
    if not abs(lam) <= 1 + 1e-12:
        raise ValidationError(f"overlap must satisfy |lam| <= 1, got {lam}")
    return (1 + math.sqrt(max(1 - lam * lam, 0.0))) / 2


def validate(povm, span_dim):
    """Max entrywise deviation of sum(outcomes) from the identity; raises if an outcome is not PSD."""
    total = np.zeros((span_dim, span_dim), dtype=complex)
    for label, op in zip(povm.labels, povm.outcomes):
        op = np.asarray(op)
        if op.shape != (span_dim, span_dim):
            raise ValidationError(f"outcome {label!r} has shape {op.shape}, expected {(span_dim, span_dim)}")
        w = eigvals_hermitian(op)
        if w[-1] < -PSD_TOL:
            raise ValidationError(f"outcome {label!r} is not PSD (eigenvalue {w[-1]:.3e})")
        total += op
    return float(np.abs(total - np.eye(span_dim)).max())


def srm_kets(e):
    """Square-root measurement kets (omega_10, omega_11) for the anticorrelated pair of a Z ensemble.

    Built as [f_10, f_11] G^(-1/2) with G their 2x2 Gram matrix, then oriented so
    that <omega_10|f_10> >= 0 and <omega_11|f_10> >= 0. With that orientation
    p(omega_10|f_10) = eta and p(omega_11|f_10) = 1 - eta carry the same signs
    for either sign of the overlap.
    """
    f = e.vectors[2:4].T
    pair_gram = f.conj().T @ f
    w = f @ psd_power(pair_gram, -0.5)
    kets = [w[:, 0], w[:, 1]]
    f10 = e.vectors[2]
    for i in range(2):
        if np.real(np.vdot(kets[i], f10)) < 0:
            kets[i] = -kets[i]
    return kets


def z_family(e, params):
    """Sort by correlation flag, then a rotated square-root measurement on the a = 1 pair."""
    if e.basis is not Basis.Z:
        raise ValidationError("z_family needs a sigma_z ensemble")
    theta = params.theta if isinstance(params, ZFamilyParams) else float(params)
    w10, w11 = srm_kets(e)
    c, s = math.cos(theta), math.sin(theta)
    kets = [e.vectors[0], e.vectors[1], c * w10 - s * w11, s * w10 + c * w11]
    return Povm.from_kets(kets, ("f00", "f01", "w10", "w11"))


@dataclass(frozen=True, eq=False)
class GBasis:
    """Orthonormal eigenbasis of Eve's total sigma_x/y ancilla state.

    ``kets`` holds only the members with nonzero norm (``kept`` gives their
    indices among g_0..g_3); when alpha = 0 the symmetric combinations vanish
    and the span is two-dimensional.
    """

    kets: np.ndarray
    kept: tuple
    kappa_plus: float
    kappa_minus: float
    eta_x: float
    degenerate: bool


def g_basis(e, c):
    if e.basis is Basis.Z:
        raise ValidationError("g_basis needs a sigma_x / sigma_y ensemble")
    f00, f01, f10, f11 = e.vectors
    lam0, lam1 = e.overlaps["lambda0"], e.overlaps["lambda1"]
    d0, d1 = f00 - f01, f10 - f11
    root = math.sqrt((c.beta2 - c.beta1) ** 2 + 4 * c.gamma**2)
    kp = c.beta2 - c.beta1 + root
    km = -4 * c.gamma**2 / kp if kp > 0 else 0.0
    degenerate = abs(c.gamma) < GAMMA_DEGENERATE

    raw = [(f00 + f01, 2 * (1 + lam0)), (f10 + f11, 2 * (1 + lam1))]
    s0, s1 = c.alpha + c.beta1, c.alpha + c.beta2
    eta_x = 2 * c.gamma * math.sqrt(s1 / s0) if s0 > 0 else 0.0
    # g_2 ~ kappa+ d0 + eta_x d1 and g_3 ~ kappa- d0 + eta_x d1, rescaled by 1/kappa+ and
    # 1/eta_x so both stay well conditioned as gamma -> 0 (kappa- = -4 gamma^2 / kappa+)
    u = eta_x / kp if kp > 0 else 0.0
    t = -2 * c.gamma * math.sqrt(s0 / s1) / kp if kp > 0 and s1 > 0 else 0.0
    cross = 8 * e.overlaps["chi"]  # 2 <d0|d1> = 8 chi
    raw += [
        (d0 + u * d1, 2 * (1 - lam0) + 2 * u * u * (1 - lam1) + u * cross),
        (t * d0 + d1, 2 * t * t * (1 - lam0) + 2 * (1 - lam1) + t * cross),
    ]

    kets, kept = [], []
    for i, (vec, norm_sq) in enumerate(raw):
        if norm_sq > _NORM_FLOOR:
            kets.append(vec / math.sqrt(norm_sq))
            kept.append(i)
    kets = np.array(kets)
    overlaps = kets.conj() @ kets.T
    err = np.abs(overlaps - np.eye(len(kept))).max()
    if err > ORTHONORMAL_TOL or len(kept) != e.span_dim:
        raise ConstructionError(
            f"g-basis not orthonormal on the ancilla span (error {err:.2e}, {len(kept)} kets, span {e.span_dim})"
        )
    return GBasis(kets, tuple(kept), kp, km, eta_x, degenerate)


def xy_matrix(a, c):
    """Real orthogonal 4x4 map from (g_0..g_3) to (omega_0..omega_3), b and d the nonnegative roots.

    Accepts arrays of equal shape for ``a`` and ``c``; the matrix axes come last.
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    b = np.sqrt(np.clip(0.5 - a * a, 0.0, None))
    d = np.sqrt(np.clip(0.5 - c * c, 0.0, None))
    rows = [
        [-a, a, b, b],
        [b, -b, a, a],
        [c, c, -d, d],
        [d, d, c, -c],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def xy_family(e, c, params, basis=None):
    """Four rank-1 outcomes omega_j = sum_i M_ij g_i on Eve's sigma_x / sigma_y ancilla span."""
    basis = basis or g_basis(e, c)
    m = xy_matrix(params.a_param, params.c_param)[list(basis.kept)]
    kets = m.T @ basis.kets
    return Povm.from_kets(kets, ("w0", "w1", "w2", "w3"))
