"""Two-photon state produced by the quantum-dot source.

Experimental knobs (beamsplitter ratio R/T, two-photon correlation g,
wave-packet overlap V and white-noise fraction F) map onto four numbers
alpha, beta1, beta2, gamma which fix the two-qubit density matrix in every
basis.

White noise is folded into those four numbers once, in :func:`coefficients`.
Mixing with the identity keeps the Bell-basis block structure intact
(alpha, beta1 and beta2 each gain F/4 and gamma is scaled by 1 - F), so every
downstream formula (ancilla overlaps, POVM families, priors) applies unchanged
to the noisy state. Nothing else in the package knows about F.

No extra validity guard on g is needed: beta1 >= 0 requires
R/T + T/R >= 2V, which always holds because R/T + T/R >= 2 >= 2V.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from tomoqkd.errors import InvariantError, ValidationError
from tomoqkd.qmath import eigvals_hermitian, partial_transpose

ENTANGLEMENT_TOL = 1e-10


# phase of the Bell states |m_ab> = sum_k w^(kb) |m_k, m_(k+a)> / sqrt(2)
BELL_PHASE = -1


class Basis(str, enum.Enum):
    """Measurement basis shared by Alice and Bob."""

    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class SourceParams:
    ratio: float
    g: float
    V: float
    F: float = 0.0

    def __post_init__(self):
        for name in ("ratio", "g", "V", "F"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if self.ratio <= 0:
            raise ValidationError(f"ratio must be > 0, got {self.ratio}")
        if self.g < 0:
            raise ValidationError(f"g must be >= 0, got {self.g}")
        if not 0 <= self.V <= 1:
            raise ValidationError(f"V must lie in [0, 1], got {self.V}")
        if not 0 <= self.F <= 1:
            raise ValidationError(f"F must lie in [0, 1], got {self.F}")

    def replace(self, **changes):
        fields = {"ratio": self.ratio, "g": self.g, "V": self.V, "F": self.F}
        fields.update(changes)
        return SourceParams(**fields)


@dataclass(frozen=True)
class StateCoefficients:
    alpha: float
    beta1: float
    beta2: float
    gamma: float

    def check(self, tol=1e-12):
        if abs(2 * self.alpha + self.beta1 + self.beta2 - 1) > tol:
            raise InvariantError("2*alpha + beta1 + beta2 != 1")
        if min(self.alpha, self.beta1, self.beta2) < -tol:
            raise InvariantError(f"negative coefficient in {self}")
        if self.beta1 * self.beta2 - self.gamma**2 < -tol:
            raise InvariantError("Bell-basis block is not positive semidefinite")
        return self


def coefficients(params):
    r = params.ratio + 1 / params.ratio
    delta = params.ratio - 1 / params.ratio
    denom = 2 * r + 8 * params.g
    alpha = 2 * params.g / (r + 4 * params.g)
    beta1 = (r - 2 * params.V) / denom
    beta2 = (r + 2 * params.V) / denom
    gamma = delta / denom

    F = params.F
    c = StateCoefficients(
        alpha=(1 - F) * alpha + F / 4,
        beta1=(1 - F) * beta1 + F / 4,
        beta2=(1 - F) * beta2 + F / 4,
        gamma=(1 - F) * gamma,
    )
    return c.check()


def density_matrix_z(c):
    """Density matrix in the computational (sigma_z) product basis |00>, |01>, |10>, |11>."""
    s = (c.beta1 + c.beta2) / 2
    off = (c.beta1 - c.beta2) / 2
    rho = np.zeros((4, 4))
    rho[0, 0] = rho[3, 3] = c.alpha
    rho[1, 1] = s + c.gamma
    rho[2, 2] = s - c.gamma
    rho[1, 2] = rho[2, 1] = off
    return rho


def bell_matrix(c, basis):
    """Density matrix in the Bell basis of ``basis``, indices ordered (a, b) = 00, 01, 10, 11."""
    basis = Basis.parse(basis)
    rho = np.zeros((4, 4))
    if basis is Basis.Z:
        rho[0, 0] = rho[1, 1] = c.alpha
        rho[2, 2], rho[3, 3] = c.beta1, c.beta2
        rho[2, 3] = rho[3, 2] = c.gamma
    else:
        rho[0, 0] = rho[2, 2] = c.alpha
        rho[1, 1], rho[3, 3] = c.beta1, c.beta2
        rho[1, 3] = rho[3, 1] = -c.gamma
    return rho


def local_kets(basis):
    """Eigenkets |m_0>, |m_1> of the single-qubit Pauli operator for ``basis``."""
    s = 1 / math.sqrt(2)
    basis = Basis.parse(basis)
    if basis is Basis.Z:
        return np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    if basis is Basis.X:
        return np.array([s, s], dtype=complex), np.array([s, -s], dtype=complex)
    return np.array([s, 1j * s]), np.array([s, -1j * s])


def bell_states(basis):
    """Unitary whose columns are the Bell states |m_ab> = sum_k w^(kb) |m_k, m_(k+a)> / sqrt(2)."""
    kets = local_kets(basis)
    cols = []
    for a in range(2):
        for b in range(2):
            cols.append(
                sum(BELL_PHASE ** (k * b) * np.kron(kets[k], kets[(k + a) % 2]) for k in range(2))
                / math.sqrt(2)
            )
    return np.array(cols).T


def joint_distribution(c, basis):
    """p[kA][kB]: probability that Alice reads kA and Bob reads kB when both measure ``basis``."""
    basis = Basis.parse(basis)
    if basis is Basis.Z:
        s = (c.beta1 + c.beta2) / 2
        return np.array([[c.alpha, s + c.gamma], [s - c.gamma, c.alpha]])
    same = (c.alpha + c.beta1) / 2
    flip = (c.alpha + c.beta2) / 2
    return np.array([[same, flip], [flip, same]])


def is_entangled(c):
    """Peres-Horodecki test, exact for two qubits.

    Returns ``(entangled, min_pt_eigenvalue)``. The condition V > 2g is only
    the gamma = 0 special case of this.
    """
    w = eigvals_hermitian(partial_transpose(density_matrix_z(c)))
    lowest = float(w[-1])
    return lowest < -ENTANGLEMENT_TOL, lowest
