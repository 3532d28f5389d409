"""Eve's side of the purification, one ensemble per key basis.

After basis announcement Eve holds, for every pair, one of four ancilla kets
|f_ak> with prior mu_ak, where k is Alice's bit and a flags whether Bob's bit
differs from Alice's. The four kets are indexed in the fixed order
(a, k) = (0, 0), (0, 1), (1, 0), (1, 1); every POVM construction in
:mod:`tomoqkd.measurement` relies on it.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from tomoqkd.qmath import embed_gram, gram as gram_of
from tomoqkd.source import Basis, density_matrix_z, local_kets

INDEX = ((0, 0), (0, 1), (1, 0), (1, 1))
# Alice's bit k for each ancilla index
ALICE_BIT = np.array([k for _, k in INDEX])


@dataclass(frozen=True, eq=False)
class AncillaEnsemble:
    basis: Basis
    priors: np.ndarray
    gram: np.ndarray
    vectors: np.ndarray
    rank: int
    overlaps: dict = field(default_factory=dict)

    @property
    def span_dim(self):
        return self.vectors.shape[1]

    def alice_marginal(self):
        return np.array([self.priors[ALICE_BIT == k].sum() for k in (0, 1)])


@dataclass(frozen=True, eq=False)
class ConditionalState:
    k: int
    operator: np.ndarray
    weight: float


def _safe_ratio(num, den, fallback):
    return num / den if den > 0 else fallback


def z_overlap(c):
    # (b1+b2)^2 - 4 gamma^2 >= (b1-b2)^2, so the root is real for valid coefficients
    return (c.beta1 - c.beta2) / math.sqrt((c.beta1 + c.beta2) ** 2 - 4 * c.gamma**2)


def xy_overlaps(c):
    """(lambda0, lambda1, chi) for the sigma_x / sigma_y ensemble.

    A vanishing prior (alpha + beta = 0) leaves the corresponding kets
    undefined; they are then taken antiparallel (lambda = -1, the alpha -> 0
    limit) and orthogonal to the other pair (chi = 0). Such kets carry no
    weight, so this choice never reaches a probability.
    """
    s0 = c.alpha + c.beta1
    s1 = c.alpha + c.beta2
    lam0 = _safe_ratio(c.alpha - c.beta1, s0, -1.0)
    lam1 = _safe_ratio(c.alpha - c.beta2, s1, -1.0)
    chi = _safe_ratio(-c.gamma, math.sqrt(max(s0 * s1, 0.0)), 0.0)
    return lam0, lam1, chi


def ensemble(c, basis, cutoff=1e-12):
    """Priors, Gram matrix and embedded ancilla kets for key basis ``basis``."""
    basis = Basis.parse(basis)
    g = np.eye(4)
    if basis is Basis.Z:
        s = (c.beta1 + c.beta2) / 2
        priors = np.array([c.alpha, c.alpha, s + c.gamma, s - c.gamma])
        lam = z_overlap(c)
        g[2, 3] = g[3, 2] = lam
        overlaps = {"lambda": lam}
    else:
        priors = np.array([c.alpha + c.beta1] * 2 + [c.alpha + c.beta2] * 2) / 2
        lam0, lam1, chi = xy_overlaps(c)
        g[0, 1] = g[1, 0] = lam0
        g[2, 3] = g[3, 2] = lam1
        for kp in (0, 1):
            for k in (0, 1):
                # <f_0k'|f_1k> = chi (-1)^(k+k')
                g[kp, 2 + k] = g[2 + k, kp] = chi * (-1) ** (k + kp)
        overlaps = {"lambda0": lam0, "lambda1": lam1, "chi": chi}
    priors = np.clip(priors, 0.0, None)
    vectors, rank = embed_gram(g, cutoff)
    return AncillaEnsemble(basis, priors, g, vectors, rank, overlaps)


def conditional_states(e):
    """Eve's normalized ancilla state given Alice's bit k = 0, 1 (exact Bayes conditioning)."""
    out = []
    for k in (0, 1):
        idx = np.flatnonzero(ALICE_BIT == k)
        weight = float(e.priors[idx].sum())
        op = np.zeros((e.span_dim, e.span_dim), dtype=complex)
        if weight > 0:
            for i in idx:
                f = e.vectors[i]
                op += (e.priors[i] / weight) * np.outer(f, f.conj())
        out.append(ConditionalState(k, op, weight))
    return tuple(out)


def reduced_state(e):
    """rho_AB in the computational product basis, rebuilt from the purification over ``e``."""
    kets = local_kets(e.basis)
    psi_ab = [np.kron(kets[k], kets[(k + a) % 2]) for a, k in INDEX]
    overlaps = gram_of(e.vectors)
    rho = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            amp = math.sqrt(e.priors[i] * e.priors[j]) * overlaps[j, i]
            rho += amp * np.outer(psi_ab[i], psi_ab[j].conj())
    return rho


def purification_check(c, basis=Basis.Z):
    """Max entrywise deviation between the traced-out purification and the source density matrix."""
    return float(np.abs(reduced_state(ensemble(c, basis)) - density_matrix_z(c)).max())


def z_ensemble_alt_conditioning(c):
    """Z ensemble with Alice's bit weighted 1/2 +- gamma inside the anticorrelated branch.

    Only used to measure how far that alternative normalization moves Eve's
    information; :func:`ensemble` is the exact joint.
    """
    e = ensemble(c, Basis.Z)
    branch = c.beta1 + c.beta2
    priors = e.priors.copy()
    priors[2] = branch * (0.5 + c.gamma)
    priors[3] = branch * (0.5 - c.gamma)
    return AncillaEnsemble(e.basis, np.clip(priors, 0, None), e.gram, e.vectors, e.rank, e.overlaps)
