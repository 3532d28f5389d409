"""Shannon quantities (in bits) and the Csiszar-Korner yields built from them."""

from dataclasses import dataclass

import numpy as np

from tomoqkd.adversary import ALICE_BIT
from tomoqkd.errors import ValidationError
from tomoqkd.source import joint_distribution

LOG_FLOOR = 1e-15
DIST_TOL = 1e-9


def _check_distribution(p):
    p = np.asarray(p, dtype=float)
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ValidationError("probabilities must be finite and non-empty")
    if p.min() < -DIST_TOL:
        raise ValidationError(f"negative probability {p.min():.3e}")
    if abs(p.sum() - 1) > DIST_TOL:
        raise ValidationError(f"probabilities sum to {p.sum():.12f}, not 1")
    return np.clip(p, 0.0, None)


def _plogp(p):
    p = np.clip(p, 0.0, None)
    return np.where(p > 0, p * np.log2(np.maximum(p, LOG_FLOOR)), 0.0)


def entropy(dist):
    p = _check_distribution(dist)
    return float(-_plogp(p).sum())


def _mi(joint):
    # joint has shape (..., rows, cols); no validation, used on hot paths
    rows = joint.sum(axis=-1)
    cols = joint.sum(axis=-2)
    h_rows = -_plogp(rows).sum(axis=-1)
    h_cols = -_plogp(cols).sum(axis=-1)
    h_joint = -_plogp(joint).sum(axis=(-2, -1))
    return h_rows + h_cols - h_joint


def mutual_information(joint):
    joint = _check_distribution(joint)
    if joint.ndim != 2:
        raise ValidationError("joint distribution must be a 2-D array")
    return float(max(_mi(joint), 0.0))


def i_ab(c, basis):
    """Alice-Bob mutual information when both measure in ``basis``."""
    return mutual_information(joint_distribution(c, basis))


def alice_eve_joint(priors, conditionals):
    """Joint p(k, j) from ancilla priors and p(j | f_ak).

    ``conditionals`` has shape (..., 4, outcomes); leading axes broadcast, which
    the optimizers use to score whole parameter grids at once.
    """
    weighted = priors[:, None] * conditionals
    return np.stack(
        [weighted[..., ALICE_BIT == k, :].sum(axis=-2) for k in (0, 1)],
        axis=-2,
    )


def i_ae_batch(priors, conditionals):
    return np.maximum(_mi(alice_eve_joint(priors, conditionals)), 0.0)


def i_ae(e, povm):
    """Mutual information between Alice's bit and Eve's outcome for ``povm`` on ensemble ``e``."""
    if povm.dim != e.span_dim:
        raise ValidationError(f"POVM acts on dimension {povm.dim}, ancilla span is {e.span_dim}")
    joint = alice_eve_joint(e.priors, povm.probabilities(e.vectors))
    return mutual_information(joint)


@dataclass(frozen=True)
class BasisReport:
    basis: object
    i_ab: float
    i_ae_max: float
    yield_: float
    optimal_params: object

    def to_dict(self):
        return {
            "basis": self.basis.value,
            "i_ab": self.i_ab,
            "i_ae_max": self.i_ae_max,
            "yield": self.yield_,
            "optimal_params": dict(vars(self.optimal_params)),
        }


def yields(z, x, y):
    """Overall yield: bases with negative yield are discarded, the rest averaged with weight 1/3."""
    return sum(max(r.yield_, 0.0) for r in (z, x, y)) / 3


@dataclass(frozen=True)
class YieldReport:
    params: object
    coefficients: object
    reports: dict
    overall_yield: float
    entangled: bool

    def to_dict(self):
        return {
            "params": dict(vars(self.params)),
            "coefficients": dict(vars(self.coefficients)),
            "bases": {b.value: r.to_dict() for b, r in self.reports.items()},
            "overall_yield": self.overall_yield,
            "entangled": self.entangled,
        }
