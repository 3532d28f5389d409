"""Maximization of Eve's information.

``maximize_theta`` and ``maximize_ac`` search the structured POVM families;
``accessible_info_oracle`` searches all rank-1 POVMs with a given number of
outcomes and serves as an independent ceiling for both.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter
from scipy.optimize import minimize, minimize_scalar

from tomoqkd.adversary import ALICE_BIT
from tomoqkd.errors import ValidationError
from tomoqkd.infotheory import LOG_FLOOR, i_ae_batch
from tomoqkd.measurement import HALF_ROOT, Povm, XYFamilyParams, ZFamilyParams, g_basis, srm_kets, xy_matrix
from tomoqkd.source import Basis

THETA_GRID = 64
AC_GRID = 64
THETA_TOL = 1e-10
AC_TOL = 1e-9
AC_PEAKS = 2


@dataclass(frozen=True)
class OptResult:
    best_value: float
    best_params: object
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class OracleConfig:
    restarts: int = 20
    max_outcomes: int = None  # None -> span rank + 2
    step_tolerance: float = 1e-9
    seed: int = 0
    max_iterations: int = 500
    polish: int = 3

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.step_tolerance <= 0:
            raise ValidationError("step_tolerance must be > 0")


def _wrap_theta(theta):
    # objective has period pi; report in [-pi/2, pi/2)
    return (theta + math.pi / 2) % math.pi - math.pi / 2


def theta_objective(e):
    """Vectorized theta -> I(A;E) for the z-family on ensemble ``e``."""
    w10, w11 = srm_kets(e)
    t10 = e.vectors @ w10.conj()  # <w10|f_i>
    t11 = e.vectors @ w11.conj()
    sorted_part = np.abs(e.vectors @ e.vectors[:2].conj().T) ** 2  # |<f_0k|f_i>|^2

    def f(theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        c, s = np.cos(theta)[:, None], np.sin(theta)[:, None]
        p10 = np.abs(c * t10 - s * t11) ** 2
        p11 = np.abs(s * t10 + c * t11) ** 2
        cond = np.concatenate(
            [np.broadcast_to(sorted_part, (theta.size, 4, 2)), p10[..., None], p11[..., None]],
            axis=-1,
        )
        return i_ae_batch(e.priors, cond)

    return f


def maximize_theta(e):
    """Grid of 64 angles over [-pi/2, pi/2), then bounded Brent refinement around the best."""
    if e.basis is not Basis.Z:
        raise ValidationError("maximize_theta needs a sigma_z ensemble")
    f = theta_objective(e)
    step = math.pi / THETA_GRID
    grid = -math.pi / 2 + step * np.arange(THETA_GRID)
    values = f(grid)
    i = int(np.argmax(values))
    best_theta, best = float(grid[i]), float(values[i])
    res = minimize_scalar(
        lambda t: -float(f(t)[0]),
        bounds=(best_theta - step, best_theta + step),
        method="bounded",
        options={"xatol": THETA_TOL, "maxiter": 500},
    )
    if -res.fun > best:
        best_theta, best = float(res.x), float(-res.fun)
    return OptResult(best, ZFamilyParams(_wrap_theta(best_theta)), THETA_GRID + int(res.nfev), bool(res.success))


def ac_objective(e, c, basis=None):
    """Vectorized (a_param, c_param) -> I(A;E) for the four-outcome sigma_x/y family."""
    basis = basis or g_basis(e, c)
    kept = list(basis.kept)
    overlaps = basis.kets.conj() @ e.vectors.T  # <g_i|f_l>

    def f(a_vals, c_vals):
        a_vals = np.atleast_1d(np.asarray(a_vals, dtype=float))
        c_vals = np.atleast_1d(np.asarray(c_vals, dtype=float))
        mats = xy_matrix(a_vals, c_vals)[:, kept]
        amp = np.einsum("gij,il->glj", mats, overlaps)
        return i_ae_batch(e.priors, np.abs(amp) ** 2)

    return f


def _grid_peaks(values, count):
    # flat indices of the best 3x3 local maxima, ties broken by grid order; the corners
    # are images of the grid centre and are left out
    n = values.shape[0]
    peaks = np.flatnonzero(values == maximum_filter(values, size=3, mode="nearest"))
    peaks = peaks[~np.isin(peaks, (0, n - 1, n * (n - 1), n * n - 1))]
    order = np.argsort(-values.ravel()[peaks], kind="stable")
    return peaks[order[:count]]


def maximize_ac(e, c):
    """64 x 64 grid over [-1/sqrt(2), 1/sqrt(2)]^2, then bounded Nelder-Mead from the best grid peaks.

    The box corners are images of the centre under the family's symmetry, and
    the simplex cannot follow a maximum that sits just past a corner, so besides
    the grid maximum the ``AC_PEAKS`` best non-corner local maxima are refined.
    """
    if e.basis is Basis.Z:
        raise ValidationError("maximize_ac needs a sigma_x / sigma_y ensemble")
    f = ac_objective(e, c)
    axis = np.linspace(-HALF_ROOT, HALF_ROOT, AC_GRID)
    aa, cc = np.meshgrid(axis, axis, indexing="ij")
    values = f(aa.ravel(), cc.ravel()).reshape(aa.shape)
    # argmax returns the first maximum: smallest a_param, then smallest c_param
    i = int(np.argmax(values))
    best_x, best = np.array([aa.ravel()[i], cc.ravel()[i]]), float(values.ravel()[i])

    def neg(x):
        x = np.clip(x, -HALF_ROOT, HALF_ROOT)
        return -float(f(x[:1], x[1:])[0])

    evaluations, converged = AC_GRID * AC_GRID, True
    for j in dict.fromkeys([i, *_grid_peaks(values, AC_PEAKS)]):
        start = np.array([aa.ravel()[j], cc.ravel()[j]])
        res = minimize(
            neg,
            start,
            method="Nelder-Mead",
            bounds=[(-HALF_ROOT, HALF_ROOT)] * 2,
            options={"xatol": AC_TOL, "fatol": 1e-15, "maxiter": 4000, "initial_simplex": _simplex(start)},
        )
        evaluations += int(res.nfev)
        converged = converged and bool(res.success)
        if -res.fun > best:
            best_x, best = np.clip(res.x, -HALF_ROOT, HALF_ROOT), float(-res.fun)
    params = XYFamilyParams(float(best_x[0]), float(best_x[1]))
    return OptResult(best, params, evaluations, converged)


def _simplex(x, h=2 * HALF_ROOT / (AC_GRID - 1)):
    pts = np.array([x, x + [h, 0], x + [0, h]])
    # keep the simplex inside the box
    for p in pts[1:]:
        for k in range(2):
            if p[k] > HALF_ROOT:
                p[k] -= 2 * h
    return pts


def _oracle_value(rho_k, marginal, kets):
    # P[k, j] = <v_j| rho_k |v_j>
    p = np.real(np.einsum("jd,kde,je->kj", kets.conj(), rho_k, kets))
    q = p.sum(axis=0)
    log_ratio = np.log2(np.maximum(p, LOG_FLOOR) / np.maximum(marginal[:, None] * q[None, :], LOG_FLOOR))
    value = float(np.sum(np.where(p > 0, p * log_ratio, 0.0)))
    return value, log_ratio


def _complete(kets):
    # S^(-1/2) v_j so that sum_j |v_j><v_j| = identity
    s = kets.T @ kets.conj()
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v * w ** -0.5) @ v.conj().T
    return kets @ inv_sqrt.T


def _random_povm_kets(rng, n, d):
    z = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    q, _ = np.linalg.qr(z)
    return q


def _ascend(rho_k, marginal, kets, cfg):
    value, log_ratio = _oracle_value(rho_k, marginal, kets)
    evaluations, t = 1, 0.1
    for _ in range(cfg.max_iterations):
        # gradient of I with respect to E_j is sum_k log(P_kj / p_k q_j) rho_k
        direction = np.einsum("kj,kde,je->jd", log_ratio, rho_k, kets)
        gain = 0.0
        while t >= cfg.step_tolerance:
            trial = _complete(kets + t * direction)
            trial_value, trial_log = _oracle_value(rho_k, marginal, trial)
            evaluations += 1
            if trial_value > value:
                gain = trial_value - value
                kets, value, log_ratio = trial, trial_value, trial_log
                t = min(2 * t, 10.0)
                break
            t /= 2
        if gain < cfg.step_tolerance:
            return kets, value, evaluations, True
    return kets, value, evaluations, False


def _polish(rho_k, marginal, kets):
    n, d = kets.shape

    def unpack(x):
        return _complete(x[: n * d].reshape(n, d) + 1j * x[n * d :].reshape(n, d))

    res = minimize(
        lambda x: -_oracle_value(rho_k, marginal, unpack(x))[0],
        np.concatenate([kets.real.ravel(), kets.imag.ravel()]),
        method="BFGS",
        options={"gtol": 1e-10},
    )
    return unpack(res.x), -float(res.fun), int(res.nfev)


def accessible_info_oracle(e, cfg=OracleConfig()):
    """Best I(A;E) over rank-1 POVMs with ``max_outcomes`` outcomes.

    Each restart draws the rows of a random isometry C^d -> C^n as POVM kets,
    then repeatedly steps v_j += t G_j v_j along the gradient G_j of the mutual
    information with respect to E_j, restores completeness with
    (sum_j v_j v_j^H)^(-1/2) and keeps the step only if the value improves
    (``t`` starts at 0.1 and halves on failure). Restart ``r`` is seeded with
    ``seed + r``. The ascent crawls along flat ridges, so the ``polish`` best
    restarts are finished with BFGS in the same parameterization.
    """
    d = e.span_dim
    n = cfg.max_outcomes or e.rank + 2
    rho_k = np.zeros((2, d, d), dtype=complex)
    for i, f in enumerate(e.vectors):
        rho_k[ALICE_BIT[i]] += e.priors[i] * np.outer(f, f.conj())
    marginal = e.alice_marginal()

    runs, evaluations, converged = [], 0, True
    for r in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + r)
        kets, value, evals, done = _ascend(rho_k, marginal, _random_povm_kets(rng, n, d), cfg)
        runs.append((value, r, kets))
        evaluations += evals
        converged = converged and done
    # sort by value, ties by restart index
    runs.sort(key=lambda run: (-run[0], run[1]))
    best_value, _, best_kets = runs[0]
    for value, r, kets in runs[: cfg.polish]:
        kets, value, evals = _polish(rho_k, marginal, kets)
        evaluations += evals
        if value > best_value:
            best_value, best_kets = value, kets
    povm = Povm.from_kets(best_kets, tuple(f"e{j}" for j in range(n)))
    return OptResult(max(float(best_value), 0.0), povm, evaluations, converged)
