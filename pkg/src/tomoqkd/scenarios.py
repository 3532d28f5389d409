"""End-to-end analyses: one parameter point, grids of points, and yield thresholds."""

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from tomoqkd.adversary import ensemble
from tomoqkd.errors import NoCrossingError, ValidationError
from tomoqkd.infotheory import BasisReport, YieldReport, i_ab, yields
from tomoqkd.optimizer import maximize_ac, maximize_theta
from tomoqkd.source import Basis, SourceParams, coefficients, is_entangled

ZERO_YIELD = 1e-6
AXES = {"ratio": "ratio", "g": "g", "v": "V", "f": "F"}
INNER_V_GRID = 101


def _basis_report(c, e, basis):
    i = i_ab(c, basis)
    opt = maximize_theta(e) if basis is Basis.Z else maximize_ac(e, c)
    return BasisReport(basis, i, opt.best_value, i - opt.best_value, opt.best_params)


def analyze(params):
    """Full yield report for one source setting."""
    c = coefficients(params)
    reports = {}
    ensembles = {}
    for basis in (Basis.Z, Basis.X, Basis.Y):
        e = ensemble(c, basis)
        twin = ensembles.get(Basis.X)
        if basis is Basis.Y and np.array_equal(twin.priors, e.priors) and np.array_equal(twin.gram, e.gram):
            # sigma_y carries the same ensemble as sigma_x
            x = reports[Basis.X]
            reports[basis] = BasisReport(basis, x.i_ab, x.i_ae_max, x.yield_, x.optimal_params)
        else:
            reports[basis] = _basis_report(c, e, basis)
        ensembles[basis] = e
    overall = yields(reports[Basis.Z], reports[Basis.X], reports[Basis.Y])
    return YieldReport(params, c, reports, overall, is_entangled(c)[0])


def overall_yield(params):
    return analyze(params).overall_yield


@dataclass(frozen=True)
class SweepSpec:
    """Grid over one or two of ratio, g, V, F; ``axes`` holds (name, lo, hi, steps) tuples."""

    fixed: SourceParams
    axes: tuple
    seed: int = 0

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValidationError("a sweep has one or two axes")
        names = []
        for name, lo, hi, steps in self.axes:
            key = str(name).lower()
            if key not in AXES:
                raise ValidationError(f"unknown sweep axis {name!r}; expected one of ratio, g, V, F")
            if int(steps) < 2:
                raise ValidationError(f"axis {name} needs at least 2 steps")
            names.append(AXES[key])
            # endpoints must be valid source parameters
            self.fixed.replace(**{AXES[key]: float(lo)})
            self.fixed.replace(**{AXES[key]: float(hi)})
        if len(set(names)) != len(names):
            raise ValidationError("sweep axes must be distinct")

    def points(self):
        names = [AXES[str(a[0]).lower()] for a in self.axes]
        grids = [np.linspace(float(lo), float(hi), int(steps)) for _, lo, hi, steps in self.axes]
        for combo in itertools.product(*grids):
            yield self.fixed.replace(**{n: float(v) for n, v in zip(names, combo)})


@dataclass(frozen=True)
class SweepRow:
    params: SourceParams
    report: YieldReport = field(repr=False)

    def as_dict(self):
        r = self.report.reports
        return {
            "ratio": self.params.ratio,
            "g": self.params.g,
            "V": self.params.V,
            "F": self.params.F,
            "i_ab_z": r[Basis.Z].i_ab,
            "i_ae_z": r[Basis.Z].i_ae_max,
            "yield_z": r[Basis.Z].yield_,
            "i_ab_xy": r[Basis.X].i_ab,
            "i_ae_xy": r[Basis.X].i_ae_max,
            "yield_xy": r[Basis.X].yield_,
            "overall_yield": self.report.overall_yield,
        }


def worker_count():
    raw = os.environ.get("TOMOQKD_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValidationError(f"TOMOQKD_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def sweep(spec, workers=None):
    """Evaluate :func:`analyze` on every grid point, row-major over the axes as declared."""
    points = list(spec.points())
    workers = workers or worker_count()
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(points))) as pool:
            reports = list(pool.map(analyze, points))
    else:
        reports = [analyze(p) for p in points]
    return [SweepRow(p, r) for p, r in zip(points, reports)]


@dataclass(frozen=True)
class ThresholdQuery:
    moving: str
    fixed: SourceParams
    lo: float = 0.0
    hi: float = 1.0
    tolerance: float = 1e-4

    def __post_init__(self):
        if str(self.moving).upper() not in ("V", "F"):
            raise ValidationError("moving parameter must be V or F")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be > 0")
        if not self.lo < self.hi:
            raise ValidationError("threshold range needs lo < hi")


def best_yield_over_v(params, points=INNER_V_GRID):
    """max over V in [0, 1] of the overall yield: grid, then bounded refinement around the best point."""
    grid = np.linspace(0.0, 1.0, points)
    values = [overall_yield(params.replace(V=float(v))) for v in grid]
    i = int(np.argmax(values))
    best = values[i]
    h = 1.0 / (points - 1)
    lo, hi = max(grid[i] - h, 0.0), min(grid[i] + h, 1.0)
    res = minimize_scalar(
        lambda v: -overall_yield(params.replace(V=float(v))),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-6},
    )
    return max(best, -float(res.fun))


def threshold_objective(q):
    if str(q.moving).upper() == "V":
        return lambda x: overall_yield(q.fixed.replace(V=x))
    return lambda x: best_yield_over_v(q.fixed.replace(F=x))


@dataclass(frozen=True)
class ThresholdResult:
    crossing: float
    bracket: tuple
    yield_lo: float
    yield_hi: float


def bracket_threshold(q, objective=None):
    """Bisection for the point where the overall yield switches between zero and positive."""
    f = objective or threshold_objective(q)
    lo, hi = float(q.lo), float(q.hi)
    y_lo, y_hi = f(lo), f(hi)
    zero_lo = y_lo < ZERO_YIELD
    if zero_lo == (y_hi < ZERO_YIELD):
        raise NoCrossingError(lo, hi, y_lo, y_hi)
    a, b = lo, hi
    while b - a > q.tolerance:
        mid = (a + b) / 2
        if (f(mid) < ZERO_YIELD) == zero_lo:
            a = mid
        else:
            b = mid
    return ThresholdResult((a + b) / 2, (a, b), y_lo, y_hi)


def find_threshold(q, objective=None):
    return bracket_threshold(q, objective).crossing
