import numpy as np
import pytest

from tomoqkd.errors import NoCrossingError, ValidationError
from tomoqkd.scenarios import (
    SweepSpec,
    ThresholdQuery,
    analyze,
    best_yield_over_v,
    bracket_threshold,
    find_threshold,
    sweep,
    worker_count,
)
from tomoqkd.source import Basis, SourceParams

from conftest import random_params


def test_table_rows():
    r1 = analyze(SourceParams(1.1, 0.1, 0.6))
    assert r1.reports[Basis.Z].yield_ == pytest.approx(-0.2592, abs=2e-3)
    assert r1.reports[Basis.X].yield_ == pytest.approx(-0.2448, abs=2e-3)
    assert r1.overall_yield == 0
    assert r1.entangled
    r3 = analyze(SourceParams(1.1, 0.1, 0.84))
    assert r3.reports[Basis.Z].yield_ == pytest.approx(-0.005, abs=2e-3)
    assert r3.reports[Basis.X].yield_ == pytest.approx(0.0114, abs=2e-3)
    assert r3.overall_yield == pytest.approx(0.0076, abs=2e-3)


def test_x_and_y_reports_agree(rng):
    for _ in range(5):
        r = analyze(random_params(rng))
        x, y = r.reports[Basis.X], r.reports[Basis.Y]
        assert abs(x.i_ab - y.i_ab) < 1e-10
        assert abs(x.i_ae_max - y.i_ae_max) < 1e-10


def test_maximally_mixed_state():
    r = analyze(SourceParams(1.3, 0.2, 0.5, 1.0))
    for basis in Basis:
        assert r.reports[basis].i_ab == pytest.approx(0, abs=1e-9)
        # the purification of white noise gives Eve orthogonal ancillas
        assert r.reports[basis].i_ae_max == pytest.approx(1, abs=1e-9)
    assert r.overall_yield == 0
    assert not r.entangled


def test_closed_form_symmetric_source():
    h2 = lambda p: -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    eta = (1 + np.sqrt(1 - 0.81)) / 2
    r = analyze(SourceParams(1.0, 0.0, 0.9))
    assert r.reports[Basis.Z].yield_ == pytest.approx(h2(eta), abs=1e-9)
    assert r.reports[Basis.X].yield_ == pytest.approx(1 - h2(0.05), abs=1e-9)
    assert r.reports[Basis.X].yield_ == pytest.approx(0.713603, abs=5e-7)
    assert r.overall_yield == pytest.approx((h2(eta) + 2 * (1 - h2(0.05))) / 3, abs=1e-9)


def test_separable_states_give_no_key():
    for g in (0.05, 0.1, 0.2):
        for v in np.linspace(0, 2 * g, 4):
            for ratio in (1.0, 1.2):
                r = analyze(SourceParams(ratio, g, float(v)))
                if not r.entangled:
                    assert r.overall_yield < 1e-6


def test_yield_monotone_in_v_for_symmetric_source():
    values = [analyze(SourceParams(1.0, 0.0, float(v))).overall_yield for v in np.linspace(0, 1, 11)]
    assert values[0] < 1e-6
    assert all(b > a for a, b in zip(values, values[1:]))


def test_yield_nonincreasing_in_noise():
    values = [analyze(SourceParams(1.1, 0.02, 0.9, float(f))).overall_yield for f in np.linspace(0, 0.4, 9)]
    assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))


def test_continuity_through_zero_gamma():
    lo = analyze(SourceParams(1 - 1e-8, 0.05, 0.7)).overall_yield
    mid = analyze(SourceParams(1.0, 0.05, 0.7)).overall_yield
    hi = analyze(SourceParams(1 + 1e-8, 0.05, 0.7)).overall_yield
    assert abs(lo - mid) < 1e-6
    assert abs(hi - mid) < 1e-6


def test_sweep_spec_validation():
    base = SourceParams(1.0, 0.0, 0.5)
    with pytest.raises(ValidationError):
        SweepSpec(base, ())
    with pytest.raises(ValidationError):
        SweepSpec(base, (("w", 0, 1, 3),))
    with pytest.raises(ValidationError):
        SweepSpec(base, (("v", 0, 1, 1),))
    with pytest.raises(ValidationError):
        SweepSpec(base, (("v", 0, 1.5, 3),))
    with pytest.raises(ValidationError):
        SweepSpec(base, (("v", 0, 1, 3), ("V", 0, 1, 3)))
    with pytest.raises(ValidationError):
        SweepSpec(base, (("v", 0, 1, 3), ("g", 0, 1, 3), ("f", 0, 1, 3)))


def test_sweep_row_major_order():
    spec = SweepSpec(SourceParams(1.0, 0.0, 0.5), (("g", 0, 0.1, 2), ("v", 0, 1, 3)))
    points = list(spec.points())
    assert [(p.g, p.V) for p in points] == [(0, 0), (0, 0.5), (0, 1), (0.1, 0), (0.1, 0.5), (0.1, 1)]


def test_sweep_parallel_matches_serial():
    spec = SweepSpec(SourceParams(1.1, 0.02, 0.5), (("v", 0.3, 0.5, 3),))
    serial = [r.as_dict() for r in sweep(spec, workers=1)]
    parallel = [r.as_dict() for r in sweep(spec, workers=2)]
    assert serial == parallel
    assert serial[0]["V"] == pytest.approx(0.3)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("TOMOQKD_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("TOMOQKD_THREADS", "x")
    with pytest.raises(ValidationError):
        worker_count()


def test_v_threshold():
    assert find_threshold(ThresholdQuery("V", SourceParams(1.1, 0.02, 0.0))) == pytest.approx(0.39, abs=0.01)


def test_v_threshold_symmetric_source_near_zero():
    res = bracket_threshold(ThresholdQuery("V", SourceParams(1.0, 0.0, 0.0)))
    assert res.crossing < 1e-3


def test_no_crossing_reports_endpoints():
    with pytest.raises(NoCrossingError) as info:
        bracket_threshold(ThresholdQuery("V", SourceParams(1.0, 0.3, 0.0, 0.9)))
    assert info.value.yield_lo < 1e-6 and info.value.yield_hi < 1e-6


def test_threshold_with_injected_objective():
    q = ThresholdQuery("F", SourceParams(1.0, 0.0, 0.5), tolerance=1e-6)
    assert find_threshold(q, objective=lambda x: max(0.3 - x, 0.0)) == pytest.approx(0.3, abs=3e-6)


def test_best_yield_over_v_dominates_grid():
    p = SourceParams(1.1, 0.02, 0.0, 0.1)
    best = best_yield_over_v(p, points=11)
    assert best >= max(analyze(p.replace(V=v)).overall_yield for v in (0.8, 0.9, 1.0)) - 1e-12


def test_threshold_query_validation():
    with pytest.raises(ValidationError):
        ThresholdQuery("g", SourceParams(1, 0, 0))
    with pytest.raises(ValidationError):
        ThresholdQuery("V", SourceParams(1, 0, 0), lo=1, hi=0)
