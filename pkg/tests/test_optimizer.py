import math

import numpy as np
import pytest

from tomoqkd.adversary import AncillaEnsemble, ensemble
from tomoqkd.errors import ValidationError
from tomoqkd.infotheory import i_ae
from tomoqkd.measurement import HALF_ROOT, XYFamilyParams, validate, xy_family, z_family
from tomoqkd.optimizer import (
    OracleConfig,
    ac_objective,
    accessible_info_oracle,
    maximize_ac,
    maximize_theta,
    theta_objective,
)
from tomoqkd.qmath import embed_gram
from tomoqkd.source import Basis, SourceParams, coefficients

TABLE_POINT = coefficients(SourceParams(1.1, 0.1, 0.9))


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _two_state(lam):
    # two equiprobable pure states for Alice's bits 0 and 1, padded to the 4-ket layout
    g = np.eye(4)
    g[2, 3] = g[3, 2] = lam
    vecs, rank = embed_gram(g)
    return AncillaEnsemble(Basis.Z, np.array([0.0, 0.0, 0.5, 0.5]), g, vecs, rank)


def test_objectives_match_povm_evaluation():
    e = ensemble(TABLE_POINT, Basis.Z)
    f = theta_objective(e)
    for theta in (-1.0, 0.0, 0.4):
        assert f(theta)[0] == pytest.approx(i_ae(e, z_family(e, theta)), abs=1e-12)
    ex = ensemble(TABLE_POINT, Basis.X)
    g = ac_objective(ex, TABLE_POINT)
    for a, c in ((0.1, -0.3), (HALF_ROOT, 0.0)):
        assert g(a, c)[0] == pytest.approx(i_ae(ex, xy_family(ex, TABLE_POINT, XYFamilyParams(a, c))), abs=1e-12)


def test_maximize_theta_table_row():
    res = maximize_theta(ensemble(TABLE_POINT, Basis.Z))
    assert res.best_value == pytest.approx(0.2845, abs=2e-3)
    assert -math.pi / 2 <= res.best_params.theta < math.pi / 2


def test_maximize_theta_two_state_optimum():
    for lam in (0.0, -0.3, -0.9):
        res = maximize_theta(_two_state(lam))
        assert res.best_value == pytest.approx(1 - h2((1 + math.sqrt(1 - lam * lam)) / 2) if lam else 1.0, abs=1e-9)


def test_maximize_ac_table_row():
    e = ensemble(TABLE_POINT, Basis.X)
    res = maximize_ac(e, TABLE_POINT)
    assert res.best_value == pytest.approx(0.3321, abs=2e-3)
    povm = xy_family(e, TABLE_POINT, res.best_params)
    assert validate(povm, e.span_dim) < 1e-12
    assert i_ae(e, povm) == pytest.approx(res.best_value, abs=1e-12)


def test_basis_guards():
    with pytest.raises(ValidationError):
        maximize_theta(ensemble(TABLE_POINT, Basis.X))
    with pytest.raises(ValidationError):
        maximize_ac(ensemble(TABLE_POINT, Basis.Z), TABLE_POINT)
    with pytest.raises(ValidationError):
        OracleConfig(restarts=0)


def test_oracle_two_orthogonal_states():
    res = accessible_info_oracle(_two_state(0.0), OracleConfig(restarts=3))
    assert res.best_value == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("lam", [-0.5, -0.9])
def test_oracle_two_state_optimum(lam):
    res = accessible_info_oracle(_two_state(lam), OracleConfig(restarts=4))
    assert res.best_value == pytest.approx(1 - h2((1 + math.sqrt(1 - lam * lam)) / 2), abs=1e-6)


def test_oracle_returns_complete_povm():
    e = ensemble(TABLE_POINT, Basis.X)
    res = accessible_info_oracle(e, OracleConfig(restarts=3))
    assert len(res.best_params.outcomes) == e.rank + 2
    assert validate(res.best_params, e.span_dim) < 1e-9
    assert i_ae(e, res.best_params) == pytest.approx(res.best_value, abs=1e-9)


def test_oracle_matches_structured_family_x():
    e = ensemble(TABLE_POINT, Basis.X)
    oracle = accessible_info_oracle(e, OracleConfig(restarts=6)).best_value
    assert oracle == pytest.approx(maximize_ac(e, TABLE_POINT).best_value, abs=1e-4)


def test_oracle_deterministic_for_seed():
    e = ensemble(TABLE_POINT, Basis.Z)
    cfg = OracleConfig(restarts=2, polish=1, seed=7)
    assert accessible_info_oracle(e, cfg).best_value == accessible_info_oracle(e, cfg).best_value


def test_maximize_ac_escapes_corner_maximum():
    # grid maximum on a box corner; the true optimum sits near (0.00825, 0)
    c = coefficients(SourceParams(1.0144637135937784, 0.04891106857718251, 0.6151450644553142, 0.17953624742521038))
    e = ensemble(c, Basis.X)
    res = maximize_ac(e, c)
    assert res.best_value == pytest.approx(0.428670762, abs=1e-8)
    assert res.best_params.a_param == pytest.approx(0.00825206, abs=1e-5)
