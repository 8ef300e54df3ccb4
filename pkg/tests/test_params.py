import math

import pytest
from hypothesis import given, strategies as st

from dpflow.params import (
    PRESETS, BoundaryCase, CaseError, DimensionalProperties, DomainError, ReservoirParams,
    dimensionless_time, nondimensionalize, preset,
)


def props(**kw):
    base = dict(k1=1e-18, k2=1e-14, mu=1e-3, rho2=1000.0, phi1=0.2, phi2=0.01, c1=1e-9, c2=1e-9,
                alpha=1.0, r_w=0.1, r_ext_dim=10.0, h0=100.0, h_w=50.0, h_thick=10.0, q=1e-3)
    base.update(kw)
    return DimensionalProperties(**base)


def test_equal_storativities_give_half():
    assert nondimensionalize(props(phi1=0.1, phi2=0.1), "dd").omega == 0.5


def test_unit_lambda():
    p = props(alpha=4.0, r_w=0.5, k1=2.0, k2=2.0)
    assert nondimensionalize(p, "dd").lambda_ == 1.0


def test_omega_quarter():
    p = props(phi1=0.3, c1=1e-9, phi2=0.1, c2=1e-9)
    assert nondimensionalize(p, "nn").omega == pytest.approx(0.25, rel=1e-15)


def test_rext_ratio():
    assert nondimensionalize(props(), "nd").r_ext == pytest.approx(100.0)


def test_dimensionless_time_examples():
    p = props()
    assert dimensionless_time(p, 0.0) == 0.0
    unit = props(k2=1e-3 * 0.1**2 * (0.2e-9 + 0.01e-9))
    assert dimensionless_time(unit, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert dimensionless_time(props(k2=2e-14), 5.0) == pytest.approx(2 * dimensionless_time(p, 5.0), rel=1e-15)
    with pytest.raises(DomainError):
        dimensionless_time(p, -1.0)


@given(st.floats(1e-3, 1e3))
def test_scale_invariance(f):
    base = nondimensionalize(props(), "dd")
    scaled_k = nondimensionalize(props(k1=1e-18 * f, k2=1e-14 * f), "dd")
    scaled_s = nondimensionalize(props(phi1=0.2 * f, phi2=0.01 * f), "dd")
    assert scaled_k.lambda_ == pytest.approx(base.lambda_, rel=1e-12)
    assert scaled_s.omega == pytest.approx(base.omega, rel=1e-12)


@given(st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
def test_omega_in_unit_interval(p1, p2):
    w = nondimensionalize(props(phi1=p1, phi2=p2), "dd").omega
    assert 0.0 < w < 1.0


def test_omega_tends_to_one():
    assert nondimensionalize(props(phi1=1e-12), "dd").omega == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("kw", [dict(k1=0.0), dict(mu=-1.0), dict(r_ext_dim=0.05), dict(h_w=100.0), dict(q=math.nan)])
def test_dimensional_invariants(kw):
    with pytest.raises(DomainError):
        props(**kw)


def test_heads_may_be_any_real():
    props(h0=-5.0, h_w=0.0)


@pytest.mark.parametrize("kw", [dict(omega=0.0), dict(omega=1.5), dict(lambda_=-1e-9), dict(r_ext=1.0),
                                dict(q_ext=-0.1), dict(gamma=0.0), dict(omega=math.inf)])
def test_reservoir_invariants(kw):
    with pytest.raises(DomainError):
        ReservoirParams(**kw)


def test_limits_admitted():
    assert ReservoirParams(omega=1.0, lambda_=0.0).single_porosity
    assert ReservoirParams(omega=0.3, lambda_=0.0).single_porosity
    assert not ReservoirParams().single_porosity


def test_case_parsing():
    assert BoundaryCase.parse("nn") is BoundaryCase.NN
    assert ReservoirParams(case="dn").case is BoundaryCase.DN
    with pytest.raises(CaseError):
        BoundaryCase.parse("xx")
    assert BoundaryCase.DN.inner_dirichlet and not BoundaryCase.DN.outer_dirichlet
    assert BoundaryCase.NN.has_influx and not BoundaryCase.ND.has_influx


def test_presets():
    p = preset("double-porosity-default", "nd")
    assert (p.omega, p.lambda_, p.r_ext, p.case) == (0.1, 1e-3, 100.0, BoundaryCase.ND)
    s = preset("single-porosity")
    assert (s.omega, s.lambda_) == (1.0, 0.0)
    assert set(PRESETS) == {"double-porosity-default", "single-porosity"}
    with pytest.raises(KeyError):
        preset("nope")
