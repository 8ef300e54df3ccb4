import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dpflow.laplace import (
    NonFiniteError, StehfestConfig, eta, f_hat, flux_hat, head_hat, matrix_head_hat,
    stehfest_invert, stehfest_weights, stehfest_weights_exact,
)
from dpflow.params import BoundaryCase, CaseError, DomainError, ReservoirParams
from dpflow.specfun import cross_psi

from conftest import CASES


def test_eta_limits():
    assert eta(2.0, ReservoirParams(omega=1.0, lambda_=0.3)) == 2.0
    assert eta(4.0, ReservoirParams(omega=0.25, lambda_=0.0)) == 1.0


def test_eta_arithmetic():
    assert eta(1.0, ReservoirParams(omega=0.01, lambda_=1e-3)) == pytest.approx(0.010998990918264379, rel=1e-14)


@pytest.mark.parametrize("w,lam", [(0.1, 1e-3), (0.5, 2.0), (0.01, 1e-2)])
def test_eta_small_s(w, lam):
    p = ReservoirParams(omega=w, lambda_=lam)
    assert eta(1e-10, p) / 1e-10 == pytest.approx(1.0, rel=1e-6)


def test_eta_domain():
    with pytest.raises(DomainError):
        eta(0.0, ReservoirParams())


def test_f_hat():
    p = ReservoirParams(q_ext=0.5, gamma=1e-3, case="dn")
    assert f_hat(1.0, p) == pytest.approx(-0.5 * (1 - 1 / 1001), rel=1e-14)
    assert f_hat(3.0, p.with_(q_ext=0.0)) == 0.0
    assert abs(f_hat(1e12, p)) < 1e-9
    with pytest.raises(CaseError):
        f_hat(1.0, p.with_case("dd"))
    with pytest.raises(CaseError):
        f_hat(1.0, p.with_case("nd"))


@pytest.mark.parametrize("s", [1e-4, 0.3, 10.0])
def test_dd_boundaries(s, dp_params):
    assert head_hat("dd", 1.0, s, dp_params) == pytest.approx(1 / s, rel=1e-14)
    assert head_hat("dd", 100.0, s, dp_params) == 0.0


def test_nd_composition():
    p = ReservoirParams(omega=1.0, lambda_=0.0, r_ext=10.0)
    assert head_hat("nd", 1.0, 1.0, p) == pytest.approx(0.6994839181642610, rel=1e-13)


@pytest.mark.parametrize("s", [1e-5, 1e-2, 1.0, 50.0])
@pytest.mark.parametrize("w,lam", [(0.1, 1e-3), (1.0, 0.0)])
def test_boundary_identities(s, w, lam):
    R = 20.0
    for case in CASES:
        p = ReservoirParams(w, lam, R, 0.5, 1e-3, case)
        if case.inner_dirichlet:
            assert head_hat(case, 1.0, s, p) == pytest.approx(1 / s, rel=1e-12)
        else:
            h = 1e-6
            d = (head_hat(case, 1.0 + h, s, p) - head_hat(case, 1.0, s, p)) / h
            d2 = (head_hat(case, 1.0 + 2 * h, s, p) - head_hat(case, 1.0, s, p)) / (2 * h)
            assert 2 * d - d2 == pytest.approx(-1 / s, rel=1e-5)
        if case.outer_dirichlet:
            assert head_hat(case, R, s, p) == 0.0
        else:
            h = 1e-6 * R
            d = (head_hat(case, R, s, p) - head_hat(case, R - h, s, p)) / h
            d2 = (head_hat(case, R, s, p) - head_hat(case, R - 2 * h, s, p)) / (2 * h)
            assert R * (2 * d - d2) == pytest.approx(f_hat(s, p), rel=1e-5, abs=1e-9 / s)


@pytest.mark.parametrize("s", [1e-3, 0.5, 20.0])
def test_interior_central_difference(s, dp_params):
    # r dh/dr at r = 1 from a central difference on the extended solution
    for case in ("nd", "nn"):
        p = dp_params.with_case(case)
        h = 1e-6
        d = (head_hat(case, 1.0 + h, s, p) - head_hat(case, 1.0, s, p)) / h
        assert d == pytest.approx(-1 / s, rel=1e-4)


@pytest.mark.parametrize("s", [1e-3, 0.5, 20.0])
@pytest.mark.parametrize("case", ["dd", "dn"])
def test_flux_matches_derivative(case, s, dp_params):
    p = dp_params.with_case(case)
    h = 1e-6
    d = (-3 * head_hat(case, 1.0, s, p) + 4 * head_hat(case, 1 + h, s, p) - head_hat(case, 1 + 2 * h, s, p)) / (2 * h)
    assert flux_hat(case, s, p) == pytest.approx(-d, rel=1e-5)


def test_flux_tabulated():
    p = ReservoirParams()
    assert flux_hat("nd", 4.0, p) == 0.25
    assert flux_hat("nn", 10.0, p) == 0.1
    sp = ReservoirParams(omega=1.0, lambda_=0.0, r_ext=10.0)
    assert flux_hat("dd", 1.0, sp) == pytest.approx(1.4296254338833395, rel=1e-13)
    assert flux_hat("dd", 1.0, sp) == pytest.approx(cross_psi(0, 1, 10.0, 1.0, 1.0) / cross_psi(0, 0, 1.0, 10.0, 1.0), rel=1e-14)


def test_large_arguments_stay_finite(dp_params):
    for case in CASES:
        p = dp_params.with_case(case)
        assert math.isfinite(head_hat(case, 50.0, 1e4, p))
        assert math.isfinite(flux_hat(case, 1e4, p))


def test_matrix_head():
    p = ReservoirParams(omega=0.1, lambda_=1e-3)
    assert matrix_head_hat("dd", 5.0, 1e-3, p) / head_hat("dd", 5.0, 1e-3, p) == pytest.approx(1e-3 / 1.9e-3, rel=1e-13)
    assert matrix_head_hat("dd", 5.0, 1.0, p.with_(lambda_=0.0)) == 0.0
    assert matrix_head_hat("nd", 5.0, 1e-12, p) / head_hat("nd", 5.0, 1e-12, p) == pytest.approx(1.0, rel=1e-8)
    with pytest.raises(CaseError):
        matrix_head_hat("dd", 2.0, 1.0, ReservoirParams(omega=1.0, lambda_=0.0))


def test_head_hat_domain(dp_params):
    with pytest.raises(DomainError):
        head_hat("dd", 0.5, 1.0, dp_params)
    with pytest.raises(DomainError):
        head_hat("dd", 2.0, -1.0, dp_params)


@pytest.mark.parametrize("n", [4, 8, 12, 14, 16, 18, 20])
def test_weights_properties(n):
    v = stehfest_weights(n)
    assert len(v) == n
    assert all(np.sign(v[i]) == -np.sign(v[i + 1]) for i in range(n - 1))
    assert abs(math.fsum(v)) <= 1e-9 * max(map(abs, v))
    exact = stehfest_weights_exact(n)
    assert sum(exact) == 0
    assert sum(x / (i + 1) for i, x in enumerate(exact)) == 1
    # rounding the weights to doubles perturbs the normalization by ~ulp(max |V|)
    assert abs(math.fsum(x / (i + 1) for i, x in enumerate(v)) - 1.0) <= 1e-16 * n * max(map(abs, v))


def test_weights_known_values():
    # N = 4 weights are -2, 26, -48, 24
    assert stehfest_weights(4) == (-2.0, 26.0, -48.0, 24.0)


@pytest.mark.parametrize("n", [3, 2, 22])
def test_weights_domain(n):
    with pytest.raises(DomainError):
        StehfestConfig(n)


@settings(max_examples=30)
@given(st.floats(1e-3, 1e4))
def test_invert_unit_step(t):
    assert stehfest_invert(lambda s: 1 / s, t) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("n,floor", [(10, 1e-3), (12, 1e-4), (14, 1e-5), (16, 1e-6)])
def test_invert_exponential_across_terms(n, floor):
    # measured floors: 2.5e-4, 2.7e-5, 2.6e-6, 2.1e-7
    err = abs(stehfest_invert(lambda s: 1 / (s + 1), 1.0, StehfestConfig(n)) / math.exp(-1) - 1)
    assert err <= floor


def test_invert_ramp_floor_documented():
    # monomials beyond 1/s carry a small intrinsic error in double precision
    err = stehfest_invert(lambda s: 1 / s**2, 1.0, StehfestConfig(14)) - 1.0
    assert 1e-7 < abs(err) < 1e-6


def test_invert_flags_nonfinite():
    with pytest.raises(NonFiniteError):
        stehfest_invert(lambda s: math.inf, 1.0)
    with pytest.raises(DomainError):
        stehfest_invert(lambda s: 1 / s, 0.0)
