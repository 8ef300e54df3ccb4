import math

import mpmath as mp
import numpy as np
import pytest

from dpflow.params import BoundaryCase, ReservoirParams

CASES = [BoundaryCase.DD, BoundaryCase.DN, BoundaryCase.ND, BoundaryCase.NN]


@pytest.fixture
def dp_params():
    return ReservoirParams(0.1, 1e-3, 100.0, 0.5, 1e-3)


@pytest.fixture
def sp_params():
    return ReservoirParams(1.0, 0.0, 100.0, 0.5, 1e-3)


def mp_classic_aux(k, w, lam, g):
    """Classical double-porosity auxiliaries in 50-digit arithmetic."""
    mp.mp.dps = 50
    k, w, lam, g = (mp.mpf(v) for v in (k, w, lam, g))
    psi = w * (w - 1)
    xi = -lam + k**2 * (w - 1)
    rho = lam + k**2 * (w - 1)
    nu = mp.sqrt(xi**2 + 4 * k**2 * lam * psi)
    return dict(k=k, w=w, lam=lam, g=g, psi=psi, xi=xi, rho=rho, nu=nu,
                A=xi + 2 * w * lam, B=(nu + xi) * g, C=(nu - xi) * g,
                vartheta=g * xi - psi + k**2 * g**2 * lam)


def mp_u(k, t, w, lam):
    a = mp_classic_aux(k, w, lam, 1)
    t = mp.mpf(t)
    e1 = mp.exp(-(a["xi"] + a["nu"]) / (2 * a["psi"]) * t)
    ev = mp.exp(a["nu"] / a["psi"] * t)
    return e1 / (2 * a["w"] * a["nu"]) * ((1 - ev) * a["A"] + (1 + ev) * a["nu"])


def mp_r1(k, t, w, lam):
    a = mp_classic_aux(k, w, lam, 1)
    t = mp.mpf(t)
    e1 = mp.exp(-(a["xi"] + a["nu"]) / (2 * a["psi"]) * t)
    ev = mp.exp(a["nu"] / a["psi"] * t)
    return e1 / (2 * a["k"] ** 2 * a["nu"]) * ((ev - 1) * a["rho"] - (ev + 1) * a["nu"])


def mp_q1(k, t, w, lam):
    a = mp_classic_aux(k, w, lam, 1)
    t = mp.mpf(t)
    x = (a["xi"] + a["nu"]) / (2 * a["psi"])
    e1 = mp.exp(-x * t)
    ev = mp.exp(a["nu"] / a["psi"] * t)
    return e1 / (2 * a["k"] ** 2 * a["nu"]) * ((ev - 1) * a["rho"] + (2 * mp.exp(x * t) - ev - 1) * a["nu"])


def mp_q2_corrected(k, t, w, lam, g):
    """Convolution with exp(-t/gamma), partial fractions in high precision."""
    a = mp_classic_aux(k, w, lam, g)
    t, g = mp.mpf(t), a["g"]
    s1 = -(a["xi"] + a["nu"]) / (2 * a["psi"])
    s2 = -(a["xi"] - a["nu"]) / (2 * a["psi"])
    pre = g * (a["w"] - 1) / a["nu"]
    t1 = (a["A"] + a["nu"]) / (a["B"] - 2 * a["psi"])
    t2 = (a["A"] - a["nu"]) / (a["C"] + 2 * a["psi"])
    return pre * (mp.exp(-t / g) * (t1 + t2) - mp.exp(s1 * t) * t1 - mp.exp(s2 * t) * t2)


def mp_q2_quad(k, t, w, lam, g):
    mp.mp.dps = 30
    t, g = mp.mpf(t), mp.mpf(g)
    f = lambda z: mp.exp(-(t - z) / g) * mp_u(k, z, w, lam)
    pts = [0] + [p for p in (t - 50 * g, t - 10 * g) if 0 < p < t] + [t]
    return mp.quad(f, pts)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)
