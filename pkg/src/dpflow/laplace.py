"""Laplace-space solutions and Stehfest numerical inversion.

The fracture head in Laplace space solves a modified Bessel equation with
parameter ``eta(s)``; its closed-form solutions are ratios of modified
cross-products, evaluated here from scaled factors so that ratios of
individually overflowing quantities stay finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .params import BoundaryCase, CaseError, DomainError, ReservoirParams
from .specfun import cross_psi_scaled

__all__ = [
    "StehfestConfig",
    "stehfest_weights",
    "stehfest_weights_exact",
    "stehfest_invert",
    "eta",
    "f_hat",
    "head_hat",
    "flux_hat",
    "matrix_head_hat",
]


def stehfest_weights_exact(n_terms: int) -> tuple[Fraction, ...]:
    """Stehfest coefficients ``V_1 .. V_N`` as exact rationals."""
    if n_terms % 2 or not 4 <= n_terms <= 20:
        raise DomainError(f"Stehfest term count must be even and in [4, 20], got {n_terms}")
    half = n_terms // 2
    fact = math.factorial
    out = []
    for i in range(1, n_terms + 1):
        acc = Fraction(0)
        for k in range((i + 1) // 2, min(i, half) + 1):
            acc += Fraction(
                k**half * fact(2 * k),
                fact(half - k) * fact(k) * fact(k - 1) * fact(i - k) * fact(2 * k - i),
            )
        out.append((-1) ** (half + i) * acc)
    return tuple(out)


def stehfest_weights(n_terms: int) -> tuple[float, ...]:
    """Stehfest coefficients rounded to double precision."""
    return tuple(float(v) for v in stehfest_weights_exact(n_terms))


@dataclass(frozen=True)
class StehfestConfig:
    """Term count and weights of the Stehfest inversion.

    The default of 14 terms balances truncation against round-off in double
    precision for smooth transforms.
    """

    n_terms: int = 14
    weights: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", stehfest_weights(self.n_terms))


class NonFiniteError(ArithmeticError):
    """Raised when a Stehfest partial sum becomes non-finite."""


def stehfest_invert(transform: Callable[[float], float], t: float, config: StehfestConfig | None = None) -> float:
    """Invert a Laplace transform at time ``t`` with the Stehfest algorithm.

    ``f(t) ~ (ln 2 / t) * sum_i V_i F(i ln 2 / t)``.

    Raises
    ------
    DomainError
        If ``t <= 0``.
    NonFiniteError
        If any sample or partial sum is not finite.
    """
    if not t > 0.0:
        raise DomainError(f"Stehfest inversion requires t > 0, got {t!r}")
    config = config or StehfestConfig()
    a = math.log(2.0) / t
    total = 0.0
    for i, v in enumerate(config.weights, start=1):
        total += v * float(transform(i * a))
        if not math.isfinite(total):
            raise NonFiniteError(f"non-finite Stehfest partial sum at term {i} (t={t!r})")
    return a * total


def _check_s(s: float) -> None:
    if not s > 0.0:
        raise DomainError(f"Laplace variable must be positive, got {s!r}")


def eta(s: float, params: ReservoirParams) -> float:
    """Warren-Root storage function ``s (s w (1-w) + lambda) / (s (1-w) + lambda)``."""
    _check_s(s)
    w, lam = params.omega, params.lambda_
    if w == 1.0:
        return s
    if lam == 0.0:
        return w * s
    return s * (s * w * (1.0 - w) + lam) / (s * (1.0 - w) + lam)


def f_hat(s: float, params: ReservoirParams) -> float:
    """Laplace transform of the ramp influx ``-q_ext (1 - exp(-t / gamma))``."""
    if not params.case.has_influx:
        raise CaseError(f"no outer influx in case {params.case.value}")
    _check_s(s)
    return -params.q_ext * (1.0 / s - 1.0 / (s + 1.0 / params.gamma))


def _ratio(num, den) -> float:
    (mn, en), (md, ed) = num, den
    return mn / md * math.exp(en - ed)


def head_hat(case, r: float, s: float, params: ReservoirParams) -> float:
    """Laplace-space fracture head ``h2(r, s)``.

    Parameters
    ----------
    case : BoundaryCase or str
    r : float
        Radius in ``[1, r_ext]``.
    s : float
        Positive Laplace variable.
    params : ReservoirParams
    """
    case = BoundaryCase.parse(case)
    _check_s(s)
    R = params.r_ext
    if not 1.0 <= r <= R:
        raise DomainError(f"radius {r!r} outside [1, {R!r}]")
    x = math.sqrt(eta(s, params))
    psi = cross_psi_scaled
    if case is BoundaryCase.DD:
        return _ratio(psi(0, 0, R, r, x), psi(0, 0, R, 1.0, x)) / s
    if case is BoundaryCase.ND:
        return _ratio(psi(0, 0, r, R, x), psi(0, 1, R, 1.0, x)) / (s * x)
    fh = f_hat(s, params.with_case(case))
    if case is BoundaryCase.DN:
        den = psi(0, 1, 1.0, R, x)
        return _ratio(psi(1, 0, R, r, x), den) / s + fh / R * _ratio(psi(0, 0, 1.0, r, x), den) / x
    den = psi(1, 1, 1.0, R, x)
    return _ratio(psi(0, 1, r, R, x), den) / (s * x) + fh / R * _ratio(psi(0, 1, r, 1.0, x), den) / x


def flux_hat(case, s: float, params: ReservoirParams) -> float:
    """Laplace-space bottomhole flux ``j2(s) = -r dh2/dr`` at ``r = 1``."""
    case = BoundaryCase.parse(case)
    _check_s(s)
    if case in (BoundaryCase.ND, BoundaryCase.NN):
        return 1.0 / s
    R = params.r_ext
    x = math.sqrt(eta(s, params))
    psi = cross_psi_scaled
    if case is BoundaryCase.DD:
        return x * _ratio(psi(0, 1, R, 1.0, x), psi(0, 0, 1.0, R, x)) / s
    fh = f_hat(s, params.with_case(case))
    den = psi(0, 1, 1.0, R, x)
    return x * _ratio(psi(1, 1, 1.0, R, x), den) / s - fh / R * _ratio(psi(0, 1, 1.0, 1.0, x), den)


def matrix_head_hat(case, r: float, s: float, params: ReservoirParams) -> float:
    """Laplace-space matrix head ``h1 = lambda h2 / ((1 - w) s + lambda)``."""
    if params.omega == 1.0 and params.lambda_ == 0.0:
        raise CaseError("matrix head is undefined without a matrix continuum (omega = 1, lambda = 0)")
    _check_s(s)
    lam = params.lambda_
    if lam == 0.0:
        return 0.0
    return lam * head_hat(case, r, s, params) / ((1.0 - params.omega) * s + lam)


def invert_head(case, r: float, t: float, params: ReservoirParams, config: StehfestConfig | None = None) -> float:
    """Stehfest inversion of :func:`head_hat` at one ``(r, t)``."""
    return stehfest_invert(lambda s: head_hat(case, r, s, params), t, config)


def invert_flux(case, t: float, params: ReservoirParams, config: StehfestConfig | None = None) -> float:
    """Stehfest inversion of :func:`flux_hat` at time ``t``."""
    return stehfest_invert(lambda s: flux_hat(case, s, params), t, config)


def head_grid(case, radii, times, params: ReservoirParams, config: StehfestConfig | None = None) -> np.ndarray:
    """Stehfest head on a ``(len(times), len(radii))`` grid."""
    out = np.empty((len(times), len(radii)))
    for i, t in enumerate(times):
        for j, r in enumerate(radii):
            out[i, j] = invert_head(case, float(r), float(t), params, config)
    return out
