"""Time-domain series solutions for the four boundary cases.

The fracture head is assembled as a closed-form stationary (or, for two flux
boundaries, quasi-stationary) profile plus a finite Hankel series over the
eigenvalues ``k_i`` of the case.  Each Hankel coefficient decays through the
two real poles of ``1 / (eta(s) + k^2)``; these poles and their residues are
computed from cancellation-free expressions so that no exponential is formed
with a positive argument.

Per-root quantities use the following names:

``modal_decay``
    Time-dependent part of the Hankel transform of the head.
``u_mode``
    Inverse Laplace transform of ``1 / (eta(s) + k^2)``.
``q1``, ``q2``, ``r1``
    Convolutions of ``u_mode`` with ``1`` and ``exp(-t / gamma)``, and the
    transient remainder ``r1 = q1 - 1/k^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.integrate import quad

from .params import BoundaryCase, CaseError, DomainError, ReservoirParams
from .specfun import RootTable, cached_roots, cross_i

__all__ = [
    "SeriesConfig",
    "ModalTerms",
    "SolutionGrid",
    "SeriesSolver",
    "DegenerateBranchError",
    "InsufficientRootsError",
    "NonFiniteTermError",
    "modal_terms",
    "modal_decay",
    "u_mode",
    "q1",
    "q2",
    "r1",
    "chi",
    "stationary_head",
    "quasi_stationary_nn",
    "nn_zero_mode",
    "nn_long_time_slope",
    "head",
    "head_raw",
    "flux",
    "classical_head",
    "classical_flux",
    "solve_grid",
]

_Q2_SINGULAR_TOL = 1e-10


class DegenerateBranchError(ArithmeticError):
    """Raised when the two-pole representation is requested with ``omega(omega-1) = 0``."""


class InsufficientRootsError(ValueError):
    """Raised when a root table holds fewer roots than requested."""


class NonFiniteTermError(ArithmeticError):
    """Raised when a series term is not finite."""

    def __init__(self, index: int, what: str = "series term"):
        super().__init__(f"non-finite {what} at root index {index}")
        self.index = index


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation and assembly options.

    Attributes
    ----------
    n_roots : int
        Number of Hankel eigenvalues kept.
    use_closed_form : bool
        Replace the time-independent part of the series by its closed form.
    include_temporal_terms : bool
        Flux/flux case only.  When false the zero-eigenvalue growth term is
        dropped, reproducing the classical finite-Hankel result that
        saturates at late time.
    """

    n_roots: int = 200
    use_closed_form: bool = True
    include_temporal_terms: bool = True

    def __post_init__(self) -> None:
        if int(self.n_roots) != self.n_roots or self.n_roots < 1:
            raise DomainError(f"n_roots must be a positive integer, got {self.n_roots!r}")
        object.__setattr__(self, "n_roots", int(self.n_roots))


# ---------------------------------------------------------------------------
# per-root modal quantities


def _two_poles(k: np.ndarray, omega: float, lam: float):
    """Poles and residues of ``1 / (eta(s) + k^2)`` for ``0 < omega < 1``, ``lambda > 0``.

    With ``a = k^2 (1 - omega)`` the poles are
    ``s1 = -2 k^2 lam / S`` and ``s2 = -S / (2 omega (1 - omega))`` where
    ``S = nu + lam + a``; ``nu`` is written as a sum of squares and the
    differences ``nu -/+ (a - lam)`` are rationalized to avoid cancellation.
    """
    if omega == 1.0 or lam == 0.0:
        raise DegenerateBranchError("two-pole modes need 0 < omega < 1 and lambda > 0")
    w1 = 1.0 - omega
    a = k * k * w1
    nu = np.sqrt((lam - a) ** 2 + 4.0 * a * lam * w1)
    big = a >= lam
    # e = nu + a - lam, d = nu + lam - a; their product is 4 a lam (1 - omega)
    prod = 4.0 * a * lam * w1
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.where(big, nu + a - lam, prod / (nu + lam - a))
        d = np.where(big, prod / (nu + a - lam), nu + lam - a)
    s_sum = nu + lam + a
    poles = np.stack([-2.0 * k * k * lam / s_sum, -s_sum / (2.0 * omega * w1)], axis=-1)
    coefs = np.stack([lam * d / (nu * s_sum), (e + 2.0 * w1 * lam) / (2.0 * omega * nu)], axis=-1)
    return poles, coefs


def _poles_coefs(k, params: ReservoirParams):
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(k <= 0.0):
        raise DomainError("modal quantities need k > 0")
    if params.single_porosity:
        # eta = s (omega = 1) or omega s (lambda = 0): one pole per root
        w = params.omega
        return (-(k * k) / w)[:, None], np.full((k.size, 1), 1.0 / w)
    return _two_poles(k, params.omega, params.lambda_)


@dataclass(frozen=True)
class ModalTerms:
    """Per-root auxiliary quantities and the stable pole/residue pairs.

    ``psi``, ``xi``, ``rho``, ``nu``, ``vartheta``, ``A``, ``B`` and ``C`` are
    the classical auxiliaries of the double-porosity eigenmodes.  ``poles``
    and ``coefs`` have shape ``(n, m)`` with ``m = 2`` for a coupled matrix
    and ``m = 1`` in the single-porosity branch.
    """

    k: np.ndarray
    psi: float
    xi: np.ndarray
    rho: np.ndarray
    nu: np.ndarray
    vartheta: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    poles: np.ndarray = field(repr=False)
    coefs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if np.any(~np.isfinite(self.poles)) or np.any(self.poles > 0.0):
            bad = int(np.nonzero(~(self.poles <= 0.0))[0][0])
            raise NonFiniteTermError(bad, "or positive modal decay rate")


def modal_terms(k, params: ReservoirParams) -> ModalTerms:
    """Auxiliary quantities for the roots ``k``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    w, lam, g = params.omega, params.lambda_, params.gamma
    psi = w * (w - 1.0)
    k2 = k * k
    xi = -lam + k2 * (w - 1.0)
    rho = lam + k2 * (w - 1.0)
    # xi^2 + 4 k^2 lam psi, rewritten as a sum of non-negative terms
    a = k2 * (1.0 - w)
    nu = np.sqrt((lam - a) ** 2 + 4.0 * a * lam * (1.0 - w))
    vartheta = g * xi - psi + k2 * g * g * lam
    poles, coefs = _poles_coefs(k, params)
    return ModalTerms(
        k=k,
        psi=psi,
        xi=xi,
        rho=rho,
        nu=nu,
        vartheta=vartheta,
        A=xi + 2.0 * w * lam,
        B=(nu + xi) * g,
        C=(nu - xi) * g,
        poles=poles,
        coefs=coefs,
    )


def _scalar_or_array(value, like):
    return float(value[0]) if np.ndim(like) == 0 else value


def _check_t(t: float) -> None:
    if not t >= 0.0:
        raise DomainError(f"time must be non-negative, got {t!r}")


def _u_from(poles, coefs, t):
    return np.sum(coefs * np.exp(poles * t), axis=-1)


def _r1_from(poles, coefs, t):
    return np.sum(coefs * np.exp(poles * t) / poles, axis=-1)


def _q1_from(poles, coefs, t):
    return np.sum(coefs * np.expm1(poles * t) / poles, axis=-1)


def _ramp_convolution(p, t: float, gamma: float):
    """``(exp(p t) - exp(-t / gamma)) / (p + 1 / gamma)`` without cancellation."""
    d = p + 1.0 / gamma
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        direct = (np.exp(p * t) - math.exp(-t / gamma)) / d
        near = math.exp(-t / gamma) * np.expm1(d * t) / d
    return np.where(np.abs(d) * t > 1.0, direct, near)


def _q2_quadrature(poles_row, coefs_row, t: float, gamma: float) -> float:
    def integrand(z):
        return math.exp(-(t - z) / gamma) * float(np.sum(coefs_row * np.exp(poles_row * z)))

    pts = [max(t - c * gamma, 0.0) for c in (50.0, 10.0)]
    pts = sorted({p for p in pts if 0.0 < p < t})
    val, _ = quad(integrand, 0.0, t, points=pts or None, limit=500, epsabs=1e-15, epsrel=1e-12)
    return val


def _q2_from(poles, coefs, t: float, gamma: float):
    if t == 0.0:
        return np.zeros(poles.shape[0])
    singular = np.abs(poles + 1.0 / gamma) * gamma < _Q2_SINGULAR_TOL
    terms = coefs * np.where(singular, 0.0, _ramp_convolution(np.where(singular, -2.0 / gamma, poles), t, gamma))
    out = np.sum(terms, axis=-1)
    for i in np.nonzero(np.any(singular, axis=-1))[0]:
        out[i] = _q2_quadrature(poles[i], coefs[i], t, gamma)
    return out


def u_mode(k, t: float, params: ReservoirParams):
    """Inverse Laplace transform of ``1 / (eta(s) + k^2)``; equals ``1/omega`` at ``t = 0``."""
    _check_t(t)
    p, c = _poles_coefs(k, params)
    return _scalar_or_array(_u_from(p, c, t), k)


def r1(k, t: float, params: ReservoirParams):
    """Transient part of ``q1``: ``q1(k, t) - 1/k^2``, decaying to zero."""
    _check_t(t)
    p, c = _poles_coefs(k, params)
    return _scalar_or_array(_r1_from(p, c, t), k)


def q1(k, t: float, params: ReservoirParams):
    """``integral_0^t u_mode(k, z) dz``."""
    _check_t(t)
    p, c = _poles_coefs(k, params)
    return _scalar_or_array(_q1_from(p, c, t), k)


def q2(k, t: float, params: ReservoirParams):
    """``integral_0^t exp(-(t - z)/gamma) u_mode(k, z) dz``.

    Falls back to adaptive quadrature when a pole comes within a relative
    ``1e-10`` of ``-1/gamma``.
    """
    _check_t(t)
    p, c = _poles_coefs(k, params)
    return _scalar_or_array(_q2_from(p, c, t, params.gamma), k)


def chi(k, t: float, params: ReservoirParams):
    """No-flow transient of the flux/flux case, ``2 r1 / (pi k)``.

    Starts at ``-2 / (pi k^3)`` and decays to zero.
    """
    _check_t(t)
    kk = np.atleast_1d(np.asarray(k, dtype=float))
    p, c = _poles_coefs(kk, params)
    return _scalar_or_array(2.0 / (np.pi * kk) * _r1_from(p, c, t), k)


def _case_factor(case: BoundaryCase, k: np.ndarray, params: ReservoirParams) -> np.ndarray:
    """Influx coupling coefficient of DN (``J0(k)``) and NN (``J1(k)``) modes."""
    R, q = params.r_ext, params.q_ext
    num = special.j0(k) if case is BoundaryCase.DN else special.j1(k)
    return q * num / (R * k * special.j1(R * k))


def _modal_decay_from(case: BoundaryCase, k, poles, coefs, t: float, params: ReservoirParams, factor=None):
    rr = _r1_from(poles, coefs, t)
    if case is BoundaryCase.DD:
        return -(2.0 / np.pi) * rr
    if case is BoundaryCase.ND:
        return 2.0 / (np.pi * k) * rr
    if factor is None:
        factor = _case_factor(case, k, params)
    ramp = rr - _q2_from(poles, coefs, t, params.gamma)
    if case is BoundaryCase.DN:
        return (2.0 / np.pi) * (factor * ramp - rr)
    return (2.0 / np.pi) * (rr / k - factor * ramp)


def modal_decay(case, k, t: float, params: ReservoirParams):
    """Time-dependent Hankel coefficient of the head for roots ``k``.

    Adding the case's time-independent coefficient gives the full Hankel
    transform of the head, which vanishes at ``t = 0``.
    """
    case = BoundaryCase.parse(case)
    _check_t(t)
    kk = np.atleast_1d(np.asarray(k, dtype=float))
    p, c = _poles_coefs(kk, params)
    return _scalar_or_array(_modal_decay_from(case, kk, p, c, t, params), k)


# ---------------------------------------------------------------------------
# closed-form profiles


def _check_radius(r, r_ext: float) -> np.ndarray:
    ra = np.asarray(r, dtype=float)
    if np.any(~(ra >= 1.0)) or np.any(~(ra <= r_ext)):
        raise DomainError(f"radius outside [1, {r_ext!r}]")
    return ra


def _nn_profiles(r, params: ReservoirParams):
    R = params.r_ext
    R2 = R * R - 1.0
    lr = np.log(r)
    lR = math.log(R)
    c_nf = (3.0 * R**4 - 4.0 * R**4 * lR - 2.0 * R**2 - 1.0) / (4.0 * R2 * R2)
    c_f = (R**4 + 2.0 * R**2 - 4.0 * R**2 * lR - 3.0) / (4.0 * R2 * R2)
    no_flow = r * r / (2.0 * R2) - R * R * lr / R2 - c_nf
    influx = -params.q_ext * (r * r / (2.0 * R2) - lr / R2 - c_f)
    return no_flow, influx


def stationary_head(case, r, params: ReservoirParams):
    """Time-independent head profile of a case.

    For DD, DN and ND this is the steady state.  For NN it is the zero-mean
    profile of the quasi-steady state, without the terms that grow with
    ``t`` or involve ``exp(-t / gamma)``.
    """
    case = BoundaryCase.parse(case)
    R = params.r_ext
    ra = _check_radius(r, R)
    if case is BoundaryCase.DD:
        out = 1.0 - np.log(ra) / math.log(R)
    elif case is BoundaryCase.DN:
        out = 1.0 - params.q_ext * np.log(ra)
    elif case is BoundaryCase.ND:
        out = np.log(R / ra)
    else:
        nf, fl = _nn_profiles(ra, params)
        out = nf + fl
    return out if np.ndim(out) else float(out)


def quasi_stationary_nn(r, t: float, params: ReservoirParams):
    """Long-time asymptote of the flux/flux head for a single-porosity medium.

    Sum of the no-flow and ramp-influx expansions: the profile of
    :func:`stationary_head` plus ``2 ((1 - q) t + q gamma (1 - exp(-t/gamma))) / (R^2 - 1)``.
    The influx enters with the sign of the outer flux, so the late-time slope is
    ``2 (1 - q_ext) / (r_ext^2 - 1)``.
    """
    _check_t(t)
    ra = _check_radius(r, params.r_ext)
    R2 = params.r_ext**2 - 1.0
    q, g = params.q_ext, params.gamma
    nf, fl = _nn_profiles(ra, params)
    out = nf + fl + 2.0 * ((1.0 - q) * t + q * g * -math.expm1(-t / g)) / R2
    return out if np.ndim(out) else float(out)


def nn_zero_mode(t: float, params: ReservoirParams) -> float:
    """Exact zero-eigenvalue contribution of the flux/flux head.

    Reduces to the temporal terms of :func:`quasi_stationary_nn` when
    ``omega = 1``; with a matrix it adds the storage lag
    ``(1 - omega)^2 / lambda (1 - exp(-beta t))``, ``beta = lambda / (omega (1 - omega))``.
    """
    _check_t(t)
    w, lam, q, g = params.omega, params.lambda_, params.q_ext, params.gamma
    R2 = params.r_ext**2 - 1.0
    ramp = g * -math.expm1(-t / g)
    if params.single_porosity:
        flow, conv = t / w, ramp / w
    else:
        beta = lam / (w * (1.0 - w))
        flow = t + (1.0 - w) ** 2 / lam * -math.expm1(-beta * t)
        conv = ramp + (1.0 - w) / w * float(_ramp_convolution(np.array([-beta]), t, g)[0])
    return 2.0 / R2 * ((1.0 - q) * flow + q * conv)


def nn_long_time_slope(params: ReservoirParams) -> float:
    """Late-time ``dh/dt`` of the flux/flux head: net inflow over pore volume."""
    w = params.omega if params.lambda_ == 0.0 else 1.0
    return 2.0 * (1.0 - params.q_ext) / ((params.r_ext**2 - 1.0) * w)


# ---------------------------------------------------------------------------
# series assembly


def _fsum_columns(terms: np.ndarray) -> np.ndarray:
    # fixed ascending-k order with exact rounding of each column sum
    return np.array([math.fsum(col) for col in terms.T])


class SeriesSolver:
    """Truncated Hankel series for one parameter set.

    Root-dependent weights are computed once and reused across radii and
    times.

    Parameters
    ----------
    params : ReservoirParams
    config : SeriesConfig, optional
    roots : RootTable, optional
        Must hold at least ``config.n_roots`` roots of ``params.case``; found
        (and cached) automatically when omitted.
    """

    def __init__(self, params: ReservoirParams, config: SeriesConfig | None = None, roots: RootTable | None = None):
        self.params = params
        self.config = config or SeriesConfig()
        self.case = params.case
        n = self.config.n_roots
        if roots is None:
            roots = cached_roots(self.case, params.r_ext, n)
        elif roots.case is not self.case or roots.r_ext != params.r_ext:
            raise ValueError("root table does not match the case or r_ext")
        if len(roots) < n:
            raise InsufficientRootsError(f"root table holds {len(roots)} roots, {n} requested")
        k = roots.roots[:n]
        self.k = k
        R = params.r_ext
        j0k, j1k = special.j0(k), special.j1(k)
        j0R, j1R = special.j0(R * k), special.j1(R * k)
        if self.case is BoundaryCase.DD:
            w = j0R**2 / (j0k**2 - j0R**2)
        elif self.case is BoundaryCase.DN:
            w = j1R**2 / (j0k**2 - j1R**2)
        elif self.case is BoundaryCase.ND:
            w = j0R**2 / (j1k**2 - j0R**2)
        else:
            w = j1R**2 / (j1k**2 - j1R**2)
        self.weights = w
        self.factor = _case_factor(self.case, k, params) if self.case.has_influx else None
        self.poles, self.coefs = _poles_coefs(k, params)
        self._kernel_cache: dict[bytes, np.ndarray] = {}

    # eigenfunctions -------------------------------------------------------

    def kernel_matrix(self, r) -> np.ndarray:
        """Eigenfunctions at radii ``r``; shape ``(n_roots, len(r))``.

        Cases with a prescribed outer head switch to an equivalent form
        anchored at ``r_ext`` beyond ``sqrt(r_ext)``, so that the eigenfunction
        vanishes exactly at the outer radius.
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        key = r.tobytes()
        hit = self._kernel_cache.get(key)
        if hit is not None:
            return hit
        k = self.k[:, None]
        R = self.params.r_ext
        rr = r[None, :]
        if self.case in (BoundaryCase.DD, BoundaryCase.DN):
            out = cross_i(0, 0, k, rr, 1.0)
        else:
            out = cross_i(1, 0, k, 1.0, rr)
        if self.case.outer_dirichlet:
            outer = r > math.sqrt(R)
            if np.any(outer):
                kk = self.k
                if self.case is BoundaryCase.DD:
                    scale = 2.0 / (np.pi * kk * cross_i(0, 1, kk, R, 1.0))
                else:
                    scale = 2.0 / (np.pi * kk * cross_i(0, 0, kk, R, 1.0))
                out[:, outer] = scale[:, None] * cross_i(0, 0, k, R, r[None, outer])
        out.setflags(write=False)
        if len(self._kernel_cache) < 32:
            self._kernel_cache[key] = out
        return out

    # coefficients ---------------------------------------------------------

    def transient_coefficients(self, t: float) -> np.ndarray:
        """``modal_decay`` for every root at time ``t``."""
        _check_t(t)
        return _modal_decay_from(self.case, self.k, self.poles, self.coefs, t, self.params, self.factor)

    def stationary_coefficients(self) -> np.ndarray:
        """Time-independent Hankel coefficients of the head."""
        k = self.k
        if self.case is BoundaryCase.DD:
            return -2.0 / (np.pi * k * k)
        if self.case is BoundaryCase.DN:
            return 2.0 / (np.pi * k * k) * (self.factor - 1.0)
        if self.case is BoundaryCase.ND:
            return 2.0 / (np.pi * k**3)
        return 2.0 / (np.pi * k**3) - 2.0 / np.pi * self.factor / (k * k)

    def _sum(self, coef: np.ndarray, r: np.ndarray) -> np.ndarray:
        terms = (0.5 * np.pi**2) * (self.k**2 * self.weights * coef)[:, None] * self.kernel_matrix(r)
        bad = ~np.isfinite(terms)
        if np.any(bad):
            raise NonFiniteTermError(int(np.nonzero(np.any(bad, axis=1))[0][0]))
        return _fsum_columns(terms)

    # public evaluations ---------------------------------------------------

    def head(self, r, t: float):
        """Fracture head at radii ``r`` and time ``t``."""
        if not self.config.use_closed_form:
            return self.head_raw(r, t)
        ra = np.atleast_1d(_check_radius(r, self.params.r_ext))
        out = stationary_head(self.case, ra, self.params) + self._sum(self.transient_coefficients(t), ra)
        if self.case is BoundaryCase.NN and self.config.include_temporal_terms:
            out = out + nn_zero_mode(t, self.params)
        return out if np.ndim(r) else float(out[0])

    def head_raw(self, r, t: float):
        """Head with the time-independent part kept as its truncated series."""
        ra = np.atleast_1d(_check_radius(r, self.params.r_ext))
        coef = self.stationary_coefficients() + self.transient_coefficients(t)
        out = self._sum(coef, ra)
        if self.case is BoundaryCase.NN and self.config.include_temporal_terms:
            out = out + nn_zero_mode(t, self.params)
        return out if np.ndim(r) else float(out[0])

    def stationary_series(self, r):
        """Truncated series of the time-independent profile."""
        ra = np.atleast_1d(_check_radius(r, self.params.r_ext))
        out = self._sum(self.stationary_coefficients(), ra)
        return out if np.ndim(r) else float(out[0])

    def flux(self, t: float) -> float:
        """Bottomhole flux ``-r dh/dr`` at ``r = 1``."""
        if not t > 0.0:
            raise DomainError(f"flux requires t > 0, got {t!r}")
        if not self.case.inner_dirichlet:
            return 1.0
        k = self.k
        g = self.transient_coefficients(t)
        terms = -(0.5 * np.pi**2) * k**3 * g * cross_i(0, 1, k, 1.0, 1.0) * self.weights
        bad = ~np.isfinite(terms)
        if np.any(bad):
            raise NonFiniteTermError(int(np.nonzero(bad)[0][0]))
        base = 1.0 / math.log(self.params.r_ext) if self.case is BoundaryCase.DD else self.params.q_ext
        return base + math.fsum(terms)


def _solver(case, params: ReservoirParams, config: SeriesConfig | None, roots: RootTable | None) -> SeriesSolver:
    case = BoundaryCase.parse(case)
    if params.case is not case:
        params = params.with_case(case)
    return SeriesSolver(params, config, roots)


def head(case, r, t: float, params: ReservoirParams, config: SeriesConfig | None = None, roots: RootTable | None = None):
    """Fracture head ``h2(r, t)`` from the truncated series."""
    return _solver(case, params, config, roots).head(r, t)


def head_raw(case, r, t: float, params: ReservoirParams, config: SeriesConfig | None = None, roots: RootTable | None = None):
    """Head with no closed-form replacement of the time-independent series."""
    return _solver(case, params, config, roots).head_raw(r, t)


def flux(case, t: float, params: ReservoirParams, config: SeriesConfig | None = None, roots: RootTable | None = None) -> float:
    """Bottomhole flux ``j2(t)``; identically 1 for a prescribed-rate well."""
    return _solver(case, params, config, roots).flux(t)


# ---------------------------------------------------------------------------
# classical single-porosity series, coded independently of the modal machinery


def _classical_setup(case: BoundaryCase, params: ReservoirParams, n_roots: int, roots: RootTable | None):
    if not (params.omega == 1.0 and params.lambda_ == 0.0):
        raise CaseError("classical branch requires omega = 1 and lambda = 0")
    R = params.r_ext
    table = roots if roots is not None else cached_roots(case, R, n_roots)
    k = table.roots[:n_roots]
    jR0, jR1 = special.j0(k * R), special.j1(k * R)
    j0, j1 = special.j0(k), special.j1(k)
    return k, R, j0, j1, jR0, jR1


def classical_head(case, r, t: float, params: ReservoirParams, n_roots: int = 200, roots: RootTable | None = None):
    """Single-porosity head with ``exp(-k^2 t)`` modes, for cross-checking."""
    case = BoundaryCase.parse(case)
    _check_t(t)
    k, R, j0, j1, jR0, jR1 = _classical_setup(case, params, n_roots, roots)
    ra = np.atleast_1d(_check_radius(r, R))
    q, g = params.q_ext, params.gamma
    e = np.exp(-k * k * t)
    ramp = g * (e - math.exp(-t / g)) / (1.0 - k * k * g)
    kk, rr = k[:, None], ra[None, :]
    if case is BoundaryCase.DD:
        amp = jR0**2 / (j0**2 - jR0**2) * e
        base = 1.0 - np.log(ra) / math.log(R)
        shape = special.y0(kk) * special.j0(kk * rr) - j0[:, None] * special.y0(kk * rr)
        total = base + np.pi * (amp[:, None] * shape).sum(axis=0)
    elif case is BoundaryCase.DN:
        c = q * j0 / (R * k * jR1)
        amp = jR1**2 / (j0**2 - jR1**2) * ((1.0 - c) * e - c * k * k * ramp)
        base = 1.0 - q * np.log(ra)
        shape = special.y0(kk) * special.j0(kk * rr) - j0[:, None] * special.y0(kk * rr)
        total = base + np.pi * (amp[:, None] * shape).sum(axis=0)
    elif case is BoundaryCase.ND:
        amp = jR0**2 / (j1**2 - jR0**2) * e / k
        base = np.log(R / ra)
        shape = j1[:, None] * special.y0(kk * rr) - special.y1(kk) * special.j0(kk * rr)
        total = base - np.pi * (amp[:, None] * shape).sum(axis=0)
    else:
        d = q * j1 / (R * k * jR1)
        amp = jR1**2 / (j1**2 - jR1**2) * (e / k - d * e - d * k * k * ramp)
        R2 = R * R - 1.0
        lr, lR = np.log(ra), math.log(R)
        base = (
            ra**2 / (2 * R2) - R * R * lr / R2 - (3 * R**4 - 4 * R**4 * lR - 2 * R**2 - 1) / (4 * R2**2)
            - q * (ra**2 / (2 * R2) - lr / R2 - (R**4 + 2 * R**2 - 4 * R**2 * lR - 3) / (4 * R2**2))
            + 2.0 / R2 * ((1.0 - q) * t + q * g * (1.0 - math.exp(-t / g)))
        )
        shape = j1[:, None] * special.y0(kk * rr) - special.y1(kk) * special.j0(kk * rr)
        total = base - np.pi * (amp[:, None] * shape).sum(axis=0)
    return total if np.ndim(r) else float(total[0])


def classical_flux(case, t: float, params: ReservoirParams, n_roots: int = 200, roots: RootTable | None = None) -> float:
    """Single-porosity bottomhole flux with ``exp(-k^2 t)`` modes."""
    case = BoundaryCase.parse(case)
    if not t > 0.0:
        raise DomainError(f"flux requires t > 0, got {t!r}")
    if not case.inner_dirichlet:
        return 1.0
    k, R, j0, j1, jR0, jR1 = _classical_setup(case, params, n_roots, roots)
    e = np.exp(-k * k * t)
    if case is BoundaryCase.DD:
        return 1.0 / math.log(R) + 2.0 * float(np.sum(jR0**2 / (j0**2 - jR0**2) * e))
    q, g = params.q_ext, params.gamma
    c = q * j0 / (R * k * jR1)
    ramp = g * (e - math.exp(-t / g)) / (1.0 - k * k * g)
    return q + 2.0 * float(np.sum(jR1**2 / (j0**2 - jR1**2) * ((1.0 - c) * e - c * k * k * ramp)))


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class SolutionGrid:
    """Head and flux sampled on a time/radius grid.

    ``head2`` has shape ``(len(times), len(radii))``.  ``flux`` holds one
    value per time, or NaN where undefined (``t = 0``).
    """

    times: np.ndarray
    radii: np.ndarray
    head2: np.ndarray
    flux: np.ndarray
    method: str

    def __post_init__(self) -> None:
        if self.method not in ("series", "stehfest"):
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.head2.shape != (self.times.size, self.radii.size) or self.flux.shape != self.times.shape:
            raise ValueError("grid dimensions are inconsistent")
        if np.any(~np.isfinite(self.head2)):
            raise NonFiniteTermError(-1, "grid value")


def solve_grid(
    params: ReservoirParams,
    times,
    radii,
    method: str = "series",
    config: SeriesConfig | None = None,
    stehfest=None,
) -> SolutionGrid:
    """Evaluate head and bottomhole flux on a grid with either method."""
    from . import laplace

    times = np.asarray(times, dtype=float)
    radii = np.asarray(radii, dtype=float)
    case = params.case
    h = np.empty((times.size, radii.size))
    j = np.full(times.size, np.nan)
    if method == "series":
        solver = SeriesSolver(params, config)
        for i, t in enumerate(times):
            h[i] = solver.head(radii, float(t))
            if t > 0.0:
                j[i] = solver.flux(float(t))
    elif method == "stehfest":
        h = laplace.head_grid(case, radii, times, params, stehfest)
        for i, t in enumerate(times):
            j[i] = laplace.invert_flux(case, float(t), params, stehfest)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SolutionGrid(times, radii, h, j, method)
