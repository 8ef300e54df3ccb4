"""Cross-validation of the series solutions.

Includes agreement checks against Stehfest inversion, convergence with the
number of roots, closed-form identity residuals and the late-time gap
between the flux/flux solution with and without its zero-eigenvalue term.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import laplace
from .laplace import StehfestConfig
from .params import BoundaryCase, ReservoirParams
from .series import SeriesConfig, SeriesSolver, nn_zero_mode
from .specfun import cached_roots

log = logging.getLogger(__name__)

__all__ = [
    "REL_FLOOR",
    "REFERENCE_STEHFEST",
    "ComparisonReport",
    "ConvergenceRow",
    "IdentityRow",
    "GapRow",
    "default_grid",
    "compare_methods",
    "convergence_study",
    "identity_residuals",
    "cinelli_gap",
    "rows_to_csv",
]

REL_FLOOR = 1e-3
# 18 terms bring the Stehfest floor on these transforms to ~3e-4, below the 1e-3 gate
REFERENCE_STEHFEST = StehfestConfig(18)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def rows_to_csv(header: list[str], rows) -> str:
    """Render rows as CSV with ``repr`` floats (locale independent, round-trip exact)."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def default_grid(r_ext: float, n_t: int = 20, n_r: int = 20, t_start: float = 1.0, t_stop: float = 1e6):
    """Log-spaced times and radii, radii including both endpoints exactly."""
    times = np.geomspace(t_start, t_stop, n_t)
    radii = np.geomspace(1.0, r_ext, n_r)
    radii[0], radii[-1] = 1.0, r_ext
    return times, radii


@dataclass(frozen=True)
class ComparisonReport:
    """Element-wise head (and flux) comparison of series against Stehfest.

    Relative errors use ``max(|stehfest|, rel_floor)`` as denominator.
    """

    case: BoundaryCase
    params: ReservoirParams
    n_roots: int
    stehfest_terms: int
    times: np.ndarray
    radii: np.ndarray
    series: np.ndarray
    stehfest: np.ndarray
    rel_floor: float = REL_FLOOR
    series_flux: np.ndarray | None = None
    stehfest_flux: np.ndarray | None = None
    abs_err: np.ndarray = field(init=False, repr=False)
    rel_err: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        diff = np.abs(self.series - self.stehfest)
        object.__setattr__(self, "abs_err", diff)
        object.__setattr__(self, "rel_err", diff / np.maximum(np.abs(self.stehfest), self.rel_floor))

    @property
    def grid_dims(self) -> tuple[int, int]:
        return self.series.shape

    @property
    def max_abs_err(self) -> float:
        return float(self.abs_err.max())

    @property
    def max_rel_err(self) -> float:
        return float(self.rel_err.max())

    @property
    def location(self) -> tuple[float, float]:
        """``(t, r)`` of the largest relative error."""
        i, j = np.unravel_index(int(np.argmax(self.rel_err)), self.rel_err.shape)
        return float(self.times[i]), float(self.radii[j])

    @property
    def per_time_rel_err(self) -> np.ndarray:
        return self.rel_err.max(axis=1)

    @property
    def flux_max_rel_err(self) -> float | None:
        if self.series_flux is None:
            return None
        diff = np.abs(self.series_flux - self.stehfest_flux)
        return float(np.max(diff / np.maximum(np.abs(self.stehfest_flux), self.rel_floor)))

    def passed(self, tol: float = 1e-3) -> bool:
        ok = self.max_rel_err <= tol
        if self.series_flux is not None:
            ok = ok and self.flux_max_rel_err <= tol
        return ok

    def to_csv(self) -> str:
        rows = []
        for i, t in enumerate(self.times):
            for j, r in enumerate(self.radii):
                rows.append((t, r, self.series[i, j], self.stehfest[i, j], self.abs_err[i, j], self.rel_err[i, j]))
        return rows_to_csv(["t", "r", "series", "stehfest", "abs_err", "rel_err"], rows)

    def summary(self, tol: float = 1e-3) -> str:
        t, r = self.location
        status = "PASS" if self.passed(tol) else "FAIL"
        text = (
            f"{status} max_rel_err={self.max_rel_err:.3e} max_abs_err={self.max_abs_err:.3e} "
            f"at t={t:.6g} r={r:.6g} case={self.case.value} roots={self.n_roots} "
            f"stehfest_n={self.stehfest_terms} grid={self.grid_dims[0]}x{self.grid_dims[1]} "
            f"rel_floor={self.rel_floor:g}"
        )
        if self.series_flux is not None:
            text += f" flux_max_rel_err={self.flux_max_rel_err:.3e}"
        return text


def compare_methods(
    case,
    params: ReservoirParams,
    times=None,
    radii=None,
    series_config: SeriesConfig | None = None,
    stehfest_config: StehfestConfig | None = None,
    include_flux: bool = True,
) -> ComparisonReport:
    """Compare series and Stehfest heads on a time/radius grid.

    Times must be positive (Stehfest samples ``s = i ln 2 / t``).  With
    ``include_flux`` the bottomhole flux of prescribed-head wells is compared
    too.
    """
    case = BoundaryCase.parse(case)
    params = params.with_case(case)
    dt, dr = default_grid(params.r_ext)
    times = dt if times is None else np.asarray(times, dtype=float)
    radii = dr if radii is None else np.asarray(radii, dtype=float)
    series_config = series_config or SeriesConfig()
    stehfest_config = stehfest_config or REFERENCE_STEHFEST
    solver = SeriesSolver(params, series_config)
    ser = np.array([solver.head(radii, float(t)) for t in times])
    ref = laplace.head_grid(case, radii, times, params, stehfest_config)
    sflux = rflux = None
    if include_flux and case.inner_dirichlet:
        sflux = np.array([solver.flux(float(t)) for t in times])
        rflux = np.array([laplace.invert_flux(case, float(t), params, stehfest_config) for t in times])
    report = ComparisonReport(
        case, params, series_config.n_roots, stehfest_config.n_terms, times, radii, ser, ref,
        series_flux=sflux, stehfest_flux=rflux,
    )
    log.info("%s", report.summary())
    return report


@dataclass(frozen=True)
class ConvergenceRow:
    n_roots: int
    r: float
    t: float
    head: float
    head_raw: float
    reference: float

    @property
    def head_dev(self) -> float:
        return abs(self.head - self.reference)

    @property
    def raw_dev(self) -> float:
        return abs(self.head_raw - self.reference)

    def astuple(self):
        return (self.n_roots, self.r, self.t, self.head, self.head_raw, self.reference, self.head_dev, self.raw_dev)


CONVERGENCE_HEADER = ["n_roots", "r", "t", "head", "head_raw", "reference", "head_dev", "raw_dev"]


def convergence_study(
    case,
    params: ReservoirParams,
    r_probe: float,
    t_probe: float,
    root_counts,
    stehfest_config: StehfestConfig | None = None,
    include_temporal_terms: bool = True,
) -> list[ConvergenceRow]:
    """Head with and without closed forms at one probe point versus root count.

    The reference is the Stehfest inversion of the Laplace-space head.
    """
    case = BoundaryCase.parse(case)
    params = params.with_case(case)
    counts = [int(n) for n in root_counts]
    table = cached_roots(case, params.r_ext, max(counts))
    ref = laplace.invert_head(case, r_probe, t_probe, params, stehfest_config or REFERENCE_STEHFEST)
    rows = []
    for n in counts:
        solver = SeriesSolver(params, SeriesConfig(n, True, include_temporal_terms), table)
        rows.append(ConvergenceRow(n, r_probe, t_probe, solver.head(r_probe, t_probe), solver.head_raw(r_probe, t_probe), ref))
    return rows


@dataclass(frozen=True)
class IdentityRow:
    identity: str
    r: float
    closed: float
    series: float

    @property
    def residual(self) -> float:
        return abs(self.closed - self.series)

    def astuple(self):
        return (self.identity, self.r, self.closed, self.series, self.residual)


IDENTITY_HEADER = ["identity", "r", "closed", "series", "residual"]
IDENTITIES = ("dd-log", "dn-profile", "nd-profile", "nn-no-flow", "nn-influx")


def identity_residuals(params: ReservoirParams, n_roots: int, radii=None) -> list[IdentityRow]:
    """Closed-form profiles against their truncated eigenfunction series.

    The five profiles are the DD, DN and ND steady states and the no-flow and
    ramp-influx parts of the NN quasi-steady profile.  Default radii are
    ``2`` and ``sqrt(r_ext)``.
    """
    R = params.r_ext
    radii = np.array([2.0, math.sqrt(R)]) if radii is None else np.atleast_1d(np.asarray(radii, dtype=float))
    rows: list[IdentityRow] = []
    q = params.q_ext
    R2 = R * R - 1.0
    lr = np.log(radii)
    for case, name, closed in (
        (BoundaryCase.DD, "dd-log", 1.0 - lr / math.log(R)),
        (BoundaryCase.DN, "dn-profile", 1.0 - q * lr),
        (BoundaryCase.ND, "nd-profile", np.log(R / radii)),
    ):
        solver = SeriesSolver(params.with_case(case), SeriesConfig(n_roots))
        ser = solver.stationary_series(radii)
        rows += [IdentityRow(name, float(r), float(c), float(s)) for r, c, s in zip(radii, closed, ser)]
    solver = SeriesSolver(params.with_case(BoundaryCase.NN), SeriesConfig(n_roots))
    k = solver.k
    lR = math.log(R)
    no_flow = radii**2 / (2 * R2) - R * R * lr / R2 - (3 * R**4 - 4 * R**4 * lR - 2 * R**2 - 1) / (4 * R2**2)
    influx = -q * (radii**2 / (2 * R2) - lr / R2 - (R**4 + 2 * R**2 - 4 * R**2 * lR - 3) / (4 * R2**2))
    ser_nf = solver._sum(2.0 / (np.pi * k**3), radii)
    ser_f = solver._sum(-2.0 / np.pi * solver.factor / (k * k), radii)
    rows += [IdentityRow("nn-no-flow", float(r), float(c), float(s)) for r, c, s in zip(radii, no_flow, ser_nf)]
    rows += [IdentityRow("nn-influx", float(r), float(c), float(s)) for r, c, s in zip(radii, influx, ser_f)]
    return rows


@dataclass(frozen=True)
class GapRow:
    t: float
    with_temporal: float
    without_temporal: float
    analytic: float

    @property
    def gap(self) -> float:
        return self.with_temporal - self.without_temporal

    def astuple(self):
        return (self.t, self.with_temporal, self.without_temporal, self.gap, self.analytic)


GAP_HEADER = ["t", "with_temporal", "without_temporal", "gap", "analytic"]


def cinelli_gap(params: ReservoirParams, grid_t, r: float = 1.0, n_roots: int = 200) -> list[GapRow]:
    """Flux/flux head with and without the zero-eigenvalue term.

    ``analytic`` is the temporal part of the single-porosity long-time
    expansion, ``2 ((1 - q) t + q gamma (1 - exp(-t/gamma))) / (r_ext^2 - 1)``.
    """
    p = params.with_case(BoundaryCase.NN)
    table = cached_roots(BoundaryCase.NN, p.r_ext, n_roots)
    full = SeriesSolver(p, SeriesConfig(n_roots, True, True), table)
    bare = SeriesSolver(p, SeriesConfig(n_roots, True, False), table)
    R2 = p.r_ext**2 - 1.0
    q, g = p.q_ext, p.gamma
    rows = []
    for t in np.asarray(grid_t, dtype=float):
        analytic = 2.0 / R2 * ((1.0 - q) * t + q * g * -math.expm1(-t / g))
        rows.append(GapRow(float(t), full.head(r, float(t)), bare.head(r, float(t)), analytic))
    return rows


def zero_mode_gap(params: ReservoirParams, t: float) -> float:
    """Exact gap between the two flux/flux assemblies, independent of truncation."""
    return nn_zero_mode(t, params.with_case(BoundaryCase.NN))
