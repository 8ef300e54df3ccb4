"""Model parameters for double-porosity radial flow.

Dimensional rock/fluid properties are reduced to the five dimensionless
numbers used by the solvers: storage ratio ``omega``, interporosity
coefficient ``lambda_``, external radius ``r_ext`` and the ramp influx
parameters ``q_ext`` and ``gamma``.

Dimensionless flux back-conversion (not used numerically by the library):
for constant-pressure scaling the bottomhole flux is
``j = -r dh/dr |_(r=1)`` with ``h = (h0 - h2) / (h0 - h_w)``, and the
dimensional rate follows as ``q = 2 pi k2 h_thick (h0 - h_w) j / mu`` (times
``rho2 g`` when heads are expressed as pressures).  For constant-rate scaling
``h = 2 pi k2 h_thick (h0 - h2) / (q mu)`` and ``j = 1`` at the well.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace


class DomainError(ValueError):
    """Raised when an argument lies outside its admissible domain."""


class CaseError(ValueError):
    """Raised when an operation is not defined for the boundary case."""


class BoundaryCase(enum.Enum):
    """Inner/outer boundary-condition pairing.

    The first letter refers to the wellbore (``r = 1``), the second to the
    external radius.  ``D`` is a prescribed head, ``N`` a prescribed flux.
    """

    DD = "DD"
    DN = "DN"
    ND = "ND"
    NN = "NN"

    @classmethod
    def parse(cls, value: "str | BoundaryCase") -> "BoundaryCase":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise CaseError(f"unknown boundary case {value!r}; expected one of dd, dn, nd, nn") from None

    @property
    def inner_dirichlet(self) -> bool:
        return self.value[0] == "D"

    @property
    def outer_dirichlet(self) -> bool:
        return self.value[1] == "D"

    @property
    def has_influx(self) -> bool:
        """True when the outer boundary carries the ramp influx."""
        return self.value[1] == "N"


@dataclass(frozen=True)
class DimensionalProperties:
    """Dimensional fracture/matrix properties in SI units.

    Index 1 refers to the matrix blocks and index 2 to the fractures.
    """

    k1: float
    k2: float
    mu: float
    rho2: float
    phi1: float
    phi2: float
    c1: float
    c2: float
    alpha: float
    r_w: float
    r_ext_dim: float
    h0: float
    h_w: float
    h_thick: float
    q: float

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise DomainError(f"{f.name} must be finite, got {v!r}")
            if f.name not in ("h0", "h_w") and v <= 0.0:
                raise DomainError(f"{f.name} must be strictly positive, got {v!r}")
        if self.r_ext_dim <= self.r_w:
            raise DomainError("r_ext_dim must exceed r_w")
        if self.h0 == self.h_w:
            raise DomainError("h0 and h_w must differ for head scaling")

    @property
    def total_storage(self) -> float:
        return self.phi1 * self.c1 + self.phi2 * self.c2


@dataclass(frozen=True)
class ReservoirParams:
    """Dimensionless model parameters.

    Parameters
    ----------
    omega : float
        Fracture storage coefficient, ``0 < omega <= 1``.
    lambda_ : float
        Interporosity transmissibility coefficient, ``>= 0``.
    r_ext : float
        External radius scaled by the well radius, ``> 1``.
    q_ext : float
        Ramp influx factor (outer flux cases only), ``>= 0``.
    gamma : float
        Ramp time constant (outer flux cases only), ``> 0``.
    case : BoundaryCase
    """

    omega: float = 0.1
    lambda_: float = 1e-3
    r_ext: float = 100.0
    q_ext: float = 0.5
    gamma: float = 1e-3
    case: BoundaryCase = BoundaryCase.DD

    def __post_init__(self) -> None:
        object.__setattr__(self, "case", BoundaryCase.parse(self.case))
        for name in ("omega", "lambda_", "r_ext", "q_ext", "gamma"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise DomainError(f"{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not 0.0 < self.omega <= 1.0:
            raise DomainError(f"omega must lie in (0, 1], got {self.omega}")
        if self.lambda_ < 0.0:
            raise DomainError(f"lambda must be non-negative, got {self.lambda_}")
        if self.r_ext <= 1.0:
            raise DomainError(f"r_ext must exceed 1, got {self.r_ext}")
        if self.q_ext < 0.0:
            raise DomainError(f"q_ext must be non-negative, got {self.q_ext}")
        if self.gamma <= 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")

    @property
    def single_porosity(self) -> bool:
        """True when the matrix is absent or decoupled (one decay mode per root)."""
        return self.omega == 1.0 or self.lambda_ == 0.0

    def with_case(self, case: "str | BoundaryCase") -> "ReservoirParams":
        return replace(self, case=BoundaryCase.parse(case))

    def with_(self, **changes) -> "ReservoirParams":
        return replace(self, **changes)


# Implementer-chosen presets; no figure of the source model fixes these values.
PRESETS: dict[str, dict[str, float]] = {
    "double-porosity-default": {"omega": 0.1, "lambda_": 1e-3, "r_ext": 100.0, "q_ext": 0.5, "gamma": 1e-3},
    "single-porosity": {"omega": 1.0, "lambda_": 0.0, "r_ext": 100.0, "q_ext": 0.5, "gamma": 1e-3},
}


def preset(name: str, case: "str | BoundaryCase" = BoundaryCase.DD, **overrides) -> ReservoirParams:
    """Return a named parameter preset, optionally overriding fields."""
    try:
        values = dict(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
    values.update(overrides)
    return ReservoirParams(case=BoundaryCase.parse(case), **values)


def nondimensionalize(
    props: DimensionalProperties,
    case: "str | BoundaryCase",
    q_ext: float = 0.0,
    gamma: float = 1.0,
) -> ReservoirParams:
    """Reduce dimensional properties to :class:`ReservoirParams`.

    ``omega = phi2 c2 / (phi1 c1 + phi2 c2)``, ``lambda = alpha r_w^2 k1 / k2``
    and ``r_ext = r_ext_dim / r_w``.
    """
    omega = props.phi2 * props.c2 / props.total_storage
    lam = props.alpha * props.r_w**2 * props.k1 / props.k2
    return ReservoirParams(
        omega=omega,
        lambda_=lam,
        r_ext=props.r_ext_dim / props.r_w,
        q_ext=q_ext,
        gamma=gamma,
        case=BoundaryCase.parse(case),
    )


def dimensionless_time(props: DimensionalProperties, t: float) -> float:
    """Convert elapsed time in seconds to dimensionless time."""
    if not t >= 0.0:
        raise DomainError(f"time must be non-negative, got {t!r}")
    return props.k2 * t / (props.mu * props.r_w**2 * props.total_storage)
