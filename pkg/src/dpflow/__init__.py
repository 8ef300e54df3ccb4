"""Radial flow in double-porosity (Warren-Root) reservoirs.

Exact eigenfunction-series solutions for the fracture head and bottomhole
flux under the four combinations of prescribed head or flux at the well and
at the external radius, with Stehfest inversion of the Laplace-space
solutions as an independent check.
"""
from .params import BoundaryCase, CaseError, DimensionalProperties, DomainError, ReservoirParams, preset
from .laplace import StehfestConfig, head_hat, flux_hat, stehfest_invert
from .series import SeriesConfig, SeriesSolver, flux, head, head_raw
from .specfun import RootTable, find_roots

__version__ = "0.1.0"

__all__ = [
    "BoundaryCase",
    "CaseError",
    "DimensionalProperties",
    "DomainError",
    "ReservoirParams",
    "RootTable",
    "SeriesConfig",
    "SeriesSolver",
    "StehfestConfig",
    "find_roots",
    "flux",
    "flux_hat",
    "head",
    "head_hat",
    "head_raw",
    "preset",
    "stehfest_invert",
]
