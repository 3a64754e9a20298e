"""Simulation and verification tools for a two-species coarsening particle system.

Submodules
----------
measures : grid densities, bin measures, empirical measures, KS distances
kinetic  : renewal-series solution of the limiting kinetic equations
scheme   : deterministic delta-discretization of the kinetic equations
pdmp     : exact event-driven simulation of the n-particle process
initial  : initial density pairs
harness  : configurable convergence and concentration sweeps
validate : invariant checks (also behind ``twospecies validate``)
"""

__version__ = "0.1.0"

from . import initial, kinetic, measures, pdmp, scheme  # noqa: E402
from .errors import (  # noqa: E402
    ConfigurationError,
    DegenerateInputError,
    DegenerateKernelError,
    DomainError,
    HorizonError,
)
from .measures import (  # noqa: E402
    BinMeasure,
    EmpiricalMeasure,
    GridDensity,
    ks_distance,
    pair_distance,
)

__all__ = [
    "initial", "kinetic", "measures", "pdmp", "scheme",
    "ConfigurationError", "DegenerateInputError", "DegenerateKernelError", "DomainError", "HorizonError",
    "BinMeasure", "EmpiricalMeasure", "GridDensity", "ks_distance", "pair_distance",
]
