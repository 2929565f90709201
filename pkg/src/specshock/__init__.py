"""Filtered Fourier pseudospectral solver for 1D/2D hyperbolic conservation laws."""

from .filtering import SensorConfig
from .integrate import SimulationConfig, SimulationResult, run_simulation
from .kernels import LAGRANGE, RSK, FilterSpec
from .physics import EulerState, ProblemSpec, StateError, init_problem, problem
from .reference import ErrorReport, error_norms
from .spectral import Grid, SpectralField

__version__ = "0.1.0"

__all__ = [
    "ErrorReport",
    "EulerState",
    "FilterSpec",
    "Grid",
    "LAGRANGE",
    "ProblemSpec",
    "RSK",
    "SensorConfig",
    "SimulationConfig",
    "SimulationResult",
    "SpectralField",
    "StateError",
    "error_norms",
    "init_problem",
    "problem",
    "run_simulation",
    "__version__",
]
