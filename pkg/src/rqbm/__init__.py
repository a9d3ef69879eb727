"""rqbm: numerical workbench for a relativistic quantum fluid.

A second-order-in-time complex field with an internal oscillation at
frequency 2 (Compton units), its Madelung fluid picture, and three open
extensions (collisional, radiative, phase-diffusion friction) studied
through certified complex dispersion relations, exact mode propagators,
equation residuals, and conserved charges.
"""

__version__ = "0.1.0"

from .errors import (
    AmbiguousBranchError,
    DomainError,
    InputError,
    NumericalFailureError,
    UnsupportedError,
    UnsupportedRegimeError,
)
from .units import Model, ModelParams, UnitScales

__all__ = [
    "AmbiguousBranchError",
    "DomainError",
    "InputError",
    "Model",
    "ModelParams",
    "NumericalFailureError",
    "UnitScales",
    "UnsupportedError",
    "UnsupportedRegimeError",
    "__version__",
]
