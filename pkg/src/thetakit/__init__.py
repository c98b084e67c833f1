"""Numerical toolkit for theta functions, Riemann-surface kernels, hyperelliptic
periods, isomonodromic tau-functions, and explicit Einstein metrics."""

from .config import RunConfig
from .theta import (PeriodMatrix, ThetaCharacteristics, ThetaValue,
                    JacobiConstants, theta_eval, theta_deriv, jacobi_constants)

__all__ = [
    "RunConfig",
    "PeriodMatrix", "ThetaCharacteristics", "ThetaValue", "JacobiConstants",
    "theta_eval", "theta_deriv", "jacobi_constants",
]

__version__ = "0.1.0"
