"""Invariant metrics and curvatures on plane annuli.

Evaluates the boundary reproducing kernel of an annulus, the two
classical invariant metrics built from it, their Gaussian and
higher-order curvatures, and geodesics of those metrics.  A small
Weierstrass-function layer provides closed forms used to cross-check
the series route.
"""

__version__ = "0.1.0"

from .errors import (
    AnnulusMetricsError,
    ConvergenceError,
    DomainError,
    InternalConsistencyError,
    PoleError,
    RangeError,
    ShapeError,
    SingularJetError,
)

__all__ = [
    "AnnulusMetricsError",
    "ConvergenceError",
    "DomainError",
    "InternalConsistencyError",
    "PoleError",
    "RangeError",
    "ShapeError",
    "SingularJetError",
    "__version__",
]
