"""Group-quantization pricing: quantization groups, invariant geometry,
closed-form kernels, transforms and Monte Carlo oracles."""

from .errors import DivergenceError, DomainError, TruncationError, TruncationWarning, VarianceBlowUp
from .group_core import GroupElement, ModelKind, ModelParams, SL2Matrix, compose, inverse
from .kernels import KernelEval, KernelKind
from .mc_oracle import McResult, PathSpec
from .models import CallSpec
from .transforms import QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "CallSpec",
    "DivergenceError",
    "DomainError",
    "GroupElement",
    "KernelEval",
    "KernelKind",
    "McResult",
    "ModelKind",
    "ModelParams",
    "PathSpec",
    "QuadratureSpec",
    "SL2Matrix",
    "TruncationError",
    "TruncationWarning",
    "VarianceBlowUp",
    "compose",
    "inverse",
]
