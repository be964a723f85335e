"""Long-time asymptotics and simulation of the defocusing NLS equation with step initial data."""

from .errors import (
    AccuracyError,
    ConfigError,
    ConsistencyError,
    DegenerateStep,
    DomainError,
    NlsStepError,
    RegionError,
    ZeroReflection,
)
from .hydro import RegionKind, RiemannInvariants, StepData, classify, invariants, region_layout
from .asym import AsymModel, AsymSample

PRESETS = {
    "a": StepData(0.5, -0.5, 0.5, 1.5),
    "b": StepData(0.5, 0.5, 0.5, -1.5),
    "c": StepData(1.0, 0.0, 1.0, 1.0),
    "d": StepData(1.0, 0.0, 1.0, -1.0),
    "e": StepData(0.5, -0.5, 2.0, 0.0),
    "f": StepData(1.5, -0.5, 0.5, -0.5),
}

__all__ = [
    "AccuracyError", "AsymModel", "AsymSample", "ConfigError", "ConsistencyError", "DegenerateStep",
    "DomainError", "NlsStepError", "PRESETS", "RegionError", "RegionKind", "RiemannInvariants",
    "StepData", "ZeroReflection", "classify", "invariants", "region_layout",
]
