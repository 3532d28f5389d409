"""Csiszar-Korner security analysis of tomographic QKD with a quantum-dot entangled-photon source."""

from tomoqkd.errors import (
    ConstructionError,
    InvalidGramError,
    InvariantError,
    NoCrossingError,
    ValidationError,
)
from tomoqkd.source import Basis, SourceParams, StateCoefficients, coefficients
from tomoqkd.adversary import ensemble
from tomoqkd.infotheory import BasisReport, YieldReport
from tomoqkd.scenarios import analyze, find_threshold, sweep, SweepSpec, ThresholdQuery

__all__ = [
    "Basis",
    "BasisReport",
    "ConstructionError",
    "InvalidGramError",
    "InvariantError",
    "NoCrossingError",
    "SourceParams",
    "StateCoefficients",
    "SweepSpec",
    "ThresholdQuery",
    "ValidationError",
    "YieldReport",
    "analyze",
    "coefficients",
    "ensemble",
    "find_threshold",
    "sweep",
]

__version__ = "0.1.0"
