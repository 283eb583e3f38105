"""Spectral Galerkin simulator for the 2D thermomicropolar Benard problem."""

__version__ = "0.1.0"

from .dynamics import Bases, PhysParams, State, StepperConfig, simulate, step  # noqa: E402
from .ledger import COLUMNS, EnergyLedger  # noqa: E402
from .spectral_core import DomainSpec, Resolution  # noqa: E402

__all__ = [
    "Bases",
    "COLUMNS",
    "DomainSpec",
    "EnergyLedger",
    "PhysParams",
    "Resolution",
    "State",
    "StepperConfig",
    "simulate",
    "step",
]
