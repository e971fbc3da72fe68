"""Melnikov / monodromy / manifold analysis of a quartic saddle-center family.

Decides, for the two-degree-of-freedom Hamiltonian family with two
saddle-centers joined by heteroclinic orbits, whether the stable and
unstable manifolds of nearby periodic orbits intersect transversely, are
tangent, or miss: by closed-form Melnikov/R-matrix analysis, by the
monodromy of the hypergeometric normal variational equation, and by direct
numerical manifold tracing on a Poincare section.
"""

from __future__ import annotations

from .errors import ConvergenceError, HetmelError, NumericsError, ParameterDomainError
from .model import (
    Branch,
    Center,
    ModelParams,
    PhaseState,
    SaddleCenterData,
    equilibrium_data,
    hamiltonian,
    heteroclinic_orbit,
    resonance_ratio_check,
    saddle_energy,
    same_sign_check,
    vector_field,
)
from .integrate import IntegratorConfig, Trajectory, find_event, integrate, integrate_with_nve

__all__ = [
    "ConvergenceError",
    "HetmelError",
    "NumericsError",
    "ParameterDomainError",
    "Branch",
    "Center",
    "ModelParams",
    "PhaseState",
    "SaddleCenterData",
    "equilibrium_data",
    "hamiltonian",
    "heteroclinic_orbit",
    "resonance_ratio_check",
    "saddle_energy",
    "same_sign_check",
    "vector_field",
    "IntegratorConfig",
    "Trajectory",
    "find_event",
    "integrate",
    "integrate_with_nve",
]

__version__ = "0.1.0"
