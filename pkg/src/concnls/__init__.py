"""Numerical laboratory for standing waves of the 3D point-nonlinearity NLS."""

from .model import (
    Charge2,
    DomainError,
    ModelParams,
    NonIntegrableError,
    NumericalError,
    RadialExpSum,
    alphas,
    delta_mass,
    energy,
    l2_bilinear,
    l2_inner,
    l2_norm2,
    omega_form,
    q_omega,
    soliton,
    soliton_domega,
    symplectic_form,
    xi,
)

__version__ = "0.1.0"

__all__ = [
    "Charge2",
    "DomainError",
    "ModelParams",
    "NonIntegrableError",
    "NumericalError",
    "RadialExpSum",
    "alphas",
    "delta_mass",
    "energy",
    "l2_bilinear",
    "l2_inner",
    "l2_norm2",
    "omega_form",
    "q_omega",
    "soliton",
    "soliton_domega",
    "symplectic_form",
    "xi",
    "__version__",
]
