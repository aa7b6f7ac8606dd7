"""Linear elasticity: tensors, edge fields, self-energies and the relaxed density φ."""

from .tensors import ElasticityTensor, IsotropicTensor
from .profile import AngularProfile, minimize_angular_profile, psi
from .annulus import psi_annulus
from .phi import PhiResult, phi

__all__ = [
    "ElasticityTensor",
    "IsotropicTensor",
    "AngularProfile",
    "minimize_angular_profile",
    "psi",
    "psi_annulus",
    "PhiResult",
    "phi",
]
