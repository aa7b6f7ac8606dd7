"""Numerical studies: energy scaling, ψ convergence and the thin-annulus demo."""

from .scaling import ScalingStudy, StudyRow, gamma_limit_value, run_scaling
from .convergence import psi_convergence_study
from .thin_annulus import thin_annulus_demo

__all__ = [
    "ScalingStudy",
    "StudyRow",
    "gamma_limit_value",
    "run_scaling",
    "psi_convergence_study",
    "thin_annulus_demo",
]
