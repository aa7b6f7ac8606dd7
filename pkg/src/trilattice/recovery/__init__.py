"""Recovery strains and fixed-slip energy minimization."""

from .constructor import RecoveryInput, SlipField, build_recovery, build_slip, cutoff, snap_positions
from .minimizer import MinimizeProblem, MinimizeResult, energy_and_gradient, minimize, mode

__all__ = [
    "RecoveryInput",
    "SlipField",
    "build_recovery",
    "build_slip",
    "cutoff",
    "snap_positions",
    "MinimizeProblem",
    "MinimizeResult",
    "energy_and_gradient",
    "minimize",
    "mode",
]
