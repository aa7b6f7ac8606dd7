"""CLI subcommands, one module per command.

Each command takes a validated RunConfig and returns a CommandResult whose
text is the human summary printed by the CLI.
"""

from .base import CommandResult
from .minimize import run_minimize
from .phi import run_phi
from .recover import run_recover
from .scaling import run_scaling_study
from .selfenergy import run_selfenergy
from .studies import run_psi_study, run_thin_annulus

COMMANDS = {
    "selfenergy": run_selfenergy,
    "phi": run_phi,
    "recover": run_recover,
    "minimize": run_minimize,
    "scaling": run_scaling_study,
    "demo-thin-annulus": run_thin_annulus,
    "psi-study": run_psi_study,
}

__all__ = [
    "COMMANDS",
    "CommandResult",
    "run_selfenergy",
    "run_phi",
    "run_recover",
    "run_minimize",
    "run_scaling_study",
    "run_thin_annulus",
    "run_psi_study",
]
