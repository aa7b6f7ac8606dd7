"""Self-energy ψ(ζ) by three independent routes."""

import logging

import numpy as np

from ..config import RunConfig
from ..continuum.annulus import psi_annulus
from ..continuum.edge import strain_self_energy
from ..continuum.profile import psi
from ..model.lattice import lattice_vector
from ..utils.csvio import emit_csv
from ..utils.paths import Timer
from .base import CommandResult, finish

logger = logging.getLogger(__name__)

QUANTITY_COLUMNS = ["quantity", "value", "certificate"]


def run_selfenergy(config: RunConfig, workers: int = 1) -> CommandResult:
    """ψ from the angular profile, the closed form and the classical strain field.

    With ``selfenergy.annulus`` set, also the finite-annulus value ψ_{r₁,r₂}.
    One CSV row per quantity; the certificate column names the Burgers
    vector, or the radii for the annulus value.
    """
    section = config.selfenergy
    tensor = config.tensor()
    zeta = lattice_vector(section.burgers)
    b1, b2 = section.burgers
    burgers = f"1*({b1},{b2})"
    timer = Timer()

    timer.start("selfenergy")
    value = psi(zeta, tensor, section.modes)
    closed = tensor.self_energy_coefficient * float(zeta @ zeta)
    classical = strain_self_energy(zeta, tensor)
    rows = [
        ["psi_profile", value, burgers],
        ["psi_closed_form", closed, burgers],
        ["psi_classical", classical, burgers],
        ["psi_quarter_normalization", 0.5 * closed, burgers],
    ]
    if section.annulus is not None:
        r1, r2 = section.annulus
        annulus = psi_annulus(zeta, tensor, r1, r2)
        rows.append(["psi_annulus", annulus, f"r1={r1:g} r2={r2:g}"])
    timer.stop("selfenergy")

    out = config.output_path("selfenergy.csv")
    emit_csv(rows, out, QUANTITY_COLUMNS)
    lines = [
        f"Self-energy of b = {section.burgers} (lambda={tensor.lam:.6g}, mu={tensor.mu:.6g})",
        f"  profile minimization: {value:.12g}",
        f"  closed form:          {closed:.12g}",
        f"  classical field:      {classical:.12g}",
        f"  with 1/(4pi) in place of 1/(2pi): {0.5 * closed:.12g} (half of the closed form)",
    ]
    if section.annulus is not None:
        lines.append(f"  annulus ({r1:g}, {r2:g}):  {annulus:.12g}")
    rel = abs(value - closed) / closed if closed else 0.0
    lines.append(f"  relative profile/closed-form gap: {rel:.3e}")
    if not np.isfinite(value):
        logger.warning("Profile self-energy is not finite")
    outputs = finish(config, "selfenergy", [out], timer)
    return CommandResult("\n".join(lines), outputs)
