"""Standalone SVG plots of study tables.

Output is reproducible: the Agg backend, a fixed SVG hash salt and no
date metadata make repeated runs byte-identical.
"""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .convergence import PsiStudy  # noqa: E402
from .scaling import StudyRow  # noqa: E402

logger = logging.getLogger(__name__)

_SVG_SALT = "trilattice"


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT, "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path


def plot_scaling(rows: list[StudyRow], path: str | Path) -> Path:
    """Log-log plot of normalized energies against ε with the limit value."""
    eps = [r.epsilon for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(eps, [r.recovery_normalized for r in rows], "o-", label="recovery")
    ax.loglog(eps, [r.minimized_normalized for r in rows], "s-", label="minimized")
    if rows:
        ax.axhline(rows[0].gamma_limit, color="k", linestyle="--", label="limit value")
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel(r"$E_\varepsilon / (\varepsilon^2 |\log \varepsilon|)$")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def plot_psi_study(study: PsiStudy, path: str | Path) -> Path:
    """Residual of ψ_{1,r} against r, log-log."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog([r.ratio for r in study.rows], [r.residual for r in study.rows], "o-")
    ax.set_xlabel(r"$r_2 / r_1$")
    ax.set_ylabel(r"$|\psi_{1,r} - \psi|$")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)
