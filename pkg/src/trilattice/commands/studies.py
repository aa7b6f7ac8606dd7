"""Continuum studies: ψ_{1,r} convergence and the thin-annulus demo."""

from ..config import RunConfig
from ..harness.convergence import PSI_STUDY_COLUMNS, psi_convergence_study
from ..harness.plotting import plot_psi_study
from ..harness.thin_annulus import THIN_ANNULUS_COLUMNS, thin_annulus_demo
from ..model.lattice import lattice_vector
from ..utils.csvio import emit_csv
from ..utils.paths import Timer
from .base import CommandResult, finish


def run_psi_study(config: RunConfig, workers: int = 1) -> CommandResult:
    section = config.psi_study
    timer = Timer()
    timer.start("psi-study")
    study = psi_convergence_study(
        lattice_vector(section.burgers),
        config.tensor(),
        section.ratios,
        section.points_per_decade,
        section.modes,
    )
    timer.stop("psi-study")

    out = config.output_path("psi_study.csv")
    emit_csv((r.as_row() for r in study.rows), out, PSI_STUDY_COLUMNS)
    outputs = [out]
    if config.output.svg:
        outputs.append(plot_psi_study(study, config.resolve(config.output.svg)))

    lines = [f"psi{section.burgers} = {study.reference:.12g}"]
    lines += [f"  r={r.ratio:<10g} psi_1,r {r.value:.12g}  residual {r.residual:.3e}" for r in study.rows]
    lines.append(f"  residuals decrease: {study.residuals_decrease}; spread of residual*log r: {study.rate_spread:.3f}")
    return CommandResult("\n".join(lines), finish(config, "psi-study", outputs, timer))


def run_thin_annulus(config: RunConfig, workers: int = 1) -> CommandResult:
    section = config.thin_annulus
    timer = Timer()
    timer.start("thin-annulus")
    result = thin_annulus_demo(section.M, section.epsilons, config.lattice.gamma)
    timer.stop("thin-annulus")

    out = config.output_path("thin_annulus.csv")
    emit_csv((r.as_row() for r in result.rows), out, THIN_ANNULUS_COLUMNS)
    lines = [f"Thin-annulus demo, M={section.M:g}: energy ~ eps^{result.exponent:.4f}"]
    for r in result.rows:
        lines.append(
            f"  eps={r.epsilon:<10.6g} |avg(A_eps,M eps) - Id| {r.inner_average_error:.2e}"
            f"  |avg(A_eps,eps^gamma) - Id| {r.outer_average_error:.3f}"
            f"  rel. L2 distance to R(1) {r.relative_l2_distance:.4f}"
        )
    return CommandResult("\n".join(lines), finish(config, "demo-thin-annulus", [out], timer, {"exponent": result.exponent}))
