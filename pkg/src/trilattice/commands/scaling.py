"""Scaling study over the configured ε-ladder."""

from ..config import RunConfig
from ..harness.plotting import plot_scaling
from ..harness.scaling import STUDY_COLUMNS, ScalingStudy, run_scaling
from ..utils.csvio import emit_csv
from ..utils.paths import Timer
from .base import EXIT_NOT_CONVERGED, CommandResult, finish


def study_from_config(config: RunConfig) -> ScalingStudy:
    return ScalingStudy(
        polygon=config.polygon(),
        layout=config.layout(),
        epsilons=tuple(config.scaling.epsilons),
        gamma=config.lattice.gamma,
        theta=config.rotation,
        far_field=config.far_field_model(),
        potentials=config.potential_pair(),
        grad_tol_factor=config.solver.grad_tol_factor,
        max_iter=config.solver.max_iter,
        minimize=config.scaling.minimize,
    )


def run_scaling_study(config: RunConfig, workers: int = 1) -> CommandResult:
    timer = Timer()
    study = study_from_config(config)
    timer.start("scaling")
    rows = run_scaling(study, workers)
    timer.stop("scaling")

    out = config.output_path("scaling.csv")
    emit_csv((r.as_row() for r in rows), out, STUDY_COLUMNS)
    outputs = [out]
    if config.output.svg:
        outputs.append(plot_scaling(rows, config.resolve(config.output.svg)))

    lines = [f"Scaling study over {len(rows)} epsilons (limit value {rows[0].gamma_limit:.6g})"]
    for r in rows:
        flag = "" if r.converged else "  (not converged)"
        lines.append(
            f"  eps={r.epsilon:<10.6g} recovery {r.recovery_normalized:.6g}  minimized {r.minimized_normalized:.6g}{flag}"
        )
    converged = all(r.converged for r in rows)
    written = finish(config, "scaling", outputs, timer, {"workers": workers})
    return CommandResult("\n".join(lines), written, 0 if converged else EXIT_NOT_CONVERGED)
