"""Fixed-slip minimization started from the recovery strain."""

from ..config import RunConfig
from ..model.energy import normalized_energy, total_energy
from ..recovery.minimizer import MinimizeProblem, minimize
from ..utils.csvio import emit_csv
from ..utils.paths import Timer
from .base import EXIT_NOT_CONVERGED, CommandResult, finish, write_summary
from .recover import recovery_for

HISTORY_COLUMNS = ["iter", "energy", "grad_norm"]
STATE_COLUMNS = ["p", "q", "ux", "uy"]


def run_minimize(config: RunConfig, workers: int = 1) -> CommandResult:
    """Iteration history CSV, final displacement CSV and summary; exit 3 when not converged."""
    timer = Timer()
    rec = recovery_for(config, timer)
    dom = rec.beta.domain
    pot = config.potential_pair()
    eps = config.lattice.epsilon
    e_rec = total_energy(rec.beta, pot)

    problem = MinimizeProblem(
        dom,
        pot,
        rec.slip.values,
        rec.u,
        theta=config.rotation,
        grad_tol=config.solver.grad_tol_factor * eps,
        max_iter=config.solver.max_iter,
        fixed_frame=config.solver.fixed_frame,
        measure=rec.measure,
        delta=config.solver.delta,
    )
    timer.start("minimize")
    result = minimize(problem)
    timer.stop("minimize")

    out = config.output_path("minimize_history.csv")
    emit_csv(result.history, out, HISTORY_COLUMNS)
    state_out = config.resolve(config.output.state) if config.output.state else out.with_name(out.stem + ".state.csv")
    emit_csv(
        ([int(c[0]), int(c[1]), float(v[0]), float(v[1])] for c, v in zip(dom.coords, result.u_star)),
        state_out,
        STATE_COLUMNS,
    )
    summary = {
        "epsilon": eps,
        "recovery_energy": e_rec,
        "energy": result.energy,
        "normalized_energy": normalized_energy(result.energy, eps),
        "grad_norm": result.grad_norm,
        "iterations": result.iterations,
        "converged": result.converged,
        "theta": result.theta,
        "message": result.message,
        "admissibility": result.admissibility.summary() if result.admissibility else None,
    }
    summary_out = write_summary(out, summary)

    status = "converged" if result.converged else "NOT converged"
    text = "\n".join([
        f"Minimization at eps={eps:g} {status} after {result.iterations} iterations",
        f"  energy {result.energy:.12g} (recovery {e_rec:.12g})",
        f"  |grad|_inf {result.grad_norm:.3e} (tolerance {problem.grad_tol:.3e})",
        f"  frame angle {result.theta:.12g}",
    ])
    outputs = finish(config, "minimize", [out, state_out], timer) + [summary_out]
    return CommandResult(text, outputs, 0 if result.converged else EXIT_NOT_CONVERGED)
