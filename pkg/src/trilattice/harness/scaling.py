"""Energy scaling studies over an ε-ladder.

For every ε the recovery strain of a fixed dislocation layout is built and
relaxed at fixed slip; both energies are normalized by ε²|log ε| and set
against the limit value Σ φ(Rᵀξᵏ) + ∫_Ω ½𝐂Rᵀβ^cf:Rᵀβ^cf.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..continuum.phi import phi
from ..continuum.profile import DEFAULT_MODES, self_energy_matrix
from ..continuum.tensors import IsotropicTensor, as_tensor
from ..errors import ArgumentError, TrilatticeError
from ..model.energy import linearized_tensor, normalized_energy, total_energy
from ..model.lattice import LatticeSpec, build_domain, rotation, to_lattice_coords
from ..model.potentials import PotentialPair, QuadraticPotentials
from ..model.strain import Dislocation, DislocationMeasure
from ..recovery.constructor import FarField, LinearFarField, RecoveryInput, build_recovery
from ..recovery.minimizer import MinimizeProblem, minimize
from ..utils.geometry import triangulate

logger = logging.getLogger(__name__)

DEFAULT_LADDER = tuple(2.0**-k for k in range(5, 10))

STUDY_COLUMNS = [
    "epsilon",
    "n_nodes",
    "recovery_energy",
    "minimized_energy",
    "recovery_normalized",
    "minimized_normalized",
    "gamma_limit",
    "max_annulus_distance",
    "iterations",
    "converged",
]


@dataclass(frozen=True, eq=False)
class ScalingStudy:
    """A dislocation layout in a polygon, evaluated along an ε-ladder."""
    polygon: np.ndarray
    layout: tuple[Dislocation, ...]
    epsilons: tuple[float, ...] = DEFAULT_LADDER
    gamma: float = 0.5
    theta: float = 0.0
    far_field: FarField = field(default_factory=LinearFarField)
    potentials: PotentialPair = field(default_factory=QuadraticPotentials)
    grad_tol_factor: float = 1e-8
    max_iter: int = 10000
    minimize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "layout", tuple(self.layout))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if not self.epsilons:
            raise ArgumentError("the epsilon ladder is empty")
        if any(e <= 0.0 for e in self.epsilons):
            raise ArgumentError(f"epsilons must be positive, got {self.epsilons}")

    @property
    def tensor(self) -> IsotropicTensor:
        return linearized_tensor(self.potentials)

    def measure(self, epsilon: float) -> DislocationMeasure:
        return DislocationMeasure(self.layout, epsilon, self.gamma)


@dataclass
class StudyRow:
    epsilon: float
    n_nodes: int
    recovery_energy: float
    minimized_energy: float
    recovery_normalized: float
    minimized_normalized: float
    gamma_limit: float
    annulus_distances: list[float]
    iterations: int
    converged: bool

    def as_row(self) -> list:
        return [
            self.epsilon,
            self.n_nodes,
            self.recovery_energy,
            self.minimized_energy,
            self.recovery_normalized,
            self.minimized_normalized,
            self.gamma_limit,
            max(self.annulus_distances, default=0.0),
            self.iterations,
            self.converged,
        ]


def _frame_burgers(xi: np.ndarray, theta: float) -> tuple[int, int]:
    """Lattice coordinates of Rᵀξ.

    Raises:
        ArgumentError: Rᵀξ is not a lattice vector
    """
    coords = to_lattice_coords(rotation(theta).T @ xi)
    rounded = np.rint(coords)
    if np.max(np.abs(coords - rounded)) > 1e-9:
        raise ArgumentError(
            f"Burgers vector {xi} is not in the lattice rotated by {theta:g}"
        )
    return int(rounded[0]), int(rounded[1])


def far_field_energy(polygon, far_field: FarField, tensor, theta: float = 0.0) -> float:
    """∫_Ω ½𝐂Rᵀβ^cf:Rᵀβ^cf by the edge-midpoint rule on an ear-clipping triangulation.

    The rule is exact for gradients that are at most linear in x.
    """
    C = as_tensor(tensor)
    R = rotation(theta)
    tris = triangulate(np.asarray(polygon, dtype=float))
    mids = 0.5 * (tris + np.roll(tris, -1, axis=1))
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    areas = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    grads = far_field.gradient(mids.reshape(-1, 2)).reshape(len(tris), 3, 2, 2)
    density = 0.5 * C.quadratic_form(np.einsum("ji,tmjk->tmik", R, grads))
    return float(np.sum(areas * density.mean(axis=1)))


def gamma_limit_value(
    layout,
    polygon,
    far_field: FarField | None = None,
    tensor=None,
    theta: float = 0.0,
    N: int = DEFAULT_MODES,
) -> float:
    """Σ φ(Rᵀξᵏ) + ∫_Ω ½𝐂Rᵀβ^cf:Rᵀβ^cf for a dislocation layout."""
    tensor = linearized_tensor(QuadraticPotentials()) if tensor is None else tensor
    P = self_energy_matrix(tensor, N)
    cache: dict[tuple[int, int], float] = {}
    core = 0.0
    for d in layout:
        b = _frame_burgers(d.xi, theta)
        if b not in cache:
            cache[b] = phi(b, tensor, P=P).value
        core += cache[b]
    bulk = 0.0 if far_field is None else far_field_energy(polygon, far_field, tensor, theta)
    return core + bulk


def study_row(study: ScalingStudy, epsilon: float, reference: float | None = None) -> StudyRow:
    """Recovery, relaxation and normalized energies at one ε.

    Raises:
        TrilatticeError: any stage failure, annotated with ε
    """
    try:
        dom = build_domain(LatticeSpec(epsilon, study.polygon))
        inp = RecoveryInput(study.measure(epsilon), study.theta, study.far_field, study.tensor)
        rec = build_recovery(inp, dom)
        e_rec = total_energy(rec.beta, study.potentials)
        if study.minimize:
            problem = MinimizeProblem(
                dom,
                study.potentials,
                rec.slip.values,
                rec.u,
                theta=study.theta,
                grad_tol=study.grad_tol_factor * epsilon,
                max_iter=study.max_iter,
                measure=rec.measure,
            )
            result = minimize(problem)
            e_min, iterations, converged = result.energy, result.iterations, result.converged
            distances = result.admissibility.distances if result.admissibility else []
        else:
            e_min, iterations, converged = e_rec, 0, True
            distances = []
    except TrilatticeError as e:
        logger.error("Scaling row at epsilon=%g failed: %s", epsilon, e)
        raise

    if reference is None:
        reference = gamma_limit_value(study.layout, study.polygon, study.far_field, study.tensor, study.theta)
    row = StudyRow(
        epsilon=epsilon,
        n_nodes=dom.n_nodes,
        recovery_energy=e_rec,
        minimized_energy=e_min,
        recovery_normalized=normalized_energy(e_rec, epsilon),
        minimized_normalized=normalized_energy(e_min, epsilon),
        gamma_limit=reference,
        annulus_distances=[float(d) for d in distances],
        iterations=iterations,
        converged=converged,
    )
    logger.info(
        "eps=%g: %d nodes, normalized recovery %.6g, minimized %.6g, limit %.6g",
        epsilon, dom.n_nodes, row.recovery_normalized, row.minimized_normalized, reference,
    )
    return row


def _row_task(args: tuple[ScalingStudy, float, float]) -> StudyRow:
    return study_row(*args)


def run_scaling(study: ScalingStudy, workers: int = 1) -> list[StudyRow]:
    """One StudyRow per ε, in ladder order whatever the completion order."""
    reference = gamma_limit_value(study.layout, study.polygon, study.far_field, study.tensor, study.theta)
    tasks = [(study, eps, reference) for eps in study.epsilons]
    if workers <= 1 or len(tasks) == 1:
        return [_row_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_row_task, tasks))


def monotone_majority(values, decreasing: bool = True, fraction: float = 0.75) -> bool:
    """True when at least ``fraction`` of successive steps move in the given direction."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return True
    steps = np.diff(values)
    good = np.sum(steps <= 0.0) if decreasing else np.sum(steps >= 0.0)
    return bool(good >= math.ceil(fraction * len(steps)))
