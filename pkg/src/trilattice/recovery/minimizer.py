"""Energy minimization at fixed slip over node displacements.

Every strain β = R(x_j - x_i) + ε(u_j - u_i - σ) has the Burgers measure
fixed by σ, so minimizing over u (and optionally the frame angle) stays in
the admissible class. One node is pinned to remove translations.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize

from ..errors import ArgumentError, NumericalError
from ..model.energy import SQRT3, energy_from_values
from ..model.lattice import LatticeDomain, rotation
from ..model.potentials import PotentialPair
from ..model.strain import (
    AdmissibilityReport,
    DiscreteStrain,
    DislocationMeasure,
    burgers_measure,
    check_admissible,
    gradient_strain,
)

logger = logging.getLogger(__name__)

# |β| below this multiple of ε uses the one-sided derivative 0 of ψ₁
ZERO_BOND = 1e-14


@dataclass(eq=False)
class MinimizeProblem:
    """Fixed-slip energy minimization.

    ``grad_tol`` defaults to 1e-8·ε and applies to the ∞-norm of the
    gradient over the free variables.
    """
    domain: LatticeDomain
    potentials: PotentialPair
    slip: np.ndarray
    u0: np.ndarray
    theta: float = 0.0
    grad_tol: float | None = None
    max_iter: int = 10000
    fixed_frame: bool = True
    pinned: int = 0
    measure: DislocationMeasure | None = None
    delta: float | None = None

    def __post_init__(self):
        n, b = self.domain.n_nodes, self.domain.n_bonds
        self.slip = np.asarray(getattr(self.slip, "values", self.slip), dtype=float)
        self.u0 = np.asarray(self.u0, dtype=float)
        if self.slip.shape != (b, 2):
            raise ArgumentError(f"slip needs shape ({b}, 2), got {self.slip.shape}")
        if self.u0.shape != (n, 2):
            raise ArgumentError(f"initial displacement needs shape ({n}, 2), got {self.u0.shape}")
        if not np.all(np.isfinite(self.u0)):
            raise ArgumentError("initial displacement must be finite")
        if not 0 <= self.pinned < n:
            raise ArgumentError(f"pinned node {self.pinned} is not a node index")
        if self.grad_tol is None:
            self.grad_tol = 1e-8 * self.domain.epsilon

    @property
    def R(self) -> np.ndarray:
        return rotation(self.theta)

    def strain(self, u, theta: float | None = None) -> DiscreteStrain:
        R = self.R if theta is None else rotation(theta)
        return gradient_strain(self.domain, u, R, self.slip)


@dataclass
class MinimizeResult:
    u_star: np.ndarray
    energy: float
    grad_norm: float
    iterations: int
    converged: bool
    theta: float
    message: str
    history: list[tuple[int, float, float]] = field(default_factory=list)
    admissibility: AdmissibilityReport | None = None
    beta: DiscreteStrain | None = None


def strain_gradient(dom: LatticeDomain, values: np.ndarray, pot: PotentialPair) -> np.ndarray:
    """∂Eε/∂β per canonical bond, shape (B, 2)."""
    eps = dom.epsilon
    norms = np.linalg.norm(values, axis=1)
    safe = np.where(norms < ZERO_BOND * eps, 1.0, norms)
    coeff = np.where(norms < ZERO_BOND * eps, 0.0, eps * pot.dpsi1(norms / eps) / safe)
    grad = coeff[:, None] * values

    kappa = 2.0 / (SQRT3 * eps * eps)
    sa = dom.wedge_signs[:, 0].astype(float)
    sb = dom.wedge_signs[:, 1].astype(float)
    a = sa[:, None] * values[dom.wedge_bonds[:, 0]]
    b = sb[:, None] * values[dom.wedge_bonds[:, 1]]
    det = kappa * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    w = eps * eps * kappa * pot.dpsi2(det)
    da = w[:, None] * np.column_stack([b[:, 1], -b[:, 0]])
    db = w[:, None] * np.column_stack([-a[:, 1], a[:, 0]])

    n_bonds = dom.n_bonds
    for c in range(2):
        grad[:, c] += np.bincount(dom.wedge_bonds[:, 0], weights=sa * da[:, c], minlength=n_bonds)
        grad[:, c] += np.bincount(dom.wedge_bonds[:, 1], weights=sb * db[:, c], minlength=n_bonds)
    return grad


def _node_gradient(dom: LatticeDomain, bond_grad: np.ndarray) -> np.ndarray:
    eps = dom.epsilon
    i, j = dom.bonds[:, 0], dom.bonds[:, 1]
    out = np.zeros((dom.n_nodes, 2))
    for c in range(2):
        out[:, c] = eps * (
            np.bincount(j, weights=bond_grad[:, c], minlength=dom.n_nodes)
            - np.bincount(i, weights=bond_grad[:, c], minlength=dom.n_nodes)
        )
    return out


def energy_and_gradient(problem: MinimizeProblem, u, theta: float | None = None) -> tuple[float, np.ndarray]:
    """Eε(β(u)) and its gradient with respect to every node displacement.

    The energy is computed by the same summation as total_energy.
    """
    dom = problem.domain
    values = problem.strain(u, theta).values
    energy = energy_from_values(dom, values, problem.potentials)
    grad = _node_gradient(dom, strain_gradient(dom, values, problem.potentials))
    return energy, grad


def _frame_derivative(problem: MinimizeProblem, values: np.ndarray, theta: float) -> float:
    """∂Eε/∂θ through β = R(θ)(x_j - x_i) + ...."""
    dom = problem.domain
    c, s = math.cos(theta), math.sin(theta)
    dR = np.array([[-s, -c], [c, -s]])
    bond_grad = strain_gradient(dom, values, problem.potentials)
    return float(np.sum(bond_grad * (dom.bond_vectors @ dR.T)))


class _Objective:
    """Packs free displacements (and the frame angle) into one vector."""

    def __init__(self, problem: MinimizeProblem):
        self.problem = problem
        n = problem.domain.n_nodes
        self.free = np.setdiff1d(np.arange(n), [problem.pinned])
        self.u = problem.u0.copy()
        self.cache: tuple[bytes, float, np.ndarray] | None = None

    def pack(self, u, theta: float) -> np.ndarray:
        x = u[self.free].ravel()
        if not self.problem.fixed_frame:
            x = np.append(x, theta)
        return x

    def unpack(self, x) -> tuple[np.ndarray, float]:
        u = self.u.copy()
        if self.problem.fixed_frame:
            u[self.free] = x.reshape(-1, 2)
            return u, self.problem.theta
        u[self.free] = x[:-1].reshape(-1, 2)
        return u, float(x[-1])

    def __call__(self, x) -> tuple[float, np.ndarray]:
        key = x.tobytes()
        if self.cache is not None and self.cache[0] == key:
            return self.cache[1], self.cache[2]
        u, theta = self.unpack(x)
        energy, grad_u = energy_and_gradient(self.problem, u, theta)
        grad = grad_u[self.free].ravel()
        if not self.problem.fixed_frame:
            values = self.problem.strain(u, theta).values
            grad = np.append(grad, _frame_derivative(self.problem, values, theta))
        self.cache = (key, energy, grad)
        return energy, grad


def _atoms_signature(beta: DiscreteStrain) -> list[tuple[int, tuple[int, int] | None]]:
    return [(a.triangle, a.burgers) for a in burgers_measure(beta)]


def minimize(problem: MinimizeProblem) -> MinimizeResult:
    """L-BFGS-B minimization of Eε at fixed slip.

    Never raises on non-convergence: the result carries ``converged=False``.
    """
    objective = _Objective(problem)
    x0 = objective.pack(problem.u0, problem.theta)
    history: list[tuple[int, float, float]] = []
    check_burgers = logger.isEnabledFor(logging.DEBUG)
    initial_atoms = _atoms_signature(problem.strain(problem.u0)) if check_burgers else None

    e0, g0 = objective(x0)
    history.append((0, e0, float(np.max(np.abs(g0), initial=0.0))))

    def callback(xk):
        energy, grad = objective(xk)
        it = len(history)
        history.append((it, energy, float(np.max(np.abs(grad), initial=0.0))))
        if check_burgers:
            u, theta = objective.unpack(xk)
            atoms = _atoms_signature(problem.strain(u, theta))
            if atoms != initial_atoms:
                raise NumericalError(f"Burgers measure changed at iteration {it}")
            logger.debug("iter %d: energy %.17g, |grad| %.3e, Burgers conserved", it, energy, history[-1][2])

    res = scipy.optimize.minimize(
        objective,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={
            "maxcor": 10,
            "gtol": problem.grad_tol,
            "ftol": np.finfo(float).eps,
            "maxiter": problem.max_iter,
            "maxfun": 20 * problem.max_iter,
        },
    )

    energy, grad = objective(res.x)
    grad_norm = float(np.max(np.abs(grad), initial=0.0))
    u_star, theta = objective.unpack(res.x)
    converged = grad_norm <= problem.grad_tol
    message = res.message if isinstance(res.message, str) else res.message.decode()
    if converged:
        logger.info("Minimizer converged in %d iterations: energy %.12g", res.nit, energy)
    else:
        logger.warning(
            "Minimizer stopped after %d iterations without reaching grad_tol %.3e (|grad| %.3e): %s",
            res.nit, problem.grad_tol, grad_norm, message,
        )

    beta = problem.strain(u_star, theta)
    report = None
    if problem.measure is not None:
        report = check_admissible(beta, problem.measure, problem.delta)
    return MinimizeResult(
        u_star=u_star,
        energy=energy,
        grad_norm=grad_norm,
        iterations=int(res.nit),
        converged=converged,
        theta=theta,
        message=message,
        history=history,
        admissibility=report,
        beta=beta,
    )


def mode(problem: MinimizeProblem, fixed_frame: bool = True) -> MinimizeProblem:
    """Variant of a problem with the global frame fixed or optimized."""
    return replace(problem, fixed_frame=fixed_frame)
