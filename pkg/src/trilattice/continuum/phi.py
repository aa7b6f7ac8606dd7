"""Relaxed self-energy φ(b): cheapest splitting of a Burgers vector into lattice vectors.

    φ(b) = min { Σ |z_i| ψ(b_i) : Σ z_i b_i = b, b_i ∈ 𝕋 }

Solved by depth-first branch and bound over multisets of candidate lattice
vectors of norm at most Z. ψ is quadratic (ψ(v) = vᵀPv), which gives the
pruning bound: n vectors summing to r cost at least max(n·L, ψ(r)/n).
"""

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError, BoundTooSmallError
from ..model.lattice import lattice_vector
from .profile import DEFAULT_MODES, self_energy_matrix

logger = logging.getLogger(__name__)

_REL_TOL = 1e-12


@dataclass
class PhiResult:
    """Optimal value and a certificate [((b₁, b₂), z), ...] with Σ z·b = b."""
    burgers: tuple[int, int]
    value: float
    certificate: list[tuple[tuple[int, int], int]] = field(default_factory=list)
    search_bound: float = 0.0
    nodes_visited: int = 0

    def certificate_text(self) -> str:
        return " ".join(f"{z}*({c[0]},{c[1]})" for c, z in self.certificate)


def lattice_shell(bound: float) -> np.ndarray:
    """Nonzero lattice coordinates v with |v| ≤ bound, shape (n, 2)."""
    m = int(math.ceil(2.0 * bound / math.sqrt(3.0))) + 1
    coords = np.array(list(itertools.product(range(-m, m + 1), repeat=2)), dtype=np.int64)
    norms = np.linalg.norm(lattice_vector(coords), axis=1)
    keep = (norms > 0.0) & (norms <= bound * (1.0 + _REL_TOL))
    return coords[keep]


def next_shell_norm(bound: float) -> float:
    """Smallest lattice vector norm strictly above ``bound``."""
    m = int(math.ceil(2.0 * (bound + 1.0) / math.sqrt(3.0))) + 2
    coords = np.array(list(itertools.product(range(-m, m + 1), repeat=2)))
    norms = np.linalg.norm(lattice_vector(coords), axis=1)
    return float(np.min(norms[norms > bound * (1.0 + _REL_TOL)]))


class _Search:
    """Depth-first multiset enumeration with a monotone incumbent."""

    def __init__(self, candidates: np.ndarray, costs: np.ndarray, P: np.ndarray, Z: float):
        self.candidates = candidates
        self.vectors = lattice_vector(candidates)
        self.costs = costs
        self.P = P
        self.Z = Z
        self.L = float(costs.min())
        self.best = math.inf
        self.best_counts: dict[int, int] = {}
        self.visited = 0

    def lower_bound(self, r: np.ndarray, depth: int) -> float:
        norm = float(np.linalg.norm(r))
        if norm == 0.0:
            return 0.0
        q = float(r @ self.P @ r)
        n_min = max(1, math.ceil(norm / self.Z * (1.0 - _REL_TOL)))
        if n_min > depth:
            return math.inf
        return min(max(n * self.L, q / n) for n in range(n_min, depth + 1))

    def run(self, target: np.ndarray, incumbent: float, counts: dict[int, int]) -> None:
        self.best = incumbent
        self.best_counts = dict(counts)
        self._descend(0, np.asarray(target, dtype=float), 0.0, {})

    def _descend(self, start: int, residual: np.ndarray, cost: float, counts: dict[int, int]) -> None:
        self.visited += 1
        if float(np.linalg.norm(residual)) < 1e-9:
            if cost < self.best * (1.0 - _REL_TOL):
                self.best = cost
                self.best_counts = dict(counts)
            return
        depth = int(math.floor((self.best - cost) / self.L * (1.0 + _REL_TOL)))
        if depth <= 0:
            return
        if cost + self.lower_bound(residual, depth) >= self.best * (1.0 - _REL_TOL):
            return
        for k in range(start, len(self.candidates)):
            step = self.costs[k]
            if cost + step >= self.best * (1.0 - _REL_TOL):
                # Costs are sorted, so no later candidate fits either
                break
            counts[k] = counts.get(k, 0) + 1
            self._descend(k, residual - self.vectors[k], cost + step, counts)
            counts[k] -= 1
            if not counts[k]:
                del counts[k]


def phi(
    b,
    tensor,
    search_bound: float | None = None,
    N: int = DEFAULT_MODES,
    P: np.ndarray | None = None,
) -> PhiResult:
    """Branch-and-bound minimum of Σ|z_i|ψ(b_i) over integer decompositions of b.

    Args:
        b: Burgers vector in lattice coordinates (b₁, b₂)
        tensor: elasticity tensor defining ψ
        search_bound: candidate norm bound Z, default max(|b|, 1)
        N: profile degree used for ψ
        P: precomputed self-energy matrix (skips the profile solves)

    Raises:
        ArgumentError: b is not an integer pair or Z < |b|
        BoundTooSmallError: a vector longer than Z could still beat the optimum
    """
    b_arr = np.asarray(b)
    if b_arr.shape != (2,) or not np.all(np.equal(np.mod(b_arr, 1), 0)):
        raise ArgumentError(f"Burgers vector must be an integer lattice pair, got {b}")
    coords = (int(b_arr[0]), int(b_arr[1]))
    if coords == (0, 0):
        return PhiResult(coords, 0.0, [], 0.0, 0)

    if P is None:
        P = self_energy_matrix(tensor, N)
    target = lattice_vector(coords)
    norm_b = float(np.linalg.norm(target))
    Z = max(norm_b, 1.0) if search_bound is None else float(search_bound)
    if Z < norm_b * (1.0 - _REL_TOL):
        raise ArgumentError(f"search bound {Z:g} is smaller than |b| = {norm_b:g}")

    candidates = lattice_shell(Z)
    vecs = lattice_vector(candidates)
    costs = np.einsum("ni,ij,nj->n", vecs, P, vecs)
    order = np.lexsort((candidates[:, 1], candidates[:, 0], costs))
    candidates, costs = candidates[order], costs[order]

    search = _Search(candidates, costs, P, Z)
    own = int(np.flatnonzero((candidates[:, 0] == coords[0]) & (candidates[:, 1] == coords[1]))[0])
    search.run(target, float(costs[own]), {own: 1})

    lam_min = float(np.linalg.eigvalsh(P)[0])
    z_next = next_shell_norm(Z)
    if search.best >= lam_min * z_next**2:
        raise BoundTooSmallError(
            f"phi({coords}): optimum {search.best:.6g} is not below the cost bound "
            f"{lam_min * z_next**2:.6g} of vectors outside |v| <= {Z:g}; increase the search bound"
        )

    certificate = sorted(
        ((tuple(int(c) for c in candidates[k]), z) for k, z in search.best_counts.items()),
        key=lambda item: item[0],
    )
    logger.info("phi(%s) = %.10g after %d nodes", coords, search.best, search.visited)
    return PhiResult(coords, search.best, certificate, Z, search.visited)


def minimal_l1_decomposition(b, max_l1: int = 6) -> tuple[int, tuple[int, int, int]] | None:
    """Exhaustive minimum of |z₁|+|z₂|+|z₃| over b = z₁e₁ + z₂ν + z₃η.

    In lattice coordinates e₁ = (1, 0), ν = (0, 1) and η = (-1, 1). Returns
    None when no decomposition has ‖z‖₁ ≤ max_l1.
    """
    b1, b2 = int(b[0]), int(b[1])
    best = None
    for z3 in range(-max_l1, max_l1 + 1):
        z1 = b1 + z3
        z2 = b2 - z3
        l1 = abs(z1) + abs(z2) + abs(z3)
        if l1 <= max_l1 and (best is None or (l1, (z1, z2, z3)) < best):
            best = (l1, (z1, z2, z3))
    return best
