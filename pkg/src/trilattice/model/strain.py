"""Discrete strains, circulations, Burgers measures and annulus averages."""

import logging
import math
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..errors import ArgumentError, NotCompatibleError, SeparationViolation
from ..utils.csvio import emit_csv, read_csv_rows
from ..utils.geometry import (
    annulus_intersection_area,
    clip_polygon,
    disk_intersection_area,
    points_in_polygon,
    regular_polygon,
    segment_distances,
)
from .lattice import LatticeDomain, TriangleId, lattice_vector, rotation, to_lattice_coords

logger = logging.getLogger(__name__)

TOL_CIRC = 1e-10
TOL_SNAP = 1e-6
# Vertex count of the polygon standing in for a core disk not centered on the annulus
CORE_POLYGON_VERTICES = 512


@dataclass(eq=False)
class DiscreteStrain:
    """Antisymmetric bond field β, stored once per canonical bond.

    ``values[b]`` is β(i, j) for the canonical bond b = (i, j), i < j;
    β(j, i) = -β(i, j) is implied.
    """
    domain: LatticeDomain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.domain.n_bonds, 2):
            raise ArgumentError(
                f"strain needs shape ({self.domain.n_bonds}, 2), got {self.values.shape}"
            )

    @classmethod
    def zeros(cls, domain: LatticeDomain) -> "DiscreteStrain":
        return cls(domain, np.zeros((domain.n_bonds, 2)))

    @classmethod
    def from_matrix(cls, domain: LatticeDomain, matrix) -> "DiscreteStrain":
        """Homogeneous strain β(i, j) = M(x_j - x_i)."""
        return cls(domain, domain.bond_vectors @ np.asarray(matrix, dtype=float).T)

    def value(self, i: int, j: int) -> np.ndarray:
        """β(i, j) for an ordered pair of neighboring node indices."""
        b, sign = self.domain.bond_index(i, j)
        return sign * self.values[b]

    def edge_values(self) -> np.ndarray:
        """β on the CCW edges of every triangle, shape (T, 3, 2)."""
        dom = self.domain
        return dom.tri_signs[..., None] * self.values[dom.tri_bonds]

    def rotated(self, Q) -> "DiscreteStrain":
        """The strain Qβ."""
        return DiscreteStrain(self.domain, self.values @ np.asarray(Q, dtype=float).T)

    def copy(self) -> "DiscreteStrain":
        return DiscreteStrain(self.domain, self.values.copy())


@dataclass(frozen=True)
class Dislocation:
    """A dislocation at ``position`` with Burgers vector b₁e₁ + b₂ν in frame rotation(theta)."""
    position: tuple[float, float]
    burgers: tuple[int, int]
    theta: float = 0.0

    @property
    def frame(self) -> np.ndarray:
        return rotation(self.theta)

    @property
    def xi(self) -> np.ndarray:
        """Limit Burgers vector Rⁿbⁿ."""
        return self.frame @ lattice_vector(self.burgers)


@dataclass(frozen=True)
class DislocationMeasure:
    """Finite sum of atoms ε·Rⁿbⁿ δ_{xⁿ}."""
    entries: tuple[Dislocation, ...]
    epsilon: float
    gamma: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.epsilon > 0.0:
            raise ArgumentError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.gamma < 1.0:
            raise ArgumentError(f"gamma must lie in (0, 1), got {self.gamma}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Dislocation]:
        return iter(self.entries)

    @property
    def positions(self) -> np.ndarray:
        return np.array([d.position for d in self.entries], dtype=float).reshape(-1, 2)

    def limit_weights(self) -> np.ndarray:
        """Rⁿbⁿ for every atom, shape (K, 2)."""
        return np.array([d.xi for d in self.entries], dtype=float).reshape(-1, 2)

    def weights(self) -> np.ndarray:
        """ε·Rⁿbⁿ for every atom, shape (K, 2)."""
        return self.epsilon * self.limit_weights()

    def with_positions(self, positions) -> "DislocationMeasure":
        entries = tuple(
            replace(d, position=(float(x), float(y)))
            for d, (x, y) in zip(self.entries, np.asarray(positions, dtype=float))
        )
        return replace(self, entries=entries)

    def separation_issues(self, polygon) -> tuple[list[tuple[int, int, float]], list[tuple[int, float]]]:
        """Pairs closer than 4ε^γ and atoms closer than 2ε^γ to ∂Ω (negative distance when outside)."""
        min_pair = 4.0 * self.epsilon**self.gamma
        min_boundary = 2.0 * self.epsilon**self.gamma
        pos = self.positions
        pairs = []
        for a in range(len(pos)):
            for b in range(a + 1, len(pos)):
                d = float(np.linalg.norm(pos[a] - pos[b]))
                if d < min_pair:
                    pairs.append((a, b, d))

        boundary = []
        if len(pos):
            poly = np.asarray(polygon, dtype=float)
            strict, _ = points_in_polygon(pos, poly)
            dist = segment_distances(pos, poly)
            for n, (inside, d) in enumerate(zip(strict, dist)):
                signed = float(d) if inside else -float(d)
                if signed < min_boundary:
                    boundary.append((n, signed))
        return pairs, boundary

    def validate(self, polygon) -> None:
        """Check the separation constraints against Ω.

        Raises:
            SeparationViolation: listing every offending pair and atom
        """
        pairs, boundary = self.separation_issues(polygon)
        if pairs or boundary:
            raise SeparationViolation(
                pairs, boundary,
                min_pair=4.0 * self.epsilon**self.gamma,
                min_boundary=2.0 * self.epsilon**self.gamma,
            )


class BurgersAtom(NamedTuple):
    """A triangle with nonzero circulation."""
    triangle: int
    position: np.ndarray
    weight: np.ndarray
    burgers: tuple[int, int] | None


class TriangleStrainMatrix(NamedTuple):
    triangle: TriangleId
    matrix: np.ndarray


def circulations(beta: DiscreteStrain) -> np.ndarray:
    """dβ(T) = β(i,j) + β(j,k) + β(k,i) for every triangle, shape (T, 2)."""
    return beta.edge_values().sum(axis=1)


def _triangle_position(dom: LatticeDomain, t: TriangleId | int) -> int:
    return t if isinstance(t, (int, np.integer)) else dom.triangle_index(t)


def circulation(beta: DiscreteStrain, t: TriangleId | int) -> np.ndarray:
    """Discrete circulation of β over the CCW boundary of one triangle."""
    dom = beta.domain
    k = _triangle_position(dom, t)
    return (dom.tri_signs[k][:, None] * beta.values[dom.tri_bonds[k]]).sum(axis=0)


def boundary_circulation(beta: DiscreteStrain) -> np.ndarray:
    """Circulation of β along ∂Ω_𝒯ε, each boundary bond oriented by its triangle."""
    dom = beta.domain
    edges = beta.edge_values()
    on_boundary = dom.bond_triangle_count[dom.tri_bonds] == 1
    return edges[on_boundary].sum(axis=0)


def snap_weight(weight, epsilon: float, frame: float = 0.0, tol_snap: float | None = None):
    """Round a circulation to the nearest vector of ε·rotation(frame)𝕋.

    Returns:
        Tuple of (weight, lattice coordinates or None when farther than tol_snap)
    """
    tol = TOL_SNAP * epsilon if tol_snap is None else tol_snap
    R = rotation(frame)
    raw = to_lattice_coords(R.T @ np.asarray(weight, dtype=float), epsilon)
    coords = np.rint(raw).astype(int)
    snapped = epsilon * (R @ lattice_vector(coords))
    if np.linalg.norm(snapped - weight) <= tol:
        return snapped, (int(coords[0]), int(coords[1]))
    return np.asarray(weight, dtype=float), None


def burgers_measure(
    beta: DiscreteStrain,
    tol_circ: float | None = None,
    tol_snap: float | None = None,
    frame: float = 0.0,
) -> list[BurgersAtom]:
    """Atoms (barycenter, dβ(T)) of every triangle with |dβ(T)| > tol_circ.

    Weights within tol_snap of ε·rotation(frame)𝕋 are snapped to it;
    others are reported raw with ``burgers=None``.
    """
    dom = beta.domain
    eps = dom.epsilon
    tol = TOL_CIRC * eps if tol_circ is None else tol_circ
    circ = circulations(beta)
    hits = np.flatnonzero(np.linalg.norm(circ, axis=1) > tol)

    atoms = []
    for k in hits:
        weight, coords = snap_weight(circ[k], eps, frame, tol_snap)
        if coords is None:
            logger.debug("Triangle %d circulation %s is not a lattice vector", k, circ[k])
        atoms.append(BurgersAtom(int(k), dom.barycenters[k].copy(), weight, coords))
    return atoms


def _edge_frames(dom: LatticeDomain) -> np.ndarray:
    """Inverses of the reference edge matrices [x₁-x₀, x₂-x₀] per triangle."""
    pos = dom.positions[dom.tri_nodes]
    E = np.stack([pos[:, 1] - pos[:, 0], pos[:, 2] - pos[:, 0]], axis=-1)
    return np.linalg.inv(E)


def triangle_matrices(beta: DiscreteStrain) -> np.ndarray:
    """M_T with β(i,j) = M_T(x_j - x_i) on the first two CCW edges, shape (T, 2, 2).

    Exact on all three edges only where the circulation vanishes.
    """
    edges = beta.edge_values()
    B = np.stack([edges[:, 0], -edges[:, 2]], axis=-1)
    return B @ _edge_frames(beta.domain)


def triangle_matrix(beta: DiscreteStrain, t: TriangleId | int, tol_circ: float | None = None) -> TriangleStrainMatrix:
    """The unique matrix reproducing β on the edges of a compatible triangle.

    Raises:
        NotCompatibleError: the circulation of t exceeds tol_circ
    """
    dom = beta.domain
    k = _triangle_position(dom, t)
    tol = TOL_CIRC * dom.epsilon if tol_circ is None else tol_circ
    circ = circulation(beta, k)
    tid = dom.triangle_ids[k]
    if np.linalg.norm(circ) > tol:
        raise NotCompatibleError(tid, circ)

    pos = dom.positions[dom.tri_nodes[k]]
    edges = dom.tri_signs[k][:, None] * beta.values[dom.tri_bonds[k]]
    E = np.column_stack([pos[1] - pos[0], pos[2] - pos[0]])
    B = np.column_stack([edges[0], -edges[2]])
    return TriangleStrainMatrix(tid, B @ np.linalg.inv(E))


@dataclass(eq=False)
class PiecewiseField:
    """Piecewise-constant matrix field β̃: M_T on each triangle, zero on core disks.

    ``active`` marks the triangles carrying their matrix; cores are the disks
    of radius ``core_radius`` around ``cores``.
    """
    domain: LatticeDomain
    matrices: np.ndarray
    cores: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    core_radius: float = 0.0

    def _region_weights(self, center, r: float, R: float) -> tuple[np.ndarray, np.ndarray, float]:
        """Triangle indices near the annulus, their field-carrying areas and the total area."""
        dom = self.domain
        eps = dom.epsilon
        center = np.asarray(center, dtype=float)
        near = np.array(dom.barycenter_tree.query_ball_point(center, R + eps), dtype=np.int64)
        if near.size == 0:
            return near, np.zeros(0), 0.0
        near.sort()
        tris = dom.positions[dom.tri_nodes[near]]
        areas = annulus_intersection_area(tris, center, r, R)
        total = float(areas.sum())

        carrying = areas.copy()
        for c in self.cores:
            dist = float(np.linalg.norm(c - center))
            if dist + self.core_radius <= r or dist - self.core_radius >= R:
                continue
            if dist <= 1e-12 * max(eps, 1.0):
                outer = min(R, self.core_radius)
                if outer > r:
                    carrying -= annulus_intersection_area(tris, center, r, outer)
                continue
            # Foreign core: area-matched polygon stands in for the disk
            n = CORE_POLYGON_VERTICES
            scale = math.sqrt(2.0 * math.pi / (n * math.sin(2.0 * math.pi / n)))
            disk = regular_polygon(n, self.core_radius * scale, center=c)
            close = np.linalg.norm(dom.barycenters[near] - c, axis=1) < self.core_radius + eps
            for m in np.flatnonzero(close):
                piece = clip_polygon(disk, tris[m])
                if len(piece) < 3:
                    continue
                outer = disk_intersection_area(piece[None], center, R)[0]
                inner = disk_intersection_area(piece[None], center, r)[0] if r > 0 else 0.0
                carrying[m] -= outer - inner
        return near, np.maximum(carrying, 0.0), total

    def integrate_annulus(self, center, r: float, R: float) -> tuple[np.ndarray, float]:
        """∫ β̃ over A_{r,R}(center) ∩ Ω_𝒯ε and the area of that region."""
        near, weights, total = self._region_weights(center, r, R)
        if near.size == 0:
            return np.zeros((2, 2)), 0.0
        return np.einsum("t,tij->ij", weights, self.matrices[near]), total


def piecewise_field(
    beta: DiscreteStrain,
    mu: DislocationMeasure | None = None,
    tol_circ: float | None = None,
    cores=None,
) -> PiecewiseField:
    """Piecewise-constant field of triangle matrices, zero on the cores B_ε(xⁿ).

    Core centers come from ``cores`` if given, else from ``mu``, else from the
    Burgers measure of β.

    Raises:
        NotCompatibleError: an incompatible triangle lies outside every core
    """
    dom = beta.domain
    eps = dom.epsilon
    tol = TOL_CIRC * eps if tol_circ is None else tol_circ
    if cores is None:
        if mu is not None:
            cores = mu.positions
        else:
            cores = np.array([a.position for a in burgers_measure(beta, tol)])
    cores = np.asarray(cores, dtype=float).reshape(-1, 2)

    circ = circulations(beta)
    bad = np.flatnonzero(np.linalg.norm(circ, axis=1) > tol)
    for k in bad:
        bc = dom.barycenters[k]
        if not len(cores) or np.min(np.linalg.norm(cores - bc, axis=1)) >= eps:
            raise NotCompatibleError(dom.triangle_ids[k], circ[k])

    matrices = triangle_matrices(beta)
    matrices[bad] = 0.0
    return PiecewiseField(dom, matrices, cores, eps)


def _polar_average(field_fn: Callable, center, r: float, R: float, breakpoints: Iterable[float] = ()) -> np.ndarray:
    """Average of a callable matrix field over a full annulus by polar quadrature."""
    center = np.asarray(center, dtype=float)
    nodes, gl_weights = np.polynomial.legendre.leggauss(16)
    n_theta = 256
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    circle = np.column_stack([np.cos(theta), np.sin(theta)])

    # Geometric panels resolve 1/ρ fields down to the inner radius
    edges = {r, R, *(b for b in breakpoints if r < b < R)}
    if r > 0.0:
        n_geo = int(np.ceil(np.log2(R / r)))
        edges.update(r * (R / r) ** (np.arange(1, n_geo) / n_geo))
    else:
        edges.update(R * 2.0 ** -np.arange(1, 40))
    edges = np.array(sorted(edges))

    total = np.zeros((2, 2))
    for a, b in zip(edges[:-1], edges[1:]):
        rho = 0.5 * (b - a) * nodes + 0.5 * (b + a)
        w = 0.5 * (b - a) * gl_weights * rho * (2.0 * np.pi / n_theta)
        pts = center + (rho[:, None, None] * circle[None]).reshape(-1, 2)
        values = np.asarray(field_fn(pts), dtype=float).reshape(len(rho), n_theta, 2, 2)
        total += np.einsum("r,rtij->ij", w, values)
    return total / (np.pi * (R * R - r * r))


def annulus_average(field, center, r: float, R: float, breakpoints: Iterable[float] = ()) -> np.ndarray:
    """Area-weighted average of a matrix field over A_{r,R}(center).

    ``field`` is either a PiecewiseField (averaged over the part of the
    annulus inside Ω_𝒯ε, exactly) or a callable mapping points (N, 2) to
    matrices (N, 2, 2) (averaged over the whole annulus by quadrature;
    ``breakpoints`` are radii where the callable has kinks).

    Raises:
        ArgumentError: r >= R, or the annulus misses the domain
    """
    if not 0.0 <= r < R:
        raise ArgumentError(f"annulus radii must satisfy 0 <= r < R, got r={r}, R={R}")
    if isinstance(field, PiecewiseField):
        integral, area = field.integrate_annulus(center, r, R)
        if area <= 0.0:
            raise ArgumentError(f"annulus A_{{{r:g},{R:g}}}({center}) does not meet the domain")
        return integral / area
    return _polar_average(field, center, r, R, breakpoints)


def symmetry_rotations() -> np.ndarray:
    """The six rotations by kπ/3 forming ℐ(𝕋), shape (6, 2, 2)."""
    return np.array([rotation(k * np.pi / 3.0) for k in range(6)])


def distance_to_frame_group(M, theta: float) -> float:
    """Frobenius distance from M to rotation(theta)·ℐ(𝕋)."""
    group = rotation(theta) @ symmetry_rotations()
    return float(np.min(np.linalg.norm(np.asarray(M) - group, axis=(1, 2))))


def default_delta(epsilon: float, gamma: float) -> float:
    """Vanishing tolerance ε^{1-γ}|log ε| for the annulus-average condition."""
    return epsilon ** (1.0 - gamma) * abs(math.log(epsilon))


@dataclass
class AdmissibilityReport:
    """Outcome of checking a strain against a dislocation measure."""
    measure_matches: bool
    missing: list[int]
    extra: list[BurgersAtom]
    max_weight_error: float
    averages: list[np.ndarray]
    distances: list[float]
    delta: float

    @property
    def averages_ok(self) -> bool:
        return all(d <= self.delta for d in self.distances)

    @property
    def passed(self) -> bool:
        return self.measure_matches and self.averages_ok

    def summary(self) -> dict:
        return {
            "measure_matches": self.measure_matches,
            "missing": self.missing,
            "extra": len(self.extra),
            "max_weight_error": self.max_weight_error,
            "distances": self.distances,
            "delta": self.delta,
            "passed": self.passed,
        }


def check_admissible(
    beta: DiscreteStrain,
    mu: DislocationMeasure,
    delta: float | None = None,
    tol_circ: float | None = None,
) -> AdmissibilityReport:
    """Report whether μ[β] = μ and how far annulus averages are from Rⁿℐ(𝕋).

    Averages are taken over A_{ε,ε^γ}(xⁿ); never raises.
    """
    dom = beta.domain
    eps = dom.epsilon
    tol = TOL_CIRC * eps if tol_circ is None else tol_circ
    if delta is None:
        delta = default_delta(eps, mu.gamma)

    # Sum prescribed atoms per triangle
    expected: dict[int, np.ndarray] = {}
    missing: list[int] = []
    weights = mu.weights()
    for n, x in enumerate(mu.positions):
        dist, k = dom.barycenter_tree.query(x)
        if dist > 1e-9 * eps:
            missing.append(n)
            continue
        expected[int(k)] = expected.get(int(k), np.zeros(2)) + weights[n]

    found = {a.triangle: a for a in burgers_measure(beta, tol)}
    max_err = 0.0
    matched = not missing
    for k, w in expected.items():
        actual = circulation(beta, k)
        err = float(np.linalg.norm(actual - w))
        max_err = max(max_err, err)
        if err > tol:
            matched = False
    extra = [a for k, a in found.items() if k not in expected]
    if extra:
        matched = False

    cores = np.concatenate([mu.positions, np.array([a.position for a in extra]).reshape(-1, 2)])
    field = piecewise_field(beta, tol_circ=tol, cores=cores)
    averages, distances = [], []
    r_out = eps**mu.gamma
    for d in mu:
        try:
            avg = annulus_average(field, d.position, eps, r_out)
        except ArgumentError:
            avg = np.full((2, 2), np.nan)
        averages.append(avg)
        distances.append(distance_to_frame_group(avg, d.theta) if np.all(np.isfinite(avg)) else math.inf)

    report = AdmissibilityReport(matched, missing, extra, max_err, averages, distances, delta)
    logger.info(
        "Admissibility: measure_matches=%s, max distance %.3e (delta %.3e)",
        matched, max(distances, default=0.0), delta,
    )
    return report


def gradient_strain(dom: LatticeDomain, u, R=None, slip=None) -> DiscreteStrain:
    """β(i,j) = R(x_j - x_i) + ε(u(j) - u(i) - σ(i,j)).

    Args:
        dom: lattice domain
        u: node displacements, shape (N, 2)
        R: rotation matrix (identity when omitted)
        slip: optional canonical bond slips σ, shape (B, 2)
    """
    u = np.asarray(u, dtype=float)
    R = np.eye(2) if R is None else np.asarray(R, dtype=float)
    i, j = dom.bonds[:, 0], dom.bonds[:, 1]
    values = dom.bond_vectors @ R.T + dom.epsilon * (u[j] - u[i])
    beta = DiscreteStrain(dom, values)
    return add_slip(beta, slip) if slip is not None else beta


def add_slip(beta: DiscreteStrain, slip) -> DiscreteStrain:
    """The strain β - εσ for canonical bond slips σ."""
    slip = np.asarray(slip, dtype=float)
    return DiscreteStrain(beta.domain, beta.values - beta.domain.epsilon * slip)


STRAIN_COLUMNS = ["p1", "q1", "p2", "q2", "bx", "by"]
MEASURE_COLUMNS = ["x", "y", "b1", "b2", "theta"]


def write_strain_csv(beta: DiscreteStrain, path: str | Path) -> None:
    dom = beta.domain
    a = dom.coords[dom.bonds[:, 0]]
    b = dom.coords[dom.bonds[:, 1]]
    rows = (
        [int(a[k, 0]), int(a[k, 1]), int(b[k, 0]), int(b[k, 1]), float(v[0]), float(v[1])]
        for k, v in enumerate(beta.values)
    )
    emit_csv(rows, path, STRAIN_COLUMNS)


def read_strain_csv(dom: LatticeDomain, path: str | Path) -> DiscreteStrain:
    """Read bond values; rows may list either orientation of a bond.

    Raises:
        ArgumentError: a row names a non-bond or a bond is missing
    """
    values = np.full((dom.n_bonds, 2), np.nan)
    for row in read_csv_rows(path, STRAIN_COLUMNS):
        i = int(dom.node_index(np.array([int(row["p1"]), int(row["q1"])])))
        j = int(dom.node_index(np.array([int(row["p2"]), int(row["q2"])])))
        if i < 0 or j < 0:
            raise ArgumentError(f"{path}: row {row} names a node outside the domain")
        try:
            b, sign = dom.bond_index(i, j)
        except KeyError:
            raise ArgumentError(f"{path}: row {row} is not a lattice bond") from None
        values[b] = sign * np.array([float(row["bx"]), float(row["by"])])
    if np.isnan(values).any():
        raise ArgumentError(f"{path}: {int(np.isnan(values[:, 0]).sum())} bonds have no value")
    return DiscreteStrain(dom, values)


def write_measure_csv(mu: DislocationMeasure, path: str | Path) -> None:
    rows = (
        [d.position[0], d.position[1], int(d.burgers[0]), int(d.burgers[1]), d.theta]
        for d in mu
    )
    emit_csv(rows, path, MEASURE_COLUMNS)


def read_measure_csv(path: str | Path, epsilon: float, gamma: float = 0.5) -> DislocationMeasure:
    entries = [
        Dislocation(
            (float(row["x"]), float(row["y"])),
            (int(row["b1"]), int(row["b2"])),
            float(row["theta"]),
        )
        for row in read_csv_rows(path, MEASURE_COLUMNS)
    ]
    return DislocationMeasure(tuple(entries), epsilon, gamma)
