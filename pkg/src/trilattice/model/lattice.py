"""Triangular lattice geometry restricted to a polygonal domain.

Integer coordinates (p, q) are the source of truth: the node (p, q) sits at
ε(p·e₁ + q·ν) with e₁ = (1, 0) and ν = (1/2, √3/2).

Triangle conventions (both counter-clockwise, base vertex first):

    up   (T⁺): base, base + (1, 0), base + (0, 1)
    down (T⁻): base, base + (1, -1), base + (1, 0)

Bonds are stored once, oriented from the lexicographically smaller node to
the larger one. Node indices follow lexicographic (p, q) order, so a
canonical bond always has i < j.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..errors import ArgumentError, EmptyDomainError, InvalidPolygonError
from ..utils.geometry import (
    cross2,
    normalize_polygon,
    points_in_polygon,
    polygon_diameter,
    regular_polygon,
)

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
E1 = np.array([1.0, 0.0])
NU = np.array([0.5, SQRT3 / 2.0])
ETA = np.array([-0.5, SQRT3 / 2.0])

# Nearest-neighbor directions in lattice coordinates, counter-clockwise from e₁
DIRECTIONS = np.array([(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)], dtype=np.int64)

# Triangle spanned by the wedge (i, i + DIRECTIONS[k], i + DIRECTIONS[k+1]):
# base offset from i and orientation (0 up, 1 down)
_WEDGE_TRIANGLES = np.array(
    [(0, 0, 0), (-1, 1, 1), (-1, 0, 0), (-1, 0, 1), (0, -1, 0), (0, 0, 1)], dtype=np.int64
)

_UP_OFFSETS = np.array([(0, 0), (1, 0), (0, 1)], dtype=np.int64)
_DOWN_OFFSETS = np.array([(0, 0), (1, -1), (1, 0)], dtype=np.int64)


class NodeId(NamedTuple):
    """Lattice point ε(p·e₁ + q·ν)."""
    p: int
    q: int


class Orientation(str, Enum):
    UP = "up"
    DOWN = "down"


class TriangleId(NamedTuple):
    """An ε-translate of T⁺ or T⁻ identified by its base vertex."""
    base: NodeId
    orientation: Orientation


def rotation(theta: float) -> np.ndarray:
    """Counter-clockwise rotation matrix by angle theta."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def to_cartesian(coords, epsilon: float) -> np.ndarray:
    """Map lattice coordinates (..., 2) to Cartesian positions."""
    c = np.asarray(coords, dtype=float)
    x = c[..., 0] + 0.5 * c[..., 1]
    y = (SQRT3 / 2.0) * c[..., 1]
    return epsilon * np.stack([x, y], axis=-1)


def to_lattice_coords(points, epsilon: float = 1.0) -> np.ndarray:
    """Map Cartesian points (..., 2) to real lattice coordinates (p, q)."""
    x = np.asarray(points, dtype=float)
    q = 2.0 * x[..., 1] / (SQRT3 * epsilon)
    p = x[..., 0] / epsilon - 0.5 * q
    return np.stack([p, q], axis=-1)


def lattice_vector(b) -> np.ndarray:
    """Cartesian vector b₁e₁ + b₂ν of integer lattice coordinates (b₁, b₂)."""
    return to_cartesian(b, 1.0)


def triangle_vertices(t: TriangleId) -> tuple[NodeId, NodeId, NodeId]:
    """Vertices of a triangle in counter-clockwise order, base first."""
    offsets = _UP_OFFSETS if Orientation(t.orientation) is Orientation.UP else _DOWN_OFFSETS
    p, q = t.base
    return tuple(NodeId(p + int(dp), q + int(dq)) for dp, dq in offsets)


def barycenter(t: TriangleId, epsilon: float) -> np.ndarray:
    verts = np.array(triangle_vertices(t))
    return to_cartesian(verts.mean(axis=0), epsilon)


def read_polygon(path: str | Path) -> np.ndarray:
    """Read a polygon file with one "x y" vertex per line.

    Blank lines and lines starting with '#' are ignored. The result is
    validated and returned in counter-clockwise order.

    Raises:
        InvalidPolygonError: unreadable file, malformed line or bad polygon
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidPolygonError(f"cannot read polygon file {path}: {e}") from e

    vertices = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.replace(",", " ").split()
        if len(parts) != 2:
            raise InvalidPolygonError(f"{path}:{lineno}: expected 'x y', got {stripped!r}")
        try:
            vertices.append((float(parts[0]), float(parts[1])))
        except ValueError as e:
            raise InvalidPolygonError(f"{path}:{lineno}: {e}") from e
    return normalize_polygon(vertices)


def unit_hexagon() -> np.ndarray:
    """Regular hexagon inscribed in the unit circle, with a vertex on the x-axis."""
    return regular_polygon(6, 1.0)


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    """Lattice spacing and domain polygon."""
    epsilon: float
    domain: np.ndarray

    def __post_init__(self):
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ArgumentError(f"epsilon must be positive and finite, got {self.epsilon}")
        object.__setattr__(self, "domain", normalize_polygon(self.domain))

    @property
    def diameter(self) -> float:
        return polygon_diameter(self.domain)


def _lookup(sorted_keys: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """Positions of keys in a sorted key array, -1 where absent."""
    keys = np.asarray(keys)
    if len(sorted_keys) == 0:
        return np.full(keys.shape, -1, dtype=np.int64)
    pos = np.clip(np.searchsorted(sorted_keys, keys), 0, len(sorted_keys) - 1)
    return np.where(sorted_keys[pos] == keys, pos, -1)


@dataclass(frozen=True, eq=False)
class LatticeDomain:
    """Nodes, bonds, triangles and wedges of the lattice inside Ω.

    All index sets are numpy arrays in a deterministic order:

    - ``coords`` (N, 2): node lattice coordinates, lexicographic
    - ``bonds`` (B, 2): canonical node index pairs i < j, lexicographic
    - ``tri_base`` (T, 2) and ``tri_orient`` (T,): triangles sorted by
      (p, q, orientation) with up before down
    - ``tri_nodes`` (T, 3): CCW vertex indices; ``tri_bonds`` (T, 3) the bond
      of each CCW edge (v0→v1, v1→v2, v2→v0) and ``tri_signs`` (T, 3) +1 when
      the edge runs along the canonical bond orientation
    - ``wedges`` (W, 3): node triples (i, j, k) with j - i and k - i
      60° apart counter-clockwise; ``wedge_bonds``/``wedge_signs`` (W, 2)
      give β(i, j) and β(i, k) as sign · value[bond]
    """
    spec: LatticeSpec
    coords: np.ndarray
    bonds: np.ndarray
    tri_base: np.ndarray
    tri_orient: np.ndarray
    tri_nodes: np.ndarray
    tri_bonds: np.ndarray
    tri_signs: np.ndarray
    bond_triangle_count: np.ndarray
    wedges: np.ndarray
    wedge_bonds: np.ndarray
    wedge_signs: np.ndarray
    wedge_triangle: np.ndarray
    _node_keys: np.ndarray = field(repr=False)
    _tri_keys: np.ndarray = field(repr=False)
    _key_origin: tuple[int, int, int] = field(repr=False)

    @property
    def epsilon(self) -> float:
        return self.spec.epsilon

    @property
    def polygon(self) -> np.ndarray:
        return self.spec.domain

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    @property
    def n_triangles(self) -> int:
        return len(self.tri_nodes)

    @cached_property
    def positions(self) -> np.ndarray:
        return to_cartesian(self.coords, self.epsilon)

    @cached_property
    def barycenters(self) -> np.ndarray:
        return self.positions[self.tri_nodes].mean(axis=1)

    @cached_property
    def bond_vectors(self) -> np.ndarray:
        """Reference bond vectors x_j - x_i of canonical bonds."""
        return self.positions[self.bonds[:, 1]] - self.positions[self.bonds[:, 0]]

    @cached_property
    def node_degree(self) -> np.ndarray:
        return np.bincount(self.bonds.ravel(), minlength=self.n_nodes)

    @cached_property
    def triangle_ids(self) -> list[TriangleId]:
        orient = (Orientation.UP, Orientation.DOWN)
        return [
            TriangleId(NodeId(int(p), int(q)), orient[int(o)])
            for (p, q), o in zip(self.tri_base, self.tri_orient)
        ]

    @cached_property
    def barycenter_tree(self):
        from scipy.spatial import cKDTree

        return cKDTree(self.barycenters)

    def node_keys(self, coords) -> np.ndarray:
        p0, q0, span = self._key_origin
        c = np.asarray(coords, dtype=np.int64)
        return (c[..., 0] - p0) * span + (c[..., 1] - q0)

    def node_index(self, coords) -> np.ndarray:
        """Node indices for lattice coordinates (..., 2); -1 where absent."""
        return _lookup(self._node_keys, self.node_keys(coords))

    def index_of(self, node: NodeId) -> int:
        idx = int(self.node_index(np.array(node)))
        if idx < 0:
            raise KeyError(node)
        return idx

    def triangle_index(self, t: TriangleId) -> int:
        key = self.node_keys(np.array(t.base)) * 2 + (Orientation(t.orientation) is Orientation.DOWN)
        idx = int(_lookup(self._tri_keys, np.atleast_1d(key))[0])
        if idx < 0:
            raise KeyError(t)
        return idx

    def bond_index(self, i: int, j: int) -> tuple[int, int]:
        """Bond index and orientation sign for the ordered node pair (i, j)."""
        lo, hi = (i, j) if i < j else (j, i)
        keys = self.bonds[:, 0].astype(np.int64) * self.n_nodes + self.bonds[:, 1]
        idx = int(_lookup(keys, np.atleast_1d(np.int64(lo) * self.n_nodes + hi))[0])
        if idx < 0:
            raise KeyError((i, j))
        return idx, (1 if i < j else -1)


def _contained(tri_pos: np.ndarray, polygon: np.ndarray, tol: float, area_tol: float) -> np.ndarray:
    """Mask of candidate triangles (T, 3, 2) lying inside the closed polygon.

    Vertices are checked by the caller; this adds the barycenter, polygon
    vertices poking into the triangle and polygon edges crossing it.
    """
    strict, boundary = points_in_polygon(tri_pos.mean(axis=1), polygon, tol)
    keep = strict | boundary

    a, b, c = tri_pos[:, 0], tri_pos[:, 1], tri_pos[:, 2]
    for v in polygon:
        poke = (
            (cross2(b - a, v - a) > area_tol)
            & (cross2(c - b, v - b) > area_tol)
            & (cross2(a - c, v - c) > area_tol)
        )
        keep &= ~poke

    edges = [(a, b), (b, c), (c, a)]
    for q1, q2 in zip(polygon, np.roll(polygon, -1, axis=0)):
        for p1, p2 in edges:
            d1 = cross2(q2 - q1, p1 - q1)
            d2 = cross2(q2 - q1, p2 - q1)
            d3 = cross2(p2 - p1, q1 - p1)
            d4 = cross2(p2 - p1, q2 - p1)
            proper = (
                (np.abs(d1) > area_tol) & (np.abs(d2) > area_tol)
                & (np.abs(d3) > area_tol) & (np.abs(d4) > area_tol)
                & (np.sign(d1) != np.sign(d2)) & (np.sign(d3) != np.sign(d4))
            )
            keep &= ~proper
    return keep


def build_domain(spec: LatticeSpec) -> LatticeDomain:
    """Enumerate the lattice triangles contained in Ω and derive nodes and bonds.

    A triangle belongs to the domain when its vertices and barycenter lie in
    the closed polygon (tolerance 1e-12·diam Ω), no polygon vertex lies
    strictly inside it and no polygon edge crosses it.

    Raises:
        EmptyDomainError: no lattice triangle fits in Ω
    """
    eps = spec.epsilon
    polygon = spec.domain
    diam = spec.diameter
    tol = 1e-12 * diam
    area_tol = tol * eps

    lat = to_lattice_coords(polygon, eps)
    p_lo, q_lo = np.floor(lat.min(axis=0)).astype(np.int64) - 1
    p_hi, q_hi = np.ceil(lat.max(axis=0)).astype(np.int64) + 1
    ps = np.arange(p_lo, p_hi + 1)
    qs = np.arange(q_lo, q_hi + 1)
    pp, qq = np.meshgrid(ps, qs, indexing="ij")
    grid = np.stack([pp, qq], axis=-1)

    strict, boundary = points_in_polygon(to_cartesian(grid.reshape(-1, 2), eps), polygon, tol)
    inside = (strict | boundary).reshape(pp.shape)

    up_ok = inside[:-1, :-1] & inside[1:, :-1] & inside[:-1, 1:]
    down_ok = inside[:-1, 1:] & inside[1:, :-1] & inside[1:, 1:]
    up_base = grid[:-1, :-1][up_ok]
    down_base = grid[:-1, 1:][down_ok]

    base = np.concatenate([up_base, down_base]).reshape(-1, 2)
    orient = np.concatenate([
        np.zeros(len(up_base), dtype=np.int8),
        np.ones(len(down_base), dtype=np.int8),
    ])
    offsets = np.where(orient[:, None, None] == 0, _UP_OFFSETS[None], _DOWN_OFFSETS[None])
    verts = base[:, None, :] + offsets

    if len(base):
        keep = _contained(to_cartesian(verts, eps), polygon, tol, area_tol)
        base, orient, verts = base[keep], orient[keep], verts[keep]
    if len(base) == 0:
        raise EmptyDomainError(
            f"no lattice triangle of side {eps:g} fits in the domain (diameter {diam:g})"
        )

    order = np.lexsort((orient, base[:, 1], base[:, 0]))
    base, orient, verts = base[order], orient[order], verts[order]
    n_tri = len(base)

    coords, inverse = np.unique(verts.reshape(-1, 2), axis=0, return_inverse=True)
    tri_nodes = inverse.reshape(n_tri, 3)
    n_nodes = len(coords)

    heads = tri_nodes
    tails = np.roll(tri_nodes, -1, axis=1)
    lo = np.minimum(heads, tails).astype(np.int64)
    hi = np.maximum(heads, tails).astype(np.int64)
    bond_keys, bond_inverse, counts = np.unique(
        (lo * n_nodes + hi).ravel(), return_inverse=True, return_counts=True
    )
    bonds = np.column_stack([bond_keys // n_nodes, bond_keys % n_nodes])
    tri_bonds = bond_inverse.reshape(n_tri, 3)
    tri_signs = np.where(heads < tails, 1, -1).astype(np.int8)

    p0 = int(coords[:, 0].min()) - 2
    q0 = int(coords[:, 1].min()) - 2
    span = int(coords[:, 1].max()) - q0 + 3

    def keys(c):
        return (c[..., 0] - p0) * span + (c[..., 1] - q0)

    node_keys = keys(coords)
    tri_keys = keys(base) * 2 + orient

    # Wedges: pairs of consecutive directions at every node where both bonds exist
    neighbor_coords = coords[:, None, :] + DIRECTIONS[None]
    neighbor = _lookup(node_keys, keys(neighbor_coords))
    own = np.arange(n_nodes)[:, None]
    n_lo = np.minimum(own, neighbor)
    n_hi = np.maximum(own, neighbor)
    nb_bond = np.where(neighbor >= 0, _lookup(bond_keys, n_lo * n_nodes + n_hi), -1)
    nb_sign = np.where(own < neighbor, 1, -1)

    nxt = np.roll(np.arange(6), -1)
    has_wedge = (nb_bond >= 0) & (nb_bond[:, nxt] >= 0)
    w_node, w_dir = np.nonzero(has_wedge)
    w_dir2 = nxt[w_dir]
    wedges = np.column_stack([w_node, neighbor[w_node, w_dir], neighbor[w_node, w_dir2]])
    wedge_bonds = np.column_stack([nb_bond[w_node, w_dir], nb_bond[w_node, w_dir2]])
    wedge_signs = np.column_stack([nb_sign[w_node, w_dir], nb_sign[w_node, w_dir2]]).astype(np.int8)
    w_tri = _WEDGE_TRIANGLES[w_dir]
    w_base = coords[w_node] + w_tri[:, :2]
    wedge_triangle = _lookup(tri_keys, keys(w_base) * 2 + w_tri[:, 2])

    logger.info(
        "Built lattice domain: eps=%g, %d nodes, %d bonds, %d triangles, %d wedges",
        eps, n_nodes, len(bonds), n_tri, len(wedges),
    )
    return LatticeDomain(
        spec=spec,
        coords=coords,
        bonds=bonds,
        tri_base=base,
        tri_orient=orient,
        tri_nodes=tri_nodes,
        tri_bonds=tri_bonds,
        tri_signs=tri_signs,
        bond_triangle_count=counts,
        wedges=wedges,
        wedge_bonds=wedge_bonds,
        wedge_signs=wedge_signs,
        wedge_triangle=wedge_triangle,
        _node_keys=node_keys,
        _tri_keys=tri_keys,
        _key_origin=(p0, q0, span),
    )


def node_indices_in_annulus(dom: LatticeDomain, center, r: float, R: float) -> np.ndarray:
    """Indices of nodes x with r < |x - center| < R, in index order."""
    if not (0.0 <= r < R):
        raise ArgumentError(f"annulus radii must satisfy 0 <= r < R, got r={r}, R={R}")
    dist = np.linalg.norm(dom.positions - np.asarray(center, dtype=float), axis=1)
    return np.flatnonzero((dist > r) & (dist < R))


def nodes_in_annulus(dom: LatticeDomain, center, r: float, R: float) -> frozenset[NodeId]:
    """Nodes x of the domain with r < |x - center| < R.

    Raises:
        ArgumentError: r >= R or r < 0
    """
    idx = node_indices_in_annulus(dom, center, r, R)
    return frozenset(NodeId(int(p), int(q)) for p, q in dom.coords[idx])
