"""Planar polygon utilities: orientation, containment, clipping and exact
disk/annulus intersection areas."""

import numpy as np

from ..errors import ArgumentError, InvalidPolygonError


def cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """z-component of the cross product of stacked 2-vectors."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def signed_area(polygon: np.ndarray) -> float:
    """Shoelace signed area; positive for counter-clockwise vertex order."""
    poly = np.asarray(polygon, dtype=float)
    return 0.5 * float(np.sum(cross2(poly, np.roll(poly, -1, axis=0))))


def polygon_area(polygon: np.ndarray) -> float:
    return abs(signed_area(polygon))


def polygon_diameter(polygon: np.ndarray) -> float:
    poly = np.asarray(polygon, dtype=float)
    diff = poly[:, None, :] - poly[None, :, :]
    return float(np.sqrt(np.max(np.sum(diff**2, axis=-1))))


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Proper or touching intersection of two closed segments."""
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_segment(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 and d2 and d3 and d4:
        return True
    if d1 == 0 and on_segment(q1, q2, p1):
        return True
    if d2 == 0 and on_segment(q1, q2, p2):
        return True
    if d3 == 0 and on_segment(p1, p2, q1):
        return True
    if d4 == 0 and on_segment(p1, p2, q2):
        return True
    return False


def normalize_polygon(polygon) -> np.ndarray:
    """Validate a simple polygon and return it in counter-clockwise order.

    Args:
        polygon: sequence of (x, y) vertices, without repeating the first vertex

    Returns:
        (V, 2) float array, counter-clockwise

    Raises:
        InvalidPolygonError: fewer than 3 vertices, zero area, non-finite
            coordinates or self-intersections
    """
    poly = np.asarray(polygon, dtype=float)
    if poly.ndim != 2 or poly.shape[1] != 2 or len(poly) < 3:
        raise InvalidPolygonError("a polygon needs at least 3 (x, y) vertices")
    if not np.all(np.isfinite(poly)):
        raise InvalidPolygonError("polygon vertices must be finite")
    if np.allclose(poly[0], poly[-1]) and len(poly) > 3:
        poly = poly[:-1]

    n = len(poly)
    for i in range(n):
        a1, a2 = poly[i], poly[(i + 1) % n]
        for j in range(i + 1, n):
            # Adjacent edges share a vertex
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(a1, a2, poly[j], poly[(j + 1) % n]):
                raise InvalidPolygonError(f"polygon edges {i} and {j} intersect")

    area = signed_area(poly)
    if abs(area) <= 1e-14 * polygon_diameter(poly) ** 2:
        raise InvalidPolygonError("polygon has zero area")
    if area < 0:
        poly = poly[::-1].copy()
    return poly


def regular_polygon(n: int, radius: float, center=(0.0, 0.0), phase: float = 0.0) -> np.ndarray:
    """Vertices of a regular n-gon inscribed in the circle of given radius (CCW)."""
    angles = phase + 2.0 * np.pi * np.arange(n) / n
    c = np.asarray(center, dtype=float)
    return c + radius * np.column_stack([np.cos(angles), np.sin(angles)])


def segment_distances(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Distance from each point to the polygon boundary."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(polygon, dtype=float)
    best = np.full(len(pts), np.inf)
    for a, b in zip(poly, np.roll(poly, -1, axis=0)):
        d = b - a
        denom = float(d @ d)
        t = np.clip(((pts - a) @ d) / denom, 0.0, 1.0)
        proj = a + t[:, None] * d
        best = np.minimum(best, np.linalg.norm(pts - proj, axis=1))
    return best


def points_in_polygon(points: np.ndarray, polygon: np.ndarray, tol: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Classify points against a simple polygon.

    Args:
        points: (N, 2) coordinates
        polygon: (V, 2) vertices
        tol: distance below which a point counts as lying on the boundary

    Returns:
        Tuple of (strictly_inside, on_boundary) boolean masks
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(polygon, dtype=float)
    px, py = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)

    for (x1, y1), (x2, y2) in zip(poly, np.roll(poly, -1, axis=0)):
        straddle = (y1 > py) != (y2 > py)
        if not np.any(straddle):
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= straddle & (px < x_cross)

    on_boundary = segment_distances(pts, poly) <= tol
    return inside & ~on_boundary, on_boundary


def clip_polygon(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clipping of ``subject`` by a convex CCW ``clip`` polygon.

    The subject may be non-convex; degenerate zero-width slivers in the
    output do not change its area.
    """
    output = [tuple(p) for p in np.asarray(subject, dtype=float)]
    clip = np.asarray(clip, dtype=float)
    cp1 = clip[-1]

    for cp2 in clip:
        if not output:
            break
        edge = cp2 - cp1

        def inside(p):
            return edge[0] * (p[1] - cp1[1]) - edge[1] * (p[0] - cp1[0]) >= 0.0

        def intersection(s, e):
            s, e = np.asarray(s), np.asarray(e)
            d = e - s
            denom = edge[0] * d[1] - edge[1] * d[0]
            t = (edge[0] * (cp1[1] - s[1]) - edge[1] * (cp1[0] - s[0])) / denom
            return tuple(s + t * d)

        source, output = output, []
        s = source[-1]
        for e in source:
            if inside(e):
                if not inside(s):
                    output.append(intersection(s, e))
                output.append(e)
            elif inside(s):
                output.append(intersection(s, e))
            s = e
        cp1 = cp2

    return np.asarray(output, dtype=float).reshape(-1, 2)


def disk_intersection_area(polygons: np.ndarray, center, radius: float) -> np.ndarray:
    """Exact area of polygon ∩ disk for a batch of CCW polygons.

    Each edge contributes the signed area of (center, edge) ∩ disk, split at
    the circle crossings into straight triangles and circular sectors.

    Args:
        polygons: (T, V, 2) array of CCW polygons with V vertices each
        center: disk center
        radius: disk radius (0 gives zero area)

    Returns:
        (T,) intersection areas
    """
    polys = np.asarray(polygons, dtype=float) - np.asarray(center, dtype=float)
    if radius <= 0.0:
        return np.zeros(polys.shape[0])
    r2 = radius * radius
    a = polys
    b = np.roll(polys, -1, axis=1)
    d = b - a
    qa = np.einsum("...i,...i->...", d, d)
    qb = np.einsum("...i,...i->...", a, d)
    qc = np.einsum("...i,...i->...", a, a) - r2
    disc = qb * qb - qa * qc
    hit = (disc > 0.0) & (qa > 0.0)
    root = np.sqrt(np.where(hit, disc, 0.0))
    safe_qa = np.where(qa > 0.0, qa, 1.0)
    t1 = np.where(hit, np.clip((-qb - root) / safe_qa, 0.0, 1.0), 1.0)
    t2 = np.where(hit, np.clip((-qb + root) / safe_qa, 0.0, 1.0), 1.0)

    ts = np.stack([np.zeros_like(t1), t1, t2, np.ones_like(t1)], axis=-1)
    area = np.zeros(polys.shape[0])
    for k in range(3):
        s, e = ts[..., k], ts[..., k + 1]
        ps = a + s[..., None] * d
        pe = a + e[..., None] * d
        mid = a + (0.5 * (s + e))[..., None] * d
        cr = cross2(ps, pe)
        dt = np.einsum("...i,...i->...", ps, pe)
        inner = np.einsum("...i,...i->...", mid, mid) <= r2
        piece = np.where(inner, 0.5 * cr, 0.5 * r2 * np.arctan2(cr, dt))
        area += piece.sum(axis=-1)
    return area


def annulus_intersection_area(polygons: np.ndarray, center, r: float, R: float) -> np.ndarray:
    """Exact area of polygon ∩ {r < |x - center| < R} for a batch of polygons."""
    if not 0.0 <= r < R:
        raise ArgumentError(f"annulus radii must satisfy 0 <= r < R, got r={r}, R={R}")
    outer = disk_intersection_area(polygons, center, R)
    inner = disk_intersection_area(polygons, center, r) if r > 0.0 else 0.0
    return outer - inner


def triangulate(polygon: np.ndarray) -> np.ndarray:
    """Ear-clipping triangulation of a simple CCW polygon.

    Returns:
        (V-2, 3, 2) array of CCW triangles
    """
    poly = [np.asarray(p, dtype=float) for p in polygon]
    index = list(range(len(poly)))
    triangles = []

    def is_ear(k: int) -> bool:
        i0, i1, i2 = index[k - 1], index[k], index[(k + 1) % len(index)]
        a, b, c = poly[i0], poly[i1], poly[i2]
        if cross2(b - a, c - a) <= 0.0:
            return False
        tri = np.array([a, b, c])
        others = [poly[j] for j in index if j not in (i0, i1, i2)]
        if not others:
            return True
        strict, boundary = points_in_polygon(np.array(others), tri)
        return not np.any(strict)

    guard = 0
    while len(index) > 3:
        for k in range(len(index)):
            if is_ear(k):
                i0, i1, i2 = index[k - 1], index[k], index[(k + 1) % len(index)]
                triangles.append([poly[i0], poly[i1], poly[i2]])
                del index[k]
                break
        else:
            raise InvalidPolygonError("polygon could not be triangulated")
        guard += 1
        if guard > len(poly) ** 2:
            raise InvalidPolygonError("polygon could not be triangulated")
    triangles.append([poly[i] for i in index])
    return np.asarray(triangles, dtype=float)
