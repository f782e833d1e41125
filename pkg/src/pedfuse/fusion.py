"""Fusion of world ground points from several cameras.

Points that may belong to the same pedestrian are joined in a fusibility graph
(different cameras, close on the ground, optionally similar appearance). The
graph is partitioned into cliques by greedily coloring its complement with a
smallest-last ordering and bichromatic color interchange; every clique with at
least two members becomes one detection at the members' mean position.

An average-heatmap fuser is also provided as a baseline.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .errors import EmptyGrid, LengthMismatch, MissingDescriptor, ZeroVector
from .geometry import AreaOfInterest, WorldGroundPoint

logger = logging.getLogger(__name__)

ZERO_NORM_TOL = 1e-12


@dataclass(frozen=True)
class FusionGraph:
    """Vertices are world ground points; ``adjacency`` is a symmetric bool matrix."""

    vertices: Tuple[WorldGroundPoint, ...]
    adjacency: np.ndarray

    def __len__(self):
        return len(self.vertices)

    def edges(self) -> List[Tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(iu.tolist(), ju.tolist()))


@dataclass(frozen=True)
class CliqueCover:
    """Disjoint vertex-index sets, each a clique, jointly covering the graph."""

    cliques: Tuple[Tuple[int, ...], ...]

    def __len__(self):
        return len(self.cliques)


@dataclass(frozen=True)
class FusedDetection:
    X: float
    Y: float
    member_count: int
    contributing: Tuple[Tuple[int, int], ...] = ()


def descriptor_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine distance ``1 - a.b / (|a||b|)``, in [0, 2]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise LengthMismatch(f"descriptor shapes {a.shape} and {b.shape} differ")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < ZERO_NORM_TOL or nb < ZERO_NORM_TOL:
        raise ZeroVector("descriptor with zero norm")
    return float(np.clip(1.0 - a.dot(b) / (na * nb), 0.0, 2.0))


def _descriptor_matrix(points: Sequence[WorldGroundPoint]) -> np.ndarray:
    if any(p.descriptor is None for p in points):
        raise MissingDescriptor("descriptor threshold set but some points lack descriptors")
    D = np.array([p.descriptor for p in points], dtype=float)
    if D.ndim != 2:
        raise LengthMismatch("descriptors have inconsistent lengths")
    norms = np.linalg.norm(D, axis=1)
    if np.any(norms < ZERO_NORM_TOL):
        raise ZeroVector("descriptor with zero norm")
    U = D / norms[:, None]
    return np.clip(1.0 - U @ U.T, 0.0, 2.0)


def build_fusion_graph(
    points: Sequence[WorldGroundPoint], t_g: float, t_d: Optional[float] = None
) -> FusionGraph:
    """Connect points from different cameras closer than ``t_g`` meters.

    When ``t_d`` is given, pairs must also have descriptor distance below it.
    """
    if t_g <= 0:
        raise ValueError("t_g must be positive")
    points = tuple(points)
    n = len(points)
    if n == 0:
        return FusionGraph(points, np.zeros((0, 0), dtype=bool))
    xy = np.array([(p.X, p.Y) for p in points], dtype=float)
    cams = np.array([p.camera_id for p in points])
    diff = xy[:, None, :] - xy[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    adj = (cams[:, None] != cams[None, :]) & (dist < t_g)
    if t_d is not None:
        adj &= _descriptor_matrix(points) < t_d
    np.fill_diagonal(adj, False)
    adj.setflags(write=False)
    return FusionGraph(points, adj)


def _neighbors(adjacency: np.ndarray) -> List[List[int]]:
    return [np.flatnonzero(row).tolist() for row in adjacency]


def smallest_last_ordering(adjacency: np.ndarray) -> List[int]:
    """Smallest-last vertex ordering.

    Repeatedly removes a vertex of minimum remaining degree and returns the
    removal sequence reversed, so every vertex has minimum degree in the
    subgraph induced by itself and its predecessors. Among tied vertices the
    highest index is removed first, which puts low indices early in the result.
    """
    adjacency = np.asarray(adjacency, dtype=bool)
    n = adjacency.shape[0]
    degree = adjacency.sum(axis=1).astype(int)
    nbrs = _neighbors(adjacency)
    removed = np.zeros(n, dtype=bool)
    removal = []
    for _ in range(n):
        live = np.flatnonzero(~removed)
        d = degree[live]
        candidates = live[d == d.min()]
        v = int(candidates[-1])
        removed[v] = True
        removal.append(v)
        for u in nbrs[v]:
            if not removed[u]:
                degree[u] -= 1
    return removal[::-1]


def _try_interchange(v, colors, nbrs, k) -> Optional[int]:
    # Kempe-chain swap: free color i at v by flipping the (i, j) components
    # that hold v's i-colored neighbours, provided none of them reaches a
    # j-colored neighbour of v.
    nbr_set = set(nbrs[v])
    for i in range(k):
        i_nbrs = [u for u in nbrs[v] if colors[u] == i]
        for j in range(k):
            if j == i:
                continue
            seen = set(i_nbrs)
            queue = deque(i_nbrs)
            blocked = False
            while queue and not blocked:
                u = queue.popleft()
                for w in nbrs[u]:
                    if w in seen or colors[w] not in (i, j):
                        continue
                    if colors[w] == j and w in nbr_set:
                        blocked = True
                        break
                    seen.add(w)
                    queue.append(w)
            if blocked:
                continue
            for u in seen:
                colors[u] = j if colors[u] == i else i
            return i
    return None


def greedy_color(adjacency: np.ndarray, ordering: Sequence[int], interchange: bool = True) -> List[int]:
    """First-fit coloring along ``ordering``; colors are 0, 1, 2, ...

    With ``interchange`` set, a vertex that would need a fresh color first
    tries a bichromatic interchange among the existing colors; pairs (i, j)
    are scanned in ascending order and the first success is taken.
    """
    adjacency = np.asarray(adjacency, dtype=bool)
    n = adjacency.shape[0]
    if sorted(ordering) != list(range(n)):
        raise ValueError("ordering must be a permutation of the vertices")
    nbrs = _neighbors(adjacency)
    colors = [-1] * n
    k = 0
    for v in ordering:
        used = {colors[u] for u in nbrs[v] if colors[u] >= 0}
        c = 0
        while c in used:
            c += 1
        if c == k and interchange and k >= 2:
            freed = _try_interchange(v, colors, nbrs, k)
            if freed is not None:
                c = freed
        colors[v] = c
        k = max(k, c + 1)
    return colors


def greedy_color_with_interchange(adjacency: np.ndarray, ordering: Sequence[int]) -> List[int]:
    return greedy_color(adjacency, ordering, interchange=True)


def cover_graph(adjacency: np.ndarray) -> CliqueCover:
    """Clique cover of a graph via coloring its complement."""
    adjacency = np.asarray(adjacency, dtype=bool)
    n = adjacency.shape[0]
    complement = ~adjacency
    np.fill_diagonal(complement, False)
    colors = greedy_color_with_interchange(complement, smallest_last_ordering(complement))
    classes = {}
    for v, c in enumerate(colors):
        classes.setdefault(c, []).append(v)
    cliques = tuple(tuple(classes[c]) for c in sorted(classes))
    for clique in cliques:
        sub = adjacency[np.ix_(clique, clique)]
        assert sub.sum() == len(clique) * (len(clique) - 1), "color class is not a clique"
    assert sum(len(c) for c in cliques) == n
    return CliqueCover(cliques)


def clique_cover(
    points: Sequence[WorldGroundPoint], t_g: float, t_d: Optional[float] = None
) -> CliqueCover:
    return cover_graph(build_fusion_graph(points, t_g, t_d).adjacency)


def fuse(cover: CliqueCover, points: Sequence[WorldGroundPoint]) -> List[FusedDetection]:
    """Average every clique of two or more points; singletons are dropped."""
    out = []
    for clique in cover.cliques:
        if len(clique) < 2:
            continue
        members = [points[i] for i in clique]
        out.append(
            FusedDetection(
                X=float(np.mean([p.X for p in members])),
                Y=float(np.mean([p.Y for p in members])),
                member_count=len(members),
                contributing=tuple((p.camera_id, p.detection_id) for p in members),
            )
        )
    return out


def fuse_clique_cover(
    points: Sequence[WorldGroundPoint], t_g: float, t_d: Optional[float] = None
) -> List[FusedDetection]:
    points = list(points)
    return fuse(clique_cover(points, t_g, t_d), points)


def _grid_shape(aoi: AreaOfInterest, resolution: float) -> Tuple[int, int]:
    if resolution <= 0:
        raise EmptyGrid("grid resolution must be positive")
    nx = int(round((aoi.x_max - aoi.x_min) / resolution))
    ny = int(round((aoi.y_max - aoi.y_min) / resolution))
    if nx < 1 or ny < 1:
        raise EmptyGrid(f"AOI {aoi.as_tuple()} at {resolution} m/cell has no cells")
    return nx, ny


def camera_heatmap(
    points: Sequence[WorldGroundPoint],
    aoi: AreaOfInterest,
    resolution: float = 0.025,
    kernel_radius: float = 0.8,
    sigma: float = 10.1,
) -> np.ndarray:
    """Rasterize unnormalized Gaussians (peak 1) for one camera's points.

    The result has shape (nx, ny) indexed [ix, iy]. ``sigma`` is in grid cells;
    overlapping kernels are max-combined so no cell exceeds 1.
    """
    nx, ny = _grid_shape(aoi, resolution)
    heat = np.zeros((nx, ny))
    r_cells = kernel_radius / resolution
    span = int(np.ceil(r_cells))
    for p in points:
        # continuous position in cell units, cell centers at integer + 0.5
        gx = (p.X - aoi.x_min) / resolution - 0.5
        gy = (p.Y - aoi.y_min) / resolution - 0.5
        cx, cy = int(round(gx)), int(round(gy))
        x0, x1 = max(cx - span, 0), min(cx + span + 1, nx)
        y0, y1 = max(cy - span, 0), min(cy + span + 1, ny)
        if x0 >= x1 or y0 >= y1:
            continue
        ix = np.arange(x0, x1)[:, None]
        iy = np.arange(y0, y1)[None, :]
        d2 = (ix - gx) ** 2 + (iy - gy) ** 2
        k = np.exp(-d2 / (2.0 * sigma**2))
        k[d2 > r_cells**2] = 0.0
        np.maximum(heat[x0:x1, y0:y1], k, out=heat[x0:x1, y0:y1])
    return heat


def find_peaks(heat: np.ndarray, min_distance_cells: float, min_value: float) -> List[Tuple[int, int]]:
    """Local maxima at least ``min_value`` high, thinned so that no two kept
    peaks are closer than ``min_distance_cells`` (strongest kept first)."""
    local = ndimage.maximum_filter(heat, size=3, mode="constant", cval=-np.inf)
    ix, iy = np.nonzero((heat == local) & (heat >= min_value))
    if ix.size == 0:
        return []
    order = np.lexsort((iy, ix, -heat[ix, iy]))
    kept: List[Tuple[int, int]] = []
    for o in order:
        cand = (int(ix[o]), int(iy[o]))
        if all((cand[0] - a) ** 2 + (cand[1] - b) ** 2 >= min_distance_cells**2 for a, b in kept):
            kept.append(cand)
    return kept


def average_heatmap_fuse(
    points: Sequence[WorldGroundPoint],
    aoi: AreaOfInterest,
    camera_count: int,
    resolution: float = 0.025,
    kernel_radius: float = 0.8,
    sigma: float = 10.1,
    min_distance: float = 0.5,
    min_value: float = 0.3,
) -> List[FusedDetection]:
    """Average-heatmap baseline fuser.

    One heatmap per camera, averaged over ``camera_count`` cameras (cameras
    without points contribute zeros); detections are peaks of the average.
    """
    if camera_count < 1:
        raise ValueError("camera_count must be at least 1")
    logger.debug(
        "average heatmap: sigma=%.3g cells (%.4g m) at %.4g m/cell", sigma, sigma * resolution, resolution
    )
    nx, ny = _grid_shape(aoi, resolution)
    total = np.zeros((nx, ny))
    by_camera = {}
    for p in points:
        by_camera.setdefault(p.camera_id, []).append(p)
    for cam in sorted(by_camera):
        total += camera_heatmap(by_camera[cam], aoi, resolution, kernel_radius, sigma)
    total /= camera_count
    peaks = find_peaks(total, min_distance / resolution, min_value)
    return [
        FusedDetection(
            X=aoi.x_min + (i + 0.5) * resolution,
            Y=aoi.y_min + (j + 0.5) * resolution,
            member_count=0,
        )
        for i, j in peaks
    ]
