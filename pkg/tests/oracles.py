"""Independent brute-force oracles used to freeze expected values."""

import itertools
import math

import numpy as np

from pedfuse.geometry import CameraCalibration


def min_clique_cover_size(adj):
    """Exact minimum clique cover by exhaustive partition search with pruning."""
    n = len(adj)
    best = [n]
    groups = []

    def rec(v):
        if len(groups) >= best[0]:
            return
        if v == n:
            best[0] = len(groups)
            return
        for g in groups:
            if all(adj[v][u] for u in g):
                g.append(v)
                rec(v + 1)
                g.pop()
        groups.append([v])
        rec(v + 1)
        groups.pop()

    rec(0)
    return best[0]


def chromatic_number(adj):
    n = len(adj)
    for k in range(1, n + 1):
        for colors in itertools.product(range(k), repeat=n):
            if all(colors[u] != colors[v] for u in range(n) for v in range(u + 1, n) if adj[u][v]):
                return k
    return 0


def brute_force_matching(dets, anns, gate):
    """(cardinality, total distance) of the best gated matching, by permutation search."""
    n, m = len(dets), len(anns)
    s = max(n, m)
    best = (0, 0.0)
    for perm in itertools.permutations(range(s)):
        count, total = 0, 0.0
        for i in range(n):
            j = perm[i]
            if j < m:
                d = math.dist(dets[i], anns[j])
                if d < gate:
                    count += 1
                    total += d
        if count > best[0] or (count == best[0] and total < best[1]):
            best = (count, total)
    return best


def brute_force_edges(points, t_g, t_d=None):
    edges = set()
    for i, j in itertools.combinations(range(len(points)), 2):
        a, b = points[i], points[j]
        if a.camera_id == b.camera_id:
            continue
        if not math.dist((a.X, a.Y), (b.X, b.Y)) < t_g:
            continue
        if t_d is not None:
            u, v = np.asarray(a.descriptor), np.asarray(b.descriptor)
            cos = sum(x * y for x, y in zip(u, v)) / (math.sqrt(sum(x * x for x in u)) * math.sqrt(sum(y * y for y in v)))
            if not 1.0 - cos < t_d:
                continue
        edges.add((i, j))
    return edges


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_calibration(rng, camera_id=1):
    """A camera 2-20 m above ground looking roughly downwards at the origin area."""
    f = rng.uniform(300, 3000)
    K = np.array([[f, rng.uniform(-2, 2), rng.uniform(200, 1800)],
                  [0, f * rng.uniform(0.8, 1.2), rng.uniform(200, 1000)],
                  [0, 0, 1]])
    center = np.array([rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(2, 20)])
    target = np.array([rng.uniform(-10, 10), rng.uniform(-10, 10), 0.0])
    fwd = target - center
    fwd /= np.linalg.norm(fwd)
    right = np.cross(fwd, [0, 0, 1.0])
    right /= np.linalg.norm(right)
    down = np.cross(fwd, right)
    R = np.vstack([right, down, fwd])
    # random roll about the optical axis
    a = rng.uniform(-np.pi, np.pi)
    roll = np.array([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]])
    R = roll @ R
    return CameraCalibration(camera_id, K, R, -R @ center), target
