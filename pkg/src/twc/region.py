"""Rate regions: Shannon's inner and outer bounds and the capacity region.

A :class:`RateRegion` is a closed, convex, downward-closed subset of the
nonnegative quadrant stored only through its Pareto vertices, ordered by
increasing ``r1`` (so ``r2`` strictly decreases).
"""
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .channel import Direction, RatePair, conditional_mi_batch, marginals
from .probcore import check_dist, check_joint, mutual_information

GRID_WARN_POINTS = 10**7
_CHUNK = 1 << 16


class RegionError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Simplex grid with denominator ``resolution``."""

    resolution: int

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 1:
            raise RegionError(f"grid resolution must be a positive integer, got {self.resolution!r}")

    @classmethod
    def default_for(cls, n):
        """1000 for a binary alphabet, 50 otherwise."""
        return cls(1000 if n <= 2 else 50)


@dataclass
class RateRegion:
    frontier: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.frontier, dtype=float).reshape(-1, 2)
        if f.shape[0] == 0:
            raise RegionError("rate region needs at least one frontier vertex")
        if np.any(f < 0):
            raise RegionError("rate pairs must be nonnegative")
        self.frontier = f

    @property
    def pairs(self):
        return [RatePair(float(a), float(b)) for a, b in self.frontier]

    @property
    def r1_max(self):
        return float(self.frontier[-1, 0])

    @property
    def r2_max(self):
        return float(self.frontier[0, 1])

    def upper(self, r1):
        """Largest ``r2`` in the region at each ``r1``; ``-inf`` where ``r1`` is outside ``[0, r1_max]``."""
        r1 = np.asarray(r1, dtype=float)
        f = self.frontier
        out = np.interp(r1, f[:, 0], f[:, 1], left=f[0, 1], right=-np.inf)
        return np.where((r1 < 0) | (r1 > f[-1, 0]), -np.inf, out)

    def contains(self, point, tol=0.0):
        """Whether a rate pair lies in the region, allowing ``tol`` slack in each coordinate."""
        r1, r2 = point
        if r1 < -tol or r2 < -tol or r1 > self.r1_max + tol:
            return False
        return bool(r2 <= self.upper(min(max(r1 - tol, 0.0), self.r1_max)) + tol)

    def boundary(self):
        """Closed boundary chain from ``(0, r2_max)`` through the vertices to ``(r1_max, 0)``."""
        f = self.frontier
        return np.vstack([[0.0, f[0, 1]], f, [f[-1, 0], 0.0]])

    def polygon(self):
        return np.vstack([[0.0, 0.0], self.boundary()])

    def to_csv(self):
        lines = ["r1,r2"] + [f"{a:.12g},{b:.12g}" for a, b in self.frontier]
        return "\n".join(lines) + "\n"

    def to_dict(self, tol=1e-9):
        return {
            "frontier": [[float(a), float(b)] for a, b in self.frontier],
            "rectangle": is_rectangle(self, tol),
            "metadata": self.metadata,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def simplex_grid(n, k):
    """All pmfs on ``n`` symbols with denominator ``k``, as an array ``(N, n)``.

    Rows are the compositions of ``k`` into ``n`` parts in lexicographic order.
    """
    if n < 1 or k < 1:
        raise RegionError("need n >= 1 and k >= 1")
    if n == 1:
        return np.ones((1, 1))
    bars = np.array(list(combinations(range(k + n - 1), n - 1)), dtype=np.int64)
    edges = np.hstack([np.full((bars.shape[0], 1), -1), bars, np.full((bars.shape[0], 1), k + n - 1)])
    return (np.diff(edges, axis=1) - 1) / k


def grid_size(n, k):
    return math.comb(k + n - 1, n - 1)


def _warn_cost(points):
    if points > GRID_WARN_POINTS:
        warnings.warn(f"grid has {points:.3g} points; this may take a long time", RuntimeWarning, stacklevel=3)


def _threads():
    try:
        n = int(os.environ.get("TWC_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _map_chunks(func, items, size=_CHUNK):
    # chunked evaluation; results concatenated in input order regardless of thread count
    chunks = [items[i:i + size] for i in range(0, len(items), size)] or [items]
    threads = min(_threads(), len(chunks))
    if threads <= 1:
        return np.concatenate([func(c) for c in chunks])
    with ThreadPoolExecutor(threads) as pool:
        return np.concatenate(list(pool.map(func, chunks)))


def rate_pair(twc, joint):
    """``(I(X1; Y2 | X2), I(X2; Y1 | X1))`` under the input joint pmf."""
    joint = check_joint(joint, shape=(twc.nx1, twc.nx2))
    r = conditional_mi_batch(twc, joint, Direction.FORWARD), conditional_mi_batch(twc, joint, Direction.BACKWARD)
    return RatePair(float(r[0]), float(r[1]))


def product_rate_pairs(twc, p1s, p2s):
    """Rate pairs for every product ``p1 x p2`` with ``p1`` in ``p1s`` and ``p2`` in ``p2s``.

    Returns two arrays of shape ``(len(p1s), len(p2s))``. Under a product
    input the forward rate is ``sum_x2 p2(x2) I(p1, W_x2)`` and symmetrically
    for the backward rate, so only per-state mutual informations are needed.
    """
    p1s = np.atleast_2d(np.asarray(p1s, dtype=float))
    p2s = np.atleast_2d(np.asarray(p2s, dtype=float))
    fwd = np.stack([mutual_information(p1s, w) for w in marginals(twc, Direction.FORWARD)], axis=1)
    bwd = np.stack([mutual_information(p2s, w) for w in marginals(twc, Direction.BACKWARD)], axis=1)
    return np.maximum(fwd @ p2s.T, 0.0), np.maximum(p1s @ bwd.T, 0.0)


def pareto_hull(points):
    """Frontier of the closed convex hull of the downward closure of ``points``.

    Dominated and duplicate points are dropped, then an upper monotone chain
    keeps the vertices of the concave majorant.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise RegionError("pareto_hull needs at least one point")
    pts = np.maximum(pts, 0.0)
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))  # r1 descending, then r2 descending
    pts = pts[order]
    best_r2 = np.maximum.accumulate(np.concatenate([[-np.inf], pts[:-1, 1]]))
    pareto = pts[pts[:, 1] > best_r2][::-1]  # r1 ascending, r2 strictly descending
    chain = []
    for p in pareto:
        while len(chain) >= 2:
            (ax, ay), (bx, by) = chain[-2], chain[-1]
            # drop b unless it lies strictly above the chord a -> p
            if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) >= 0:
                chain.pop()
            else:
                break
        chain.append((float(p[0]), float(p[1])))
    return RateRegion(np.array(chain))


def is_rectangle(region, tol=1e-9):
    """True when every vertex is within ``tol`` of the corner ``(r1_max, r2_max)``."""
    f = region.frontier
    return bool(np.all(f[-1, 0] - f[:, 0] <= tol) and np.all(f[0, 1] - f[:, 1] <= tol))


def inner_bound(twc, grid):
    """Shannon's inner bound over product inputs with both factors on the grid."""
    k = grid.resolution
    g1, g2 = simplex_grid(twc.nx1, k), simplex_grid(twc.nx2, k)
    _warn_cost(len(g1) * len(g2))

    def sweep(chunk):
        r1, r2 = product_rate_pairs(twc, chunk, g2)
        return pareto_hull(np.column_stack([r1.ravel(), r2.ravel()])).frontier

    rows = max(1, (16 * _CHUNK) // len(g2))
    frontier = pareto_hull(_map_chunks(sweep, g1, rows)).frontier
    return RateRegion(frontier, {"kind": "inner", "grid": k})


def outer_bound(twc, grid):
    """Shannon's outer bound over joint inputs on the grid of the ``nx1*nx2`` simplex."""
    k = grid.resolution
    n = twc.nx1 * twc.nx2
    _warn_cost(grid_size(n, k))
    joints = simplex_grid(n, k).reshape(-1, twc.nx1, twc.nx2)

    def sweep(chunk):
        r1 = conditional_mi_batch(twc, chunk, Direction.FORWARD)
        r2 = conditional_mi_batch(twc, chunk, Direction.BACKWARD)
        return pareto_hull(np.column_stack([r1, r2])).frontier

    frontier = pareto_hull(_map_chunks(sweep, joints)).frontier
    return RateRegion(frontier, {"kind": "outer", "grid": k})


def _holds(report, name):
    return report.verdicts[name].holds


def capacity_region(twc, report, grid=None):
    """Exact capacity region when ``report`` certifies that the bounds coincide.

    With a usable common maximizer in both directions the region is the
    rectangle cornered at the rate pair of ``P1* x P2*``. With one direction
    only, the other user's input sweeps its simplex grid while the certified
    user sends its common maximizer, and the resulting rate pairs are hulled.
    """
    if not report.tightness:
        raise RegionError("bounds are not certified to coincide; use inner_bound/outer_bound instead")
    fwd = report.pstar1 is not None and (_holds(report, "thm1_fwd") or _holds(report, "thm2_fwd"))
    bwd = report.pstar2 is not None and (_holds(report, "thm1_bwd") or _holds(report, "thm2_bwd"))
    if not (fwd or bwd):
        raise RegionError(
            "no certified common maximizer is available to trace the region; use inner_bound/outer_bound instead"
        )
    meta = {
        "kind": "capacity",
        "pstar1": None if report.pstar1 is None else [float(x) for x in report.pstar1],
        "pstar2": None if report.pstar2 is None else [float(x) for x in report.pstar2],
    }
    if fwd and bwd:
        p1, p2 = check_dist(report.pstar1), check_dist(report.pstar2)
        r1, r2 = product_rate_pairs(twc, p1, p2)
        meta.update(path="rectangle", grid=None)
        return RateRegion(pareto_hull([[r1[0, 0], r2[0, 0]]]).frontier, meta)
    if fwd:
        k = (grid or GridSpec.default_for(twc.nx2)).resolution
        r1, r2 = product_rate_pairs(twc, report.pstar1, simplex_grid(twc.nx2, k))
        meta.update(path="sweep-user2", grid=k)
    else:
        k = (grid or GridSpec.default_for(twc.nx1)).resolution
        r1, r2 = product_rate_pairs(twc, simplex_grid(twc.nx1, k), report.pstar2)
        meta.update(path="sweep-user1", grid=k)
    return RateRegion(pareto_hull(np.column_stack([r1.ravel(), r2.ravel()])).frontier, meta)


def _point_region_distance(pts, region):
    # Euclidean distance from each point to the (convex) region; zero inside
    pts = np.atleast_2d(pts)
    inside = np.array([region.contains(p) for p in pts])
    chain = region.boundary()
    a, b = chain[:-1], chain[1:]
    ab = b - a
    denom = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
    t = np.clip(np.einsum("pk,sk->ps", pts, ab) - np.sum(a * ab, axis=1), 0.0, None) / denom
    t = np.minimum(t, 1.0)
    proj = a[None] + t[..., None] * ab[None]
    d = np.sqrt(np.sum((pts[:, None, :] - proj) ** 2, axis=2)).min(axis=1)
    return np.where(inside, 0.0, d)


def sample_frontier(region, n=1001):
    """Points on the upper boundary at ``n`` evenly spaced ``r1`` values in ``[0, r1_max]``."""
    r1 = np.linspace(0.0, region.r1_max, n)
    return np.column_stack([r1, region.upper(r1)])


def hausdorff_distance(a, b, samples=1001):
    """Hausdorff distance between two rate regions.

    Both regions are convex polygons, so the distance is attained at a vertex;
    the frontiers are additionally sampled at ``samples`` ``r1`` values.
    """
    pa = np.vstack([a.polygon(), sample_frontier(a, samples)])
    pb = np.vstack([b.polygon(), sample_frontier(b, samples)])
    return float(max(_point_region_distance(pa, b).max(), _point_region_distance(pb, a).max()))

