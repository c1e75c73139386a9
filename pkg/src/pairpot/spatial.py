"""
Geometry primitives: cubic windows, erosion, point patterns and a cell grid.

The cell grid is the workhorse behind every pair sum in the package. It is
built once per (pattern, reach) and answers radius queries for many query
points at once by expanding each query over its 3**dim neighbouring cells.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Window",
    "ErodedRegion",
    "PointPattern",
    "CellGrid",
    "erode",
    "neighbors_within",
    "dist_to_pattern",
    "read_pattern_csv",
    "write_pattern_csv",
]


@dataclass(frozen=True)
class ErodedRegion:
    """Inner box ``[margin, side - margin]**dim`` of a cubic window."""

    dim: int
    side: float
    margin: float

    @property
    def lo(self) -> float:
        return self.margin

    @property
    def hi(self) -> float:
        return self.side - self.margin

    @property
    def is_empty(self) -> bool:
        return 2.0 * self.margin >= self.side

    @property
    def width(self) -> float:
        return max(self.side - 2.0 * self.margin, 0.0)

    @property
    def volume(self) -> float:
        return self.width**self.dim

    def contains(self, points) -> np.ndarray:
        """Boolean mask of points lying in the closed inner box."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        if self.is_empty:
            return np.zeros(len(pts), dtype=bool)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def erode(self, margin: float) -> "ErodedRegion":
        if margin < 0:
            raise ValueError(f"margin must be non-negative, got {margin}")
        return ErodedRegion(self.dim, self.side, self.margin + margin)


@dataclass(frozen=True)
class Window:
    """The observation window ``[0, side]**dim``."""

    dim: int
    side: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not (self.side > 0 and math.isfinite(self.side)):
            raise ValueError(f"side must be a positive finite number, got {self.side}")
        object.__setattr__(self, "side", float(self.side))

    @property
    def volume(self) -> float:
        return self.side**self.dim

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.all((pts >= 0.0) & (pts <= self.side), axis=1)

    def erode(self, margin: float) -> ErodedRegion:
        return erode(self, margin)


def erode(window: Window, margin: float) -> ErodedRegion:
    """Minkowski erosion of a cubic window by a ball of radius `margin`.

    For a cube this is the inner box ``[margin, side - margin]**dim``; it is
    empty (volume 0) once ``2 * margin >= side``.
    """
    if margin < 0:
        raise ValueError(f"margin must be non-negative, got {margin}")
    return ErodedRegion(window.dim, window.side, float(margin))


_OFFSETS = {d: np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=np.int64) for d in (1, 2, 3)}


class CellGrid:
    """Uniform cell index over ``[0, side]**dim`` with cell edge >= `reach`.

    Points are bucketed by cell and stored in cell-sorted order. A radius query
    with ``radius <= edge`` only needs the 3**dim cells around the query cell.

    Parameters
    ----------
    points : (n, dim) array
    side : float
        Window side length.
    reach : float
        Largest radius the index must answer without brute force.
    """

    def __init__(self, points: np.ndarray, side: float, reach: float):
        points = np.asarray(points, dtype=float)
        self.dim = points.shape[1]
        self.side = float(side)
        self.reach = float(reach)
        if self.reach <= 0:
            raise ValueError("reach must be positive")
        # floor keeps edge >= reach, so one ring of neighbour cells suffices
        self.ncell = max(1, int(math.floor(self.side / self.reach)))
        self.edge = self.side / self.ncell
        self.points = points
        self.n = len(points)
        # cells are indexed with a ring of empty padding cells on every face,
        # so neighbour offsets become plain shifts of the flat index
        self._stride = self.ncell + 2
        flat = self._flatten(self.cell_coords(points) + 1)
        self.order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self._stride**self.dim)
        self.counts = counts
        self.starts = np.cumsum(counts) - counts
        self._shifts = self._flatten(_OFFSETS[self.dim] + 1) - self._flatten(np.ones((1, self.dim), dtype=np.int64))

    def cell_coords(self, pts) -> np.ndarray:
        c = np.floor(np.asarray(pts, dtype=float) / self.edge).astype(np.int64)
        return np.clip(c, 0, self.ncell - 1)

    def _flatten(self, cells: np.ndarray) -> np.ndarray:
        flat = np.zeros(len(cells), dtype=np.int64)
        for k in range(self.dim):
            flat = flat * self._stride + cells[:, k]
        return flat

    def candidates(self, queries: np.ndarray):
        """All (query index, point index) pairs sharing a neighbouring cell.

        Returns two int arrays of equal length, ordered by query then by offset.
        """
        queries = np.asarray(queries, dtype=float).reshape(-1, self.dim)
        qcells = self.cell_coords(queries)
        nq = len(queries)
        if self.n == 0 or nq == 0:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty
        flat = (self._flatten(qcells + 1)[:, None] + self._shifts[None, :]).ravel()
        qi = np.repeat(np.arange(nq, dtype=np.int64), len(self._shifts))
        cnt = self.counts[flat]
        nz = cnt > 0
        qi, cnt, start = qi[nz], cnt[nz], self.starts[flat[nz]]
        total = int(cnt.sum())
        if total == 0:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty
        first = np.repeat(np.cumsum(cnt) - cnt, cnt)
        pos = np.arange(total, dtype=np.int64) - first + np.repeat(start, cnt)
        return np.repeat(qi, cnt), self.order[pos]

    def query_pairs(self, queries: np.ndarray, radius: float, *, exclude_zero: bool = True, sort: bool = False):
        """Pairs ``(q, p, dist)`` with ``dist(queries[q], points[p]) <= radius``.

        Falls back to a dense scan when `radius` exceeds the cell edge.
        Coincident pairs (distance 0) are dropped when `exclude_zero` is set,
        which removes a pattern point from its own neighbourhood. With `sort`
        the result is ordered by query, then by stored point index.
        """
        queries = np.asarray(queries, dtype=float).reshape(-1, self.dim)
        if radius > self.edge:
            qi, pj = _dense_candidates(len(queries), self.n)
        else:
            qi, pj = self.candidates(queries)
        if len(qi) == 0:
            return qi, pj, np.zeros(0)
        diff = queries[qi] - self.points[pj]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        keep = dist <= radius
        if exclude_zero:
            keep &= dist > 0.0
        qi, pj, dist = qi[keep], pj[keep], dist[keep]
        if sort:
            o = np.lexsort((pj, qi))
            qi, pj, dist = qi[o], pj[o], dist[o]
        return qi, pj, dist

    def self_pairs(self, radius: float):
        """Ordered pairs ``(i, j, dist)``, i != j, of stored points within `radius`."""
        # drop self matches by index; distinct points closer than ~1e-154 have a zero computed distance
        qi, pj, dist = self.query_pairs(self.points, radius, exclude_zero=False)
        keep = qi != pj
        return qi[keep], pj[keep], dist[keep]

    def count_within(self, queries: np.ndarray, radius: float, exclude=None) -> np.ndarray:
        """Number of stored points within `radius` of each query point.

        `exclude` optionally gives, per query, one stored index not to count.
        """
        queries = np.asarray(queries, dtype=float).reshape(-1, self.dim)
        qi, pj, _ = self.query_pairs(queries, radius, exclude_zero=False)
        if exclude is not None:
            exclude = np.asarray(exclude, dtype=np.int64)
            keep = pj != exclude[qi]
            qi = qi[keep]
        return np.bincount(qi, minlength=len(queries))


def _dense_candidates(nq: int, n: int):
    qi = np.repeat(np.arange(nq, dtype=np.int64), n)
    pj = np.tile(np.arange(n, dtype=np.int64), nq)
    return qi, pj


@dataclass(frozen=True, eq=False)
class PointPattern:
    """A finite, duplicate-free set of points inside a cubic window.

    Points keep their insertion order; every sum in the package iterates in
    that order so results are reproducible for a fixed seed.
    """

    window: Window
    points: np.ndarray
    _grids: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.size == 0:
            pts = pts.reshape(0, self.window.dim)
        if pts.ndim != 2 or pts.shape[1] != self.window.dim:
            raise ValueError(f"points must have shape (n, {self.window.dim}), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if not np.all(self.window.contains(pts)):
            raise ValueError("all points must lie inside the window")
        if len(pts) > 1 and _has_duplicates(pts):
            raise ValueError("pattern contains duplicate points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.window.dim

    def __len__(self) -> int:
        return len(self.points)

    def grid(self, reach: float) -> CellGrid:
        """Cell index whose edge is at least `reach` (cached per reach)."""
        key = float(reach)
        g = self._grids.get(key)
        if g is None:
            g = CellGrid(self.points, self.window.side, key)
            self._grids[key] = g
        return g

    def without(self, indices) -> "PointPattern":
        keep = np.ones(len(self), dtype=bool)
        keep[np.atleast_1d(indices)] = False
        return PointPattern(self.window, self.points[keep])

    def with_points(self, new_points) -> "PointPattern":
        new = np.asarray(new_points, dtype=float).reshape(-1, self.dim)
        return PointPattern(self.window, np.vstack([self.points, new]))


def _has_duplicates(pts: np.ndarray) -> bool:
    # cheap screen on the first coordinate; full row comparison only on ties
    first = np.sort(pts[:, 0])
    if not np.any(first[1:] == first[:-1]):
        return False
    return len(np.unique(pts, axis=0)) != len(pts)


def _as_point(u, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape != (dim,):
        raise ValueError(f"expected a point of dimension {dim}, got shape {u.shape}")
    return u


def neighbors_within(pattern: PointPattern, u, radius: float):
    """Points of `pattern` at Euclidean distance ``<= radius`` from `u`.

    `u` itself is excluded when it is a pattern point. Returns a list of
    ``(point, distance)`` tuples in insertion order. Radii larger than any
    cached grid's cell edge are answered by brute force.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    u = _as_point(u, pattern.dim)
    if len(pattern) == 0:
        return []
    _, pj, dist = pattern.grid(radius).query_pairs(u[None, :], radius, sort=True)
    return [(tuple(pattern.points[j]), float(d)) for j, d in zip(pj, dist)]


def dist_to_pattern(u, pattern: PointPattern) -> float:
    """Distance from `u` to the nearest point of `pattern` (``inf`` if empty)."""
    u = _as_point(u, pattern.dim)
    if len(pattern) == 0:
        return math.inf
    diff = pattern.points - u
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", diff, diff))))


def write_pattern_csv(pattern: PointPattern, path) -> None:
    """Write ``# dim=<d> side=<L>`` then one comma-separated point per line."""
    lines = [f"# dim={pattern.dim} side={pattern.window.side!r}"]
    for p in pattern.points:
        lines.append(",".join(f"{c:.17g}" for c in p))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_pattern_csv(path) -> PointPattern:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing '# dim=<d> side=<L>' header")
    meta = {}
    for tok in text[0][1:].split():
        key, _, val = tok.partition("=")
        meta[key] = val
    try:
        dim = int(meta["dim"])
        side = float(meta["side"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed header {text[0]!r}") from exc
    rows = [list(map(float, line.split(","))) for line in text[1:] if line.strip()]
    pts = np.array(rows, dtype=float).reshape(-1, dim)
    return PointPattern(Window(dim, side), pts)
