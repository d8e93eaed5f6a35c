"""Datasets, metrics and whole-dataset statistics."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from alphagraph import _kernels as K
from alphagraph._parallel import map_ranges

_EMPTY2 = np.empty((0, 0))


class MetricKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    GENERAL = "general"


class Dataset:
    """An immutable set of ``n`` distinct points under a metric.

    Use :meth:`from_points` for Euclidean coordinates and :meth:`from_matrix`
    for an explicit distance matrix.  Both copy and freeze their input.
    """

    def __init__(self, points: np.ndarray | None, matrix: np.ndarray | None):
        if (points is None) == (matrix is None):
            raise ValueError("exactly one of points/matrix must be given")
        self._points = points
        self._matrix = matrix

    @classmethod
    def from_points(cls, points) -> Dataset:
        arr = np.array(points, dtype=np.float64, order="C")
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"points must be a non-empty n x d array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        if np.unique(arr, axis=0).shape[0] != arr.shape[0]:
            raise ValueError("dataset contains duplicate points")
        arr.flags.writeable = False
        return cls(arr, None)

    @classmethod
    def from_matrix(cls, matrix, validate: bool = True, tol: float = 1e-12) -> Dataset:
        arr = np.array(matrix, dtype=np.float64, order="C")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"distance matrix must be square and non-empty, got {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("distances must be finite and nonnegative")
        if np.any(np.diag(arr) != 0):
            raise ValueError("distance matrix must have a zero diagonal")
        if not np.array_equal(arr, arr.T):
            raise ValueError("distance matrix must be symmetric")
        off = arr[~np.eye(arr.shape[0], dtype=bool)]
        if np.any(off == 0):
            raise ValueError("dataset contains duplicate points (zero off-diagonal distance)")
        if validate:
            bad = triangle_violations(arr, tol)
            if bad:
                i, j, k = bad[0]
                raise ValueError(f"triangle inequality fails for ({i}, {j}) via {k}")
        arr.flags.writeable = False
        return cls(None, arr)

    @property
    def metric(self) -> MetricKind:
        return MetricKind.EUCLIDEAN if self._points is not None else MetricKind.GENERAL

    @property
    def euclidean(self) -> bool:
        return self._points is not None

    @property
    def n(self) -> int:
        return (self._points if self._points is not None else self._matrix).shape[0]

    @property
    def d(self) -> int | None:
        return self._points.shape[1] if self._points is not None else None

    @property
    def points(self) -> np.ndarray | None:
        return self._points

    @property
    def matrix(self) -> np.ndarray | None:
        return self._matrix

    def kernel_args(self) -> tuple[np.ndarray, np.ndarray, bool]:
        if self._points is not None:
            return self._points, _EMPTY2, True
        return _EMPTY2, self._matrix, False

    def raw_bytes(self) -> bytes:
        """Little-endian float64 bytes of the coordinates (or the matrix)."""
        arr = self._points if self._points is not None else self._matrix
        return np.ascontiguousarray(arr, dtype="<f8").tobytes()

    def distance(self, i: int, j: int) -> float:
        n = self.n
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"index out of range for dataset of size {n}: ({i}, {j})")
        return float(K.pairwise_distance(*self.kernel_args(), int(i), int(j)))

    def distances_to(self, query) -> np.ndarray:
        """Distances from every point to ``query`` (a coordinate vector or an index)."""
        if isinstance(query, (int, np.integer)):
            if not 0 <= query < self.n:
                raise IndexError(f"query index {query} out of range")
            if self._matrix is not None:
                return self._matrix[query].copy()
            query = self._points[query]
        if self._points is None:
            raise ValueError("general-metric datasets only accept dataset indices as queries")
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.d,):
            raise ValueError(f"query has shape {q.shape}, dataset dimension is {self.d}")
        return np.sqrt(((self._points - q) ** 2).sum(axis=1))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        if self._points is not None:
            return f"Dataset(n={self.n}, d={self.d}, metric=euclidean)"
        return f"Dataset(n={self.n}, metric=general)"


def triangle_violations(matrix: np.ndarray, tol: float = 1e-9, limit: int = 1) -> list[tuple]:
    """All-triples check; returns up to ``limit`` offending (i, j, k) with D(i,j) > D(i,k)+D(k,j)+tol."""
    D = np.asarray(matrix, dtype=np.float64)
    found = []
    for k in range(D.shape[0]):
        via = D[:, k][:, None] + D[k, :][None, :]
        bad = np.argwhere(D > via + tol)
        for i, j in bad[: limit - len(found)]:
            found.append((int(i), int(j), k))
        if len(found) >= limit:
            break
    return found


def sample_triangle_check(ds: Dataset, samples: int = 1000, seed: int = 0, tol: float = 1e-9) -> bool:
    """Randomized-triple triangle check on the induced metric of ``ds``."""
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, ds.n, size=(samples, 3))
    for i, j, k in idx:
        if ds.distance(i, j) > ds.distance(i, k) + ds.distance(k, j) + tol:
            return False
    return True


def distance(ds: Dataset, i: int, j: int) -> float:
    return ds.distance(i, j)


def medoid(ds: Dataset, threads: int | None = None) -> int:
    """Index minimising the sum of distances to all other points; ties to the lowest index."""
    if ds.n == 1:
        return 0
    if not ds.euclidean:
        return int(np.argmin(ds.matrix.sum(axis=1)))
    pts = ds.points
    sums = np.concatenate(map_ranges(lambda lo, hi: K.distance_sums(pts, lo, hi), ds.n, threads))
    return int(np.argmin(sums))


@dataclass(frozen=True)
class AspectRatio:
    delta: float
    min_distance: float
    max_distance: float

    def __float__(self) -> float:
        return self.delta


def aspect_ratio(ds: Dataset) -> AspectRatio:
    if ds.n < 2:
        raise ValueError("aspect ratio needs at least two points")
    lo, hi = K.min_max_key(*ds.kernel_args())
    lo = float(K.key_to_distance(lo, ds.euclidean))
    hi = float(K.key_to_distance(hi, ds.euclidean))
    return AspectRatio(hi / lo, lo, hi)


def _draw(rng: np.random.Generator, m: int, d: int, dist: str, centers: np.ndarray | None) -> np.ndarray:
    if dist == "uniform_cube":
        pts = rng.random((m, d))
    elif dist == "gaussian":
        pts = rng.standard_normal((m, d))
    else:
        labels = rng.integers(0, centers.shape[0], size=m)
        pts = centers[labels] + rng.standard_normal((m, d))
    # float32-representable so vector files round-trip exactly
    return pts.astype(np.float32).astype(np.float64)


def parse_dist(spec: str) -> tuple[str, int]:
    """``"clustered(4)"`` / ``"clustered:4"`` -> ``("clustered", 4)``."""
    s = spec.strip().lower()
    if s.startswith("clustered"):
        rest = s[len("clustered"):].strip("():")
        return "clustered", int(rest) if rest else 4
    if s not in ("uniform_cube", "gaussian"):
        raise ValueError(f"unknown distribution {spec!r}")
    return s, 0


def gen_random_points(n: int, d: int, seed: int, dist: str = "gaussian", k: int = 4) -> np.ndarray:
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    dist, parsed_k = parse_dist(dist)
    k = parsed_k or k
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-10.0, 10.0, size=(k, d)) if dist == "clustered" else None
    pts = _draw(rng, n, d, dist, centers)
    while True:
        _, first = np.unique(pts, axis=0, return_index=True)
        if first.size == n:
            return pts
        dup = np.setdiff1d(np.arange(n), first)
        pts[dup] = _draw(rng, dup.size, d, dist, centers)


def gen_random_dataset(n: int, d: int, seed: int, dist: str = "gaussian", k: int = 4) -> Dataset:
    """Seeded synthetic dataset; ``dist`` is uniform_cube, gaussian or clustered (with ``k`` centres)."""
    return Dataset.from_points(gen_random_points(n, d, seed, dist, k))
