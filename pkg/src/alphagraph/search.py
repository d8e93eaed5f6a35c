"""Greedy (beam) search, brute-force ground truth and recall."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from alphagraph import _kernels as K
from alphagraph.core import Dataset
from alphagraph.graph import ProximityGraph


@dataclass(frozen=True)
class SearchResult:
    top_k: list[int]
    distances: list[float]
    visited: list[int]
    hops: int

    @property
    def visited_set(self) -> frozenset[int]:
        return frozenset(self.visited)


def _query_args(ds: Dataset, query):
    """Resolve a query into ``(qvec, qidx)`` for the kernels."""
    if isinstance(query, (int, np.integer)):
        q = int(query)
        if not 0 <= q < ds.n:
            raise IndexError(f"query index {q} out of range")
        return (ds.points[q] if ds.euclidean else np.empty(0)), q
    if not ds.euclidean:
        raise ValueError("general-metric search needs a dataset index as the query")
    qvec = np.ascontiguousarray(query, dtype=np.float64)
    if qvec.shape != (ds.d,):
        raise ValueError(f"query has shape {qvec.shape}, dataset dimension is {ds.d}")
    return qvec, -1


def greedy_search(g: ProximityGraph, ds: Dataset, query, k: int, L: int) -> SearchResult:
    """Best-first search from ``g.start`` with a beam of ``L``; returns the closest ``k`` found."""
    if k < 1 or k > L:
        raise ValueError(f"need 1 <= k <= L, got k={k}, L={L}")
    if g.n != ds.n:
        raise ValueError("graph and dataset sizes differ")
    qvec, qidx = _query_args(ds, query)
    ids, keys, visited = K.search_one(
        g.table, g.degrees, *ds.kernel_args(), qvec, qidx, g.start, k, L
    )
    dists = np.sqrt(keys) if ds.euclidean else keys
    return SearchResult(ids.tolist(), dists.tolist(), visited.tolist(), len(visited))


def search_batch(g: ProximityGraph, ds: Dataset, queries, k: int, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Search every query; returns ``(ids, hops)`` with ids padded by -1 when fewer than k are found.

    ``queries`` is an ``m x d`` array (Euclidean) or a vector of dataset
    indices (either metric).
    """
    if k < 1 or k > L:
        raise ValueError(f"need 1 <= k <= L, got k={k}, L={L}")
    q = np.asarray(queries)
    points, matrix, euclid = ds.kernel_args()
    if q.ndim == 1 and np.issubdtype(q.dtype, np.integer):
        qidxs = q.astype(np.int64)
        if qidxs.size and (qidxs.min() < 0 or qidxs.max() >= ds.n):
            raise IndexError("query index out of range")
        qmat = points[qidxs] if euclid else np.empty((1, 0))
    else:
        if not euclid:
            raise ValueError("general-metric search needs dataset indices as queries")
        qmat = np.ascontiguousarray(q, dtype=np.float64)
        if qmat.ndim != 2 or qmat.shape[1] != ds.d:
            raise ValueError(f"queries have shape {qmat.shape}, dataset dimension is {ds.d}")
        qidxs = np.full(qmat.shape[0], -1, dtype=np.int64)
    m = qidxs.shape[0]
    out = np.empty((m, k), dtype=np.int64)
    hops = np.empty(m, dtype=np.int64)
    K.search_batch(g.table, g.degrees, points, matrix, euclid, qmat, qidxs, g.start, k, L, out, hops)
    return out, hops


def brute_force_knn(ds: Dataset, queries, k: int) -> np.ndarray:
    """Exact k nearest dataset indices per query, ties by index, by full scan."""
    if k < 1 or k > ds.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}")
    q = np.asarray(queries)
    if q.ndim == 1 and np.issubdtype(q.dtype, np.integer):
        if ds.euclidean:
            q = ds.points[q]
        else:
            rows = ds.matrix[q]
            return np.argsort(rows, axis=1, kind="stable")[:, :k]
    elif not ds.euclidean:
        raise ValueError("general-metric ground truth needs dataset indices as queries")
    q = np.asarray(q, dtype=np.float64)
    if q.ndim == 1:
        q = q[None, :]
    pts = ds.points
    out = np.empty((q.shape[0], k), dtype=np.int64)
    chunk = max(1, 4_000_000 // (pts.shape[0] * pts.shape[1]))
    for lo in range(0, q.shape[0], chunk):
        block = q[lo : lo + chunk]
        diff = pts[None, :, :] - block[:, None, :]
        sq = np.einsum("qnd,qnd->qn", diff, diff)
        out[lo : lo + chunk] = np.argsort(sq, axis=1, kind="stable")[:, :k]
    return out


def recall_at_k(result, truth, k: int) -> float:
    """|result[:k] intersect truth[:k]| / k."""
    if k <= 0:
        raise ValueError("k must be positive")
    got = {int(x) for x in list(result)[:k] if int(x) >= 0}
    return len(got & {int(x) for x in list(truth)[:k]}) / k


def mean_recall(results: np.ndarray, truth: np.ndarray, k: int) -> float:
    return float(np.mean([recall_at_k(r, t, k) for r, t in zip(results, truth)]))
