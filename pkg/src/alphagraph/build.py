"""Index construction: slow preprocessing and the Vamana heuristic."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from alphagraph import _kernels as K
from alphagraph._parallel import map_ranges
from alphagraph.core import Dataset, medoid
from alphagraph.graph import ProximityGraph


@dataclass(frozen=True)
class VamanaParams:
    alpha: float = 1.2
    R: int = 70
    L_build: int = 75
    seed: int = 0

    def __post_init__(self):
        if not self.alpha >= 1:
            raise ValueError("alpha must be >= 1")
        if self.R < 1 or self.L_build < 1:
            raise ValueError("R and L_build must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def build_slow(ds: Dataset, alpha: float, threads: int | None = None) -> ProximityGraph:
    """RobustPrune(p, P minus {p}, alpha, unbounded) at every vertex.

    The result is alpha-reachable.  O(n^3) in the worst case; meant for
    small datasets.
    """
    if not alpha > 1:
        raise ValueError("slow preprocessing needs alpha > 1")
    if ds.n < 2:
        raise ValueError("slow preprocessing needs at least two points")
    g = ProximityGraph(ds.n, medoid(ds, threads), capacity=ds.n - 1)
    args = ds.kernel_args()
    map_ranges(
        lambda lo, hi: K.slow_range(g.table, g.degrees, *args, float(alpha), lo, hi),
        ds.n,
        threads,
    )
    g.shrink_to_fit()
    return g


def random_init(n: int, R: int, rng: np.random.Generator) -> np.ndarray:
    """``n x R`` table of distinct random out-neighbours, none equal to its row."""
    table = np.empty((n, R), dtype=np.int64)
    for p in range(n):
        picks = rng.choice(n - 1, size=R, replace=False)
        picks[picks >= p] += 1
        table[p] = picks
    return table


def build_vamana(ds: Dataset, params: VamanaParams) -> ProximityGraph:
    """Two-pass Vamana: random R-regular start, then passes at alpha=1 and params.alpha.

    Each pass visits vertices in one seeded permutation: greedy search from
    the medoid for the vertex's own point, RobustPrune over the visited set
    plus current neighbours, then back-edges with overflow pruning.
    """
    n, R = ds.n, params.R
    if R >= n:
        raise ValueError(f"R={R} must be smaller than n={n}")
    rng = np.random.default_rng(params.seed)
    start = medoid(ds)
    g = ProximityGraph(n, start, capacity=0)
    g.table = random_init(n, R, rng)
    g.degrees = np.full(n, R, dtype=np.int64)
    perm = rng.permutation(n).astype(np.int64)
    alphas = np.array([1.0, float(params.alpha)])
    K.vamana_passes(g.table, g.degrees, *ds.kernel_args(), start, perm, alphas, R, int(params.L_build))
    return g
