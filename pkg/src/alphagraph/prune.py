"""RobustPrune, its unsorted variant, and RP-Tuning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from alphagraph import _kernels as K
from alphagraph._parallel import map_ranges
from alphagraph.core import Dataset
from alphagraph.graph import ProximityGraph


class Unbounded:
    """No cap on out-degree."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNBOUNDED"


UNBOUNDED = Unbounded()


@dataclass(frozen=True)
class PruneParams:
    """Parameters of one RobustPrune call.

    With ``sorted=False`` the next kept neighbour is the lowest-index surviving
    candidate, or follows a seeded permutation when ``shuffle_seed`` is set.
    """

    alpha: float
    degree_bound: int | Unbounded = UNBOUNDED
    sorted: bool = True
    shuffle_seed: int | None = None

    def __post_init__(self):
        if not self.alpha >= 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if not isinstance(self.degree_bound, Unbounded):
            if int(self.degree_bound) != self.degree_bound or self.degree_bound < 1:
                raise ValueError(f"degree bound must be a positive integer, got {self.degree_bound}")

    @property
    def kernel_R(self) -> int:
        return -1 if isinstance(self.degree_bound, Unbounded) else int(self.degree_bound)

    @property
    def kernel_mode(self) -> int:
        if self.sorted:
            return K.ORDER_SORTED
        return K.ORDER_INDEX if self.shuffle_seed is None else K.ORDER_SHUFFLE

    @property
    def kernel_seed(self) -> int:
        return 0 if self.shuffle_seed is None else int(self.shuffle_seed)


def robust_prune(g: ProximityGraph, ds: Dataset, p: int, candidates, params: PruneParams) -> None:
    """Replace ``N_out(p)`` with RobustPrune over ``candidates`` plus the current list."""
    if g.n != ds.n:
        raise ValueError("graph and dataset sizes differ")
    if not 0 <= p < g.n:
        raise IndexError(f"vertex {p} out of range")
    cand = np.asarray(list(candidates), dtype=np.int64)
    if cand.size and (cand.min() < 0 or cand.max() >= g.n):
        raise IndexError("candidate index out of range")
    pool = np.union1d(cand, g.table[p, : g.degrees[p]])
    pool = pool[pool != p]
    out = np.empty(max(pool.size, 1), dtype=np.int64)
    cnt = K.robust_prune_into(
        *ds.kernel_args(), p, pool, float(params.alpha), params.kernel_R,
        params.kernel_mode, params.kernel_seed, out,
    )
    g.set_out_neighbors(p, out[:cnt])


def rp_tuning(
    g: ProximityGraph,
    ds: Dataset,
    alpha2: float,
    sorted: bool = True,
    shuffle_seed: int | None = None,
    threads: int | None = None,
) -> None:
    """RobustPrune(p, N_out(p), alpha2, unbounded) at every vertex, in place.

    Each vertex reads and writes only its own list, so the result does not
    depend on ``threads``.
    """
    params = PruneParams(alpha2, UNBOUNDED, sorted, shuffle_seed)
    if g.n != ds.n:
        raise ValueError("graph and dataset sizes differ")
    args = ds.kernel_args()
    table, degrees = g.table, g.degrees
    map_ranges(
        lambda lo, hi: K.prune_range(
            table, degrees, *args, float(alpha2), -1,
            params.kernel_mode, params.kernel_seed, lo, hi,
        ),
        g.n,
        threads,
    )
