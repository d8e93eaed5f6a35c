"""Directed proximity graph over dataset indices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DegreeStats:
    max_out_degree: int
    avg_out_degree: float
    edge_count: int

    def to_dict(self) -> dict:
        return {
            "max_out_degree": self.max_out_degree,
            "avg_out_degree": self.avg_out_degree,
            "edge_count": self.edge_count,
        }


class ProximityGraph:
    """Out-adjacency lists with a designated start vertex.

    Storage is a dense ``n x capacity`` int64 table padded with -1 plus a
    per-vertex degree array, so compiled kernels can mutate it in place.
    Out-lists keep insertion order.
    """

    def __init__(self, n: int, start: int = 0, capacity: int = 0):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        if not 0 <= start < n:
            raise IndexError(f"start vertex {start} out of range")
        self.n = n
        self.start = start
        self.table = np.full((n, capacity), -1, dtype=np.int64)
        self.degrees = np.zeros(n, dtype=np.int64)

    @classmethod
    def from_lists(cls, lists, start: int = 0) -> ProximityGraph:
        g = cls(len(lists), start, max((len(x) for x in lists), default=0))
        for p, nbrs in enumerate(lists):
            g.set_out_neighbors(p, nbrs)
        return g

    @classmethod
    def complete(cls, n: int, start: int = 0) -> ProximityGraph:
        return cls.from_lists([[j for j in range(n) if j != i] for i in range(n)], start)

    @property
    def capacity(self) -> int:
        return self.table.shape[1]

    def ensure_capacity(self, capacity: int) -> None:
        if capacity > self.capacity:
            grown = np.full((self.n, capacity), -1, dtype=np.int64)
            grown[:, : self.capacity] = self.table
            self.table = grown

    def shrink_to_fit(self) -> None:
        width = int(self.degrees.max(initial=0))
        if width < self.capacity:
            self.table = np.ascontiguousarray(self.table[:, :width])

    def _check(self, p: int) -> None:
        if not 0 <= p < self.n:
            raise IndexError(f"vertex {p} out of range for graph of size {self.n}")

    def out_neighbors(self, p: int) -> list[int]:
        self._check(p)
        return self.table[p, : self.degrees[p]].tolist()

    def set_out_neighbors(self, p: int, nbrs) -> None:
        self._check(p)
        nbrs = [int(v) for v in nbrs]
        if p in nbrs:
            raise ValueError(f"self-loop at vertex {p}")
        if len(set(nbrs)) != len(nbrs):
            raise ValueError(f"duplicate out-neighbours for vertex {p}")
        for v in nbrs:
            if not 0 <= v < self.n:
                raise IndexError(f"neighbour {v} out of range")
        self.ensure_capacity(len(nbrs))
        row = np.full(self.capacity, -1, dtype=np.int64)
        row[: len(nbrs)] = nbrs
        # single row assignment: readers of p see either the old or new list
        self.table[p] = row
        self.degrees[p] = len(nbrs)

    def has_edge(self, p: int, q: int) -> bool:
        return q in self.out_neighbors(p)

    def adjacency(self) -> list[list[int]]:
        return [self.table[p, : self.degrees[p]].tolist() for p in range(self.n)]

    def edge_count(self) -> int:
        return int(self.degrees.sum())

    def degree_stats(self) -> DegreeStats:
        edges = self.edge_count()
        return DegreeStats(int(self.degrees.max(initial=0)), edges / self.n, edges)

    def validate(self) -> None:
        """Raise ValueError unless every out-list is loop-free, duplicate-free and in range."""
        if self.degrees.shape != (self.n,) or np.any(self.degrees < 0):
            raise ValueError("corrupt degree array")
        if np.any(self.degrees > self.capacity):
            raise ValueError("degree exceeds table capacity")
        if not 0 <= self.start < self.n:
            raise ValueError("start vertex out of range")
        for p in range(self.n):
            row = self.table[p, : self.degrees[p]]
            if np.any(row < 0) or np.any(row >= self.n):
                raise ValueError(f"neighbour out of range at vertex {p}")
            if np.any(row == p):
                raise ValueError(f"self-loop at vertex {p}")
            if np.unique(row).size != row.size:
                raise ValueError(f"duplicate neighbour at vertex {p}")

    def copy(self) -> ProximityGraph:
        g = ProximityGraph.__new__(ProximityGraph)
        g.n = self.n
        g.start = self.start
        g.table = self.table.copy()
        g.degrees = self.degrees.copy()
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProximityGraph):
            return NotImplemented
        return self.n == other.n and self.start == other.start and self.adjacency() == other.adjacency()

    def __repr__(self) -> str:
        s = self.degree_stats()
        return f"ProximityGraph(n={self.n}, start={self.start}, edges={s.edge_count}, max_deg={s.max_out_degree})"


def out_neighbors(g: ProximityGraph, p: int) -> list[int]:
    return g.out_neighbors(p)


def set_out_neighbors(g: ProximityGraph, p: int, nbrs) -> None:
    g.set_out_neighbors(p, nbrs)


def degree_stats(g: ProximityGraph) -> DegreeStats:
    return g.degree_stats()
