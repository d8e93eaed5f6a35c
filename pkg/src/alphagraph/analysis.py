"""Reachability auditing, worst-case bounds after RP-Tuning, and tight configurations."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from alphagraph import _kernels as K
from alphagraph._parallel import map_ranges
from alphagraph.core import Dataset
from alphagraph.graph import ProximityGraph


@dataclass(frozen=True)
class ReachabilityReport:
    """``alpha_star`` is ``math.inf`` for a complete graph; ``witness`` is None when the source has no out-edges."""

    alpha_star: float
    worst_pair: tuple[int, int] | None
    witness: int | None

    @property
    def infinite(self) -> bool:
        return math.isinf(self.alpha_star)

    def to_dict(self) -> dict:
        return {
            "alpha_star": "inf" if self.infinite else self.alpha_star,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "witness": self.witness,
        }


def audit_reachability(g: ProximityGraph, ds: Dataset, threads: int | None = None) -> ReachabilityReport:
    """Exact reachability of ``g``: min over non-edges (p, z) of max_{p' in N_out(p)} D(p,z)/D(p',z)."""
    if g.n != ds.n:
        raise ValueError("graph and dataset sizes differ")
    args = ds.kernel_args()
    parts = map_ranges(lambda lo, hi: K.audit_range(g.table, g.degrees, *args, lo, hi), g.n, threads)
    best, bp, bz, bw = math.inf, -1, -1, -1
    for a, p, z, w in parts:
        if p >= 0 and a < best:
            best, bp, bz, bw = float(a), int(p), int(z), int(w)
    if bp < 0:
        return ReachabilityReport(math.inf, None, None)
    return ReachabilityReport(best, (bp, bz), bw if bw >= 0 else None)


class BoundKind(enum.Enum):
    UNSORTED_ANY = "unsorted_any"
    SORTED_GENERAL = "sorted_general"
    SORTED_EUCLIDEAN = "sorted_euclidean"


def _check_alphas(alpha1: float, alpha2: float) -> None:
    if not alpha2 > 1:
        raise ValueError(f"alpha2 must exceed 1, got {alpha2}")
    if not alpha1 >= alpha2:
        raise ValueError(f"need alpha1 >= alpha2, got {alpha1} < {alpha2}")


def beta(alpha1: float, alpha2: float) -> float:
    """Largest ||x - z|| in the sorted Euclidean worst case (unit ||z||)."""
    _check_alphas(alpha1, alpha2)
    return (1 / alpha1) * math.sqrt(1 - 1 / (4 * alpha2**2)) + (1 / alpha2) * math.sqrt(
        1 - 1 / (4 * alpha1**2)
    )


def bound_after_tuning(alpha1: float, alpha2: float, kind: BoundKind | str) -> float:
    """Worst-case reachability of an alpha1-reachable graph after RP-Tuning at alpha2."""
    _check_alphas(alpha1, alpha2)
    kind = BoundKind(kind)
    if kind is BoundKind.UNSORTED_ANY:
        return alpha1 * alpha2 / (alpha1 + alpha2 + 1)
    if kind is BoundKind.SORTED_GENERAL:
        return alpha1 * alpha2 / (alpha1 + alpha2)
    return 1 / beta(alpha1, alpha2)


def all_bounds(alpha1: float, alpha2: float) -> dict:
    out = {k.value: bound_after_tuning(alpha1, alpha2, k) for k in BoundKind}
    out["beta"] = beta(alpha1, alpha2)
    return out


# -- worst-case configurations -------------------------------------------------


@dataclass(frozen=True)
class TightConfig:
    """Four points p, x, y, z with ``roles`` mapping each name to its dataset index."""

    dataset: Dataset
    roles: dict = field(default_factory=dict)
    alpha1: float = 0.0
    alpha2: float = 0.0

    def dist(self, a: str, b: str) -> float:
        return self.dataset.distance(self.roles[a], self.roles[b])

    @property
    def xz(self) -> float:
        return self.dist("x", "z")


_ROLES = {"p": 0, "x": 1, "y": 2, "z": 3}


def gen_unsorted_tight_config(alpha1: float, alpha2: float) -> TightConfig:
    """Collinear p, z, y, x achieving D(x,z) = (a1 + a2 + 1) / (a1 a2)."""
    _check_alphas(alpha1, alpha2)
    z = 1.0
    y = 1.0 + 1.0 / alpha1
    x = y + (1.0 + 1.0 / alpha1) / alpha2
    ds = Dataset.from_points(np.array([[0.0], [x], [y], [z]]))
    return TightConfig(ds, dict(_ROLES), alpha1, alpha2)


def gen_sorted_general_tight_config(alpha1: float, alpha2: float) -> TightConfig:
    """Four points on a unit sphere around p with D(y,z) = 1/a1, D(x,y) = 1/a2, D(x,z) = their sum."""
    _check_alphas(alpha1, alpha2)
    xy, yz, xz = 1 / alpha2, 1 / alpha1, (alpha1 + alpha2) / (alpha1 * alpha2)
    D = np.array(
        [
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, xy, xz],
            [1.0, xy, 0.0, yz],
            [1.0, xz, yz, 0.0],
        ]
    )
    return TightConfig(Dataset.from_matrix(D, tol=1e-12), dict(_ROLES), alpha1, alpha2)


def euclid_tight_points(alpha1: float, alpha2: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t1 = math.asin(1 / (2 * alpha1))
    t2 = math.asin(1 / (2 * alpha2))
    z = np.array([1.0, 0.0])
    y = np.array([math.cos(2 * t1), math.sin(2 * t1)])
    x = np.array([math.cos(2 * (t1 + t2)), math.sin(2 * (t1 + t2))])
    return x, y, z


def gen_sorted_euclid_tight_config(alpha1: float, alpha2: float) -> TightConfig:
    """Planar p = 0 with x, y, z on the unit circle; ||x - z|| = beta(a1, a2)."""
    _check_alphas(alpha1, alpha2)
    x, y, z = euclid_tight_points(alpha1, alpha2)
    ds = Dataset.from_points(np.vstack([np.zeros(2), x, y, z]))
    return TightConfig(ds, dict(_ROLES), alpha1, alpha2)


def unsorted_constraints_hold(cfg: TightConfig, tol: float = 1e-12) -> bool:
    a1, a2 = cfg.alpha1, cfg.alpha2
    return (
        abs(cfg.dist("p", "z") - 1) <= tol
        and cfg.dist("y", "z") <= 1 / a1 + tol
        and cfg.dist("x", "y") <= cfg.dist("p", "y") / a2 + tol
    )


def sorted_constraints_hold(cfg: TightConfig, tol: float = 1e-12) -> bool:
    """Unsorted constraints plus D(x,y) <= D(p,y) <= D(p,z); for p at the origin this includes ||x|| <= ||y||."""
    ok = unsorted_constraints_hold(cfg, tol)
    ok = ok and cfg.dist("x", "y") <= cfg.dist("p", "y") + tol
    ok = ok and cfg.dist("p", "y") <= cfg.dist("p", "z") + tol
    if cfg.dataset.euclidean:
        ok = ok and cfg.dist("p", "x") <= cfg.dist("p", "y") + tol
    return ok


# -- the sorted Euclidean optimisation problem ---------------------------------


def optimum_feasible(x, y, z, alpha1: float, alpha2: float, tol: float = 1e-12) -> np.ndarray:
    """Row-wise feasibility of (x, y, z) stacked as ``m x d`` arrays."""
    nx, ny, nz = (np.linalg.norm(v, axis=-1) for v in (x, y, z))
    return (
        (np.linalg.norm(y - z, axis=-1) <= nz / alpha1 + tol)
        & (np.linalg.norm(x - y, axis=-1) <= ny / alpha2 + tol)
        & (nx <= ny + tol)
        & (ny <= nz + tol)
        & (np.abs(nz - 1) <= tol)
    )


def _unit(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    v = rng.standard_normal((m, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_optimum_feasible(
    alpha1: float, alpha2: float, m: int, d: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rejection-sample ``m`` feasible triples in R^d; half of the radii sit on the constraint boundary."""
    xs, ys, zs = [], [], []
    have = 0
    while have < m:
        batch = max(64, 2 * (m - have))
        z = _unit(rng, batch, d)
        r1 = np.where(rng.random(batch) < 0.5, 1.0, rng.random(batch) ** (1 / d)) / alpha1
        y = z + r1[:, None] * _unit(rng, batch, d)
        ny = np.linalg.norm(y, axis=1)
        r2 = np.where(rng.random(batch) < 0.5, 1.0, rng.random(batch) ** (1 / d)) * ny / alpha2
        x = y + r2[:, None] * _unit(rng, batch, d)
        ok = (ny <= 1.0) & (np.linalg.norm(x, axis=1) <= ny)
        xs.append(x[ok])
        ys.append(y[ok])
        zs.append(z[ok])
        have += int(ok.sum())
    return np.vstack(xs)[:m], np.vstack(ys)[:m], np.vstack(zs)[:m]


def lagrangian_residual(alpha1: float, alpha2: float, x, y, z) -> np.ndarray:
    """L(x,y,z; lambda) - (beta^2 - ||a x + b y + c z||^2) row-wise; identically zero in theory."""
    t1 = math.asin(1 / (2 * alpha1))
    t2 = math.asin(1 / (2 * alpha2))
    h1, h2, h12 = math.sin(2 * t1), math.sin(2 * t2), math.sin(2 * (t1 + t2))
    b2 = beta(alpha1, alpha2) ** 2
    lam = (
        (h1 + h2 - h12) / h2,
        (h1 + h2 - h12) / h1,
        h12 / h1,
        h12 / h2,
        b2,
    )
    a, c, b = math.sqrt(h1 / h2), math.sqrt(h2 / h1), -h12 / math.sqrt(h1 * h2)

    def sq(v):
        return np.einsum("ij,ij->i", v, v)

    f = sq(x - z)
    g = (
        sq(x) - sq(y),
        sq(y) - sq(z),
        sq(y - z) - sq(z) / alpha1**2,
        sq(x - y) - sq(y) / alpha2**2,
        sq(z) - 1,
    )
    lagr = f - sum(l * gi for l, gi in zip(lam, g))
    return lagr - (b2 - sq(a * x + b * y + c * z))


@dataclass(frozen=True)
class OptimumReport:
    max_found: float
    beta: float
    passed: bool
    tol: float
    samples: int
    best_dim: int

    def to_dict(self) -> dict:
        return {
            "max_found": self.max_found,
            "beta": self.beta,
            "pass": self.passed,
            "tol": self.tol,
            "samples": self.samples,
            "best_dim": self.best_dim,
        }


def _refine(x, y, z, alpha1, alpha2, rng, steps, feas_tol):
    """Parallel hill-climb on ||x - z|| keeping every iterate feasible."""
    best = np.linalg.norm(x - z, axis=1)
    sigma = 0.05
    for step in range(steps):
        if step and step % max(1, steps // 8) == 0:
            sigma *= 0.4
        nx = x + sigma * rng.standard_normal(x.shape)
        ny = y + sigma * rng.standard_normal(y.shape)
        nz = z + sigma * rng.standard_normal(z.shape)
        nz /= np.linalg.norm(nz, axis=1, keepdims=True)
        val = np.linalg.norm(nx - nz, axis=1)
        ok = optimum_feasible(nx, ny, nz, alpha1, alpha2, feas_tol) & (val > best)
        x[ok], y[ok], z[ok], best[ok] = nx[ok], ny[ok], nz[ok], val[ok]
    return best


def verify_lemma_a_optimum(
    alpha1: float,
    alpha2: float,
    samples: int = 100_000,
    seed: int = 0,
    tol: float = 1e-6,
    dims=(2, 3, 4, 5),
    feas_tol: float = 1e-12,
) -> OptimumReport:
    """Randomised search for max ||x - z|| under the sorted Euclidean constraints.

    The tight planar configuration is always included, so ``max_found`` can
    only fall short of beta if that construction is wrong.  Passing means the
    search never beats beta by more than ``tol``.
    """
    _check_alphas(alpha1, alpha2)
    b = beta(alpha1, alpha2)
    tx, ty, tz = euclid_tight_points(alpha1, alpha2)
    max_found = float(np.linalg.norm(tx - tz))
    best_dim = 2
    rng = np.random.default_rng(seed)
    if samples > 0:
        per_dim = [samples // len(dims) + (1 if i < samples % len(dims) else 0) for i in range(len(dims))]
        for d, m in zip(dims, per_dim):
            if m == 0:
                continue
            x, y, z = sample_optimum_feasible(alpha1, alpha2, m, d, rng)
            vals = np.linalg.norm(x - z, axis=1)
            top = np.argsort(vals)[-min(64, m):]
            x, y, z = x[top].copy(), y[top].copy(), z[top].copy()
            # the tight point, lifted into R^d, climbs alongside the samples
            pad = np.zeros(d - 2)
            x = np.vstack([x, np.concatenate([tx, pad])])
            y = np.vstack([y, np.concatenate([ty, pad])])
            z = np.vstack([z, np.concatenate([tz, pad])])
            refined = _refine(x, y, z, alpha1, alpha2, rng, min(2000, max(50, m // 10)), feas_tol)
            cand = float(max(vals.max(), refined.max()))
            if cand > max_found:
                max_found, best_dim = cand, d
    passed = (b - tol) <= max_found <= (b + tol)
    return OptimumReport(max_found, b, passed, tol, samples, best_dim)
