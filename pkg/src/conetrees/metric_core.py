"""Finite metric spaces, subsets, and signed-radius neighborhoods.

A space is a symmetric nonnegative matrix with zero diagonal satisfying the
triangle inequality up to a relative tolerance.  Subsets carry a reference to
their space and support neighborhood operations with signed radii: positive
radii grow a set through open balls, negative radii erode it by removing the
open neighborhood of the complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class MetricError(ValueError):
    """Raised when a distance matrix fails a metric axiom."""


def _validate_matrix(d: np.ndarray, rel_tol: float) -> None:
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise MetricError("distance matrix has non-finite entries")
    if np.any(d < 0):
        raise MetricError("distance matrix has negative entries")
    diag = np.abs(np.diagonal(d))
    if np.any(diag > 0):
        raise MetricError("distance matrix has nonzero diagonal")
    if not np.allclose(d, d.T, rtol=0, atol=rel_tol * max(float(d.max()), 1e-300)):
        raise MetricError("distance matrix is not symmetric")
    n = d.shape[0]
    off = d + np.diag(np.full(n, np.inf))
    if np.any(off == 0):
        i, k = np.argwhere(off == 0)[0]
        raise MetricError(f"zero distance between distinct points {i} and {k}")
    # d[i,k] <= min_j (d[i,j] + d[j,k]) with relative slack.  One pass per j
    # keeps memory at O(n^2).
    best = np.full((n, n), np.inf)
    for j in range(n):
        np.minimum(best, d[:, j, None] + d[None, j, :], out=best)
    slack = rel_tol * np.maximum(d, 1.0)
    bad = d > best + slack
    if np.any(bad):
        i, k = np.argwhere(bad)[0]
        raise MetricError(
            f"triangle inequality fails at ({i},{k}): "
            f"d={d[i, k]:.6g} > min path {best[i, k]:.6g}"
        )


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A finite metric space given by an explicit distance matrix.

    Attributes:
        dist: (n, n) float array, validated on construction.
        point_ids: stable string labels, one per point.
        meta: free-form description of where the points came from.
    """

    dist: np.ndarray
    point_ids: tuple[str, ...]
    meta: dict = field(default_factory=dict)
    rel_tol: float = 1e-9

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        object.__setattr__(self, "dist", d)
        _validate_matrix(d, self.rel_tol)
        if len(self.point_ids) != d.shape[0]:
            raise MetricError(
                f"{len(self.point_ids)} point ids for {d.shape[0]} points"
            )

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @cached_property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    @cached_property
    def min_gap(self) -> float:
        """Smallest nonzero pairwise distance, or 0.0 for a single point."""
        if self.n < 2:
            return 0.0
        iu = np.triu_indices(self.n, k=1)
        return float(self.dist[iu].min())

    def subset(self, indices) -> "Subset":
        return Subset(self, frozenset(int(i) for i in indices))

    def whole(self) -> "Subset":
        return Subset(self, frozenset(range(self.n)))

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n}, diameter={self.diameter:.6g})"


def _dist_to(space: FiniteMetricSpace, indices: frozenset) -> np.ndarray:
    """Distance from every point of the space to the index set (+inf if empty)."""
    if not indices:
        return np.full(space.n, np.inf)
    cols = np.fromiter(indices, dtype=int, count=len(indices))
    return space.dist[:, cols].min(axis=1)


@dataclass(frozen=True)
class Subset:
    """A subset of a finite metric space, stored as a frozenset of indices."""

    space: FiniteMetricSpace
    indices: frozenset

    def __post_init__(self):
        if self.indices and (min(self.indices) < 0 or max(self.indices) >= self.space.n):
            raise MetricError("subset index out of range")

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return int(i) in self.indices

    def __le__(self, other: "Subset"):
        return self.indices <= other.indices

    @property
    def is_empty(self) -> bool:
        return not self.indices

    @property
    def is_whole(self) -> bool:
        return len(self.indices) == self.space.n

    def diameter(self) -> float:
        if len(self.indices) < 2:
            return 0.0
        cols = np.fromiter(self.indices, dtype=int, count=len(self.indices))
        return float(self.space.dist[np.ix_(cols, cols)].max())

    def dist_to_points(self) -> np.ndarray:
        return _dist_to(self.space, self.indices)

    def dist_sets(self, other: "Subset") -> float:
        """inf over pairs; +inf if either set is empty."""
        if self.is_empty or other.is_empty:
            return np.inf
        a = np.fromiter(self.indices, dtype=int, count=len(self.indices))
        b = np.fromiter(other.indices, dtype=int, count=len(other.indices))
        return float(self.space.dist[np.ix_(a, b)].min())

    def neighborhood(self, r: float) -> "Subset":
        """Signed-radius open neighborhood.

        r > 0: points at distance < r from the set.
        r = 0: the set itself.
        r < 0: erosion, points at distance > |r| from the complement.  The
        whole space has empty complement, so it is fixed by every erosion.
        """
        if r == 0:
            return self
        if r > 0:
            keep = _dist_to(self.space, self.indices) < r
        else:
            comp = frozenset(range(self.space.n)) - self.indices
            keep = _dist_to(self.space, comp) > -r
        return Subset(self.space, frozenset(np.flatnonzero(keep).tolist()))

    def closed_neighborhood(self, r: float) -> "Subset":
        """Like neighborhood but with non-strict comparisons."""
        if r == 0:
            return self
        if r > 0:
            keep = _dist_to(self.space, self.indices) <= r
        else:
            comp = frozenset(range(self.space.n)) - self.indices
            keep = _dist_to(self.space, comp) >= -r
        return Subset(self.space, frozenset(np.flatnonzero(keep).tolist()))

    def is_lambda_net(self, lam: float) -> bool:
        """Every point of the space lies within distance lam of the set."""
        if self.is_empty:
            return self.space.n == 0
        return bool(self.dist_to_points().max() <= lam)

    def __repr__(self):
        return f"Subset(|U|={len(self.indices)} of n={self.space.n})"
