"""Quasi-isometry fitting and hyperbolicity measurement.

fit_qi searches a multiplicative constant over a fixed grid and reports the
smallest additive defect; delta_hyperbolicity runs the base-point four-point
scan, exactly in integers whenever the input matrix is integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metric_core import FiniteMetricSpace

LAMBDA_GRID = np.round(np.arange(1.0, 50.0 + 1e-9, 0.05), 2)


def gromov_product(d: np.ndarray, x: int, y: int, base: int) -> float:
    """(x|y) with respect to the base point."""
    return 0.5 * float(d[x, base] + d[y, base] - d[x, y])


def delta_hyperbolicity(d: np.ndarray, base: int = 0) -> float:
    """Base-point hyperbolicity: max over pairs of points x, w of
    max_y min((x|y), (y|w)) - (x|w).

    Doubled products keep the scan exact for integer matrices, so genuine
    tree metrics come out at exactly 0.0.
    """
    d = np.asarray(d)
    n = d.shape[0]
    if n == 0:
        return 0.0
    if np.issubdtype(d.dtype, np.integer):
        a = (d[base][:, None] + d[base][None, :] - d).astype(np.int32)
    else:
        a = d[base][:, None] + d[base][None, :] - d
    worst = -np.inf
    for y in range(n):
        c = np.minimum(a[:, y][:, None], a[y][None, :]) - a
        worst = max(worst, float(c.max()))
    return max(0.0, worst / 2.0)


@dataclass(frozen=True)
class QIReport:
    """Best multiplicative constant found and its additive defect."""

    lam: float
    sigma: float
    n_pairs: int
    violations: int
    details: dict = field(default_factory=dict)

    def __repr__(self):
        tag = "[PASS]" if self.violations == 0 else "[FAIL]"
        return (
            f"{tag} QIReport(lam={self.lam:g}, sigma={self.sigma:.6g}, "
            f"pairs={self.n_pairs}, violations={self.violations})"
        )


def _sigma_curve(ds_by_dt_min: dict, ds_by_dt_max: dict, lambdas: np.ndarray) -> np.ndarray:
    sig = np.zeros(len(lambdas))
    for v, lo in ds_by_dt_min.items():
        sig = np.maximum(sig, v - lambdas * lo)
    for v, hi in ds_by_dt_max.items():
        sig = np.maximum(sig, hi / lambdas - v)
    return np.maximum(sig, 0.0)


def fit_qi(ds: np.ndarray, dt: np.ndarray,
           lambdas: np.ndarray | None = None) -> QIReport:
    """Fit dt into [ds/lam - sigma, lam*ds + sigma] over a lambda grid.

    ds are source distances, dt target distances, as flat aligned arrays.
    When dt takes few distinct values (integer tree metrics), only the
    extreme ds per dt value matter, which this uses losslessly.  Ties on
    sigma pick the smallest lambda; every pair is re-checked at the winner.
    """
    ds = np.asarray(ds, dtype=float).ravel()
    dt = np.asarray(dt).ravel()
    if ds.shape != dt.shape:
        raise ValueError("ds and dt must align")
    if ds.size == 0:
        raise ValueError("cannot fit an empty pair set")
    if lambdas is None:
        lambdas = LAMBDA_GRID
    lambdas = np.asarray(lambdas, dtype=float)
    values, inverse = np.unique(np.asarray(dt, dtype=float), return_inverse=True)
    lo = np.full(len(values), np.inf)
    hi = np.full(len(values), -np.inf)
    np.minimum.at(lo, inverse, ds)
    np.maximum.at(hi, inverse, ds)
    by_min = {float(v): float(l) for v, l in zip(values, lo)}
    by_max = {float(v): float(h) for v, h in zip(values, hi)}
    curve = _sigma_curve(by_min, by_max, lambdas)
    best = int(curve.argmin())
    lam = float(lambdas[best])
    sigma = float(curve[best])
    dtf = dt.astype(float)
    tol = 1e-9 * (1.0 + sigma + lam)
    bad = (dtf > lam * ds + sigma + tol) | (dtf < ds / lam - sigma - tol)
    return QIReport(
        lam=lam,
        sigma=sigma,
        n_pairs=int(ds.size),
        violations=int(np.count_nonzero(bad)),
        details={
            "lambda_grid": [float(lambdas[0]), float(lambdas[-1]), len(lambdas)],
            "dt_values": len(values),
            "sigma_upper": float(np.max(dtf - lam * ds)),
            "sigma_lower": float(np.max(ds / lam - dtf)),
        },
    )


def visual_metric_circle(n: int, base_at_center: bool = True) -> FiniteMetricSpace:
    """The n-point circle with distances sin(angle/2): the visual metric on
    the boundary circle seen from the disk center, i.e. half the chord."""
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if not base_at_center:
        raise ValueError("only the disk-center base point is supported")
    angles = 2.0 * math.pi * np.arange(n) / n
    diff = np.abs(angles[:, None] - angles[None, :])
    diff = np.minimum(diff, 2.0 * math.pi - diff)
    d = np.sin(diff / 2.0)
    np.fill_diagonal(d, 0.0)
    ids = tuple(f"v{i:04d}" for i in range(n))
    meta = {
        "kind": "visual_circle",
        "metric": "chord",
        "radius": 0.5,
        "angles": angles.tolist(),
    }
    return FiniteMetricSpace(dist=d, point_ids=ids, meta=meta)
