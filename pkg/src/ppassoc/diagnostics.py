"""Dependence diagnostics on u-values and the weighted K-S comparison."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaincc

from .glrt import log_ell

__all__ = [
    "KsConfig",
    "FisherResult",
    "ecdf_table",
    "write_ecdf_csv",
    "fisher_combine",
    "weighted_ks_plus",
    "restricted_statistic",
    "scaled_restricted_statistic",
]


@dataclass(frozen=True)
class KsConfig:
    """Interval ``[gamma1, gamma2]`` for the restricted statistics.

    The weight is fixed to ``phi(x) = 1 / (x (1 - x))``.
    """

    gamma1: float = 0.01
    gamma2: float = 0.99

    def __post_init__(self):
        if not 0.0 < self.gamma1 < self.gamma2 < 1.0:
            raise ValueError("need 0 < gamma1 < gamma2 < 1")


def _sorted(u) -> np.ndarray:
    return np.sort(np.asarray(u, dtype=float).ravel())


def ecdf_table(u) -> list[tuple[float, float]]:
    """Knots ``(u, ECDF(u))`` of the empirical CDF, one per distinct value."""
    u = _sorted(u)
    if u.size == 0:
        raise ValueError("empty sample")
    values, counts = np.unique(u, return_counts=True)
    frac = np.cumsum(counts) / u.size
    return [(float(a), float(b)) for a, b in zip(values, frac)]


def write_ecdf_csv(table, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "ecdf"])
        for u, f in table:
            w.writerow([repr(u), repr(f)])


class FisherResult(NamedTuple):
    statistic: float
    df: int
    p_value: float
    degenerate: bool


def fisher_combine(u) -> FisherResult:
    """Fisher's combination ``-2 sum log u_i`` against chi-square with ``2n`` df.

    The chi-square survival is the regularized upper incomplete gamma
    ``Q(n, stat / 2)``. A zero u-value gives ``p = 0`` flagged degenerate.
    """
    u = np.asarray(u, dtype=float).ravel()
    if u.size == 0:
        raise ValueError("empty sample")
    if np.any(u < 0) or np.any(u >= 1):
        raise ValueError("u-values must lie in [0, 1)")
    n = u.size
    if np.any(u == 0):
        return FisherResult(np.inf, 2 * n, 0.0, True)
    stat = float(-2.0 * np.sum(np.log(u)))
    return FisherResult(stat, 2 * n, float(gammaincc(n, stat / 2.0)), False)


def _restricted_set(u: np.ndarray, config: KsConfig):
    n = u.size
    rank = np.arange(1, n + 1) / n
    mask = (u <= rank) & (u >= config.gamma1) & (u <= config.gamma2)
    return rank, mask


def weighted_ks_plus(u, config: KsConfig = KsConfig()) -> float:
    """One-sided weighted K-S ``G+`` restricted to ``[gamma1, gamma2]``.

    ``max sqrt(n) (i/n - u_i) / sqrt(u_i (1 - u_i))`` over ranks with
    ``u_i <= i/n`` and ``u_i`` inside the interval; 0 when none qualify.
    """
    u = _sorted(u)
    if u.size == 0:
        return 0.0
    rank, mask = _restricted_set(u, config)
    if not mask.any():
        return 0.0
    um = u[mask]
    vals = np.sqrt(u.size) * (rank[mask] - um) / np.sqrt(um * (1.0 - um))
    return float(max(vals.max(), 0.0))


def _restricted_log(u: np.ndarray, config: KsConfig) -> float:
    if u.size == 0:
        return 0.0
    rank, mask = _restricted_set(u, config)
    if not mask.any():
        return 0.0
    k = np.arange(1, u.size + 1)[mask]
    return float(max(np.max(log_ell(k, u.size, u[mask])), 0.0))


def restricted_statistic(u, config: KsConfig = KsConfig()) -> float:
    """``T`` restricted to ranks with ``gamma1 <= u_i <= gamma2``; 1 if none qualify."""
    return float(np.exp(_restricted_log(_sorted(u), config)))


def scaled_restricted_statistic(u, config: KsConfig = KsConfig()) -> float:
    """``sqrt(2n (T_restricted - 1))``, the scale on which it matches ``G+``."""
    u = _sorted(u)
    return float(np.sqrt(2.0 * u.size * np.expm1(_restricted_log(u, config))))
