"""Null and alternative generators and the Monte Carlo experiments.

Every replicate draws from its own generator seeded by ``(seed, index)``,
so results do not depend on how replicates are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .diagnostics import KsConfig, scaled_restricted_statistic, weighted_ks_plus
from .glrt import run_test
from .measure import (
    Mode,
    NullIntensity,
    ObservationWindow,
    build_intensity,
    correlation_set,
    rho,
    triggered_set,
)

__all__ = [
    "AlternativeSpec",
    "CalibrationConfig",
    "CalibrationSummary",
    "Figure1Result",
    "ConsistencyRow",
    "SyntheticGrid",
    "replicate_rng",
    "sample_null",
    "sample_alternative",
    "two_level_intensity",
    "calibration_experiment",
    "figure1_experiment",
    "consistency_experiment",
    "synthetic_grid",
    "load_config",
    "default_calibration_intensity",
]


def replicate_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])


def _map(fn: Callable[[int], object], count: int, workers: int = 1) -> list:
    if workers <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def sample_null(
    intensity: NullIntensity,
    rng: np.random.Generator,
    rate: float | None = None,
    fixed_n: int | None = None,
) -> np.ndarray:
    """Sorted event times with density ``r``; ``n ~ Poisson(rate)`` or ``n = fixed_n``."""
    if (rate is None) == (fixed_n is None):
        raise ValueError("give exactly one of rate and fixed_n")
    n = int(rng.poisson(rate)) if fixed_n is None else int(fixed_n)
    if n < 0:
        raise ValueError("event count must be nonnegative")
    return np.sort(intensity.quantile(rng.random(n)))


@dataclass(frozen=True, eq=False)
class AlternativeSpec:
    """Two-level multiplicative alternative around the events of ``A``.

    ``lambda1`` applies inside the region of range ``tau`` (triggered set,
    or correlation set when ``mode='correlation'``), ``lambda2`` outside.
    With ``fixed_n`` the count is fixed and only the density shape is used.
    """

    A: np.ndarray
    intensity: NullIntensity
    tau: float
    lambda1: float
    lambda2: float
    fixed_n: int | None = None
    mode: Mode = "triggering"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not self.lambda1 >= self.lambda2 >= 0:
            raise ValueError("need lambda1 >= lambda2 >= 0")

    def region(self):
        fn = triggered_set if self.mode == "triggering" else correlation_set
        return fn(self.A, self.intensity.window, self.tau)

    @property
    def weight(self) -> float:
        """``w = rho(region(tau))``."""
        return rho(self.intensity, self.region())

    @property
    def expected_count(self) -> float:
        w = self.weight
        return self.lambda1 * w + self.lambda2 * (1.0 - w)


def two_level_intensity(spec: AlternativeSpec) -> NullIntensity:
    """The normalized density ``lambda_{1|2} r(t)`` as a piecewise-constant intensity."""
    region = spec.region()
    r = spec.intensity
    bp = np.unique(np.concatenate([r.breakpoints, region.starts, region.ends]))
    mid = 0.5 * (bp[1:] + bp[:-1])
    level = np.where(region.contains(mid), spec.lambda1, spec.lambda2)
    return build_intensity(bp, r.density(mid) * level)


def sample_alternative(spec: AlternativeSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw B under the two-level model by inverse-CDF sampling of its density."""
    mass = spec.expected_count
    if spec.fixed_n is not None:
        if mass <= 0 and spec.fixed_n > 0:
            raise ValueError("both levels are zero; cannot place events")
        n = int(spec.fixed_n)
    else:
        n = int(rng.poisson(mass)) if mass > 0 else 0
    if n == 0:
        return np.empty(0)
    return np.sort(two_level_intensity(spec).quantile(rng.random(n)))


def default_calibration_intensity(window: ObservationWindow = ObservationWindow(0.0, 1.0)) -> NullIntensity:
    """A deliberately uneven four-cell intensity used by the calibration runs."""
    edges = np.linspace(window.start, window.end, 5)
    return build_intensity(edges, [3.0, 0.5, 1.5, 0.25])


def _source_pattern(rng: np.random.Generator, window: ObservationWindow, m: int) -> np.ndarray:
    rest = np.sort(rng.uniform(window.start, window.end, m - 1))
    return np.concatenate([[window.start], rest])


@dataclass
class CalibrationConfig:
    replicates: int = 2000
    m: int = 20
    mean_n: float = 50.0
    mode: str = "triggering"
    tau_max: float | None = None
    workers: int = 1


@dataclass
class CalibrationSummary:
    replicates: int
    ks_statistic: float
    ks_critical_1pct: float
    ks_pvalue: float
    reject_rate_01: float
    reject_rate_05: float
    n_zero: int
    mean_n: float
    p_values: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "p_values"}
        return d


def calibration_experiment(
    config: CalibrationConfig = CalibrationConfig(),
    seed: int = 0,
    intensity: NullIntensity | None = None,
) -> CalibrationSummary:
    """Simulate null datasets, run the full test, and summarize p-value uniformity."""
    intensity = intensity or default_calibration_intensity()
    window = intensity.window

    def one(i: int):
        rng = replicate_rng(seed, i)
        A = _source_pattern(rng, window, config.m)
        B = sample_null(intensity, rng, rate=config.mean_n)
        out = run_test(A, B, intensity, config.mode, config.tau_max)
        return out.p_value, out.n

    res = _map(one, config.replicates, config.workers)
    p = np.array([r[0] for r in res])
    ns = np.array([r[1] for r in res])
    ks = stats.kstest(p, "uniform")
    return CalibrationSummary(
        replicates=config.replicates,
        ks_statistic=float(ks.statistic),
        ks_critical_1pct=float(stats.kstwo.ppf(0.99, config.replicates)),
        ks_pvalue=float(ks.pvalue),
        reject_rate_01=float(np.mean(p <= 0.01)),
        reject_rate_05=float(np.mean(p <= 0.05)),
        n_zero=int(np.sum(ns == 0)),
        mean_n=float(ns.mean()) if ns.size else 0.0,
        p_values=p,
    )


@dataclass
class Figure1Result:
    scaled_T: np.ndarray
    weighted_ks: np.ndarray
    sup_distance: float

    def ecdf_rows(self) -> list[tuple[float, float, float]]:
        """Rows ``(x, ECDF of scaled T, ECDF of G+)`` over the pooled support."""
        a = np.sort(self.scaled_T)
        b = np.sort(self.weighted_ks)
        grid = np.unique(np.concatenate([a, b]))
        fa = np.searchsorted(a, grid, side="right") / a.size
        fb = np.searchsorted(b, grid, side="right") / b.size
        return list(zip(grid.tolist(), fa.tolist(), fb.tolist()))


def figure1_experiment(
    n: int = 1000,
    gamma1: float = 0.01,
    gamma2: float = 0.99,
    replicates: int = 1000,
    seed: int = 0,
) -> Figure1Result:
    """Compare ``sqrt(2n (T_[g] - 1))`` with ``G+_[g]`` over null replicates."""
    cfg = KsConfig(gamma1, gamma2)
    a = np.empty(replicates)
    b = np.empty(replicates)
    for i in range(replicates):
        u = np.sort(replicate_rng(seed, i).random(n))
        a[i] = scaled_restricted_statistic(u, cfg)
        b[i] = weighted_ks_plus(u, cfg)
    sup = float(stats.ks_2samp(a, b).statistic)
    return Figure1Result(a, b, sup)


@dataclass
class ConsistencyRow:
    lambda2: float
    lambda1: float
    median_abs_error: float
    power_05: float
    mean_n: float


def consistency_experiment(
    c: float,
    tau: float,
    A,
    intensity: NullIntensity,
    lambda_ladder: Sequence[float],
    replicates: int = 200,
    seed: int = 0,
    workers: int = 1,
) -> list[ConsistencyRow]:
    """Median ``|tau_hat - tau|`` and power as ``lambda2`` climbs with ``lambda1 = c lambda2``."""
    A = np.asarray(A, dtype=float)
    rows = []
    for level, lam2 in enumerate(lambda_ladder):
        spec = AlternativeSpec(A, intensity, tau, c * lam2, lam2)

        def one(i: int, spec=spec, level=level):
            rng = replicate_rng(seed, level * 1_000_003 + i)
            B = sample_alternative(spec, rng)
            out = run_test(A, B, intensity)
            err = math.nan if out.tau_hat is None else abs(out.tau_hat - tau)
            return err, out.p_value, out.n

        res = _map(one, replicates, workers)
        err = np.array([r[0] for r in res])
        p = np.array([r[1] for r in res])
        rows.append(
            ConsistencyRow(
                lambda2=float(lam2),
                lambda1=float(c * lam2),
                median_abs_error=float(np.nanmedian(err)) if np.any(~np.isnan(err)) else math.nan,
                power_05=float(np.mean(p <= 0.05)),
                mean_n=float(np.mean([r[2] for r in res])),
            )
        )
    return rows


@dataclass
class SyntheticGrid:
    """Synthetic screening log: sources ``in{i}``, targets ``out{j}``."""

    window: ObservationWindow
    intensity: NullIntensity
    sources: dict[str, np.ndarray]
    targets: dict[str, np.ndarray]
    effects: set[tuple[str, str]]

    def pairs(self) -> list[tuple[str, str]]:
        return [(s, t) for s in self.sources for t in self.targets]


def synthetic_grid(
    size: int = 12,
    seed: int = 0,
    source_rate: float = 200.0,
    target_rate: float = 150.0,
    ratio: float = 10.0,
    tau: float = 1e-4,
    diagonal: bool = True,
    intensity: NullIntensity | None = None,
) -> SyntheticGrid:
    """``size`` sources and targets; target ``j`` responds to source ``j`` when ``diagonal``.

    Responding targets have rate ``ratio * target_rate`` inside the
    triggered set of their source and ``target_rate`` elsewhere. Many short
    triggered intervals keep a responding target close to Poisson when it
    is paired with any other source, so off-diagonal pairs behave as nulls.
    """
    intensity = intensity or default_calibration_intensity()
    window = intensity.window
    uniform = build_intensity([window.start, window.end], [1.0 / window.length])
    rng = replicate_rng(seed, 0)
    sources, targets, effects = {}, {}, set()
    for i in range(size):
        A = sample_null(uniform, rng, rate=source_rate)
        while A.size == 0:
            A = sample_null(uniform, rng, rate=source_rate)
        sources[f"in{i + 1}"] = A
    for j in range(size):
        A = sources[f"in{j + 1}"]
        if diagonal:
            spec = AlternativeSpec(A, intensity, tau, ratio * target_rate, target_rate)
            targets[f"out{j + 1}"] = sample_alternative(spec, rng)
            effects.add((f"in{j + 1}", f"out{j + 1}"))
        else:
            targets[f"out{j + 1}"] = sample_null(intensity, rng, rate=target_rate)
    return SyntheticGrid(window, intensity, sources, targets, effects)


def _coerce(text: str, kind):
    text = text.strip()
    if text.lower() in ("none", ""):
        return None
    if kind is bool or kind == "bool":
        return text.lower() in ("1", "true", "yes", "on")
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def load_config(path, cls=CalibrationConfig):
    """Read ``key = value`` lines (``#`` comments) into a config dataclass."""
    known = {f.name: f.type for f in fields(cls)}
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(val, known[key])
    return cls(**values)
