"""Null intensity, the measure it induces, and the u-value transform.

The null intensity ``r`` is piecewise constant, so its cumulative integral
``R`` is piecewise linear and every measure of an interval union is exact.
The transform maps each B event to the ``rho``-mass of the triggered (or
correlation) region at its response time; under the null these are ordered
uniforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

__all__ = [
    "ObservationWindow",
    "NullIntensity",
    "IntervalUnion",
    "TransformedSample",
    "Mode",
    "check_pattern",
    "build_intensity",
    "uniform_intensity",
    "rho",
    "triggered_set",
    "correlation_set",
    "region_measure",
    "response_times",
    "transform",
    "align_to_source",
]

Mode = Literal["triggering", "correlation"]
MODES = ("triggering", "correlation")

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class ObservationWindow:
    start: float
    end: float

    def __post_init__(self):
        if not (np.isfinite(self.start) and np.isfinite(self.end)):
            raise ValueError("window bounds must be finite")
        if not self.start < self.end:
            raise ValueError(f"window start {self.start} must precede end {self.end}")

    @property
    def length(self) -> float:
        return self.end - self.start


def check_pattern(times, window: ObservationWindow | None = None, name: str = "pattern") -> np.ndarray:
    """Validate a point pattern: finite, strictly increasing, inside ``[start, end)``."""
    t = np.asarray(times, dtype=float).ravel()
    if not np.all(np.isfinite(t)):
        raise ValueError(f"{name}: event times must be finite")
    if np.any(np.diff(t) <= 0):
        bad = int(np.flatnonzero(np.diff(t) <= 0)[0])
        raise ValueError(f"{name}: times must be strictly increasing (index {bad + 1})")
    if window is not None and t.size and (t[0] < window.start or t[-1] >= window.end):
        raise ValueError(f"{name}: times must lie in [{window.start}, {window.end})")
    return t


@dataclass(frozen=True, eq=False)
class NullIntensity:
    """Piecewise-constant normalized density on ``[breakpoints[0], breakpoints[-1])``.

    ``cumulative[j]`` is ``R(breakpoints[j])``. ``rescaled`` records that the
    supplied densities did not integrate to one and were divided by their mass.
    """

    breakpoints: np.ndarray
    densities: np.ndarray
    cumulative: np.ndarray
    rescaled: bool = False

    @property
    def window(self) -> ObservationWindow:
        return ObservationWindow(float(self.breakpoints[0]), float(self.breakpoints[-1]))

    def _cell(self, t):
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        return np.clip(idx, 0, self.densities.size - 1)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.breakpoints[0]) & (t < self.breakpoints[-1])
        return np.where(inside, self.densities[self._cell(t)], 0.0)

    def cdf(self, t):
        """``R(t)``, clamped to 0 before the window and 1 after it."""
        t = np.clip(np.asarray(t, dtype=float), self.breakpoints[0], self.breakpoints[-1])
        j = self._cell(t)
        out = self.cumulative[j] + self.densities[j] * (t - self.breakpoints[j])
        return np.minimum(out, 1.0)

    def quantile(self, p):
        """Right-continuous inverse ``inf{t : R(t) >= p}``; plateaus resolve left."""
        p = np.asarray(p, dtype=float)
        idx = np.searchsorted(self.cumulative, p, side="left")
        j = np.clip(idx - 1, 0, self.densities.size - 1)
        d = self.densities[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = self.breakpoints[j] + np.where(d > 0, (p - self.cumulative[j]) / d, 0.0)
        t = np.where(idx == 0, self.breakpoints[0], t)
        return np.minimum(t, self.breakpoints[j + 1])

    def restrict(self, start: float) -> "NullIntensity":
        """The same shape on ``[start, end)``, renormalized to unit mass."""
        bp = self.breakpoints
        if not bp[0] <= start < bp[-1]:
            raise ValueError(f"restriction start {start} outside the window")
        keep = bp > start
        new_bp = np.concatenate([[start], bp[keep]])
        return build_intensity(new_bp, self.densities[int(self._cell(start)) :])

    def scaled(self, factor: float, shift: float = 0.0) -> "NullIntensity":
        """Intensity for the time axis ``t -> shift + factor * t``."""
        if not factor > 0:
            raise ValueError("factor must be positive")
        # cumulative masses are unchanged by an affine map of the time axis
        return NullIntensity(shift + factor * self.breakpoints, self.densities / factor, self.cumulative, self.rescaled)


def build_intensity(breakpoints, densities, window: ObservationWindow | None = None) -> NullIntensity:
    """Build a normalized piecewise-constant intensity.

    ``densities[j]`` applies on ``[breakpoints[j], breakpoints[j+1])``. When a
    window is given the cells are clipped to it. Densities whose mass is off
    from one by more than ``1e-9`` are rescaled and the result is flagged.
    """
    bp = np.asarray(breakpoints, dtype=float).ravel()
    d = np.asarray(densities, dtype=float).ravel()
    if bp.size < 2:
        raise ValueError("need at least two breakpoints")
    if d.size != bp.size - 1:
        raise ValueError(f"expected {bp.size - 1} densities, got {d.size}")
    if not np.all(np.isfinite(bp)) or not np.all(np.isfinite(d)):
        raise ValueError("breakpoints and densities must be finite")
    if np.any(np.diff(bp) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    if np.any(d < 0):
        raise ValueError("densities must be nonnegative")
    if window is not None:
        if bp[0] > window.start or bp[-1] < window.end:
            raise ValueError("breakpoints do not cover the window")
        inner = bp[(bp > window.start) & (bp < window.end)]
        first = np.searchsorted(bp, window.start, side="right") - 1
        d = d[first : first + inner.size + 1]
        bp = np.concatenate([[window.start], inner, [window.end]])
    mass_cells = d * np.diff(bp)
    total = float(mass_cells.sum())
    if not total > 0:
        raise ValueError("intensity has zero total mass")
    rescaled = abs(total - 1.0) > NORMALIZATION_TOL
    if rescaled:
        d = d / total
        mass_cells = mass_cells / total
    cum = np.concatenate([[0.0], np.cumsum(mass_cells)])
    cum = cum / cum[-1]
    cum[-1] = 1.0
    return NullIntensity(bp, d, cum, rescaled)


def uniform_intensity(window: ObservationWindow) -> NullIntensity:
    return build_intensity([window.start, window.end], [1.0 / window.length])


@dataclass(frozen=True, eq=False)
class IntervalUnion:
    """Sorted, pairwise disjoint half-open intervals ``[starts[j], ends[j])``."""

    starts: np.ndarray
    ends: np.ndarray

    def __post_init__(self):
        if self.starts.shape != self.ends.shape:
            raise ValueError("starts and ends differ in length")
        if np.any(self.ends < self.starts):
            raise ValueError("interval with end before start")
        if np.any(self.starts[1:] < self.ends[:-1]):
            raise ValueError("intervals overlap or are unsorted")

    @classmethod
    def from_pairs(cls, starts, ends) -> "IntervalUnion":
        """Drop empty intervals and merge touching or overlapping ones."""
        s = np.asarray(starts, dtype=float).ravel()
        e = np.asarray(ends, dtype=float).ravel()
        keep = e > s
        s, e = s[keep], e[keep]
        order = np.argsort(s, kind="stable")
        s, e = s[order], e[order]
        out_s: list[float] = []
        out_e: list[float] = []
        for a, b in zip(s, e):
            if out_e and a <= out_e[-1]:
                out_e[-1] = max(out_e[-1], b)
            else:
                out_s.append(a)
                out_e.append(b)
        return cls(np.array(out_s), np.array(out_e))

    def __len__(self) -> int:
        return self.starts.size

    def as_pairs(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.starts, self.ends)]

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.starts, t, side="right") - 1
        ok = idx >= 0
        idx = np.clip(idx, 0, max(len(self) - 1, 0))
        if len(self) == 0:
            return np.zeros(t.shape, dtype=bool)
        return ok & (t < self.ends[idx])


def rho(intensity: NullIntensity, union: IntervalUnion) -> float:
    """``rho`` of an interval union: ``sum_j R(e_j) - R(s_j)``."""
    if len(union) == 0:
        return 0.0
    w = intensity.window
    if union.starts[0] < w.start or union.ends[-1] > w.end:
        raise ValueError("interval union extends outside the window")
    return float(np.sum(intensity.cdf(union.ends) - intensity.cdf(union.starts)))


def _check_sources(A, window: ObservationWindow) -> np.ndarray:
    A = check_pattern(A, window, "A")
    if A.size == 0:
        raise ValueError("A must contain at least one event")
    return A


def _trigger_segments(A: np.ndarray, window: ObservationWindow):
    return A, np.append(A[1:], window.end)


def _correlation_cells(A: np.ndarray, window: ObservationWindow):
    mids = 0.5 * (A[1:] + A[:-1])
    lo = np.concatenate([[window.start], mids])
    hi = np.concatenate([mids, [window.end]])
    return lo, hi


def triggered_set(A, window: ObservationWindow, y: float) -> IntervalUnion:
    """``Tr(y)``: the union of ``[a_i, min(a_i + y, a_{i+1}, end))``."""
    if y < 0:
        raise ValueError("y must be nonnegative")
    A = _check_sources(A, window)
    starts, seg_end = _trigger_segments(A, window)
    return IntervalUnion.from_pairs(starts, np.minimum(starts + y, seg_end))


def correlation_set(A, window: ObservationWindow, y: float) -> IntervalUnion:
    """``Cr(y)``: times within ``y`` of their nearest A event, cut at midpoints."""
    if y < 0:
        raise ValueError("y must be nonnegative")
    A = _check_sources(A, window)
    lo, hi = _correlation_cells(A, window)
    return IntervalUnion.from_pairs(np.maximum(A - y, lo), np.minimum(A + y, hi))


def region_measure(A, intensity: NullIntensity, y, mode: Mode = "triggering") -> np.ndarray:
    """``mu(y) = rho(region(y))`` evaluated for an array of ranges ``y``.

    Equivalent to ``rho(triggered_set(...))`` (or the correlation analogue)
    but vectorized over ``y``.
    """
    window = intensity.window
    A = _check_sources(A, window)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("y must be nonnegative")
    flat = y.reshape(-1, 1)
    if mode == "triggering":
        starts, seg_end = _trigger_segments(A, window)
        upper = intensity.cdf(np.minimum(starts + flat, seg_end))
        lower = intensity.cdf(starts)
    elif mode == "correlation":
        lo, hi = _correlation_cells(A, window)
        upper = intensity.cdf(np.minimum(A + flat, hi))
        lower = intensity.cdf(np.maximum(A - flat, lo))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    out = np.clip(np.sum(upper - lower, axis=1), 0.0, 1.0)
    return out.reshape(y.shape)


def response_times(A, B, mode: Mode = "triggering") -> np.ndarray:
    """Distance from each B event to its reference A event.

    Triggering: ``b - a(b)`` with ``a(b)`` the latest A event at or before
    ``b``. Correlation: ``|b - a~(b)|`` with ``a~`` the nearest A event, ties
    going to the earlier one.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    idx = np.searchsorted(A, B, side="right") - 1
    if mode == "triggering":
        if np.any(idx < 0):
            raise ValueError("a B event precedes the first A event")
        return B - A[idx]
    if mode == "correlation":
        before = np.where(idx >= 0, B - A[np.clip(idx, 0, None)], np.inf)
        after_idx = np.clip(idx + 1, 0, A.size - 1)
        after = np.where(idx + 1 < A.size, A[after_idx] - B, np.inf)
        return np.minimum(before, after)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True, eq=False)
class TransformedSample:
    """Sorted u-values with the response time and B index behind each one.

    Sorted by ``(u, response)``, then by original index. ``u_max`` is the
    region measure at ``tau_max`` in time-limited mode.
    """

    u: np.ndarray
    response: np.ndarray
    index: np.ndarray
    mode: Mode = "triggering"
    u_max: float | None = None
    tau_max: float | None = None
    degenerate: bool = field(default=False)

    @property
    def n(self) -> int:
        return int(self.u.size)


def transform(A, B, intensity: NullIntensity, mode: Mode = "triggering", tau_max: float | None = None) -> TransformedSample:
    """Map B events to sorted u-values (triggering) or v-values (correlation)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    window = intensity.window
    A = _check_sources(A, window)
    B = check_pattern(B, window, "B")
    if mode == "triggering":
        if A[0] != window.start:
            raise ValueError("triggering mode needs the window to start at the first A event; use align_to_source")
        if B.size and B[0] < A[0]:
            raise ValueError("a B event precedes the first A event")
    d = response_times(A, B, mode)
    u = region_measure(A, intensity, d, mode)
    order = np.lexsort((np.arange(B.size), d, u))
    u_max = None
    if tau_max is not None:
        if not tau_max > 0:
            raise ValueError("tau_max must be positive")
        u_max = float(region_measure(A, intensity, tau_max, mode))
    return TransformedSample(
        u=u[order],
        response=d[order],
        index=order,
        mode=mode,
        u_max=u_max,
        tau_max=tau_max,
        degenerate=bool(np.any(u == 0.0)),
    )


def align_to_source(A, B, intensity: NullIntensity):
    """Start the analysis at the first A event.

    Drops B events before ``a_1`` and restricts the intensity to
    ``[a_1, end)``. Returns ``(B_kept, intensity_restricted, n_dropped)``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.size == 0:
        raise ValueError("A must contain at least one event")
    keep = B >= A[0]
    restricted = intensity if A[0] == intensity.breakpoints[0] else intensity.restrict(float(A[0]))
    return B[keep], restricted, int(np.count_nonzero(~keep))
