"""Generalised likelihood-ratio statistic and its maximisers.

Everything lives on the log scale: ``log_T = max_k log ell_k`` over the
feasible ranks, where ``ell_k`` is the likelihood ratio of a change in
the u-value intensity at ``u_k``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import xlogy

from .exactp import p_value
from .measure import Mode, NullIntensity, TransformedSample, align_to_source, transform

__all__ = [
    "GlrOutcome",
    "Maximum",
    "DegenerateDataWarning",
    "log_ell",
    "maximize",
    "run_test",
]


class DegenerateDataWarning(UserWarning):
    """A u-value is exactly zero, which has probability zero under the null."""


def log_ell(k, n, u_k):
    """``log ell_k`` for rank ``k`` of ``n`` at u-value ``u_k``.

    Vectorized over ``k`` and ``u_k``. ``0 log 0`` terms vanish, so ``k = n``
    drops the second term; ``u_k = 0`` gives ``+inf``.
    """
    k = np.asarray(k, dtype=float)
    u_k = np.asarray(u_k, dtype=float)
    p = k / n
    q = 1.0 - p
    with np.errstate(divide="ignore"):
        out = xlogy(p, p) - xlogy(p, u_k) + xlogy(q, q) - xlogy(q, 1.0 - u_k)
    out = np.where(u_k == 0.0, np.inf, out)
    return out[()] if out.ndim == 0 else out


class Maximum(NamedTuple):
    k_hat: int | None
    log_T: float
    lambda1_hat: float | None
    lambda2_hat: float | None


def maximize(sample: TransformedSample) -> Maximum:
    """Run the rank search on a transformed sample.

    ``k_hat`` maximizes ``log ell_k`` over ``u_k <= k/n`` (further capped at
    ``u_max`` in time-limited mode), smallest ``k`` on ties. An empty
    feasible set (time-limited only) returns ``log_T = 0`` and no estimates.
    """
    u = sample.u
    n = u.size
    if n == 0:
        raise ValueError("maximize needs at least one u-value")
    k = np.arange(1, n + 1)
    bound = k / n
    if sample.u_max is not None:
        bound = np.minimum(bound, sample.u_max)
    feasible = u <= bound
    if not feasible.any():
        return Maximum(None, 0.0, None, None)
    scores = np.where(feasible, log_ell(k, n, u), -np.inf)
    j = int(np.argmax(scores))
    k_hat = j + 1
    u_hat = float(u[j])
    lam1 = math.inf if u_hat == 0.0 else k_hat / u_hat
    lam2 = (n - k_hat) / (1.0 - u_hat)
    return Maximum(k_hat, max(float(scores[j]), 0.0), lam1, lam2)


@dataclass(frozen=True)
class GlrOutcome:
    """Result of one test. Rates are per unit of ``rho``-time."""

    log_T: float
    p_value: float
    n: int
    k_hat: int | None = None
    tau_hat: float | None = None
    lambda1_hat: float | None = None
    lambda2_hat: float | None = None
    degenerate: bool = False
    mode: str = "triggering"
    tau_max: float | None = None
    u_max: float | None = None

    @property
    def T(self) -> float:
        return math.exp(self.log_T) if self.log_T < 709.0 else math.inf

    def to_dict(self) -> dict:
        """JSON-safe dict; infinities become the string ``"inf"``."""
        return {k: ("inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict) -> "GlrOutcome":
        return cls(**{k: (math.inf if v == "inf" else v) for k, v in data.items()})


def run_test(
    A,
    B,
    intensity: NullIntensity,
    mode: Mode = "triggering",
    tau_max: float | None = None,
    align: bool = False,
) -> GlrOutcome:
    """Transform, maximize and compute the exact p-value.

    With ``align=True`` in triggering mode the analysis window is moved to
    the first A event first (see :func:`align_to_source`).
    """
    if align and mode == "triggering":
        B, intensity, _ = align_to_source(A, B, intensity)
    sample = transform(A, B, intensity, mode, tau_max)
    n = sample.n
    if n == 0:
        return GlrOutcome(0.0, 1.0, 0, mode=mode, tau_max=tau_max, u_max=sample.u_max)
    best = maximize(sample)
    tau_hat = None if best.k_hat is None else float(sample.response[best.k_hat - 1])
    degenerate = bool(sample.degenerate or (best.lambda1_hat is not None and math.isinf(best.lambda1_hat)))
    if degenerate:
        warnings.warn("zero u-value: a B event coincides with an A event; jitter the input", DegenerateDataWarning, stacklevel=2)
    if best.k_hat is None:
        p = 1.0
    else:
        p = p_value(best.log_T, n, sample.u_max)
    return GlrOutcome(
        log_T=best.log_T,
        p_value=p,
        n=n,
        k_hat=best.k_hat,
        tau_hat=tau_hat,
        lambda1_hat=best.lambda1_hat,
        lambda2_hat=best.lambda2_hat,
        degenerate=degenerate,
        mode=mode,
        tau_max=tau_max,
        u_max=sample.u_max,
    )
