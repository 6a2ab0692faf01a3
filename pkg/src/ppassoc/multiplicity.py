"""Benjamini-Hochberg screening over batches of pairwise tests."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .glrt import GlrOutcome, run_test
from .measure import NullIntensity, response_times

__all__ = [
    "TIERS",
    "ScreenEntry",
    "ScreenResult",
    "ReportLine",
    "TriggeringReport",
    "bh_reject",
    "screen",
    "triggering_report",
]

TIERS = ("fdr-rejected", "nominal-0.05", "not-significant")
NOMINAL_LEVEL = 0.05


def bh_reject(p_values, q: float) -> list[int]:
    """Benjamini-Hochberg step-up: indices of rejected hypotheses, ascending.

    Rejects the ``k*`` smallest p-values with ``k* = max{k : p_(k) <= k q / m}``.
    Tied p-values at the boundary fall on the same side.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    p = np.asarray(p_values, dtype=float).ravel()
    m = p.size
    if m == 0:
        return []
    if np.any(np.isnan(p)) or np.any(p < 0) or np.any(p > 1):
        raise ValueError("p-values must lie in [0, 1]")
    order = np.argsort(p, kind="stable")
    below = p[order] <= q * np.arange(1, m + 1) / m
    if not below.any():
        return []
    cutoff = p[order][np.flatnonzero(below)[-1]]
    return [int(i) for i in np.flatnonzero(p <= cutoff)]


@dataclass(frozen=True)
class ScreenEntry:
    source: str
    target: str
    outcome: GlrOutcome


@dataclass
class ScreenResult:
    entries: list[ScreenEntry]
    q: float
    rejected: list[int] = field(default_factory=list)
    tiers: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "rejected": list(self.rejected),
            "entries": [
                {"source": e.source, "target": e.target, "tier": t, "outcome": e.outcome.to_dict()}
                for e, t in zip(self.entries, self.tiers)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScreenResult":
        entries = [ScreenEntry(e["source"], e["target"], GlrOutcome.from_dict(e["outcome"])) for e in data["entries"]]
        return cls(entries, data["q"], list(data["rejected"]), [e["tier"] for e in data["entries"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_matrix_csv(self, path) -> None:
        """Rows are sources, columns targets, cells the tier (blank if untested)."""
        sources = list(dict.fromkeys(e.source for e in self.entries))
        targets = list(dict.fromkeys(e.target for e in self.entries))
        cell = {(e.source, e.target): t for e, t in zip(self.entries, self.tiers)}
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["source", *targets])
            for s in sources:
                w.writerow([s, *(cell.get((s, t), "") for t in targets)])


def _tiers(p: np.ndarray, rejected: Sequence[int]) -> list[str]:
    rej = set(rejected)
    out = []
    for i, pv in enumerate(p):
        if i in rej:
            out.append(TIERS[0])
        elif pv < NOMINAL_LEVEL:
            out.append(TIERS[1])
        else:
            out.append(TIERS[2])
    return out


def screen(
    pairs: Sequence[tuple[str, str, np.ndarray, np.ndarray]],
    intensity: NullIntensity,
    q: float = 0.1,
    mode: str = "triggering",
    tau_max: float | None = None,
    threads: int = 1,
) -> ScreenResult:
    """Test every ``(source_id, target_id, A, B)`` pair and apply BH at level ``q``.

    In triggering mode each pair is analysed from its own first A event.
    """

    def one(item):
        _, _, A, B = item
        return run_test(A, B, intensity, mode, tau_max, align=True)

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, pairs))
    else:
        outcomes = [one(item) for item in pairs]
    entries = [ScreenEntry(s, t, o) for (s, t, _, _), o in zip(pairs, outcomes)]
    if not entries:
        return ScreenResult([], q)
    p = np.array([o.p_value for o in outcomes])
    rejected = bh_reject(p, q)
    return ScreenResult(entries, q, rejected, _tiers(p, rejected))


@dataclass(frozen=True)
class ReportLine:
    time: float
    lag: float
    payload: str | None = None


@dataclass
class TriggeringReport:
    """The closest A-then-B event pair and the B events it plausibly triggered."""

    source_time: float | None
    source_payload: str | None
    responses: list[ReportLine]
    notice: str | None = None

    def to_dict(self) -> dict:
        return {
            "source_time": self.source_time,
            "source_payload": self.source_payload,
            "responses": [vars(r) for r in self.responses],
            "notice": self.notice,
        }


def triggering_report(
    A,
    B,
    outcome: GlrOutcome,
    source_payloads: Sequence[str | None] | None = None,
    target_payloads: Sequence[str | None] | None = None,
) -> TriggeringReport:
    """List the B events in ``[e, e + tau_hat]`` after the most triggering A event ``e``.

    ``e`` is the A event with the shortest lag to a following B event.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    after = B >= A[0] if A.size else np.zeros(B.size, dtype=bool)
    if not after.any():
        return TriggeringReport(None, None, [], "no B event follows an A event")
    idx = np.flatnonzero(after)
    lags = response_times(A, B[idx], "triggering")
    best = int(idx[int(np.argmin(lags))])
    src = int(np.searchsorted(A, B[best], side="right") - 1)
    e = float(A[src])
    src_payload = source_payloads[src] if source_payloads is not None else None
    if outcome.tau_hat is None:
        return TriggeringReport(e, src_payload, [], "no tau estimate; the test found no feasible change")
    hits = np.flatnonzero((B >= e) & (B <= e + outcome.tau_hat))
    lines = [
        ReportLine(float(B[j]), float(B[j] - e), target_payloads[j] if target_payloads is not None else None)
        for j in hits
    ]
    return TriggeringReport(e, src_payload, lines)
