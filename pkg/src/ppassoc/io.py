"""CSV ingestion for event streams, intensities and pair lists."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .measure import NullIntensity, ObservationWindow, build_intensity

__all__ = [
    "InputError",
    "EventRecord",
    "EventStream",
    "DEFAULT_STREAM",
    "read_events",
    "parse_events",
    "read_intensity",
    "write_intensity",
    "read_pairs",
    "write_events",
]

DEFAULT_STREAM = "events"


class InputError(ValueError):
    """Malformed or inconsistent input file."""


@dataclass(frozen=True)
class EventRecord:
    time: float
    stream: str | None = None
    payload: str | None = None
    line: int = 0


@dataclass(frozen=True, eq=False)
class EventStream:
    times: np.ndarray
    payloads: list[str | None]


def _open_dict_reader(path, required):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc.strerror}") from exc
    reader = csv.DictReader(fh)
    header = [h.strip() for h in (reader.fieldnames or [])]
    missing = [c for c in required if c not in header]
    if missing:
        fh.close()
        raise InputError(f"{path}: header must contain {', '.join(required)}; got {header}")
    reader.fieldnames = header
    return fh, reader


def read_events(path) -> list[EventRecord]:
    """Rows of a ``time[,stream][,payload]`` CSV in file order."""
    fh, reader = _open_dict_reader(path, ["time"])
    out = []
    with fh:
        for row in reader:
            line = reader.line_num
            try:
                t = float(row["time"])
            except (TypeError, ValueError):
                raise InputError(f"{path}:{line}: bad time {row.get('time')!r}") from None
            if not math.isfinite(t):
                raise InputError(f"{path}:{line}: time must be finite")
            stream = row.get("stream")
            if stream is not None:
                stream = stream.strip()
                if not stream:
                    raise InputError(f"{path}:{line}: empty stream id")
            out.append(EventRecord(t, stream, row.get("payload"), line))
    return out


def parse_events(path, jitter: float | None = None, seed: int = 0) -> dict[str, EventStream]:
    """Group rows by stream into sorted patterns.

    Duplicate times inside a stream are an error unless ``jitter`` is given,
    in which case each tied event gets a seeded uniform offset in
    ``[0, jitter)``.
    """
    records = read_events(path)
    groups: dict[str, list[EventRecord]] = {}
    for rec in records:
        groups.setdefault(rec.stream or DEFAULT_STREAM, []).append(rec)
    rng = np.random.default_rng(seed)
    streams = {}
    for name in groups:
        recs = sorted(groups[name], key=lambda r: r.time)
        times = np.array([r.time for r in recs])
        payloads = [r.payload for r in recs]
        tied = np.zeros(times.size, dtype=bool)
        if times.size > 1:
            dup = np.diff(times) == 0
            tied[1:] |= dup
            tied[:-1] |= dup
        if tied.any():
            if jitter is None:
                lines = [recs[i].line for i in np.flatnonzero(tied)]
                raise InputError(
                    f"{path}: duplicate times in stream {name!r} at rows {lines}; use --jitter to break ties"
                )
            times = times + np.where(tied, rng.uniform(0.0, jitter, times.size), 0.0)
            order = np.argsort(times, kind="stable")
            times = times[order]
            payloads = [payloads[i] for i in order]
            if np.any(np.diff(times) <= 0):
                raise InputError(f"{path}: jitter {jitter} did not separate tied times in stream {name!r}")
        streams[name] = EventStream(times, payloads)
    return streams


def write_events(path, streams: dict[str, np.ndarray], payloads: dict[str, list] | None = None) -> None:
    rows = []
    for name, times in streams.items():
        pl = (payloads or {}).get(name)
        for k, t in enumerate(times):
            rows.append((float(t), name, "" if pl is None else pl[k]))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "stream", "payload"])
        for t, name, p in rows:
            w.writerow([repr(t), name, p])


def read_intensity(path, window: ObservationWindow | None = None) -> NullIntensity:
    """Intensity CSV ``breakpoint,density``; the last row's density is ignored."""
    fh, reader = _open_dict_reader(path, ["breakpoint", "density"])
    bp, dens = [], []
    with fh:
        for row in reader:
            try:
                bp.append(float(row["breakpoint"]))
                dens.append(float(row["density"]) if row["density"] not in (None, "") else math.nan)
            except (TypeError, ValueError):
                raise InputError(f"{path}:{reader.line_num}: bad intensity row") from None
    if len(bp) < 2:
        raise InputError(f"{path}: need at least two rows")
    try:
        return build_intensity(bp, dens[:-1], window)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_intensity(path, intensity: NullIntensity) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["breakpoint", "density"])
        for b, d in zip(intensity.breakpoints[:-1], intensity.densities):
            w.writerow([repr(float(b)), repr(float(d))])
        w.writerow([repr(float(intensity.breakpoints[-1])), "0"])


def read_pairs(path) -> list[tuple[str, str]]:
    fh, reader = _open_dict_reader(path, ["source", "target"])
    with fh:
        return [(row["source"].strip(), row["target"].strip()) for row in reader]
