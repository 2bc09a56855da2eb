"""Information backflow and outflow of a sampled echo ``|chi(t)|``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DecoherenceSeries, TimeGrid, decoherence_series
from .lattice import LatticeConfig

# absolute differences at or below this count as plateaus
PLATEAU = 1e-15


@dataclass(frozen=True)
class MonotoneSegments:
    """Index intervals ``(k1, k2)`` of maximal strictly rising/falling runs."""

    rising: list[tuple[int, int]] = field(default_factory=list)
    falling: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True)
class BackflowReport:
    backflow: float
    outflow: float
    ratio: float
    segments: MonotoneSegments
    t_max: float
    n_samples: int
    final_magnitude: float
    converged: bool | None = None
    history: tuple[tuple[int, float], ...] = ()


def _magnitudes(series) -> np.ndarray:
    if isinstance(series, DecoherenceSeries):
        return series.magnitude
    return np.asarray(series, dtype=float)


def _steps(mag: np.ndarray) -> np.ndarray:
    d = np.diff(mag)
    d[np.abs(d) <= PLATEAU] = 0.0
    return d


def segment_monotone(series) -> MonotoneSegments:
    """Split the sample sequence into maximal runs of rising and falling steps.

    Accepts a :class:`DecoherenceSeries` or a bare sequence of magnitudes.
    Plateau steps belong to neither list and end the current run.
    """
    d = np.sign(_steps(_magnitudes(series))).astype(int)
    rising, falling = [], []
    if d.size == 0:
        return MonotoneSegments(rising, falling)
    # run boundaries wherever the step sign changes
    edges = np.flatnonzero(np.diff(d)) + 1
    starts = np.concatenate(([0], edges))
    stops = np.concatenate((edges, [d.size]))
    for a, b in zip(starts, stops):
        s = d[a]
        if s > 0:
            rising.append((int(a), int(b)))
        elif s < 0:
            falling.append((int(a), int(b)))
    return MonotoneSegments(rising, falling)


def interval_flows(series, segments: MonotoneSegments | None = None) -> tuple[float, float]:
    """Backflow and outflow summed as endpoint differences over monotone intervals."""
    mag = _magnitudes(series)
    if segments is None:
        segments = segment_monotone(mag)
    up = sum(mag[b] - mag[a] for a, b in segments.rising)
    down = sum(mag[a] - mag[b] for a, b in segments.falling)
    return float(up), float(down)


def rectified_flows(series) -> tuple[float, float]:
    """Backflow and outflow as sums of the positive and negative sample steps."""
    d = _steps(_magnitudes(series))
    return math.fsum(d[d > 0]), math.fsum(np.abs(d[d < 0]))


def memory_ratio(backflow: float, outflow: float) -> float:
    """``backflow / outflow``; zero when nothing ever flowed out."""
    return backflow / outflow if outflow > 0 else 0.0


def backflow_report(series: DecoherenceSeries) -> BackflowReport:
    segments = segment_monotone(series)
    up, down = rectified_flows(series)
    mag = _magnitudes(series)
    ratio = memory_ratio(up, down)
    if mag[-1] <= mag[0]:
        # exact flows then satisfy up <= down; trim the rounding excess
        ratio = min(ratio, 1.0)
    return BackflowReport(
        backflow=up,
        outflow=down,
        ratio=ratio,
        segments=segments,
        t_max=series.grid.t_max,
        n_samples=series.grid.n_samples,
        final_magnitude=float(series.magnitude[-1]),
    )


def refine_until_stable(config: LatticeConfig, grid0: TimeGrid, rel_tol: float = 0.01,
                        max_doublings: int = 3, series_fn=None) -> BackflowReport:
    """Halve the sample spacing until the memory ratio stops moving.

    Stops when ``|R_fine - R_coarse| <= rel_tol * max(R_fine, 1e-6)`` or after
    ``max_doublings`` refinements. The finest report is returned with
    ``converged`` set and the ``(n_samples, R)`` ladder in ``history``.
    ``series_fn(config, grid)`` replaces :func:`decoherence_series`, e.g. to
    certify an analytic test signal.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")
    if series_fn is None:
        series_fn = decoherence_series
    grid = grid0
    report = backflow_report(series_fn(config, grid))
    history = [(grid.n_samples, report.ratio)]
    converged = False
    for _ in range(max_doublings):
        grid = grid.refined()
        fine = backflow_report(series_fn(config, grid))
        history.append((grid.n_samples, fine.ratio))
        change = abs(fine.ratio - report.ratio)
        report = fine
        if change <= rel_tol * max(fine.ratio, 1e-6):
            converged = True
            break
    return BackflowReport(
        report.backflow, report.outflow, report.ratio, report.segments,
        report.t_max, report.n_samples, report.final_magnitude,
        converged=converged, history=tuple(history),
    )
