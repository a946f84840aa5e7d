"""Error statistics for tracking runs: per-step errors, summary reports with
CDFs, improvement ratios and the window/sigma sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, Sequence, Tuple

import numpy as np

from .engine import TrackConfig, track
from .fingerprints import Location, RadioMap, euclidean_distance
from .windows import PriorWindow

CDF_STEP = 0.25


@dataclass(frozen=True)
class ErrorReport:
    """Summary of one tracking run's localization errors."""

    errors: tuple
    mean: float
    std: float
    max: float
    median: float
    cdf: tuple
    flags: int = 0
    step_seconds: tuple = ()

    @property
    def mean_step_seconds(self) -> float:
        return float(np.mean(self.step_seconds)) if self.step_seconds else 0.0


def localization_errors(estimates: Sequence, truth: Sequence[Location]) -> list:
    """Per-step distance between each estimate and the true position."""
    if len(estimates) != len(truth):
        raise ValueError(f"got {len(estimates)} estimates but {len(truth)} truth points")
    return [euclidean_distance(e.estimate, t) for e, t in zip(estimates, truth)]


def summarize(errors: Sequence[float], flags: int = 0, step_seconds: Sequence[float] = ()) -> ErrorReport:
    """Mean/std/max/median plus a CDF sampled every 0.25 m up to the max
    error. std uses the population (1/n) convention."""
    arr = np.asarray(list(errors), dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one error value")
    emax = float(arr.max())
    n_thresholds = max(1, math.ceil(emax / CDF_STEP - 1e-12))
    cdf = []
    for i in range(1, n_thresholds + 1):
        thr = i * CDF_STEP
        cdf.append((thr, float((arr <= thr).mean())))
    return ErrorReport(
        errors=tuple(float(e) for e in arr),
        mean=float(arr.mean()),
        std=float(arr.std()),
        max=emax,
        median=float(np.median(arr)),
        cdf=tuple(cdf),
        flags=int(flags),
        step_seconds=tuple(float(t) for t in step_seconds),
    )


def report_from_run(estimates: Sequence, truth: Sequence[Location]) -> ErrorReport:
    """Summarize a tracking run, carrying over degraded-step flags and
    per-step wall times."""
    errors = localization_errors(estimates, truth)
    flags = sum(1 for e in estimates if e.degraded)
    times = [e.step_seconds for e in estimates]
    return summarize(errors, flags=flags, step_seconds=times)


def improvement_ratio(baseline: ErrorReport, ssp: ErrorReport) -> float:
    """Fractional mean-error reduction of ``ssp`` relative to ``baseline``."""
    if baseline.mean == 0:
        raise ValueError("baseline mean error is zero; ratio undefined")
    return (baseline.mean - ssp.mean) / baseline.mean


def sigma_sweep(
    radio_map: RadioMap,
    trajectory: Sequence[tuple],
    families: Sequence[str],
    sigmas: Sequence[float],
    cfg: TrackConfig,
) -> Dict[Tuple[str, float], ErrorReport]:
    """Track the same trajectory once per (window family, sigma) cell.

    ``trajectory`` is a list of (true Location, ScanSet) pairs, so every cell
    scores identical scans. Returns {(family, sigma): ErrorReport}.
    """
    truth = [loc for loc, _ in trajectory]
    scans = [s for _, s in trajectory]
    table = {}
    for family in families:
        for sigma in sigmas:
            cell_cfg = replace(cfg, window=PriorWindow(family, float(sigma)))
            estimates = track(radio_map, scans, cell_cfg)
            table[(family, float(sigma))] = report_from_run(estimates, truth)
    return table
