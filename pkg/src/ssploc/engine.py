"""Bayes localization over a radio map, memoryless or with a short-term-memory
prior window centered on the previous position estimate, plus sequential
trajectory tracking."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .backend import kernels
from .fingerprints import Location, RadioMap, ScanSet
from .likelihood import EPS_FLOOR
from .windows import PriorWindow, window_weights

MATCHING_MODES = ("per_scan_product", "mean_scan")


class EmptyPriorSupportError(ValueError):
    """Every reference point got zero prior weight (window too narrow or the
    previous estimate too far from the map)."""


@dataclass(frozen=True)
class TrackConfig:
    """Knobs for one tracking run.

    ``d_max = v_max * delta_t`` is the farthest a user can move between
    consecutive measurements and is the natural scale for the window sigma.
    """

    window: PriorWindow
    v_max: float = 4.0
    delta_t: float = 1.0
    top_k: int = 1
    matching_mode: str = "per_scan_product"

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.matching_mode not in MATCHING_MODES:
            raise ValueError(f"matching_mode must be one of {MATCHING_MODES}")
        if not (self.v_max > 0 and self.delta_t > 0):
            raise ValueError("v_max and delta_t must be positive")

    @property
    def d_max(self) -> float:
        return self.v_max * self.delta_t


@dataclass(frozen=True)
class TrackState:
    """Per-trajectory memory: the previous estimate (absent before the first
    step and right after an alignment reset) and the step counter."""

    previous_estimate: Optional[Location] = None
    step_index: int = 0


@dataclass(frozen=True)
class StepEstimate:
    """One step's output: the position, full posterior diagnostics and the
    wall time the step took."""

    estimate: Location
    posterior: np.ndarray
    top_k_ids: tuple
    log_likelihoods: np.ndarray
    degraded: bool = False
    step_seconds: float = 0.0


def log_likelihood_over_map(radio_map: RadioMap, scans: ScanSet, mode: str = "per_scan_product") -> np.ndarray:
    """Length-M vector of ln P(scans | reference point i).

    per_scan_product sums log densities over every scan; mean_scan averages
    the scans per feature first and scores the single averaged reading.
    """
    if mode not in MATCHING_MODES:
        raise ValueError(f"matching mode must be one of {MATCHING_MODES}")
    if scans.feature_count != radio_map.feature_count:
        raise ValueError(
            f"scan feature count {scans.feature_count} does not match "
            f"radio map feature count {radio_map.feature_count}"
        )
    x = scans.matrix()
    if mode == "mean_scan":
        x = x.mean(axis=0, keepdims=True)
    p = radio_map.packed()
    kind = p["family"]
    if kind == "gaussian":
        return kernels.gaussian_loglik(x, p["mean"], p["std"], EPS_FLOOR)
    if kind == "mixture2":
        return kernels.mixture2_loglik(x, p["w"], p["mu"], p["sg"], EPS_FLOOR)
    if kind == "lognormal":
        return kernels.lognormal_loglik(x, p["shift"], p["mu"], p["sg"], EPS_FLOOR)
    if kind == "histogram":
        return kernels.histogram_loglik(
            x, p["first_edge"], p["width"], p["nbins"], p["offsets"], p["dens"], EPS_FLOOR
        )
    if kind == "kernel":
        return kernels.kde_loglik(x, p["samples"], p["offsets"], p["counts"], p["bw"], EPS_FLOOR)
    raise ValueError(f"no kernel for packed family {kind!r}")


def uniform_prior(radio_map: RadioMap) -> np.ndarray:
    return np.full(radio_map.size, 1.0 / radio_map.size)


def prior_over_map(radio_map: RadioMap, l_pre: Location, window: PriorWindow) -> np.ndarray:
    """Normalized prior over reference points from a window centered on the
    previous estimate. Raises EmptyPriorSupportError when every point gets
    zero weight."""
    locs = radio_map.locations
    dists = np.hypot(locs[:, 0] - l_pre.x, locs[:, 1] - l_pre.y)
    w = window_weights(window, dists)
    total = w.sum()
    if total <= 0.0:
        raise EmptyPriorSupportError(
            f"no reference point within the {window.family} window "
            f"(sigma={window.sigma} m) around ({l_pre.x:.2f}, {l_pre.y:.2f})"
        )
    return w / total


def posterior(log_liks: np.ndarray, prior: np.ndarray) -> np.ndarray:
    """Posterior over reference points from log likelihoods and a prior.

    Combined in the log domain with max subtraction, so a uniform scaling of
    the likelihoods cannot change the result and zero-prior points stay at
    exactly zero.
    """
    log_liks = np.asarray(log_liks, dtype=float)
    prior = np.asarray(prior, dtype=float)
    if log_liks.shape != prior.shape:
        raise ValueError("log likelihood and prior vectors must have equal length")
    if not np.any(prior > 0):
        raise ValueError("prior has no support")
    with np.errstate(divide="ignore"):
        logp = log_liks + np.log(prior)
    m = logp.max()
    p = np.exp(logp - m)
    return p / p.sum()


def estimate_location(radio_map: RadioMap, post: np.ndarray, top_k: int, weighted: bool = False):
    """Average the coordinates of the top-K posterior reference points.

    K=1 is the plain argmax. Ties break toward the lower rp_id. The optional
    posterior-weighted average is off by default.
    """
    m = radio_map.size
    if not 1 <= top_k <= m:
        raise ValueError(f"top_k must be in [1, {m}]")
    post = np.asarray(post, dtype=float)
    order = sorted(range(m), key=lambda i: (-post[i], radio_map.points[i].rp_id))
    chosen = order[:top_k]
    coords = radio_map.locations[chosen]
    if weighted:
        w = post[chosen]
        w = w / w.sum() if w.sum() > 0 else np.full(len(chosen), 1.0 / len(chosen))
        x, y = float(w @ coords[:, 0]), float(w @ coords[:, 1])
    else:
        x, y = float(coords[:, 0].mean()), float(coords[:, 1].mean())
    return Location(x, y), tuple(radio_map.points[i].rp_id for i in chosen)


def step(
    radio_map: RadioMap,
    state: TrackState,
    scans: ScanSet,
    cfg: TrackConfig,
    history_error: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> tuple:
    """One tracking step: build the prior from the previous estimate (uniform
    when there is none), combine with the scan likelihoods and estimate the
    position. Returns (StepEstimate, next TrackState).

    ``history_error`` > 0 perturbs the prior center with the configured
    Gaussian error before the window is applied (robustness protocol); the
    posterior memory itself stays unperturbed.
    """
    t0 = time.perf_counter()
    degraded = False
    if state.previous_estimate is None:
        prior = uniform_prior(radio_map)
    else:
        center = state.previous_estimate
        if history_error > 0.0:
            from .simulator import inject_history_error

            center = inject_history_error(center, history_error, rng)
        try:
            prior = prior_over_map(radio_map, center, cfg.window)
        except EmptyPriorSupportError:
            prior = uniform_prior(radio_map)
            degraded = True
    ll = log_likelihood_over_map(radio_map, scans, cfg.matching_mode)
    post = posterior(ll, prior)
    estimate, top_ids = estimate_location(radio_map, post, cfg.top_k)
    elapsed = time.perf_counter() - t0
    result = StepEstimate(
        estimate=estimate,
        posterior=post,
        top_k_ids=top_ids,
        log_likelihoods=ll,
        degraded=degraded,
        step_seconds=elapsed,
    )
    return result, TrackState(previous_estimate=estimate, step_index=state.step_index + 1)


def track(
    radio_map: RadioMap,
    trajectory_scans: Sequence[ScanSet],
    cfg: TrackConfig,
    alignment_steps: Iterable[int] = (),
    history_error: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> list:
    """Run ``step`` along a scan sequence, threading the previous estimate.

    At indices in ``alignment_steps`` the memory is cleared before stepping,
    so that step falls back to the uniform prior (stationary-user reset).
    """
    if not trajectory_scans:
        raise ValueError("trajectory must contain at least one scan set")
    align = set(alignment_steps)
    state = TrackState()
    estimates = []
    for idx, scans in enumerate(trajectory_scans):
        if idx in align:
            state = TrackState(previous_estimate=None, step_index=state.step_index)
        est, state = step(radio_map, state, scans, cfg, history_error=history_error, rng=rng)
        estimates.append(est)
    return estimates
