"""Short-term-memory prior windows: weight a reference point by its distance
from the previous position estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

WINDOW_FAMILIES = ("circular", "gaussian", "hann", "tukey", "uniform")


@dataclass(frozen=True)
class PriorWindow:
    """A window family plus its spread sigma (meters).

    The uniform family ignores sigma and recovers the memoryless pipeline.
    """

    family: str
    sigma: float = 1.0

    def __post_init__(self):
        if self.family not in WINDOW_FAMILIES:
            raise ValueError(f"unknown window family {self.family!r}; expected one of {WINDOW_FAMILIES}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be finite and positive, got {self.sigma}")


def window_prob(window: PriorWindow, d: float) -> float:
    """Unnormalized prior weight in [0, 1] at distance ``d`` from the
    previous estimate.

    circular is a hard cutoff (inclusive at the radius); gaussian decays as
    exp(-d^2 / 2 sigma^2); hann as cos^2(pi d / (2 (d + sigma))); tukey is
    flat inside sigma and then follows (1 + cos(pi d / (2 (d + sigma)))) / 2.
    """
    if d < 0:
        raise ValueError(f"distance must be non-negative, got {d}")
    s = window.sigma
    f = window.family
    if f == "uniform":
        return 1.0
    if f == "circular":
        return 1.0 if d <= s else 0.0
    if f == "gaussian":
        return math.exp(-(d * d) / (2.0 * s * s))
    if f == "hann":
        return math.cos(math.pi * d / (2.0 * (d + s))) ** 2
    if f == "tukey":
        if d < s:
            return 1.0
        return 0.5 * (1.0 + math.cos(math.pi * d / (2.0 * (d + s))))
    raise ValueError(f"unknown window family {f!r}")


def window_weights(window: PriorWindow, dists: np.ndarray) -> np.ndarray:
    """Vectorized ``window_prob`` over an array of distances."""
    d = np.asarray(dists, dtype=float)
    if np.any(d < 0):
        raise ValueError("distances must be non-negative")
    s = window.sigma
    f = window.family
    if f == "uniform":
        return np.ones_like(d)
    if f == "circular":
        return (d <= s).astype(float)
    if f == "gaussian":
        return np.exp(-(d * d) / (2.0 * s * s))
    if f == "hann":
        return np.cos(np.pi * d / (2.0 * (d + s))) ** 2
    # tukey
    soft = 0.5 * (1.0 + np.cos(np.pi * d / (2.0 * (d + s))))
    return np.where(d < s, 1.0, soft)
