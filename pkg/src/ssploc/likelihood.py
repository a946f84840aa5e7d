"""Per-(reference point, feature) probability density models: parametric
single/double Gaussian and lognormal fits, non-parametric histogram and
Parzen kernel estimates, and the CSI power variant."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .fingerprints import CsiMatrix, RadioMap, RadioPoint, ScanSet, csi_to_scanset

#: Lower clamp on fitted standard deviations (dBm). Repeated identical
#: readings would otherwise train zero-variance spikes.
SIGMA_FLOOR = 0.5
#: Lower clamp on any evaluated density; keeps one bad feature from
#: annihilating a whole posterior.
EPS_FLOOR = 1e-12
#: Additive pseudo-count per histogram bin (zero-count bin smoothing).
EPS_COUNT = 0.5

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _as_samples(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("need at least one sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples must be finite")
    return arr


def _check_query(x: float) -> float:
    x = float(x)
    if math.isnan(x):
        raise ValueError("cannot evaluate a density at NaN")
    return x


def _norm_pdf(x, mean, std):
    z = (x - mean) / std
    return np.exp(-0.5 * z * z) / (std * _SQRT_2PI)


@dataclass(frozen=True)
class SingleGaussian:
    """Single-peak Gaussian over one feature."""

    mean: float
    std: float
    family = "single_gaussian"

    def evaluate(self, x: float) -> float:
        x = _check_query(x)
        return max(float(_norm_pdf(x, self.mean, self.std)), EPS_FLOOR)


@dataclass(frozen=True)
class DoubleGaussian:
    """Two-component Gaussian mixture; degenerate fits fall back to an
    equivalent single component with weight (1, 0)."""

    weights: tuple
    means: tuple
    stds: tuple
    fell_back: bool = False
    em_trace: tuple = field(default=(), repr=False, compare=False)
    family = "double_gaussian"

    def evaluate(self, x: float) -> float:
        x = _check_query(x)
        dens = sum(
            w * float(_norm_pdf(x, m, s))
            for w, m, s in zip(self.weights, self.means, self.stds)
        )
        return max(dens, EPS_FLOOR)


@dataclass(frozen=True)
class Lognormal:
    """Left-skew lognormal: ln(shift - x) is Gaussian, so the density leans
    toward strong readings and tails off to weak ones."""

    shift: float
    log_mean: float
    log_std: float
    family = "lognormal"

    def evaluate(self, x: float) -> float:
        x = _check_query(x)
        t = self.shift - x
        if t <= 0:
            return EPS_FLOOR
        z = (math.log(t) - self.log_mean) / self.log_std
        dens = math.exp(-0.5 * z * z) / (self.log_std * t * _SQRT_2PI)
        return max(dens, EPS_FLOOR)


@dataclass(frozen=True)
class Histogram:
    """Piecewise-constant density on bins aligned to multiples of the bin
    width; probabilities carry additive smoothing so no occupied-range bin
    is ever zero."""

    first_edge: float
    bin_width: float
    probs: tuple
    family = "histogram"

    def evaluate(self, x: float) -> float:
        x = _check_query(x)
        idx = math.floor((x - self.first_edge) / self.bin_width)
        if 0 <= idx < len(self.probs):
            return max(self.probs[idx] / self.bin_width, EPS_FLOOR)
        return EPS_FLOOR

    @property
    def edges(self) -> np.ndarray:
        return self.first_edge + self.bin_width * np.arange(len(self.probs) + 1)


@dataclass(frozen=True)
class KernelDensity:
    """Parzen estimate: a Gaussian smoothing kernel centered on every
    training sample."""

    samples: tuple
    bandwidth: float
    family = "kernel"

    def evaluate(self, x: float) -> float:
        x = _check_query(x)
        s = np.asarray(self.samples)
        z = (x - s) / self.bandwidth
        dens = float(np.exp(-0.5 * z * z).sum()) / (len(s) * self.bandwidth * _SQRT_2PI)
        return max(dens, EPS_FLOOR)


@dataclass(frozen=True)
class CsiPowerGaussian(SingleGaussian):
    """Single Gaussian over CSI effective power instead of RSSI."""

    family = "csi_power_gaussian"


LikelihoodModel = Union[
    SingleGaussian, DoubleGaussian, Lognormal, Histogram, KernelDensity
]


def evaluate(model, x: float) -> float:
    """Density of ``model`` at ``x``; always finite and >= the eps floor."""
    return model.evaluate(x)


# --- fitting ---------------------------------------------------------------


def fit_single_gaussian(samples) -> SingleGaussian:
    """Gaussian fit with population (1/n) std, clamped at the sigma floor."""
    arr = _as_samples(samples)
    return SingleGaussian(mean=float(arr.mean()), std=max(float(arr.std()), SIGMA_FLOOR))


def _mixture_loglik(arr, w, mu, sg):
    comp = w[None, :] * _norm_pdf(arr[:, None], mu[None, :], sg[None, :])
    return float(np.log(np.maximum(comp.sum(axis=1), EPS_FLOOR)).sum())


def _single_loglik(arr, model: SingleGaussian) -> float:
    dens = np.maximum(_norm_pdf(arr, model.mean, model.std), EPS_FLOOR)
    return float(np.log(dens).sum())


def fit_double_gaussian(samples, max_iter: int = 100, tol: float = 1e-6) -> DoubleGaussian:
    """EM fit of a two-component Gaussian mixture.

    Components start at the 25th/75th sample percentiles with equal weights.
    A degenerate component (collapsed std or vanishing weight), or a mixture
    that ends below the one-component fit, falls back to the single Gaussian
    (flagged on the model, not an error).
    """
    arr = _as_samples(samples)
    if arr.size < 2:
        raise ValueError("need at least two samples for a mixture fit")
    single = fit_single_gaussian(arr)

    def fallback(trace):
        return DoubleGaussian(
            weights=(1.0, 0.0),
            means=(single.mean, single.mean),
            stds=(single.std, single.std),
            fell_back=True,
            em_trace=tuple(trace),
        )

    mu = np.percentile(arr, [25.0, 75.0]).astype(float)
    sg = np.full(2, max(float(arr.std()), SIGMA_FLOOR))
    w = np.array([0.5, 0.5])
    trace = [_mixture_loglik(arr, w, mu, sg)]

    for _ in range(max_iter):
        # E step: responsibilities
        comp = w[None, :] * _norm_pdf(arr[:, None], mu[None, :], sg[None, :])
        total = np.maximum(comp.sum(axis=1, keepdims=True), EPS_FLOOR)
        resp = comp / total
        # M step with the same sigma clamp the one-component fit uses
        nk = resp.sum(axis=0)
        if np.any(nk < EPS_FLOOR):
            return fallback(trace)
        w = nk / arr.size
        mu = (resp * arr[:, None]).sum(axis=0) / nk
        var = (resp * (arr[:, None] - mu[None, :]) ** 2).sum(axis=0) / nk
        raw_sg = np.sqrt(var)
        if np.any(raw_sg < SIGMA_FLOOR / 10.0) or np.any(w < 0.01):
            return fallback(trace)
        sg = np.maximum(raw_sg, SIGMA_FLOOR)
        ll = _mixture_loglik(arr, w, mu, sg)
        gain = ll - trace[-1]
        trace.append(ll)
        if gain < tol:
            break

    if trace[-1] < _single_loglik(arr, single) - 1e-9:
        return fallback(trace)
    order = np.argsort(mu)
    return DoubleGaussian(
        weights=tuple(float(w[i]) for i in order),
        means=tuple(float(mu[i]) for i in order),
        stds=tuple(float(sg[i]) for i in order),
        em_trace=tuple(trace),
    )


def fit_lognormal(samples, shift: Optional[float] = None) -> Lognormal:
    """Left-skew lognormal fit: Gaussian on ln(shift - x).

    ``shift`` defaults to max(samples) + 1 dBm so the log argument stays
    positive. The log-domain std is floored at a value equivalent to the
    dBm-domain sigma floor.
    """
    arr = _as_samples(samples)
    if shift is None:
        shift = float(arr.max()) + 1.0
    elif shift <= arr.max():
        raise ValueError("shift must exceed every sample")
    logs = np.log(shift - arr)
    mu = float(logs.mean())
    # d(shift - e^y)/dy ~ e^mu near the center, so this matches SIGMA_FLOOR
    # in the original units
    floor = SIGMA_FLOOR * math.exp(-mu)
    return Lognormal(shift=float(shift), log_mean=mu, log_std=max(float(logs.std()), floor))


def fit_histogram(samples, bin_width: float = 10.0) -> Histogram:
    """Histogram density with additive smoothing.

    Bins are half-open [k*w, (k+1)*w), aligned to multiples of the width and
    covering the sample range. Every bin gains a pseudo-count so a bin the
    training data happened to miss still carries probability.
    """
    arr = _as_samples(samples)
    if not bin_width > 0:
        raise ValueError("bin width must be positive")
    lo = math.floor(arr.min() / bin_width)
    hi = math.floor(arr.max() / bin_width)
    n_bins = hi - lo + 1
    first_edge = lo * bin_width
    idx = np.floor((arr - first_edge) / bin_width).astype(int)
    counts = np.bincount(np.clip(idx, 0, n_bins - 1), minlength=n_bins).astype(float)
    probs = (counts + EPS_COUNT) / (arr.size + EPS_COUNT * n_bins)
    return Histogram(first_edge=first_edge, bin_width=float(bin_width), probs=tuple(probs))


def silverman_bandwidth(samples) -> float:
    """Silverman's rule of thumb, floored at the sigma floor."""
    arr = _as_samples(samples)
    h = 1.06 * float(arr.std()) * arr.size ** (-0.2)
    return max(h, SIGMA_FLOOR)


def fit_kernel(samples, bandwidth: Optional[float] = None) -> KernelDensity:
    """Parzen estimate storing the raw samples; bandwidth defaults to
    Silverman's rule."""
    arr = _as_samples(samples)
    if bandwidth is None:
        bandwidth = silverman_bandwidth(arr)
    elif not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    return KernelDensity(samples=tuple(float(v) for v in arr), bandwidth=float(bandwidth))


def fit_csi_power_gaussian(samples) -> CsiPowerGaussian:
    """Single Gaussian over effective-power features."""
    arr = _as_samples(samples)
    return CsiPowerGaussian(mean=float(arr.mean()), std=max(float(arr.std()), SIGMA_FLOOR))


FAMILY_FITTERS = {
    "single_gaussian": fit_single_gaussian,
    "double_gaussian": fit_double_gaussian,
    "lognormal": fit_lognormal,
    "histogram": fit_histogram,
    "kernel": fit_kernel,
    "csi_power_gaussian": fit_csi_power_gaussian,
}

#: Method names from the localization literature, accepted as family aliases.
FAMILY_ALIASES = {
    "horus": "single_gaussian",
    "dgd": "double_gaussian",
    "fila": "csi_power_gaussian",
}


def resolve_family(name: str) -> str:
    family = FAMILY_ALIASES.get(name.lower(), name.lower())
    if family not in FAMILY_FITTERS:
        known = sorted(set(FAMILY_FITTERS) | set(FAMILY_ALIASES))
        raise ValueError(f"unknown likelihood family {name!r}; expected one of {known}")
    return family


def build_radio_map(
    training: Sequence[ScanSet],
    family: str,
    bin_width: float = 10.0,
    bandwidth: Optional[float] = None,
    grid_size: Optional[float] = None,
    ap_count: Optional[int] = None,
) -> RadioMap:
    """Train one likelihood model per (reference point, feature).

    Every training scan set must carry a known location and the shared
    feature count. The point order of ``training`` fixes the index used in
    posterior vectors.
    """
    if not training:
        raise ValueError("need at least one training scan set")
    family = resolve_family(family)
    n = training[0].feature_count
    points = []
    for rp_id, scanset in enumerate(training):
        if scanset.location is None:
            raise ValueError(f"training scan set {rp_id} has no location")
        if scanset.feature_count != n:
            raise ValueError(
                f"inconsistent feature count: scan set {rp_id} has "
                f"{scanset.feature_count}, expected {n}"
            )
        data = scanset.matrix()
        models = []
        for k in range(n):
            col = data[:, k]
            if family == "histogram":
                models.append(fit_histogram(col, bin_width=bin_width))
            elif family == "kernel":
                models.append(fit_kernel(col, bandwidth=bandwidth))
            else:
                models.append(FAMILY_FITTERS[family](col))
        points.append(RadioPoint(rp_id=rp_id, location=scanset.location, models=tuple(models)))
    return RadioMap(points, family=family, grid_size=grid_size, ap_count=ap_count)


def radio_map_from_csi(
    measurements: Sequence[tuple],
    grid_size: Optional[float] = None,
) -> RadioMap:
    """FILA-style map: reduce each (location, CsiMatrix) pair to effective
    power scans, then fit single Gaussians over the power feature."""
    training = []
    for loc, matrix in measurements:
        if not isinstance(matrix, CsiMatrix):
            raise TypeError("expected (Location, CsiMatrix) pairs")
        training.append(csi_to_scanset(matrix, location=loc))
    return build_radio_map(training, "csi_power_gaussian", grid_size=grid_size, ap_count=1)


# --- parameter packing for the batched kernels ------------------------------


def pack_models(radio_map: RadioMap) -> dict:
    """Flatten a map's models into contiguous arrays keyed by family, the
    layout the compiled and numpy kernels share."""
    family = radio_map.family
    m, n = radio_map.size, radio_map.feature_count
    models = [p.models for p in radio_map.points]

    if family in ("single_gaussian", "csi_power_gaussian"):
        mean = np.array([[mod.mean for mod in row] for row in models])
        std = np.array([[mod.std for mod in row] for row in models])
        return {"family": "gaussian", "mean": mean, "std": std}

    if family == "double_gaussian":
        w = np.array([[mod.weights for mod in row] for row in models])
        mu = np.array([[mod.means for mod in row] for row in models])
        sg = np.array([[mod.stds for mod in row] for row in models])
        return {"family": "mixture2", "w": w, "mu": mu, "sg": sg}

    if family == "lognormal":
        shift = np.array([[mod.shift for mod in row] for row in models])
        mu = np.array([[mod.log_mean for mod in row] for row in models])
        sg = np.array([[mod.log_std for mod in row] for row in models])
        return {"family": "lognormal", "shift": shift, "mu": mu, "sg": sg}

    if family == "histogram":
        first_edge = np.array([[mod.first_edge for mod in row] for row in models])
        width = np.array([[mod.bin_width for mod in row] for row in models])
        nbins = np.array([[len(mod.probs) for mod in row] for row in models], dtype=np.int32)
        offsets = np.zeros((m, n), dtype=np.int64)
        flat = []
        pos = 0
        for i, row in enumerate(models):
            for k, mod in enumerate(row):
                offsets[i, k] = pos
                dens = np.asarray(mod.probs) / mod.bin_width
                flat.append(dens)
                pos += dens.size
        return {
            "family": "histogram",
            "first_edge": first_edge,
            "width": width,
            "nbins": nbins,
            "offsets": offsets,
            "dens": np.concatenate(flat),
        }

    if family == "kernel":
        counts = np.array([[len(mod.samples) for mod in row] for row in models], dtype=np.int32)
        bw = np.array([[mod.bandwidth for mod in row] for row in models])
        offsets = np.zeros((m, n), dtype=np.int64)
        flat = []
        pos = 0
        for i, row in enumerate(models):
            for k, mod in enumerate(row):
                offsets[i, k] = pos
                flat.append(np.asarray(mod.samples, dtype=float))
                pos += len(mod.samples)
        return {
            "family": "kernel",
            "offsets": offsets,
            "counts": counts,
            "bw": bw,
            "samples": np.concatenate(flat),
        }

    raise ValueError(f"cannot pack family {family!r}")
