"""Synthetic test site: log-distance path-loss radio maps, bounded-speed
trajectories, noisy scan sampling and history-error injection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fingerprints import SENTINEL_RSSI, CsiMatrix, FeatureVector, Location, ScanSet

TRAJECTORY_POLICIES = ("corridor_walk", "free_roam")


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance propagation: p0 dBm at the reference distance d0, decaying
    10*exponent dB per decade, with Gaussian shadowing per reading."""

    p0: float = -30.0
    d0: float = 1.0
    exponent: float = 3.0
    shadowing_std: float = 2.0

    def __post_init__(self):
        if self.d0 <= 0:
            raise ValueError("reference distance d0 must be positive")
        if self.shadowing_std < 0:
            raise ValueError("shadowing std must be non-negative")


@dataclass(frozen=True)
class EnvironmentSpec:
    """A rectangular site with fixed transmitter positions.

    ``ap_positions`` has one entry per radio feature; a dual-band access
    point appears twice (same spot, different band), with ``feature_offsets``
    holding the per-feature dB shift of the weaker band. ``ap_count`` is the
    number of distinct positions.

    ``texture_std``/``texture_scale`` add a static spatially-correlated
    shadowing field (walls, furniture, multipath structure) on top of the
    log-distance mean, identical in training and testing.
    ``session_shift_std``/``session_shift_scale`` add a second field applied
    to testing scans only, the day-to-day drift between the survey and the
    tracked walk. Zero std disables either field; both are deterministic
    per seed.
    """

    width: float
    height: float
    ap_positions: tuple
    rp_grid_spacing: float = 1.0
    pathloss: PathLossParams = PathLossParams()
    seed: int = 0
    feature_offsets: Optional[tuple] = None
    texture_std: float = 0.0
    texture_scale: float = 6.0
    session_shift_std: float = 0.0
    session_shift_scale: float = 6.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.rp_grid_spacing <= 0:
            raise ValueError("width, height and grid spacing must be positive")
        if len(self.ap_positions) < 1:
            raise ValueError("need at least one access point")
        if self.feature_offsets is not None and len(self.feature_offsets) != len(self.ap_positions):
            raise ValueError("feature_offsets must match ap_positions in length")
        if self.texture_std < 0 or self.texture_scale <= 0:
            raise ValueError("texture_std must be >= 0 and texture_scale positive")
        if self.session_shift_std < 0 or self.session_shift_scale <= 0:
            raise ValueError("session_shift_std must be >= 0 and its scale positive")

    @property
    def feature_count(self) -> int:
        return len(self.ap_positions)

    @property
    def ap_count(self) -> int:
        return len({(p.x, p.y) for p in self.ap_positions})

    def offsets(self) -> np.ndarray:
        if self.feature_offsets is None:
            return np.zeros(self.feature_count)
        return np.asarray(self.feature_offsets, dtype=float)


_FIELD_HARMONICS = 24


class _HarmonicField:
    """Smooth pseudo-random field per feature: a sum of random-phase cosines
    with wavelengths clustered around ``scale``, scaled to std ``std``.
    Deterministic for a given rng seed."""

    def __init__(self, n_features: int, std: float, scale: float, rng: np.random.Generator):
        k = _FIELD_HARMONICS
        theta = rng.uniform(0.0, 2.0 * math.pi, size=(n_features, k))
        wavelength = scale * rng.uniform(0.5, 1.5, size=(n_features, k))
        mag = 2.0 * math.pi / wavelength
        self._wx = mag * np.cos(theta)
        self._wy = mag * np.sin(theta)
        self._phase = rng.uniform(0.0, 2.0 * math.pi, size=(n_features, k))
        self._amp = std * math.sqrt(2.0 / k)

    def __call__(self, loc: Location) -> np.ndarray:
        return self._amp * np.cos(self._wx * loc.x + self._wy * loc.y + self._phase).sum(axis=1)


class RadioTruth:
    """Deterministic mean-RSSI field over the site: the noiseless value every
    scan is sampled around.

    The testing-session field adds the site's session shift, modelling the
    day-to-day drift between the survey and the actual walk."""

    def __init__(self, env: EnvironmentSpec):
        self.env = env
        self._ap_xy = np.array([[p.x, p.y] for p in env.ap_positions])
        self._offsets = env.offsets()
        n = env.feature_count
        self._texture = None
        if env.texture_std > 0:
            self._texture = _HarmonicField(
                n, env.texture_std, env.texture_scale, np.random.default_rng([env.seed, 9])
            )
        self._session = None
        if env.session_shift_std > 0:
            self._session = _HarmonicField(
                n,
                env.session_shift_std,
                env.session_shift_scale,
                np.random.default_rng([env.seed, 10]),
            )

    def mean_rssi(self, loc: Location, session: bool = False) -> np.ndarray:
        """Per-feature mean RSSI (dBm) at a location; ``session`` selects the
        (possibly drifted) testing-session conditions."""
        pl = self.env.pathloss
        d = np.hypot(self._ap_xy[:, 0] - loc.x, self._ap_xy[:, 1] - loc.y)
        d = np.maximum(d, pl.d0)
        mean = pl.p0 + self._offsets - 10.0 * pl.exponent * np.log10(d / pl.d0)
        if self._texture is not None:
            mean = mean + self._texture(loc)
        if session and self._session is not None:
            mean = mean + self._session(loc)
        return mean


def synth_radio_truth(env: EnvironmentSpec) -> RadioTruth:
    """Ground-truth mean-RSSI function for a site."""
    return RadioTruth(env)


def sample_scan(
    truth: RadioTruth,
    loc: Location,
    env: EnvironmentSpec,
    rng: np.random.Generator,
    session: bool = False,
) -> FeatureVector:
    """One noisy scan: shadowing on top of the mean field, clamped at the
    sentinel floor. ``session`` samples under testing-session conditions."""
    mean = truth.mean_rssi(loc, session=session)
    noise = rng.normal(0.0, env.pathloss.shadowing_std, size=mean.shape)
    return FeatureVector(np.maximum(mean + noise, SENTINEL_RSSI))


def grid_locations(env: EnvironmentSpec) -> list:
    """Reference grid over the site, inclusive of both edges."""
    step = env.rp_grid_spacing
    xs = np.arange(0.0, env.width + step / 2, step)
    ys = np.arange(0.0, env.height + step / 2, step)
    return [Location(float(x), float(y)) for y in ys for x in xs]


def build_training_set(
    env: EnvironmentSpec, truth: RadioTruth, s1: int, rng: np.random.Generator
) -> list:
    """One training ScanSet of ``s1`` scans per grid reference point."""
    if s1 < 1:
        raise ValueError("s1 must be >= 1")
    out = []
    for loc in grid_locations(env):
        scans = [sample_scan(truth, loc, env, rng) for _ in range(s1)]
        out.append(ScanSet(scans, location=loc))
    return out


@dataclass(frozen=True)
class TrajectorySpec:
    """A bounded-speed walk: each step covers speed * delta_t meters with the
    speed drawn uniformly from [speed_min, speed_max]."""

    speed_min: float = 0.6
    speed_max: float = 4.0
    delta_t: float = 1.0
    n_steps: int = 175
    s2: int = 2
    policy: str = "corridor_walk"
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.speed_min <= self.speed_max:
            raise ValueError("need 0 < speed_min <= speed_max")
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")
        if self.n_steps < 1 or self.s2 < 1:
            raise ValueError("n_steps and s2 must be >= 1")
        if self.policy not in TRAJECTORY_POLICIES:
            raise ValueError(f"policy must be one of {TRAJECTORY_POLICIES}")


def _inside(x: float, y: float, env: EnvironmentSpec) -> bool:
    return 0.0 <= x <= env.width and 0.0 <= y <= env.height


_AXIS_HEADINGS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))


def _corridor_positions(spec, env, rng):
    x = env.width / 2.0
    y = env.height / 2.0
    heading = _AXIS_HEADINGS[rng.integers(4)]
    positions = []
    for _ in range(spec.n_steps):
        length = rng.uniform(spec.speed_min, spec.speed_max) * spec.delta_t
        if rng.random() < 0.25:
            heading = _AXIS_HEADINGS[rng.integers(4)]
        if not _inside(x + length * heading[0], y + length * heading[1], env):
            options = [
                h for h in _AXIS_HEADINGS if _inside(x + length * h[0], y + length * h[1], env)
            ]
            if not options:
                raise RuntimeError("could not find an in-bounds step; site smaller than one stride")
            heading = options[rng.integers(len(options))]
        x += length * heading[0]
        y += length * heading[1]
        positions.append(Location(x, y))
    return positions


def _free_roam_positions(spec, env, rng):
    x = env.width / 2.0
    y = env.height / 2.0
    target = (rng.uniform(0, env.width), rng.uniform(0, env.height))
    positions = []
    for _ in range(spec.n_steps):
        length = rng.uniform(spec.speed_min, spec.speed_max) * spec.delta_t
        if math.hypot(target[0] - x, target[1] - y) < length:
            target = (rng.uniform(0, env.width), rng.uniform(0, env.height))
        theta = math.atan2(target[1] - y, target[0] - x)
        for _ in range(100):
            nx, ny = x + length * math.cos(theta), y + length * math.sin(theta)
            if _inside(nx, ny, env):
                break
            theta = rng.uniform(0.0, 2.0 * math.pi)
        else:
            raise RuntimeError("could not find an in-bounds step; site smaller than one stride")
        x, y = nx, ny
        positions.append(Location(x, y))
    return positions


def generate_trajectory(spec: TrajectorySpec, env: EnvironmentSpec) -> list:
    """Ground-truth positions plus their testing scans.

    Returns a list of (Location, ScanSet) pairs; the scan sets carry no
    location (that is what the tracker must recover). Deterministic for a
    given (spec, env).
    """
    rng = np.random.default_rng([spec.seed, 1])
    truth = synth_radio_truth(env)
    walk = _corridor_positions if spec.policy == "corridor_walk" else _free_roam_positions
    positions = walk(spec, env, rng)
    out = []
    for loc in positions:
        scans = [sample_scan(truth, loc, env, rng, session=True) for _ in range(spec.s2)]
        out.append((loc, ScanSet(scans)))
    return out


def inject_history_error(l: Location, e: float, rng: Optional[np.random.Generator] = None) -> Location:
    """Perturb a position with zero-mean Gaussian error of combined magnitude
    ``e``: each axis gets std e / sqrt(2), so the expected squared radial
    offset is e^2. e = 0 is the identity."""
    if e < 0:
        raise ValueError("error magnitude must be non-negative")
    if e == 0.0:
        return l
    if rng is None:
        rng = np.random.default_rng()
    axis_std = e / math.sqrt(2.0)
    return Location(l.x + rng.normal(0.0, axis_std), l.y + rng.normal(0.0, axis_std))


def sample_csi_matrix(
    truth: RadioTruth,
    loc: Location,
    env: EnvironmentSpec,
    h: int,
    w: int,
    rng: np.random.Generator,
    jitter: float = 0.25,
    feature: int = 0,
    amplitude_scale: float = 1000.0,
) -> CsiMatrix:
    """Reduced-fidelity CSI amplitudes: the path-loss base amplitude of one
    transmitter times a per-subcarrier Rician-like jitter. Enough to exercise
    the effective-power pipeline, not a channel emulator.

    ``amplitude_scale`` lifts the amplitudes out of the sub-unit range so
    effective powers separate clearly between locations."""
    if h < 1 or w < 1:
        raise ValueError("H and W must be >= 1")
    base_dbm = truth.mean_rssi(loc)[feature]
    base_amp = amplitude_scale * 10.0 ** (base_dbm / 20.0)
    re = 1.0 + jitter * rng.normal(size=(h, w))
    im = jitter * rng.normal(size=(h, w))
    return CsiMatrix(base_amp * np.hypot(re, im))
