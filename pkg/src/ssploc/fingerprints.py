"""Domain types for fingerprint localization: locations, scan collections,
CSI amplitude matrices and the assembled radio map."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

#: Imputed reading (dBm) for access points absent from a scan. Doubles as the
#: clamp floor of the simulator, a minimum-detectable-power convention.
SENTINEL_RSSI = -100.0


@dataclass(frozen=True)
class Location:
    """A 2-D physical position in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


def euclidean_distance(a: Location, b: Location) -> float:
    """Straight-line distance in meters between two locations."""
    return math.hypot(a.x - b.x, a.y - b.y)


class FeatureVector:
    """One scan: N feature readings (RSSI in dBm or CSI-derived scalars).

    Missing readings are explicitly marked and hold the sentinel value; they
    are never silently zero.
    """

    __slots__ = ("values", "missing")

    def __init__(self, values: Sequence[Optional[float]]):
        vals = []
        miss = []
        for v in values:
            if v is None or (isinstance(v, float) and math.isnan(v)):
                vals.append(SENTINEL_RSSI)
                miss.append(True)
            else:
                v = float(v)
                if not math.isfinite(v):
                    raise ValueError(f"feature readings must be finite, got {v}")
                vals.append(v)
                miss.append(False)
        if not vals:
            raise ValueError("a feature vector needs at least one reading")
        self.values = np.asarray(vals, dtype=float)
        self.missing = np.asarray(miss, dtype=bool)

    def __len__(self) -> int:
        return self.values.shape[0]

    def __repr__(self) -> str:
        return f"FeatureVector({self.values.tolist()})"

    def raw(self) -> list:
        """Readings with missing entries as None (the JSON form)."""
        return [None if m else float(v) for v, m in zip(self.values, self.missing)]


class ScanSet:
    """A collection of repeated scans taken at one place.

    ``location`` is known for training data and absent for testing data.
    """

    __slots__ = ("scans", "location")

    def __init__(self, scans: Sequence[FeatureVector], location: Optional[Location] = None):
        scans = list(scans)
        if not scans:
            raise ValueError("a scan set needs at least one scan")
        n = len(scans[0])
        for s in scans:
            if len(s) != n:
                raise ValueError("all scans in a set must have the same feature count")
        self.scans = scans
        self.location = location

    @property
    def scan_count(self) -> int:
        return len(self.scans)

    @property
    def feature_count(self) -> int:
        return len(self.scans[0])

    def matrix(self) -> np.ndarray:
        """Scans as a (scan_count, feature_count) array, sentinel-imputed."""
        return np.stack([s.values for s in self.scans])

    def __repr__(self) -> str:
        return f"ScanSet({self.scan_count} scans x {self.feature_count} features, location={self.location})"


class CsiMatrix:
    """Amplitudes of H channel measurements over W subcarriers."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        amp = np.asarray(amplitudes, dtype=float)
        if amp.ndim != 2 or amp.shape[0] < 1 or amp.shape[1] < 1:
            raise ValueError("CSI amplitudes must form a 2-D matrix with H >= 1, W >= 1")
        if not np.all(np.isfinite(amp)):
            raise ValueError("CSI amplitudes must be finite")
        if np.any(amp < 0):
            raise ValueError("CSI amplitudes must be non-negative")
        self.amplitudes = amp

    @property
    def h(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def w(self) -> int:
        return self.amplitudes.shape[1]

    def __repr__(self) -> str:
        return f"CsiMatrix({self.h}x{self.w})"


def csi_effective_power(m: CsiMatrix, row_index: int) -> float:
    """Total power of one CSI measurement: the sum of squared subcarrier
    amplitudes in the given row."""
    if not 0 <= row_index < m.h:
        raise IndexError(f"row index {row_index} out of range for H={m.h}")
    row = m.amplitudes[row_index]
    return float(np.dot(row, row))


def csi_to_scanset(m: CsiMatrix, location: Optional[Location] = None) -> ScanSet:
    """Reduce a CSI matrix to a scan set of H single-feature power readings."""
    scans = [FeatureVector([csi_effective_power(m, h)]) for h in range(m.h)]
    return ScanSet(scans, location=location)


@dataclass(frozen=True)
class RadioPoint:
    """One reference point: its id, surveyed location and the trained
    per-feature likelihood models."""

    rp_id: Union[int, str]
    location: Location
    models: tuple


class RadioMap:
    """The fingerprint database: an ordered list of reference points, each
    with one trained likelihood model per feature.

    The point order is fixed at construction and defines the index used in
    every posterior vector. Instances are immutable after construction and
    safe to share across threads.
    """

    def __init__(
        self,
        points: Iterable[RadioPoint],
        family: str,
        grid_size: Optional[float] = None,
        ap_count: Optional[int] = None,
    ):
        points = tuple(points)
        if not points:
            raise ValueError("a radio map needs at least one reference point")
        n = len(points[0].models)
        if n < 1:
            raise ValueError("reference points need at least one model")
        ids = set()
        seen_locations = set()
        for p in points:
            if len(p.models) != n:
                raise ValueError("every reference point must carry the same number of models")
            if p.rp_id in ids:
                raise ValueError(f"duplicate rp_id {p.rp_id!r}")
            ids.add(p.rp_id)
            key = (p.location.x, p.location.y)
            if key in seen_locations:
                warnings.warn(f"duplicate reference location {key}; keeping both", stacklevel=2)
            seen_locations.add(key)
        self.points = points
        self.family = family
        self.grid_size = grid_size
        self.ap_count = ap_count
        self._locations = np.array([[p.location.x, p.location.y] for p in points])
        self._packed = None

    @property
    def size(self) -> int:
        """Number of reference points M."""
        return len(self.points)

    @property
    def feature_count(self) -> int:
        return len(self.points[0].models)

    @property
    def locations(self) -> np.ndarray:
        """Reference point coordinates as an (M, 2) array."""
        return self._locations

    @property
    def rp_ids(self) -> list:
        return [p.rp_id for p in self.points]

    def packed(self):
        """Family-specific parameter arrays for the batched kernels
        (built lazily, cached)."""
        if self._packed is None:
            from .likelihood import pack_models

            self._packed = pack_models(self)
        return self._packed

    def diameter(self) -> float:
        """Largest pairwise distance between reference points."""
        pts = self._locations
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        return float(np.sqrt(d2.max()))

    def __repr__(self) -> str:
        return f"RadioMap({self.size} RPs x {self.feature_count} features, family={self.family!r})"
