"""Glue between a configuration and the pipeline: dataset materialization,
map training and tracking runs with derived random streams.

One master seed feeds fixed sub-streams (training scans, trajectory, CSI,
history-error injection), so every artifact of a run is reproducible from the
config alone.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .config import ExperimentConfig
from .engine import track
from .fingerprints import RadioMap, ScanSet, csi_to_scanset
from .likelihood import build_radio_map
from .simulator import (
    build_training_set,
    generate_trajectory,
    grid_locations,
    sample_csi_matrix,
    synth_radio_truth,
)

# sub-stream indices off the master seed
STREAM_TRAINING = 0
STREAM_TRAJECTORY = 1  # consumed inside generate_trajectory
STREAM_CSI = 2
STREAM_HISTORY = 3


def training_rng(cfg: ExperimentConfig) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, STREAM_TRAINING])


def history_rng(cfg: ExperimentConfig) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, STREAM_HISTORY])


def materialize_dataset(cfg: ExperimentConfig):
    """Generate the training scan sets and the (truth, scans) trajectory."""
    truth = synth_radio_truth(cfg.environment)
    training = build_training_set(cfg.environment, truth, cfg.s1, training_rng(cfg))
    trajectory = generate_trajectory(cfg.trajectory, cfg.environment)
    return training, trajectory


def train_from_config(cfg: ExperimentConfig, training: Sequence[ScanSet]) -> RadioMap:
    return build_radio_map(
        training,
        cfg.family,
        bin_width=cfg.bin_width,
        bandwidth=cfg.bandwidth,
        grid_size=cfg.environment.rp_grid_spacing,
        ap_count=cfg.environment.ap_count,
    )


def run_track(cfg: ExperimentConfig, radio_map: RadioMap, scans: Sequence[ScanSet]) -> list:
    """Track a scan sequence under the config's window, alignment steps and
    history-error level."""
    return track(
        radio_map,
        scans,
        cfg.track_config(),
        alignment_steps=cfg.alignment_steps,
        history_error=cfg.history_error,
        rng=history_rng(cfg),
    )


def generate_csi_dataset(cfg: ExperimentConfig):
    """Per-RP CSI matrices plus a power-feature trajectory.

    Returns (rp_locations, matrices, trajectory) where trajectory pairs the
    true position with a ScanSet of effective-power readings.
    """
    if cfg.csi is None:
        raise ValueError("config has no csi block")
    rng = np.random.default_rng([cfg.seed, STREAM_CSI])
    truth = synth_radio_truth(cfg.environment)
    locations = grid_locations(cfg.environment)
    matrices = [
        sample_csi_matrix(truth, loc, cfg.environment, cfg.csi.h, cfg.csi.w, rng)
        for loc in locations
    ]
    walk = generate_trajectory(cfg.trajectory, cfg.environment)
    csi_trajectory = []
    for loc, _ in walk:
        m = sample_csi_matrix(truth, loc, cfg.environment, cfg.csi.h_test, cfg.csi.w, rng)
        csi_trajectory.append((loc, csi_to_scanset(m)))
    return locations, matrices, csi_trajectory
