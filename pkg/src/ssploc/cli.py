"""Command-line experiment runner.

Subcommands: ``gen`` (synthesize a dataset), ``train`` (fit a radio map),
``track`` (run the localizer along a trajectory), ``sweep`` (window/sigma
grid) and ``bench`` (per-step runtime comparison).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
invariant violation. ``SSPLOC_OUTPUT_DIR`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .backend import active_backend
from .config import (
    ConfigError,
    ExperimentConfig,
    canonical_config,
    config_from_dict,
    config_to_dict,
    override,
)
from .engine import TrackConfig, track
from .experiment import generate_csi_dataset, materialize_dataset
from .likelihood import build_radio_map, radio_map_from_csi, resolve_family
from .metrics import report_from_run, sigma_sweep
from .windows import WINDOW_FAMILIES, PriorWindow

WINDOW_CHOICES = sorted(WINDOW_FAMILIES)


def _default_out() -> str:
    return os.environ.get("SSPLOC_OUTPUT_DIR", "out")


def _load_config(args) -> ExperimentConfig:
    if getattr(args, "canonical", False):
        cfg = canonical_config()
    elif getattr(args, "config", None):
        cfg = config_from_dict(io.read_json(args.config))
    else:
        raise ConfigError("pass --config FILE or --canonical")
    return override(cfg, seed=getattr(args, "seed", None))


def _parse_int_list(text: str):
    if not text.strip():
        return ()
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_float_list(text: str):
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


# --- subcommands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    training, trajectory = materialize_dataset(cfg)
    io.write_json(config_to_dict(cfg), out / "config.json")
    io.save_scan_dataset(training, out / "training_scans.json")
    io.save_scan_dataset([s for _, s in trajectory], out / "trajectory_scans.json")
    io.save_ground_truth([loc for loc, _ in trajectory], out / "ground_truth.json")
    print(f"wrote {len(training)} training scan sets ({cfg.s1} scans each)")
    print(f"wrote {len(trajectory)}-step trajectory (S2={cfg.trajectory.s2}) and ground truth")
    if cfg.csi is not None:
        locations, matrices, csi_traj = generate_csi_dataset(cfg)
        csi_dir = out / "csi"
        for i, m in enumerate(matrices):
            io.save_csi_csv(m, csi_dir / f"rp_{i:04d}.csv")
        io.save_ground_truth(locations, csi_dir / "rp_locations.json")
        io.save_scan_dataset([s for _, s in csi_traj], out / "csi_trajectory_scans.json")
        io.save_ground_truth([loc for loc, _ in csi_traj], out / "csi_ground_truth.json")
        print(f"wrote {len(matrices)} CSI matrices ({cfg.csi.h}x{cfg.csi.w}) and CSI trajectory")
    print(f"dataset in {out}")
    return 0


def cmd_train(args) -> int:
    family = resolve_family(args.family)
    if args.csi_dir:
        csi_dir = Path(args.csi_dir)
        locations = io.load_ground_truth(csi_dir / "rp_locations.json")
        pairs = []
        for i, loc in enumerate(locations):
            pairs.append((loc, io.load_csi_csv(csi_dir / f"rp_{i:04d}.csv")))
        rmap = radio_map_from_csi(pairs)
    else:
        if not args.scans:
            raise ConfigError("pass --scans FILE (or --csi-dir DIR for the CSI pipeline)")
        training = io.load_scan_dataset(args.scans)
        for i, s in enumerate(training):
            if s.location is None:
                raise io.DataError(f"training scan set {i} has no location")
        rmap = build_radio_map(
            training, family, bin_width=args.bin_width, bandwidth=args.bandwidth
        )
    out = args.out or str(Path(_default_out()) / f"radio_map_{rmap.family}.json")
    io.save_radio_map(rmap, out)
    print(f"trained radio map: M={rmap.size} RPs, N={rmap.feature_count} features, family={rmap.family}")
    print(f"map in {out}")
    return 0


def _track_config_from_args(args) -> TrackConfig:
    d_max = args.v_max * args.delta_t
    sigma = args.sigma * d_max
    window = PriorWindow(args.window, sigma if args.window != "uniform" else 1.0)
    return TrackConfig(
        window=window,
        v_max=args.v_max,
        delta_t=args.delta_t,
        top_k=args.k,
        matching_mode=args.mode,
    )


def _check_compatible(rmap, scans) -> None:
    if scans and scans[0].feature_count != rmap.feature_count:
        raise io.DataError(
            f"trajectory has {scans[0].feature_count} features but the radio "
            f"map expects {rmap.feature_count}"
        )


def cmd_track(args) -> int:
    rmap = io.load_radio_map(args.map)
    scans = io.load_scan_dataset(args.trajectory)
    _check_compatible(rmap, scans)
    cfg = _track_config_from_args(args)
    d_max = args.v_max * args.delta_t
    rng = np.random.default_rng(args.seed) if args.history_error > 0 else None
    estimates = track(
        rmap,
        scans,
        cfg,
        alignment_steps=_parse_int_list(args.align),
        history_error=args.history_error * d_max,
        rng=rng,
    )
    out = Path(args.out or _default_out())
    out.mkdir(parents=True, exist_ok=True)
    io.save_estimates(estimates, out / "estimates.json", verbose=args.verbose)
    print(f"tracked {len(estimates)} steps with {args.window} window "
          f"(sigma={cfg.window.sigma:.2f} m, backend={active_backend()})")
    if args.truth:
        truth = io.load_ground_truth(args.truth)
        report = report_from_run(estimates, truth)
        io.save_report_json(report, out / "report.json")
        io.save_reports_csv([(args.window, cfg.window.sigma, report)], out / "report.csv")
        print(f"mean error {report.mean:.3f} m (std {report.std:.3f}, max {report.max:.3f}, "
              f"median {report.median:.3f}), degraded steps: {report.flags}")
    print(f"results in {out}")
    return 0


def cmd_sweep(args) -> int:
    rmap = io.load_radio_map(args.map)
    scans = io.load_scan_dataset(args.trajectory)
    _check_compatible(rmap, scans)
    truth = io.load_ground_truth(args.truth)
    if len(truth) != len(scans):
        raise io.DataError("trajectory and ground truth lengths differ")
    cfg = _track_config_from_args(args)
    d_max = args.v_max * args.delta_t
    sigmas = [m * d_max for m in _parse_float_list(args.sigmas)]
    families = [f.strip() for f in args.families.split(",")]
    for f in families:
        if f not in WINDOW_FAMILIES:
            raise ConfigError(f"unknown window family {f!r}")
    table = sigma_sweep(rmap, list(zip(truth, scans)), families, sigmas, cfg)
    rows = [(family, sigma, report) for (family, sigma), report in table.items()]
    out = args.out or str(Path(_default_out()) / "sweep.csv")
    io.save_reports_csv(rows, out)
    print(f"swept {len(families)} window families x {len(sigmas)} sigmas "
          f"({len(rows)} cells) over {len(scans)} steps")
    print(f"table in {out}")
    return 0


def cmd_bench(args) -> int:
    rmap = io.load_radio_map(args.map)
    scans = io.load_scan_dataset(args.trajectory)
    _check_compatible(rmap, scans)
    d_max = args.v_max * args.delta_t
    windows = ["uniform", "circular", "gaussian", "hann", "tukey"]
    rows = []
    baseline = None
    for family in windows:
        per_run = []
        for _ in range(args.repeats):
            cfg = TrackConfig(
                window=PriorWindow(family, args.sigma * d_max if family != "uniform" else 1.0),
                v_max=args.v_max,
                delta_t=args.delta_t,
                top_k=args.k,
                matching_mode=args.mode,
            )
            estimates = track(rmap, scans, cfg)
            per_run.append(float(np.mean([e.step_seconds for e in estimates])))
        mean_s = float(np.mean(per_run))
        std_s = float(np.std(per_run))
        if family == "uniform":
            baseline = mean_s
        rows.append((family, mean_s, std_s, mean_s / baseline))
    out = Path(args.out or str(Path(_default_out()) / "bench.csv"))
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        fh.write("window,mean_step_seconds,std_step_seconds,ratio_vs_memoryless\n")
        for family, mean_s, std_s, ratio in rows:
            fh.write(f"{family},{mean_s:.9f},{std_s:.9f},{ratio:.4f}\n")
    print(f"benchmarked {len(rows)} windows x {args.repeats} repeats on {len(scans)} steps "
          f"(backend={active_backend()})")
    for family, mean_s, _, ratio in rows:
        print(f"  {family:<9} {mean_s * 1e3:8.3f} ms/step  ({ratio:.2f}x memoryless)")
    print(f"table in {out}")
    return 0


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssploc",
        description="Fingerprint localization experiments: memoryless Bayes vs "
        "short-term-memory (SSP) tracking on synthetic sites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--canonical", action="store_true", help="use the frozen canonical benchmark config")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--out", default=_default_out(), help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="fit a radio map from training scans")
    p.add_argument("--scans", help="training scan dataset JSON")
    p.add_argument("--csi-dir", help="directory of per-RP CSI CSV matrices (FILA pipeline)")
    p.add_argument("--family", required=True,
                   help="single_gaussian|double_gaussian|lognormal|histogram|kernel|"
                        "csi_power_gaussian (aliases: horus, dgd, fila)")
    p.add_argument("--bin-width", type=float, default=10.0, help="histogram bin width in dB")
    p.add_argument("--bandwidth", type=float, default=None, help="kernel bandwidth (default Silverman)")
    p.add_argument("--out", help="radio map output path")
    p.set_defaults(func=cmd_train)

    def add_track_opts(p):
        p.add_argument("--window", default="gaussian", choices=WINDOW_CHOICES)
        p.add_argument("--sigma", type=float, default=1.0, help="window sigma as a multiple of d_max")
        p.add_argument("--v-max", type=float, default=4.0, help="maximum user speed, m/s")
        p.add_argument("--delta-t", type=float, default=1.0, help="sampling interval, s")
        p.add_argument("--k", type=int, default=1, help="top-K reference points to average")
        p.add_argument("--mode", default="per_scan_product", choices=["per_scan_product", "mean_scan"])

    p = sub.add_parser("track", help="run the localizer along a trajectory")
    p.add_argument("--map", required=True, help="radio map JSON")
    p.add_argument("--trajectory", required=True, help="trajectory scan dataset JSON")
    p.add_argument("--truth", help="ground truth JSON (enables the error report)")
    add_track_opts(p)
    p.add_argument("--align", default="", help="comma-separated step indices that reset memory")
    p.add_argument("--history-error", type=float, default=0.0,
                   help="prior-center error E as a multiple of d_max")
    p.add_argument("--seed", type=int, default=0, help="seed for history-error injection")
    p.add_argument("--verbose", action="store_true", help="store full posteriors in estimates.json")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("sweep", help="window-family x sigma error table")
    p.add_argument("--map", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--truth", required=True)
    add_track_opts(p)
    p.add_argument("--families", default="circular,gaussian,hann,tukey")
    p.add_argument("--sigmas", default="0.5,1.0,1.5,2.0", help="multiples of d_max")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="per-step runtime: memoryless vs each window")
    p.add_argument("--map", required=True)
    p.add_argument("--trajectory", required=True)
    add_track_opts(p)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except io.DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the documented exit-4 contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
