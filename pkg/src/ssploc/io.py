"""JSON and CSV persistence: radio maps, scan datasets, ground truth,
estimates, error reports and CSI matrices.

All JSON is written with sorted keys and compact separators so a rerun with
the same seed produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .fingerprints import CsiMatrix, FeatureVector, Location, RadioMap, RadioPoint, ScanSet
from .likelihood import (
    CsiPowerGaussian,
    DoubleGaussian,
    Histogram,
    KernelDensity,
    Lognormal,
    SingleGaussian,
)
from .metrics import ErrorReport

SCHEMA_VERSION = 1


class DataError(ValueError):
    """A data file is missing, malformed or inconsistent."""


def write_json(obj, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    Path(path).write_text(text)


def read_json(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc


def _expect_kind(doc, kind, path):
    if not isinstance(doc, dict) or doc.get("kind") != kind:
        raise DataError(f"{path} is not a {kind} file")


# --- likelihood models -------------------------------------------------------


def model_to_dict(model) -> dict:
    if isinstance(model, (SingleGaussian, CsiPowerGaussian)):
        return {"mean": model.mean, "std": model.std}
    if isinstance(model, DoubleGaussian):
        return {
            "weights": list(model.weights),
            "means": list(model.means),
            "stds": list(model.stds),
            "fell_back": model.fell_back,
        }
    if isinstance(model, Lognormal):
        return {"shift": model.shift, "log_mean": model.log_mean, "log_std": model.log_std}
    if isinstance(model, Histogram):
        return {
            "first_edge": model.first_edge,
            "bin_width": model.bin_width,
            "probs": list(model.probs),
        }
    if isinstance(model, KernelDensity):
        return {"samples": list(model.samples), "bandwidth": model.bandwidth}
    raise TypeError(f"cannot serialize model {model!r}")


def model_from_dict(d: dict, family: str):
    try:
        if family == "single_gaussian":
            return SingleGaussian(mean=d["mean"], std=d["std"])
        if family == "csi_power_gaussian":
            return CsiPowerGaussian(mean=d["mean"], std=d["std"])
        if family == "double_gaussian":
            return DoubleGaussian(
                weights=tuple(d["weights"]),
                means=tuple(d["means"]),
                stds=tuple(d["stds"]),
                fell_back=bool(d.get("fell_back", False)),
            )
        if family == "lognormal":
            return Lognormal(shift=d["shift"], log_mean=d["log_mean"], log_std=d["log_std"])
        if family == "histogram":
            return Histogram(
                first_edge=d["first_edge"],
                bin_width=d["bin_width"],
                probs=tuple(d["probs"]),
            )
        if family == "kernel":
            return KernelDensity(samples=tuple(d["samples"]), bandwidth=d["bandwidth"])
    except KeyError as exc:
        raise DataError(f"model record missing field {exc} for family {family!r}") from exc
    raise DataError(f"unknown model family {family!r}")


# --- radio maps --------------------------------------------------------------


def save_radio_map(radio_map: RadioMap, path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "radio_map",
        "family": radio_map.family,
        "feature_count": radio_map.feature_count,
        "grid_size": radio_map.grid_size,
        "ap_count": radio_map.ap_count,
        "rps": [
            {
                "rp_id": p.rp_id,
                "x": p.location.x,
                "y": p.location.y,
                "models": [model_to_dict(m) for m in p.models],
            }
            for p in radio_map.points
        ],
    }
    write_json(doc, path)


def load_radio_map(path) -> RadioMap:
    doc = read_json(path)
    _expect_kind(doc, "radio_map", path)
    family = doc["family"]
    points = []
    for rec in doc["rps"]:
        models = tuple(model_from_dict(m, family) for m in rec["models"])
        points.append(
            RadioPoint(rp_id=rec["rp_id"], location=Location(rec["x"], rec["y"]), models=models)
        )
    rmap = RadioMap(
        points, family=family, grid_size=doc.get("grid_size"), ap_count=doc.get("ap_count")
    )
    if rmap.feature_count != doc["feature_count"]:
        raise DataError(f"{path}: feature_count field disagrees with the model lists")
    return rmap


# --- scan datasets and ground truth ------------------------------------------


def save_scan_dataset(scan_sets: Sequence[ScanSet], path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "scan_dataset",
        "feature_count": scan_sets[0].feature_count,
        "scan_sets": [
            {
                "location": None if s.location is None else [s.location.x, s.location.y],
                "scans": [fv.raw() for fv in s.scans],
            }
            for s in scan_sets
        ],
    }
    write_json(doc, path)


def load_scan_dataset(path) -> list:
    doc = read_json(path)
    _expect_kind(doc, "scan_dataset", path)
    out = []
    for rec in doc["scan_sets"]:
        loc = rec.get("location")
        location = None if loc is None else Location(loc[0], loc[1])
        scans = [FeatureVector(row) for row in rec["scans"]]
        out.append(ScanSet(scans, location=location))
    n = doc["feature_count"]
    for s in out:
        if s.feature_count != n:
            raise DataError(f"{path}: inconsistent feature counts")
    return out


def save_ground_truth(points: Sequence[Location], path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "ground_truth",
        "points": [[p.x, p.y] for p in points],
    }
    write_json(doc, path)


def load_ground_truth(path) -> list:
    doc = read_json(path)
    _expect_kind(doc, "ground_truth", path)
    return [Location(x, y) for x, y in doc["points"]]


# --- estimates and reports ---------------------------------------------------


def save_estimates(estimates: Sequence, path, verbose: bool = False) -> None:
    steps = []
    for i, est in enumerate(estimates):
        rec = {
            "step": i,
            "x": est.estimate.x,
            "y": est.estimate.y,
            "degraded": est.degraded,
            "top_k_ids": list(est.top_k_ids),
            "step_seconds": est.step_seconds,
        }
        if verbose:
            rec["posterior"] = [float(p) for p in est.posterior]
        steps.append(rec)
    write_json({"schema_version": SCHEMA_VERSION, "kind": "estimates", "steps": steps}, path)


def load_estimate_locations(path) -> list:
    doc = read_json(path)
    _expect_kind(doc, "estimates", path)
    return [Location(rec["x"], rec["y"]) for rec in doc["steps"]]


def report_to_dict(report: ErrorReport) -> dict:
    return {
        "mean": report.mean,
        "std": report.std,
        "max": report.max,
        "median": report.median,
        "flags": report.flags,
        "mean_step_seconds": report.mean_step_seconds,
        "cdf": [[t, f] for t, f in report.cdf],
        "errors": list(report.errors),
    }


def save_report_json(report: ErrorReport, path) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "kind": "error_report"}
    doc.update(report_to_dict(report))
    write_json(doc, path)


REPORT_CSV_HEADER = ["family", "sigma", "mean", "std", "max", "median", "flags", "mean_step_seconds"]


def save_reports_csv(rows: Sequence[tuple], path) -> None:
    """Write (window family, sigma, ErrorReport) rows as one summary CSV."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_CSV_HEADER)
        for family, sigma, report in rows:
            writer.writerow(
                [
                    family,
                    f"{sigma:.6g}",
                    f"{report.mean:.6f}",
                    f"{report.std:.6f}",
                    f"{report.max:.6f}",
                    f"{report.median:.6f}",
                    report.flags,
                    f"{report.mean_step_seconds:.9f}",
                ]
            )


# --- CSI ----------------------------------------------------------------------


def save_csi_csv(matrix: CsiMatrix, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, matrix.amplitudes, delimiter=",", fmt="%.10g")


def load_csi_csv(path) -> CsiMatrix:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise DataError(f"{path} is not a numeric CSV matrix: {exc}") from exc
    try:
        return CsiMatrix(data)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
