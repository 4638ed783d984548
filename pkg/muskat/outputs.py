"""CSV and manifest persistence for run outputs."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np
import pandas as pd

from muskat.core.errors import InvariantError
from muskat.models.state import Trajectory
from muskat.schemas.diagnostics import (
    DIAGNOSTICS_COLUMNS,
    MONITOR_COLUMNS,
    CauchyReport,
    CheckResult,
    RateFit,
)
from muskat.schemas.manifest import OutputFile, RunManifest

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
MISSING = "undefined"
MANIFEST_NAME = "manifest.json"


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep=MISSING)
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    columns = [f"x_{j}" for j in range(traj.grid.n_points)]
    frame = pd.DataFrame(traj.as_array(), columns=columns)
    frame.insert(0, "time", traj.times)
    return frame


def diagnostics_frame(traj: Trajectory) -> pd.DataFrame:
    rows = [record.model_dump(include=set(DIAGNOSTICS_COLUMNS)) for record in traj.records]
    return pd.DataFrame(rows, columns=DIAGNOSTICS_COLUMNS)


def monitors_frame(traj: Trajectory) -> pd.DataFrame:
    rows = [record.model_dump(include=set(MONITOR_COLUMNS)) for record in traj.records]
    frame = pd.DataFrame(rows, columns=MONITOR_COLUMNS)
    return frame.astype(float)


def modes_frame(
    traj: Trajectory, modes: Sequence[int], amplitudes: np.ndarray
) -> pd.DataFrame:
    frame = pd.DataFrame(amplitudes, columns=[f"mode_{k}" for k in modes])
    frame.insert(0, "time", traj.times)
    return frame


def rates_frame(fits: Iterable[RateFit]) -> pd.DataFrame:
    rows = [
        {
            "mode": fit.mode,
            "fitted_rate": fit.fitted_rate,
            "predicted_rate": fit.predicted_rate,
            "ratio": fit.ratio,
        }
        for fit in fits
    ]
    frame = pd.DataFrame(rows, columns=["mode", "fitted_rate", "predicted_rate", "ratio"])
    return frame.astype({"fitted_rate": float, "predicted_rate": float, "ratio": float})


def cauchy_frame(report: CauchyReport) -> pd.DataFrame:
    rows = [row.model_dump() for row in report.rows]
    frame = pd.DataFrame(rows, columns=["index", "eps_coarse", "eps_fine", "distance"])
    return frame.astype({"eps_coarse": float, "eps_fine": float, "distance": float})


def checks_frame(results: Iterable[CheckResult]) -> pd.DataFrame:
    rows = [result.model_dump() for result in results]
    return pd.DataFrame(rows, columns=["name", "passed", "value", "threshold", "detail"])


def file_digest(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def inventory(paths: Iterable[Path]) -> List[OutputFile]:
    return [
        OutputFile(name=path.name, sha256=file_digest(path), size_bytes=path.stat().st_size)
        for path in paths
    ]


def write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    path = out_dir / MANIFEST_NAME
    payload = manifest.model_dump(mode="json")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info("wrote %s (%d outputs)", path, len(manifest.outputs))
    return path


def verify_manifest(path: Path) -> None:
    """Recompute every digest listed in the manifest at `path`"""
    manifest = RunManifest.model_validate_json(path.read_text())
    mismatched = [
        entry.name
        for entry in manifest.outputs
        if not (path.parent / entry.name).is_file()
        or file_digest(path.parent / entry.name) != entry.sha256
    ]
    if mismatched:
        raise InvariantError("manifest digests do not match outputs", files=mismatched)
