# acc/storage.py
"""
Flat-file exports: CSV for time series, sweeps and frequency responses,
JSON for reports. Field order and number formatting are fixed so that the
same inputs always produce the same bytes.
"""
import csv
import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np

from . import __version__
from .analysis.sampled_data import bode_table
from .errors import OutputError
from .models import FrequencyResponse, SweepReport, Trajectory
from .run_config import RunConfig

logger = logging.getLogger(__name__)

TOOL_NAME = "acc-stability"
FLOAT_FORMAT = ".15g"

PathLike = Union[str, Path]


def _ensure_parent(path: Path) -> None:
    if path.parent and str(path.parent) not in ("", "."):
        path.parent.mkdir(parents=True, exist_ok=True)


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def _write_rows(path: PathLike, header: List[str], rows: List[List[Any]]) -> Path:
    path = Path(path)
    try:
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as e:
        raise OutputError(f"failed to write CSV: {e}", str(path)) from e
    logger.info("wrote %s (%s rows)", path, len(rows))
    return path


def write_trajectory_csv(tr: Trajectory, path: PathLike) -> Path:
    header = ["t_s", *tr.state_labels, "y_V", "h_V"]
    rows = [
        [float(t), *[float(v) for v in x], float(y), float(h)]
        for t, x, y, h in zip(tr.t, tr.x, tr.y, tr.h)
    ]
    return _write_rows(path, header, rows)


def write_sweep_csv(report: SweepReport, path: PathLike) -> Path:
    n_eigs = max((len(r.eigs) for r in report.records if r.eigs is not None), default=0)
    header = ["omega_p_rad_s", "k", "duty"]
    for i in range(n_eigs):
        header += [f"eig_re_{i}", f"eig_im_{i}"]
    header += ["max_mag", "verdict", "avg_max_re"]

    rows = []
    for r in sorted(report.records, key=lambda rec: rec.omega_p):
        eig_cells: List[Any] = []
        for i in range(n_eigs):
            if r.eigs is not None and i < len(r.eigs):
                eig_cells += [float(r.eigs[i].real), float(r.eigs[i].imag)]
            else:
                eig_cells += [None, None]
        rows.append([
            float(r.omega_p), float(r.k), r.duty, *eig_cells,
            r.max_magnitude, r.verdict or "gap", r.avg_max_re,
        ])
    return _write_rows(path, header, rows)


def write_frequency_csv(fr: FrequencyResponse, path: PathLike) -> Path:
    header = ["omega_rad_s"]
    columns = []
    for name, values in fr.responses.items():
        mag_db, phase = bode_table(values)
        header += [f"{name}_re", f"{name}_im", f"{name}_mag_db", f"{name}_phase_deg"]
        columns.append((values, mag_db, phase))

    rows = []
    for i, w in enumerate(fr.omegas):
        row: List[Any] = [float(w)]
        for values, mag_db, phase in columns:
            row += [float(values[i].real), float(values[i].imag), float(mag_db[i]), float(phase[i])]
        rows.append(row)
    return _write_rows(path, header, rows)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def build_report(cfg: RunConfig, results: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "config": cfg.echo(),
        "results": to_jsonable(results),
    }


def write_report(cfg: RunConfig, results: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    payload = build_report(cfg, results)
    try:
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False, indent=2)
            f.write("\n")
    except OSError as e:
        raise OutputError(f"failed to write report: {e}", str(path)) from e
    logger.info("wrote %s", path)
    return path


def write_outputs(obj: Any, path: PathLike, cfg: Optional[RunConfig] = None) -> Path:
    """
    Dispatch on the payload: Trajectory / SweepReport / FrequencyResponse
    go to CSV, a results mapping (with its RunConfig) goes to a JSON report.
    """
    if isinstance(obj, Trajectory):
        return write_trajectory_csv(obj, path)
    if isinstance(obj, SweepReport):
        return write_sweep_csv(obj, path)
    if isinstance(obj, FrequencyResponse):
        return write_frequency_csv(obj, path)
    if isinstance(obj, Mapping):
        if cfg is None:
            raise OutputError("a JSON report needs the RunConfig it was produced from", str(path))
        return write_report(cfg, dict(obj), path)
    raise OutputError(f"don't know how to write {type(obj).__name__}", str(path))
