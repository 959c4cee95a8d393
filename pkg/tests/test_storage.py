import csv
import json

import numpy as np
import pytest

from acc import __version__
from acc.circuit.simulator import simulate
from acc.errors import OutputError
from acc.models import FrequencyResponse, SweepRecord, SweepReport
from acc.presets import preset_run_config
from acc.storage import to_jsonable, write_outputs


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))


def test_trajectory_csv(tmp_path, ex1_params, ex1_model, ex1_orbit):
    tr = simulate(ex1_model, ex1_orbit.x_start, ex1_params.u, 2, samples_per_cycle=4)
    path = write_outputs(tr, tmp_path / "trajectory.csv")
    rows = read_csv(path)
    assert rows[0] == ["t_s", "i_L_A", "v_C_V", "v_e1", "v_e2", "y_V", "h_V"]
    assert len(rows) - 1 == len(tr.t)
    assert float(rows[1][0]) == 0.0


def test_sweep_csv_sorted_with_gap(tmp_path):
    report = SweepReport(records=[
        SweepRecord(omega_p=2.0, k=0.2, duty=0.35, eigs=np.array([-1.1 + 0j, 0.5 + 0.1j]),
                    max_magnitude=1.1, verdict="period_doubling", avg_max_re=-3.0),
        SweepRecord(omega_p=1.0, k=0.1, error="convergence: no orbit"),
    ])
    rows = read_csv(write_outputs(report, tmp_path / "out" / "sweep.csv"))
    assert rows[0] == ["omega_p_rad_s", "k", "duty", "eig_re_0", "eig_im_0", "eig_re_1", "eig_im_1",
                       "max_mag", "verdict", "avg_max_re"]
    assert rows[1][0] == "1" and rows[1][8] == "gap" and rows[1][3] == ""
    assert rows[2][8] == "period_doubling"
    assert float(rows[2][6]) == pytest.approx(0.1)


def test_frequency_csv(tmp_path):
    fr = FrequencyResponse(omegas=np.array([1.0, 2.0]), responses={"toc": np.array([10.0, 1j])})
    rows = read_csv(write_outputs(fr, tmp_path / "fr.csv"))
    assert rows[0] == ["omega_rad_s", "toc_re", "toc_im", "toc_mag_db", "toc_phase_deg"]
    assert float(rows[1][3]) == pytest.approx(20.0)
    assert float(rows[2][4]) == pytest.approx(90.0)


def test_report_json(tmp_path):
    cfg = preset_run_config("example6")
    path = write_outputs({"eig": 1 + 2j, "m": np.eye(2)}, tmp_path / "report.json", cfg)
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["tool"] == {"name": "acc-stability", "version": __version__}
    assert payload["config"]["converter"]["omega_p_rad_s"] == 5655.0
    assert payload["results"]["eig"] == [1.0, 2.0]
    assert payload["results"]["m"] == [[1.0, 0.0], [0.0, 1.0]]


def test_to_jsonable_dataclass():
    record = SweepRecord(omega_p=1.0, k=np.float64(0.5), eigs=np.array([1j]))
    data = to_jsonable(record)
    assert data["k"] == 0.5
    assert data["eigs"] == [[0.0, 1.0]]
    json.dumps(data)


def test_report_needs_config(tmp_path):
    with pytest.raises(OutputError):
        write_outputs({"a": 1}, tmp_path / "report.json")


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError):
        write_outputs(SweepReport(), blocker / "sweep.csv")


def test_unknown_payload(tmp_path):
    with pytest.raises(OutputError):
        write_outputs(42, tmp_path / "x")
