import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from hal.cli import main

REPO = Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Copy of the shipped configs so schedule paths resolve locally."""
    work = tmp_path_factory.mktemp("cliwork")
    for name in ("vehicle.json", "vehicle_aggressive.json", "sync_r2.json",
                 "sphere.json", "es_affine.json", "vehicle_nominal.csv",
                 "vehicle_aggressive.csv", "sync_r2.csv"):
        shutil.copy(CONFIGS / name, work / name)
    return work


def test_run_writes_arc_and_metrics(workdir, tmp_path):
    out = tmp_path / "veh.csv"
    code = main(["run", str(workdir / "vehicle.json"), "--out", str(out),
                 "--t-final", "4.0"])
    assert code == 0
    text = out.read_text()
    assert text.startswith("# scenario=vehicle")
    metrics = json.loads((tmp_path / "veh.csv.metrics.json").read_text())
    assert metrics["scenario"] == "vehicle"
    assert metrics["schedule"]["adt_ok"] and metrics["schedule"]["att_ok"]
    assert metrics["jumps"] == 2  # switches at t = 3 and t = 4


def test_run_is_byte_deterministic(workdir, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"det{k}.csv"
        code = main(["run", "--config", str(workdir / "vehicle.json"),
                     "--out", str(out), "--t-final", "2.0"])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_run_missing_config_exits_2(tmp_path):
    code = main(["run", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_run_rejected_schedule_exits_3(workdir, tmp_path):
    burst = tmp_path / "burst.csv"
    burst.write_text("time,mode\n1.0,2\n1.2,3\n1.4,2\n1.6,3\n1.8,2\n")
    code = main(["run", str(workdir / "vehicle.json"),
                 "--out", str(tmp_path / "x.csv"),
                 "--schedule", str(burst)])
    assert code == 3


def test_verify_passes_on_shipped_configs(workdir, capsys):
    for name in ("vehicle.json", "sphere.json"):
        code = main(["verify", str(workdir / name)])
        captured = capsys.readouterr().out
        assert code == 0, captured
        assert "all" in captured and "passed" in captured


def test_average_tabulates_small_errors(workdir, tmp_path):
    out = tmp_path / "avg.csv"
    code = main(["average", str(workdir / "sync_r2.json"), "--out", str(out),
                 "--states", "8"])
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0].startswith("x_1")
    errs = [float(line.split(",")[-1]) for line in rows[1:]]
    assert len(errs) == 8
    assert max(errs) <= 1e-6


def test_shipped_schedule_fixtures_match_reference_constants():
    from hal.automaton import SwitchSchedule
    from hal.scenarios.sync import r2_params, r4_params
    from hal.scenarios.vehicle import AGGRESSIVE_SCHEDULE, NOMINAL_SCHEDULE
    pairs = [
        ("vehicle_nominal.csv", NOMINAL_SCHEDULE.entries),
        ("vehicle_aggressive.csv", AGGRESSIVE_SCHEDULE.entries),
        ("sync_r2.csv", r2_params().schedule.entries),
        ("sync_r4.csv", r4_params().schedule.entries),
    ]
    for name, expected in pairs:
        got = SwitchSchedule.from_csv(CONFIGS / name).entries
        assert got == expected, name


def test_sweep_table_nonincreasing(workdir, tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", str(workdir / "vehicle.json"), "--out", str(out),
                 "--epsilons", "0.3,0.15", "--t-final", "6.0"])
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "epsilon,rho_min,T"
    rhos = [float(line.split(",")[1]) for line in rows[1:]]
    assert len(rhos) == 2
    assert rhos[1] <= rhos[0] + 2e-3
