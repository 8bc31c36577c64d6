import csv
import io
import json

import pytest

from haarlab.cli import main, run_experiment
from haarlab.config import config_from_string


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_sq_bound_exit_zero_and_report_shape(capsys):
    code, rep, _ = _run(["sq-bound", "--group", "su", "--qubits", "14", "--tau", "0.1",
                         "--epsilon", "0.1", "--beta", "0.9"], capsys)
    assert code == 0
    assert set(rep) == {"config", "results", "checks", "timing"}
    assert rep["checks"]["all_passed"] is True
    assert rep["results"]["bound"]["formula_id"] == "average_case_hardness/table"
    assert set(rep["results"]["q_lower_other_modes"]) == {"lemma", "as_written"}


def test_domain_error_exits_two(capsys):
    code, rep, err = _run(["sq-bound", "--qubits", "10", "--tau", "0.2", "--epsilon", "0.2"], capsys)
    assert code == 2 and rep is None
    assert "DomainError" in err and "2 tau" in err


def test_config_error_exits_two_with_field(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[experiment]\ncommand = packing\n[params]\nbogus = 1\n")
    code, _, err = _run(["run", "--config", str(path)], capsys)
    assert code == 2 and "params.bogus" in err


def test_failed_numeric_check_exits_one(tmp_path, capsys):
    path = tmp_path / "twirl.ini"
    path.write_text("[experiment]\ncommand = twirl-check\ngroup = su\nsamples = 200\n"
                    "[params]\ninputs = 2\n[tolerances]\nz_max = 0\n")
    code, rep, _ = _run(["run", "--config", str(path)], capsys)
    assert code == 1
    assert rep["checks"]["all_passed"] is False and rep["checks"]["monte_carlo"] is False
    assert rep["checks"]["idempotent"] is True


def test_twirl_check_passes(capsys):
    code, rep, _ = _run(["twirl-check", "--group", "sp", "--qubits", "1", "--samples", "2000"], capsys)
    assert code == 0 and rep["checks"]["all_passed"]


def test_grid_writes_csv_with_one_row_per_point(tmp_path, capsys):
    ini = tmp_path / "grid.ini"
    ini.write_text("[experiment]\ncommand = complexity-bound\ngroup = su\n"
                   f"output_dir = {tmp_path / 'out'}\n[params]\nr = 1\n"
                   "[grid]\nqubits = 6, 8\ndelta = 0.1, 0.5\n")
    code, rep, _ = _run(["run", "--config", str(ini)], capsys)
    assert code == 0 and rep["timing"]["points"] == 4
    rows = list(csv.DictReader(io.StringIO((tmp_path / "out" / "grid.csv").read_text())))
    assert len(rows) == 4
    assert {(r["qubits"], r["delta"]) for r in rows} == {("6", "0.1"), ("6", "0.5"), ("8", "0.1"), ("8", "0.5")}
    assert json.loads((tmp_path / "out" / "complexity-bound.json").read_text())["checks"]["all_passed"]


def test_empty_grid_runs_zero_points_and_succeeds():
    cfg = config_from_string("[experiment]\ncommand = packing\n[grid]\nDelta =\n")
    rep, code = run_experiment(cfg)
    assert code == 0 and rep["results"] == [] and rep["timing"]["points"] == 0
    assert rep["checks"] == {"all_passed": True}


def test_cli_flags_override_config(tmp_path, capsys):
    ini = tmp_path / "p.ini"
    ini.write_text("[experiment]\ncommand = packing\ngroup = so\n[params]\nDelta = 0.3\n")
    code, rep, _ = _run(["run", "--config", str(ini), "--Delta", "0.5", "--qubits", "10"], capsys)
    assert code == 0
    assert rep["results"]["bound"]["inputs"] == {"D": 1024, "Delta": 0.5}


def test_override_for_another_command_is_a_config_error(tmp_path, capsys):
    ini = tmp_path / "p.ini"
    ini.write_text("[experiment]\ncommand = packing\n")
    code, _, err = _run(["run", "--config", str(ini), "--tau", "0.1"], capsys)
    assert code == 2 and "params.tau" in err


def test_identical_seeds_give_identical_numbers(capsys):
    argv = ["sample", "--group", "so", "--qubits", "3", "--samples", "20", "--seed", "5"]
    _, a, _ = _run(argv, capsys)
    _, b, _ = _run(argv, capsys)
    _, c, _ = _run(argv[:-1] + ["6"], capsys)
    assert a["results"] == b["results"]
    argv_tv = ["tv-distance", "--group", "su", "--qubits", "4", "--samples", "300", "--seed", "3",
               "--method", "state"]
    _, x, _ = _run(argv_tv, capsys)
    _, y, _ = _run(argv_tv, capsys)
    assert x["results"] == y["results"]
    assert c["config"]["seed"] == 6


def test_sample_writes_matrix_csv(tmp_path, capsys):
    code, rep, _ = _run(["sample", "--group", "sp", "--qubits", "2", "--samples", "5",
                         "--output-dir", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "Sp2_sample0.csv").exists() and (tmp_path / "sample.json").exists()


@pytest.mark.parametrize("argv", [
    ["moment", "--group", "so", "--dim", "3", "--k", "2", "--samples", "2000", "--polys", "1"],
    ["concentration", "--group", "su", "--qubits", "3", "--samples", "2000"],
    ["packing", "--group", "su", "--qubits", "10", "--n-states", "20"],
    ["packing", "--group", "sp", "--qubits", "12", "--k", "8", "--Delta", "0.5"],
    ["complexity-bound", "--group", "su", "--qubits", "8", "--k", "6", "--delta", "0.1"],
    ["complexity-bound", "--group", "su", "--qubits", "8", "--delta", "0.1", "--unsimplified"],
    ["tv-distance", "--group", "so", "--qubits", "4", "--samples", "500"],
])
def test_commands_run_cleanly(argv, capsys):
    code, rep, err = _run(argv, capsys)
    assert code == 0, err
    assert rep["checks"]["all_passed"]


def test_verify_quick_only_nine(capsys):
    code, rep, err = _run(["verify", "--scale", "quick", "--only", "9"], capsys)
    assert code == 0
    assert rep["checks"] == {"all_passed": True, "criterion_9": True}
    assert "[PASS] criterion 9" in err
