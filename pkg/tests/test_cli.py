import os
import subprocess
import sys

import pytest

from curvtrack import acceptance, cli, figures
from curvtrack.acceptance import CriterionResult
from curvtrack.output import read_csv

SPHERE_CHERN = """\
command = chern
manifold.kind = sphere
manifold.delta1_over_2pi_mhz = 1.735
manifold.omega1_over_2pi_mhz = 1.735
protocol.tau_us = 4.0
output.path = chern.csv
"""

SMALL_MAP = """\
command = map
manifold.delta1_over_2pi_mhz = 0.01735
manifold.omega1_over_2pi_mhz = 0.01735
protocol.tau_us = 1.0
protocol.start_state = bare
sweep.n = 11
numerics.n_theta = 21
map.quantity = {quantity}
output.format = {fmt}
"""


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_chern_sphere_row(tmp_path):
    assert cli.main(["chern", "--config", write(tmp_path, SPHERE_CHERN), "--out", str(tmp_path)]) == 0
    columns, rows = read_csv((tmp_path / "chern.csv").read_text())
    assert columns == list(cli.CHERN_COLUMNS)
    [row] = rows
    assert float(row[2]) == 1.0 and row[2] == "1"
    assert abs(float(row[1]) - 1.0) < 0.05
    assert abs(float(row[3]) - 2.0) < 1e-6
    assert row[4] == "ok"


def test_physics_error_exit_code_and_no_file(tmp_path, capsys):
    # delta2 = -delta1 closes the torus gap at theta = 0: no ground state to prepare
    text = (
        "command = curvature\nmanifold.kind = torus\nmanifold.delta2_over_delta1 = -1\n"
        "protocol.tau_us = 1\noutput.path = c.csv\n"
    )
    cfg = write(tmp_path, text)
    out = tmp_path / "out"
    assert cli.main(["curvature", "--config", cfg, "--out", str(out)]) == 1
    assert "DegeneratePoint" in capsys.readouterr().err
    assert not (out / "c.csv").exists()


def test_step_too_large_is_physics_error(tmp_path):
    text = "command = evolve\nmanifold.kind = sphere\nprotocol.tau_us = 1\nnumerics.dt_us = 0.5\n"
    assert cli.main(["evolve", "--config", write(tmp_path, text), "--out", str(tmp_path)]) == 1
    assert os.listdir(tmp_path) == ["run.cfg"]


@pytest.mark.parametrize(
    "text",
    [
        "command = chern\nprotocol.tau_us = -1\n",
        "command = chern\nnot a line\n",
        "command = chern\nprotocol.tau_us = 1\nbogus.key = 2\n",
    ],
)
def test_config_error_exit_code(tmp_path, text, capsys):
    assert cli.main(["chern", "--config", write(tmp_path, text), "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["chern", "--config", str(tmp_path / "nope.cfg")]) == 2
    assert cli.main(["chern"]) == 2


def test_command_mismatch(tmp_path):
    assert cli.main(["map", "--config", write(tmp_path, SPHERE_CHERN)]) == 2


def test_bad_threads(tmp_path):
    assert cli.main(["chern", "--config", write(tmp_path, SPHERE_CHERN), "--threads", "0"]) == 2


def test_curvature_and_evolve_tables(tmp_path):
    text = "command = curvature\nmanifold.kind = sphere\nprotocol.tau_us = 2\nnumerics.n_theta = 11\n"
    assert cli.main(["curvature", "--config", write(tmp_path, text), "--out", str(tmp_path)]) == 0
    columns, rows = read_csv((tmp_path / "curvature.csv").read_text())
    assert columns == list(cli.CURVATURE_COLUMNS)
    assert len(rows) == 11
    assert float(rows[0][0]) == 0.0 and float(rows[-1][0]) == 1.0
    text = text.replace("curvature", "evolve")
    assert cli.main(["evolve", "--config", write(tmp_path, text), "--out", str(tmp_path)]) == 0
    columns, rows = read_csv((tmp_path / "evolve.csv").read_text())
    assert columns == list(cli.EVOLVE_COLUMNS)
    assert all(abs(float(r[2]) + float(r[3]) - 1) < 1e-9 for r in rows)


@pytest.mark.parametrize("quantity", ["curvature", "overlap_ground", "overlap_excited", "fidelity"])
def test_map_csv_long_format(tmp_path, quantity):
    cfg = write(tmp_path, SMALL_MAP.format(quantity=quantity, fmt="csv"))
    assert cli.main(["map", "--config", cfg, "--out", str(tmp_path)]) == 0
    columns, rows = read_csv((tmp_path / "map.csv").read_text())
    expected = list(cli.MAP_COLUMNS) + (["bare_g"] if quantity == "fidelity" else [])
    assert columns == expected
    assert len(rows) == 11 * 21


def test_map_svg(tmp_path):
    cfg = write(tmp_path, SMALL_MAP.format(quantity="overlap_ground", fmt="svg"))
    assert cli.main(["map", "--config", cfg, "--out", str(tmp_path)]) == 0
    text = (tmp_path / "map.svg").read_text()
    assert text.startswith("<svg") and 'class="legend-max"' in text


def test_singularities(tmp_path):
    cfg = write(tmp_path, figures.FIG4_SINGULARITIES)
    assert cli.main(["singularities", "--config", cfg, "--out", str(tmp_path)]) == 0
    columns, rows = read_csv((tmp_path / "fig4_singularities.csv").read_text())
    assert columns == list(cli.SINGULARITY_COLUMNS)
    assert sorted((float(x), float(y)) for x, y in rows) == [(-1.0, 0.0), (-1.0, 2.0), (1.0, 1.0)]


def test_repeat_runs_are_byte_identical(tmp_path):
    cfg = write(tmp_path, SMALL_MAP.format(quantity="curvature", fmt="csv"))
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["map", "--config", cfg, "--out", str(a)]) == 0
    assert cli.main(["map", "--config", cfg, "--out", str(b), "--threads", "4"]) == 0
    assert (a / "map.csv").read_bytes() == (b / "map.csv").read_bytes()


def test_validate_subset(monkeypatch, capsys):
    fake = {
        1: ("always fine", lambda threads: (True, "ok"), 10.0),
        2: ("always broken", lambda threads: (False, "bad"), 10.0),
    }
    monkeypatch.setattr(acceptance, "CRITERIA", fake)
    assert cli.main(["validate"]) == 1
    out = capsys.readouterr().out
    assert "[PASS]  1 always fine" in out and "[FAIL]  2 always broken" in out
    assert "1/2 criteria passed" in out
    monkeypatch.setattr(acceptance, "CRITERIA", {1: fake[1]})
    assert cli.main(["validate"]) == 0


def test_criterion_over_budget_fails(monkeypatch):
    monkeypatch.setattr(acceptance, "CRITERIA", {1: ("slow", lambda threads: (True, "ok"), -1.0)})
    [result] = acceptance.run_acceptance()
    assert isinstance(result, CriterionResult)
    assert not result.passed and "budget" in result.detail


def test_console_entry_point(tmp_path):
    cfg = write(tmp_path, SPHERE_CHERN)
    proc = subprocess.run(
        [sys.executable, "-m", "curvtrack.cli", "chern", "--config", cfg, "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "chern.csv").exists()


def test_shipped_configs_match_canonical_texts():
    root = os.path.join(os.path.dirname(__file__), os.pardir, "configs")
    shipped = {name: open(os.path.join(root, name)).read() for name in sorted(os.listdir(root)) if name.endswith(".cfg")}
    assert shipped == figures.SHIPPED
