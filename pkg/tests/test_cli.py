import csv
import subprocess
import sys

import pytest

from pairpot.cli import ESTIMATE_COLUMNS, main
from pairpot.spatial import read_pattern_csv

MODEL = """
[model]
kind = strauss
beta = 0.5
range = 1.0
phi = 0.5
"""

CONFIG = MODEL + """
[window]
sides = 8

[bandwidth]
values = 0.2

[experiment]
r = 0.5
replicates = 4
seed = 1
sampler = mcmc
"""


@pytest.fixture
def files(tmp_path):
    (tmp_path / "m.ini").write_text(MODEL)
    (tmp_path / "c.ini").write_text(CONFIG)
    return tmp_path


def test_simulate_and_estimate(files):
    out = files / "x.csv"
    assert main(["simulate", "--model-config", str(files / "m.ini"), "--side", "12", "--seed", "4",
                 "--out", str(out)]) == 0
    x = read_pattern_csv(out)
    assert x.window.side == 12.0 and len(x) > 0
    est = files / "e.csv"
    assert main(["estimate", "--pattern", str(out), "--range", "1", "--bandwidth", "0.2",
                 "--r-grid", "0.2:1.0:5", "--out", str(est)]) == 0
    with open(est, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ESTIMATE_COLUMNS and len(rows) == 5


def test_simulate_count_and_steps(files):
    out = files / "sim" / "y.csv"
    assert main(["simulate", "--config", str(files / "c.ini"), "--steps", "200", "--burn-in", "100",
                 "--count", "2", "--out", str(out)]) == 0
    assert sorted(p.name for p in (files / "sim").iterdir()) == ["y_0000.csv", "y_0001.csv"]


def test_config_errors_exit_2(files, capsys):
    assert main(["simulate", "--model-config", str(files / "m.ini"), "--out", str(files / "x.csv")]) == 2
    assert main(["validate", "--config", str(files / "nope.ini"), "--out", str(files / "g.csv")]) == 2
    assert main(["validate", "--config", str(files / "c.ini"), "--set", "window.sides=3",
                 "--out", str(files / "g.csv")]) == 2
    assert main(["estimate", "--pattern", str(files / "nope.csv"), "--range", "1", "--bandwidth", "0.2",
                 "--r-grid", "0.2:1:5", "--out", str(files / "e.csv")]) == 2
    assert "config error" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["estimate"])
    assert exc.value.code == 2


def test_degenerate_estimate_exits_3(files):
    main(["simulate", "--model-config", str(files / "m.ini"), "--side", "4", "--seed", "4",
          "--out", str(files / "s.csv")])
    code = main(["estimate", "--pattern", str(files / "s.csv"), "--range", "1", "--bandwidth", "0.2",
                 "--r-grid", "0.2:1.0:5", "--out", str(files / "e.csv")])
    assert code == 3


def test_validate_writes_three_rows(files):
    out = files / "g.csv"
    assert main(["validate", "--config", str(files / "c.ini"), "--grid-res", "32", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "label,lhs,rhs,mc_stderr,z_score,n_chains" and len(lines) == 4


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pairpot", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "simulate" in res.stdout
