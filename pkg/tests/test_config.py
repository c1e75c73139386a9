from pathlib import Path

import numpy as np
import pytest

from pairpot import ConfigError, Strauss
from pairpot.config import apply_overrides, load_config, load_model, parse_config, parse_r_grid

BASE = """
[model]
kind = strauss
beta = 0.5
range = 1.0
phi = 0.5

[window]
sides = 10 20

[bandwidth]
values = 0.2

[experiment]
r = 0.5 0.7
replicates = 30
"""


def test_parse_basic():
    cfg = parse_config(BASE)
    assert cfg.model == Strauss(0.5, 1.0, 0.5)
    assert cfg.sides == (10.0, 20.0)
    assert cfg.rungs() == [(10.0, 0.2), (20.0, 0.2)]
    assert cfg.window().side == 20.0
    assert cfg.chain(10.0).burn_in == 500


def test_unknown_key_and_section():
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_config(BASE + "colour = red\n")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(BASE + "[plots]\nwidth = 3\n")
    with pytest.raises(ConfigError, match="missing section"):
        parse_config("[window]\nsides = 10\n")


def test_side_must_exceed_four_ranges():
    with pytest.raises(ConfigError, match="4R"):
        parse_config(BASE.replace("sides = 10 20", "sides = 4 20"))


@pytest.mark.parametrize(
    "old, new",
    [
        ("values = 0.2", "values = 1.5"),
        ("values = 0.2", "values = 0.1 0.2"),
        ("values = 0.2", "values = 0.2\nconstant = 1"),
        ("r = 0.5 0.7", "r = 0.7 0.5"),
        ("r = 0.5 0.7", "r = 0.5 1.2"),
        ("sides = 10 20", "sides = 20 10"),
        ("beta = 0.5", "beta = abc"),
        ("replicates = 30", "replicates = 0"),
    ],
)
def test_invalid_values(old, new):
    with pytest.raises(ConfigError):
        parse_config(BASE.replace(old, new))


def test_bandwidth_schedule_section():
    text = BASE.replace("values = 0.2", "constant = 0.5\nq2 = 0.25")
    cfg = parse_config(text)
    assert cfg.schedule is not None
    assert cfg.rungs()[0][1] == pytest.approx(0.5 * 10 ** -0.25)


def test_overrides(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text(BASE)
    cfg = load_config(p, ["experiment.seed=17", "model.phi=0.3"])
    assert cfg.seed == 17 and cfg.model.phi == 0.3
    with pytest.raises(ConfigError):
        apply_overrides(BASE, ["seed=17"])
    with pytest.raises(ConfigError):
        load_config(p, ["experiment.colour=red"])


def test_paths_resolve_against_the_config_file(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text(BASE + "target = t.csv\noutput = out\n")
    cfg = load_config(p)
    assert Path(cfg.target) == tmp_path / "t.csv"
    assert Path(cfg.output) == tmp_path / "out"


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/c.ini")


def test_load_model_ignores_other_sections(tmp_path):
    p = tmp_path / "m.ini"
    p.write_text(BASE + "[plots]\nwidth = 3\n")
    assert load_model(p) == Strauss(0.5, 1.0, 0.5)


def test_r_grid():
    assert np.allclose(parse_r_grid("0.1:0.5:5"), [0.1, 0.2, 0.3, 0.4, 0.5])
    for bad in ("0.1:0.5", "0.5:0.1:3", "0.1:0.5:1", "a:b:c"):
        with pytest.raises(ConfigError):
            parse_r_grid(bad)
    cfg = parse_config(BASE.replace("r = 0.5 0.7", "r_grid = 0.2:1.0:5"))
    assert cfg.r == pytest.approx((0.2, 0.4, 0.6, 0.8, 1.0))
