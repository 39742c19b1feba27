import csv
import io
import json
import math
import os

import numpy as np
import pytest

from nl4s.config import DataSpec, config_hash, load_config, parse_config
from nl4s.harness import ResultRecord, convergence_study, emit, make_initial_data, run_experiment
from nl4s.norms import sobolev_norm
from nl4s.spectral import apply_symbol, make_grid, make_i_symbol

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

RUN_D5 = """
experiment = "run"
[grid]
d = 5
n = 8
[solver]
dt = 1e-3
steps = 20
sample_stride = 5
[data]
family = "band_limited_random"
seed = 3
band = 2.0
amplitude = 2.0
"""


# -- initial data -----------------------------------------------------------

def test_seeded_data_is_reproducible():
    g = make_grid(3, 16)
    spec = DataSpec("band_limited_random", seed=5, band=4.0)
    a, b = make_initial_data(spec, g), make_initial_data(spec, g)
    assert np.array_equal(a.spectral, b.spectral)
    c = make_initial_data(DataSpec("band_limited_random", seed=6, band=4.0), g)
    assert not np.array_equal(a.spectral, c.spectral)


def test_data_normalization():
    g = make_grid(3, 16)
    f = make_initial_data(DataSpec("band_limited_random", seed=5, band=4.0, amplitude=2.5), g)
    assert sobolev_norm(f, 2.0, homogeneous=False) == pytest.approx(2.5, rel=1e-12)
    h = make_initial_data(DataSpec("band_limited_random", seed=5, band=4.0, amplitude=2.5), g, 2, 1.8)
    ih = apply_symbol(h, make_i_symbol(2, 1.8))
    assert sobolev_norm(ih, 2.0, homogeneous=False) == pytest.approx(2.5, rel=1e-12)
    assert np.all(h.spectral[g.xi_abs > 4.0] == 0)


def test_zero_amplitude_gives_zeros():
    g = make_grid(2, 8)
    f = make_initial_data(DataSpec("band_limited_random", seed=1, amplitude=0.0), g)
    assert not f.spectral.any()


def test_other_families():
    g = make_grid(2, 16)
    bump = make_initial_data(DataSpec("gaussian_bump", width=0.5, amplitude=2.0), g)
    assert np.max(np.abs(bump.physical)) == pytest.approx(2.0)
    pw = make_initial_data(DataSpec("plane_wave_sum", modes=(((1, 2), 0.5j),), amplitude=2.0), g)
    assert pw.spectral[g.index_of((1, 2))] == pytest.approx(1j)
    with pytest.raises(ValueError):
        make_initial_data(DataSpec("band_limited_random"), g)


# -- records ----------------------------------------------------------------

def test_record_csv_and_schema():
    rec = ResultRecord("run", {}, "h")
    rec.add_column("t", [0.0, 0.1], "time")
    rec.add_column("ok", [True, False], "flag")
    rows = list(csv.reader(io.StringIO(rec.csv_text())))
    assert rows == [["t", "ok"], ["0", "1"], ["0.10000000000000001", "0"]]
    assert float(rows[2][0]) == 0.1
    assert set(rec.schema) == {"t", "ok"}


def test_report_json_handles_specials(tmp_path):
    rec = ResultRecord("x", {"a": 1}, "h", scalars={"inf": math.inf, "v": np.float64(0.1)})
    rpath, _ = emit(rec, tmp_path)
    data = json.load(open(rpath))
    assert data["scalars"] == {"inf": "inf", "v": 0.1}


def test_run_pipeline_and_rerun_bytes(tmp_path):
    cfg = parse_config(RUN_D5)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a == b
    emit(a, tmp_path / "a")
    emit(b, tmp_path / "b")
    assert (tmp_path / "a" / "series.csv").read_bytes() == (tmp_path / "b" / "series.csv").read_bytes()
    report = json.load(open(tmp_path / "a" / "report.json"))
    assert report["config_hash"] == config_hash(report["config"])
    header = (tmp_path / "a" / "series.csv").read_text().splitlines()[0].split(",")
    assert header == ["t", "mass", "energy", "h_half", "m_norm_partial"]
    assert set(header) <= set(report["schema"])
    assert a.scalars["mass_drift"] <= 1e-12


def test_almost_pipeline():
    cfg = parse_config(RUN_D5.replace('"run"', '"almost"') + "[imethod]\ngamma = 1.8\ndelta = 0.1\nN = [1, 2]\n")
    rec = run_experiment(cfg)
    assert {"E_I_1", "E_I_2", "h_half", "m_norm_partial"} <= set(rec.columns)
    assert set(rec.columns) <= set(rec.schema)
    assert set(rec.scalars["increments"]) == {"1", "2"}


def test_budget_pipeline():
    cfg = parse_config('experiment = "budget"\n[budget]\nd = 5\ngamma = 1.8\ndelta = 0.1\nc = 1\n')
    rec = run_experiment(cfg)
    assert rec.scalars["N"] == 1024
    assert rec.scalars["alpha"] == pytest.approx(0.189474, abs=1e-6)
    assert rec.columns["feasible"][-1] and not rec.columns["feasible"][-2]


def test_check_pipeline():
    rec = run_experiment(parse_config("", "check"))
    assert rec.scalars["failed"] == 0
    assert all(rec.columns["passed"])
    assert list(rec.columns) == ["name", "value", "tolerance", "passed"]


def test_morawetz_pipeline():
    rec = run_experiment(load_config(os.path.join(CONFIGS, "morawetz_d5.toml")))
    assert rec.scalars["lhs"] > 0 and rec.scalars["ratio"] > 0
    assert "m_norm_partial" in rec.columns


# -- convergence ------------------------------------------------------------

CONV = """
experiment = "convergence"
[grid]
d = 1
n = 32
[solver]
dt = 0.01
steps = 1
generic = true
nonlinear = NONLINEAR
[data]
family = "band_limited_random"
seed = 2
band = 4.0
amplitude = AMP
[convergence]
T = 0.04
dt_levels = [0.01, 0.005, 0.0025]
"""


def conv_cfg(nonlinear="true", amp="1.0"):
    return parse_config(CONV.replace("NONLINEAR", nonlinear).replace("AMP", amp))


def test_linear_convergence_is_exact():
    cfg = conv_cfg("false")
    study = convergence_study(cfg, cfg.dt_levels, cfg.T)
    assert study["status"] == "exact" and study["order"] == math.inf


def test_zero_data_convergence_undefined():
    cfg = conv_cfg(amp="0.0")
    study = convergence_study(cfg, cfg.dt_levels, cfg.T)
    assert study["status"] == "undefined" and study["order"] is None


def test_convergence_needs_three_levels():
    cfg = conv_cfg()
    with pytest.raises(ValueError):
        convergence_study(cfg, [0.01, 0.005], cfg.T)


def test_nonlinear_order_two():
    cfg = load_config(os.path.join(CONFIGS, "convergence_d1.toml"))
    study = convergence_study(cfg, cfg.dt_levels, cfg.T)
    assert study["status"] == "fitted"
    assert 1.8 <= study["order"] <= 2.2
    assert study["steps"] == [250, 500, 1000, 2000]
