import pytest

from nl4s.config import ConfigError, config_hash, load_config, parse_config

ALMOST = """
experiment = "almost"
[grid]
d = 5
n = 16
[solver]
dt = 1e-3
steps = 10
[imethod]
gamma = 1.8
delta = 0.1
N = [2, 4]
[data]
family = "band_limited_random"
seed = 1
"""


def errors_of(text, kind=None):
    with pytest.raises(ConfigError) as info:
        parse_config(text, kind)
    return info.value.errors


def test_minimal_almost_config():
    cfg = parse_config(ALMOST)
    assert cfg.kind == "almost"
    assert cfg.grid.d == 5 and cfg.grid.n == 16
    assert cfg.imethod.N_values == [2, 4] and cfg.imethod.gamma == 1.8
    assert cfg.data.seed == 1 and cfg.solver.steps == 10
    assert len(cfg.hash) == 64


def test_unresolved_N():
    errs = errors_of(ALMOST.replace("N = [2, 4]", "N = [32]"))
    assert any(e.startswith("N unresolved") for e in errs)


def test_missing_seed():
    errs = errors_of(ALMOST.replace("seed = 1", ""))
    assert "missing 'data.seed' (required for random data)" in errs


def test_all_errors_reported_at_once():
    text = ALMOST.replace("seed = 1", "").replace("steps = 10", "steps = 10\nfoo = 1") \
                 .replace("d = 5", "d = 5.0")
    errs = errors_of(text)
    assert any("unknown key 'solver.foo'" in e for e in errs)
    assert any("'grid.d' has the wrong type" in e for e in errs)
    assert len(errs) >= 2


def test_bool_is_not_a_number():
    errs = errors_of(ALMOST.replace("steps = 10", "steps = true"))
    assert any("solver.steps" in e for e in errs)


def test_kind_mismatch_and_unknown_kind():
    assert any("requested" in e for e in errors_of(ALMOST, "run"))
    assert errors_of('experiment = "bogus"')
    assert any("needs a [budget]" in e for e in errors_of('experiment = "budget"'))


def test_check_needs_nothing():
    assert parse_config("", "check").kind == "check"


def test_invalid_toml():
    errs = errors_of("experiment = ")
    assert errs[0].startswith("not valid TOML")


def test_band_beyond_nyquist():
    errs = errors_of(ALMOST.replace("seed = 1", "seed = 1\nband = 100.0"))
    assert any("beyond the Nyquist" in e for e in errs)


PLANE = """
experiment = "morawetz"
[grid]
d = 5
n = 8
[solver]
dt = 1e-3
steps = 4
[data]
family = "plane_wave_sum"
modes = [{k = [1, 0, 0, 0, 0], amplitude = [0.5, 0.0]}]
"""


def test_plane_wave_modes():
    cfg = parse_config(PLANE)
    assert cfg.data.modes == (((1, 0, 0, 0, 0), 0.5 + 0j),)
    errs = errors_of(PLANE.replace("[1, 0, 0, 0, 0]", "[4, 0, 0, 0, 0]"))
    assert any("not resolved" in e for e in errs)
    errs = errors_of(PLANE.replace("[1, 0, 0, 0, 0]", "[1, 0]"))
    assert any("has 2 entries" in e for e in errs)


CONV = """
experiment = "convergence"
[grid]
d = 1
n = 32
[solver]
dt = 0.1
steps = 1
generic = true
[data]
family = "gaussian_bump"
[convergence]
T = 1.0
dt_levels = LEVELS
"""


def test_convergence_levels():
    assert parse_config(CONV.replace("LEVELS", "[0.1, 0.05, 0.025]")).dt_levels == (0.1, 0.05, 0.025)
    assert any("at least 3" in e for e in errors_of(CONV.replace("LEVELS", "[0.1, 0.05]")))
    assert any("halve" in e for e in errors_of(CONV.replace("LEVELS", "[0.1, 0.04, 0.02]")))
    assert any("whole number" in e for e in errors_of(CONV.replace("LEVELS", "[0.3, 0.15, 0.075]")))


def test_hash_is_canonical():
    a = parse_config(ALMOST)
    b = parse_config(ALMOST.replace("seed = 1", "seed = 1  # comment"))
    assert a.hash == b.hash == config_hash(a.echo)
    c = parse_config(ALMOST.replace("seed = 1", "seed = 2"))
    assert c.hash != a.hash


def test_shipped_configs_parse(tmp_path):
    import glob
    import os
    root = os.path.join(os.path.dirname(__file__), os.pardir, "configs")
    paths = sorted(glob.glob(os.path.join(root, "*.toml")))
    assert paths
    for p in paths:
        load_config(p)
