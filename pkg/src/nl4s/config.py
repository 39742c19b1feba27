"""TOML experiment configuration.

Grammar (every section optional unless the experiment needs it)::

    experiment = "almost"        # run | almost | morawetz | budget | check | convergence
    out = "results/almost"       # default output directory

    [grid]        d, n, L
    [solver]      dt, steps, sample_stride, nonlinear, spectral_filter, generic
    [imethod]     gamma, delta, N (list), potential, mu, enforce_delta_bound
    [data]        family = band_limited_random | gaussian_bump | plane_wave_sum
                  seed, band, amplitude        (band_limited_random)
                  width, amplitude             (gaussian_bump)
                  modes = [{k = [..], amplitude = [re, im]}, ...]  (plane_wave_sum)
    [budget]      d, gamma, delta, T, K, mu, c
    [convergence] T, dt_levels (list, >= 3, successive ratio 2)

``parse_config`` reports every violation at once.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .budget import BudgetInput
from .dynamics import SolverConfig
from .imethod import IMethodConfig
from .spectral import Grid, make_grid

KINDS = ("run", "almost", "morawetz", "budget", "check", "convergence")
FAMILIES = ("band_limited_random", "gaussian_bump", "plane_wave_sum")

_NUM = (int, float)
_SCHEMA = {
    "grid": {"d": int, "n": int, "L": _NUM},
    "solver": {"dt": _NUM, "steps": int, "sample_stride": int, "nonlinear": bool,
               "spectral_filter": bool, "generic": bool},
    "imethod": {"gamma": _NUM, "delta": _NUM, "N": list, "potential": bool, "mu": _NUM,
                "enforce_delta_bound": bool},
    "data": {"family": str, "seed": int, "band": _NUM, "amplitude": _NUM, "width": _NUM,
             "modes": list},
    "budget": {"d": int, "gamma": _NUM, "delta": _NUM, "T": _NUM, "K": _NUM, "mu": _NUM,
               "c": _NUM},
    "convergence": {"T": _NUM, "dt_levels": list},
}
_TOP = {"experiment": str, "out": str}

# what each experiment needs
_NEEDS = {
    "run": ("grid", "solver", "data"),
    "almost": ("grid", "solver", "imethod", "data"),
    "morawetz": ("grid", "solver", "data"),
    "budget": ("budget",),
    "check": (),
    "convergence": ("grid", "solver", "data", "convergence"),
}


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every violated constraint."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class DataSpec:
    family: str
    seed: Optional[int] = None
    band: float = 2.0
    amplitude: float = 1.0
    width: float = 1.0
    modes: tuple = ()


@dataclass
class ExperimentConfig:
    kind: str
    grid: Optional[Grid] = None
    solver: Optional[SolverConfig] = None
    imethod: Optional[IMethodConfig] = None
    data: Optional[DataSpec] = None
    budget: Optional[BudgetInput] = None
    T: Optional[float] = None
    dt_levels: tuple = ()
    out: Optional[str] = None
    echo: dict = field(default_factory=dict)

    @property
    def hash(self) -> str:
        return config_hash(self.echo)


def config_hash(echo: dict) -> str:
    """SHA-256 of the canonical JSON form of a config echo."""
    text = json.dumps(echo, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _typecheck(where, table, schema, errors):
    for key, value in table.items():
        if key not in schema:
            errors.append(f"unknown key '{where}{key}'")
            continue
        want = schema[key]
        # bool is an int subclass: only accept it where a bool is expected
        ok = isinstance(value, bool) if want is bool else (
            isinstance(value, want) and not isinstance(value, bool))
        if not ok:
            errors.append(f"'{where}{key}' has the wrong type ({type(value).__name__})")


def parse_config(text: str, kind: Optional[str] = None) -> ExperimentConfig:
    """Parse and validate a TOML config; ``kind`` overrides or checks ``experiment``."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"not valid TOML: {exc}"]) from None
    errors: list[str] = []

    for key, value in raw.items():
        if key in _SCHEMA:
            if not isinstance(value, dict):
                errors.append(f"'{key}' must be a table")
        elif key in _TOP:
            if not isinstance(value, _TOP[key]):
                errors.append(f"'{key}' must be a string")
        else:
            errors.append(f"unknown key '{key}'")
    for sec in _SCHEMA:
        if isinstance(raw.get(sec), dict):
            _typecheck(f"{sec}.", raw[sec], _SCHEMA[sec], errors)

    declared = raw.get("experiment")
    if kind is None:
        kind = declared
    elif declared is not None and declared != kind:
        errors.append(f"config declares experiment '{declared}' but '{kind}' was requested")
    if kind not in KINDS:
        errors.append(f"experiment must be one of {', '.join(KINDS)}, got {kind!r}")
        raise ConfigError(errors)
    for sec in _NEEDS[kind]:
        if sec not in raw:
            errors.append(f"experiment '{kind}' needs a [{sec}] section")
    if errors:
        raise ConfigError(errors)

    cfg = ExperimentConfig(kind=kind, out=raw.get("out"), echo=raw)
    if "grid" in raw:
        cfg.grid = _build(errors, "grid", lambda g: make_grid(g["d"], g["n"], g.get("L", 2 * math.pi)),
                          raw["grid"], required=("d", "n"))
    if "solver" in raw and cfg.grid is not None:
        s = raw["solver"]
        cfg.solver = _build(errors, "solver", lambda s: SolverConfig(
            grid=cfg.grid, dt=float(s["dt"]), steps=s["steps"],
            sample_stride=s.get("sample_stride", 1), nonlinear=s.get("nonlinear", True),
            spectral_filter=s.get("spectral_filter", False), generic=s.get("generic", False)),
            s, required=("dt", "steps"))
        if cfg.solver is not None:
            _build(errors, "solver", lambda _: cfg.solver.spec, s)
    if "imethod" in raw and cfg.solver is not None:
        im = raw["imethod"]
        nyq = cfg.grid.nyquist
        for N in im.get("N", []):
            if isinstance(N, _NUM) and 2 * N > nyq:
                errors.append(f"N unresolved: N={N} needs 2N <= Nyquist frequency {nyq:g} "
                              f"on the n={cfg.grid.n} grid")
        if not any(e.startswith("N unresolved") for e in errors):
            cfg.imethod = _build(errors, "imethod", lambda m: IMethodConfig(
                gamma=float(m["gamma"]), delta=float(m["delta"]), N_values=list(m["N"]),
                solver=cfg.solver, potential=m.get("potential", True), mu=float(m.get("mu", 0.1)),
                enforce_delta_bound=m.get("enforce_delta_bound", True),
                data=raw.get("data", {}).get("family", "")), im, required=("gamma", "delta", "N"))
    if "data" in raw:
        cfg.data = _parse_data(raw["data"], cfg.grid, errors)
    if "budget" in raw:
        b = raw["budget"]
        cfg.budget = _build(errors, "budget", lambda b: BudgetInput(
            d=b["d"], gamma=b["gamma"], delta=b["delta"], **{k: b[k] for k in ("T", "K", "mu", "c") if k in b}),
            b, required=("d", "gamma", "delta"))
    if "convergence" in raw:
        c = raw["convergence"]
        levels = c.get("dt_levels", [])
        if "T" not in c:
            errors.append("missing 'convergence.T'")
        elif not c["T"] > 0:
            errors.append("'convergence.T' must be positive")
        else:
            cfg.T = float(c["T"])
        errors.extend(_check_levels(levels, cfg.T))
        cfg.dt_levels = tuple(float(x) for x in levels)
    if errors:
        raise ConfigError(errors)
    return cfg


def _build(errors, section, make, table, required=()):
    missing = [k for k in required if k not in table]
    for k in missing:
        errors.append(f"missing '{section}.{k}'")
    if missing:
        return None
    try:
        return make(table)
    except (ValueError, TypeError) as exc:
        errors.append(f"[{section}] {exc}")
        return None


def _check_levels(levels, T) -> list[str]:
    errs = []
    if len(levels) < 3:
        errs.append(f"convergence needs at least 3 dt levels, got {len(levels)}")
        return errs
    if not all(isinstance(x, _NUM) and x > 0 for x in levels):
        return ["dt levels must be positive numbers"]
    lv = sorted(levels, reverse=True)
    for a, b in zip(lv, lv[1:]):
        if not math.isclose(a / b, 2.0, rel_tol=1e-12):
            errs.append(f"dt levels must halve successively ({a:g} -> {b:g})")
    if T is not None:
        for dt in lv:
            steps = T / dt
            if not math.isclose(steps, round(steps), rel_tol=1e-9):
                errs.append(f"T={T:g} is not a whole number of steps of dt={dt:g}")
    return errs


def _parse_data(d: dict, grid: Optional[Grid], errors: list) -> Optional[DataSpec]:
    family = d.get("family")
    if family not in FAMILIES:
        errors.append(f"data.family must be one of {', '.join(FAMILIES)}, got {family!r}")
        return None
    amp = d.get("amplitude", 1.0)
    if isinstance(amp, _NUM) and amp < 0:
        errors.append("data.amplitude must be non-negative")
    if family == "band_limited_random":
        if "seed" not in d:
            errors.append("missing 'data.seed' (required for random data)")
        band = d.get("band", 2.0)
        if isinstance(band, _NUM):
            if band <= 0:
                errors.append("data.band must be positive")
            elif grid is not None and band > grid.nyquist:
                errors.append(f"data.band={band:g} beyond the Nyquist frequency {grid.nyquist:g}")
        return DataSpec(family, seed=d.get("seed"), band=float(band), amplitude=float(amp))
    if family == "gaussian_bump":
        width = d.get("width", 1.0)
        if isinstance(width, _NUM) and width <= 0:
            errors.append("data.width must be positive")
        return DataSpec(family, width=float(width), amplitude=float(amp))
    modes = []
    for i, m in enumerate(d.get("modes", [])):
        if not isinstance(m, dict) or "k" not in m:
            errors.append(f"data.modes[{i}] must be a table with 'k'")
            continue
        k = tuple(int(x) for x in m["k"])
        a = m.get("amplitude", [1.0, 0.0])
        a = complex(a[0], a[1]) if isinstance(a, list) else complex(a)
        if grid is not None:
            if len(k) != grid.d:
                errors.append(f"data.modes[{i}].k has {len(k)} entries, grid has d={grid.d}")
                continue
            if any(abs(x) >= grid.n // 2 for x in k):
                errors.append(f"data.modes[{i}].k={k} is not resolved on n={grid.n}")
                continue
        modes.append((k, a))
    if not modes and not any(e.startswith("data.modes") for e in errors):
        errors.append("plane_wave_sum needs at least one entry in data.modes")
    return DataSpec(family, modes=tuple(modes), amplitude=float(amp))


def load_config(path, kind: Optional[str] = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), kind)


__all__ = ["ConfigError", "DataSpec", "ExperimentConfig", "KINDS", "config_hash",
           "load_config", "parse_config"]
