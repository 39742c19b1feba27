"""Experiment orchestration: initial data, pipelines, convergence studies, output."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import budget as budget_mod
from .config import DataSpec, ExperimentConfig
from .dynamics import SolverConfig, energy, evolve, iterate, mass
from .imethod import almost_conservation_experiment
from .morawetz import morawetz_check
from .norms import cumulative_time_norm, m_exponents, sobolev_norm, spatial_lq
from .spectral import Field, Grid, apply_symbol, identity_symbol, make_i_symbol

log = logging.getLogger(__name__)


# -- initial data -----------------------------------------------------------

def make_initial_data(spec: DataSpec, grid: Grid, N: Optional[float] = None,
                      gamma: Optional[float] = None) -> Field:
    """Build ``u0`` for a data family.

    ``band_limited_random`` draws seeded complex Gaussians on ``|xi| <= band``
    and scales the result so that ``||I_N u0||_{H^2}`` equals ``amplitude``
    (``I`` is the identity when ``N`` is not given).  ``gaussian_bump`` is
    ``amplitude * exp(-|x - c|^2 / (2 width^2))`` centred in the box and
    ``plane_wave_sum`` superposes the listed modes, scaled by ``amplitude``.
    """
    if spec.family == "band_limited_random":
        if spec.seed is None:
            raise ValueError("band_limited_random needs a seed")
        if spec.band > grid.nyquist:
            raise ValueError(f"band={spec.band:g} beyond the Nyquist frequency {grid.nyquist:g}")
        if spec.amplitude == 0:
            return Field.zeros(grid)
        rng = np.random.default_rng(spec.seed)
        coeff = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        coeff *= grid.xi_abs <= spec.band
        f = Field(grid, coeff, "spectral")
        sym = make_i_symbol(N, gamma) if N is not None else identity_symbol()
        norm = sobolev_norm(apply_symbol(f, sym), 2.0, homogeneous=False)
        if norm == 0:
            raise ValueError(f"band={spec.band:g} contains no grid modes")
        return Field(grid, coeff * (spec.amplitude / norm), "spectral", {"family": spec.family})
    if spec.family == "gaussian_bump":
        r2 = np.zeros(grid.shape)
        for j in range(grid.d):
            r2 = r2 + (grid.x_component(j) - 0.5 * grid.L) ** 2
        u = spec.amplitude * np.exp(-r2 / (2.0 * spec.width ** 2))
        return Field(grid, u.astype(np.complex128), "physical", {"family": spec.family})
    if spec.family == "plane_wave_sum":
        uh = np.zeros(grid.shape, dtype=np.complex128)
        for k, a in spec.modes:
            uh[grid.index_of(k)] += spec.amplitude * a
        return Field(grid, uh, "spectral", {"family": spec.family})
    raise ValueError(f"unknown data family {spec.family!r}")


def initial_data_for(cfg: ExperimentConfig) -> Field:
    if cfg.imethod is not None:
        return make_initial_data(cfg.data, cfg.grid, max(cfg.imethod.N_values), cfg.imethod.gamma)
    return make_initial_data(cfg.data, cfg.grid)


# -- records ----------------------------------------------------------------

@dataclass
class ResultRecord:
    """One experiment's output.

    ``columns`` is the time series (or table) written to ``series.csv``;
    ``schema`` documents every column.  ``timing`` holds wall-clock data and
    is excluded from equality so records of repeated runs compare equal.
    """

    kind: str
    config: dict
    config_hash: str
    meta: dict = field(default_factory=dict)
    columns: dict = field(default_factory=dict)
    schema: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict, compare=False)

    def add_column(self, name: str, values, doc: str) -> None:
        self.columns[name] = list(values)
        self.schema[name] = doc

    def csv_text(self) -> str:
        names = list(self.columns)
        rows = zip(*(self.columns[n] for n in names))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for row in rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def report(self) -> dict:
        return _jsonable({
            "kind": self.kind,
            "config": self.config,
            "config_hash": self.config_hash,
            "meta": self.meta,
            "schema": self.schema,
            "scalars": self.scalars,
            "timing": self.timing,
        })


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _jsonable(x):
    """Plain JSON types; non-finite floats become strings ("inf", "nan")."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, Fraction):
        return str(x)
    return x


def emit(record: ResultRecord, out_dir) -> tuple[str, str]:
    """Write ``report.json`` and ``series.csv`` under ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    rpath = os.path.join(out_dir, "report.json")
    spath = os.path.join(out_dir, "series.csv")
    with open(rpath, "w", encoding="utf-8") as fh:
        json.dump(record.report(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(spath, "w", encoding="utf-8", newline="") as fh:
        fh.write(record.csv_text())
    return rpath, spath


# -- pipelines --------------------------------------------------------------

def _new_record(cfg: ExperimentConfig) -> ResultRecord:
    meta = {}
    if cfg.grid is not None:
        meta["grid"] = {"d": cfg.grid.d, "n": cfg.grid.n, "L": cfg.grid.L}
    if cfg.solver is not None:
        meta.update(dt=cfg.solver.dt, steps=cfg.solver.steps, sample_stride=cfg.solver.sample_stride,
                    nonlinear=cfg.solver.nonlinear)
    return ResultRecord(cfg.kind, cfg.echo, cfg.hash, meta)


def _rel(x, x0):
    return abs(x - x0) / abs(x0) if x0 != 0 else abs(x - x0)


def _run(cfg: ExperimentConfig, rec: ResultRecord) -> None:
    solver = cfg.solver
    spec = solver.spec
    u0 = initial_data_for(cfg)
    m_norm_defined = cfg.grid.d in (5, 6, 7)
    if m_norm_defined:
        mp, mq = m_exponents(cfg.grid.d)
    t, ms, es, hh, mv = [], [], [], [], []
    for tk, f in iterate(u0, solver):
        t.append(tk)
        ms.append(mass(f))
        es.append(energy(f, spec))
        hh.append(sobolev_norm(f, 0.5))
        if m_norm_defined:
            mv.append(spatial_lq(f, mq))
    rec.add_column("t", t, "sample time")
    rec.add_column("mass", ms, "||u||_2^2")
    rec.add_column("energy", es, "E(u), kinetic plus potential")
    rec.add_column("h_half", hh, "||u||_{Hdot^1/2}")
    if m_norm_defined:
        rec.add_column("m_norm_partial", cumulative_time_norm(t, mv, mp),
                       "M(J) norm over [0, t] (trapezoid rule)")
    rec.scalars.update(
        mass_drift=max(_rel(m, ms[0]) for m in ms),
        energy_drift=max(_rel(e, es[0]) for e in es),
        energy_drift_abs=max(abs(e - es[0]) for e in es),
    )


def _almost(cfg: ExperimentConfig, rec: ResultRecord) -> None:
    u0 = initial_data_for(cfg)
    rep = almost_conservation_experiment(cfg.imethod, u0)
    rec.add_column("t", rep.times, "sample time")
    rec.add_column("mass", rep.mass, "||u||_2^2")
    rec.add_column("energy", rep.energy, "E(u)")
    for N in rep.N_values:
        rec.add_column(f"E_I_{N:g}", rep.modified_energies[N], f"E(I_N u) for N={N:g}")
    rec.add_column("h_half", rep.h_half, "||u||_{Hdot^1/2}")
    if rep.m_samples is not None:
        mp, _ = m_exponents(cfg.grid.d)
        rec.add_column("m_norm_partial", cumulative_time_norm(rep.times, rep.m_samples, mp),
                       "M(J) norm over [0, t] (trapezoid rule)")
    rec.scalars.update(
        gamma=cfg.imethod.gamma, delta=cfg.imethod.delta,
        increments={f"{N:g}": v for N, v in rep.increments.items()},
        slope=rep.slope, slope_residual=rep.slope_residual,
        predicted_exponent=rep.decay_exponent,
        z_values={f"{N:g}": v for N, v in rep.z_values.items()},
        m_norm=rep.m_norm, m_small=rep.m_small,
        initial_ih2={f"{N:g}": v for N, v in rep.initial_ih2.items()},
        small_data=rep.small_data,
    )


def _morawetz(cfg: ExperimentConfig, rec: ResultRecord) -> None:
    d = cfg.grid.d
    u0 = initial_data_for(cfg)
    traj = evolve(u0, cfg.solver)
    rep = morawetz_check(traj, d)
    mp, mq = m_exponents(d)
    t = traj.times
    rec.add_column("t", t, "sample time")
    rec.add_column("mass", [mass(f) for f in traj.fields], "||u||_2^2")
    rec.add_column("h_half", [sobolev_norm(f, 0.5) for f in traj.fields], "||u||_{Hdot^1/2}")
    rec.add_column("m_norm_partial",
                   cumulative_time_norm(t, [spatial_lq(f, mq) for f in traj.fields], mp),
                   "M(J) norm over [0, t] (trapezoid rule)")
    rec.scalars.update(vars(rep))


def _budget(cfg: ExperimentConfig, rec: ResultRecord) -> None:
    b = cfg.budget
    rep = budget_mod.solve_min_N_and_alpha(b)
    rec.meta["budget_input"] = {k: getattr(b, k) for k in ("d", "gamma", "delta", "T", "K", "mu", "c")}
    rec.scalars.update(rep.as_dict())
    rec.scalars["condition_reasons"] = rep.condition.reasons
    # the feasibility scan over dyadic N that led to the minimum
    e, rhs = rep.exponent, math.log2(4.0 / float(b.c)) + (b.d - 4) / b.d * math.log2(float(b.T))
    js = range(0, int(math.log2(rep.N)) + 1)
    rec.add_column("N", [2 ** j for j in js], "dyadic frequency scale")
    rec.add_column("log2_lhs", [e * j for j in js], "log2 N^e")
    rec.add_column("log2_rhs", [rhs] * len(js), "log2 (4/c) T^((d-4)/d)")
    rec.add_column("feasible", [e * j >= rhs for j in js], "1 if N^e >= (4/c) T^((d-4)/d)")


def _check(cfg: ExperimentConfig, rec: ResultRecord) -> None:
    from .checks import run_checks
    rows = run_checks()
    rec.add_column("name", [r.name for r in rows], "invariant")
    rec.add_column("value", [r.value for r in rows], "measured quantity")
    rec.add_column("tolerance", [r.tolerance for r in rows], "threshold the value is compared to")
    rec.add_column("passed", [r.passed for r in rows], "1 if the invariant holds")
    rec.scalars.update(total=len(rows), failed=sum(not r.passed for r in rows))


def _convergence(cfg: ExperimentConfig, rec: ResultRecord) -> None:
    study = convergence_study(cfg, cfg.dt_levels, cfg.T)
    rec.add_column("dt", study["dt"], "time step")
    rec.add_column("steps", study["steps"], "number of steps to reach T")
    rec.add_column("error", study["error"], "L2 distance to the finest-level solution at T")
    rec.add_column("successive_difference", study["successive_difference"],
                   "L2 distance to the next finer level at T (0 for the finest)")
    columns = ("dt", "steps", "error", "successive_difference")
    rec.scalars.update({k: v for k, v in study.items() if k not in columns})


_PIPELINES = {
    "run": _run, "almost": _almost, "morawetz": _morawetz,
    "budget": _budget, "check": _check, "convergence": _convergence,
}


def run_experiment(cfg: ExperimentConfig) -> ResultRecord:
    """Dispatch ``cfg`` to its pipeline and collect the record."""
    rec = _new_record(cfg)
    t0 = time.time()
    _PIPELINES[cfg.kind](cfg, rec)
    rec.timing = {"started": t0, "wall_seconds": time.time() - t0}
    return rec


# -- convergence ------------------------------------------------------------

EXACT_TOL = 1e-12


def convergence_study(cfg: ExperimentConfig, dt_levels, T: float) -> dict:
    """Self-convergence of the solver at time ``T``.

    ``error`` compares every level with the finest one.  The order is fitted
    on successive differences ``||u_dt - u_{dt/2}||`` (Richardson), whose
    ratio is ``2^p`` to leading order, by least squares of ``log2`` diff
    against ``log2 dt``.  Differences at roundoff relative to ``||u(T)||``
    mark the run ``exact``; zero data leaves the order undefined.
    """
    levels = sorted((float(x) for x in dt_levels), reverse=True)
    if len(levels) < 3:
        raise ValueError(f"convergence needs at least 3 dt levels, got {len(levels)}")
    base = cfg.solver
    u0 = initial_data_for(cfg)
    finals, steps = [], []
    for dt in levels:
        n = int(round(T / dt))
        solver = SolverConfig(base.grid, dt, n, sample_stride=n if n else 1,
                              nonlinear=base.nonlinear, spectral_filter=base.spectral_filter,
                              generic=base.generic)
        last = None
        for _, f in iterate(u0, solver):
            last = f
        finals.append(last.physical)
        steps.append(n)
    dv = cfg.grid.cell_volume

    def dist(a, b):
        return math.sqrt(float(np.sum(np.abs(a - b) ** 2)) * dv)

    ref = finals[-1]
    errors = [dist(u, ref) for u in finals]
    diffs = [dist(a, b) for a, b in zip(finals, finals[1:])] + [0.0]
    scale = math.sqrt(float(np.sum(np.abs(ref) ** 2)) * dv)
    out = {"dt": levels, "steps": steps, "error": errors, "successive_difference": diffs,
           "order": None, "order_residual": None}
    fit = diffs[:-1]
    if scale == 0.0:
        out["status"] = "undefined"
    elif max(fit) <= EXACT_TOL * scale:
        out["status"] = "exact"
        out["order"] = math.inf
    else:
        lx, ly = np.log2(levels[:-1]), np.log2(fit)
        slope, icpt = np.polyfit(lx, ly, 1)
        out["order"] = float(slope)
        out["order_residual"] = float(np.sqrt(np.mean((ly - slope * lx - icpt) ** 2)))
        out["status"] = "fitted"
    return out


__all__ = ["ResultRecord", "convergence_study", "emit", "initial_data_for",
           "make_initial_data", "run_experiment"]
