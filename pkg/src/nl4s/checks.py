"""Fast invariant suite behind the ``check`` experiment.

Each check measures one quantity on small grids and compares it with a
threshold; nothing here needs more than a few seconds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .budget import gamma_threshold, solve_min_N_and_alpha, BudgetInput
from .dynamics import NonlinearitySpec, SolverConfig, energy, evolve, mass
from .imethod import commutator_series, modified_energy, rescale, tri_decompose
from .norms import bernstein_ratio, pair_catalog, sobolev_norm
from .spectral import Field, lp_partition, make_grid


@dataclass
class CheckRow:
    name: str
    value: float
    tolerance: float
    passed: bool


def _row(name, value, tol, passed=None):
    value = float(value)
    return CheckRow(name, value, tol, value <= tol if passed is None else bool(passed))


def _random_field(grid, seed, band=None):
    rng = np.random.default_rng(seed)
    uh = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if band is not None:
        uh *= grid.xi_abs <= band
    return Field(grid, uh / grid.size, "spectral")


def run_checks() -> list[CheckRow]:
    rows = []
    expected = {5: Fraction(8, 5), 6: Fraction(5, 3), 7: Fraction(13, 7)}
    rows.append(_row("gamma_threshold exact", 0.0, 0.0,
                     all(gamma_threshold(d) == v for d, v in expected.items())))
    rows.append(_row("pair catalog biharmonic", 0.0, 0.0,
                     all(p.gamma == 0 for d in (5, 6, 7) for p in pair_catalog(d))))

    g2 = make_grid(2, 32)
    f = _random_field(g2, 1)
    parts = lp_partition(f, 1.0)
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    rows.append(_row("LP telescoping", np.max(np.abs(total.spectral - f.spectral)), 1e-12))

    shell = _random_field(g2, 2, band=7.9) - _random_field(g2, 2, band=4.1)
    worst = -np.inf
    for s in (0.5, 1.0, 1.8):
        r = bernstein_ratio(shell, 4.0, s)
        worst = max(worst, abs(np.log2(r)) - s)
    rows.append(_row("Bernstein annulus ratio (log2 excess)", worst, 0.0))

    spec2 = NonlinearitySpec(2, generic=True)
    e_u = energy(f, spec2)
    e_i = modified_energy(f, 2 * g2.xi_max, 1.5, spec2)
    rows.append(_row("I degenerate above Nyquist", abs(e_i - e_u) / e_u, 1e-12))

    g5 = make_grid(5, 8)
    wave = Field.plane_wave(g5, (1, 2, 0, 0, 1), 0.3)
    rows.append(_row("commutator single mode", commutator_series(wave, 1.0, 1.8, NonlinearitySpec(5)),
                     1e-12))

    worst = 0.0
    for lam in (2, 4):
        u = rescale(f, lam)
        worst = max(worst, abs(mass(u) - mass(f)) / mass(f),
                    abs(sobolev_norm(u, 1.8) - lam ** -1.8 * sobolev_norm(f, 1.8)) / sobolev_norm(f, 1.8))
    rows.append(_row("scaling identities", worst, 1e-12))

    a, b, c = tri_decompose(f, 4.0, 4.0)
    rows.append(_row("tri-decomposition sum", np.max(np.abs((a + b + c).spectral - f.spectral)), 1e-13))

    cfg = SolverConfig(make_grid(1, 64), 1e-3, 200, sample_stride=50, generic=True)
    u0 = _random_field(cfg.grid, 3, band=4)
    traj = evolve(u0, cfg)
    m0 = mass(traj.fields[0])
    rows.append(_row("mass conservation (d=1 generic)",
                     max(abs(mass(v) - m0) / m0 for v in traj.fields), 1e-12))

    rep = solve_min_N_and_alpha(BudgetInput(5, 1.8, 0.1, T=1, c=1))
    rows.append(_row("budget worked example N", abs(rep.N - 1024), 0.0))
    return rows
