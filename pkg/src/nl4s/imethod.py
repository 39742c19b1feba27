"""Modified energy E(Iu), the Z_I catalog norm, commutator diagnostics,
the almost-conservation experiment, scaling and the three-band split of data."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dynamics import (
    NonlinearitySpec, SolverConfig, Trajectory, energy, f_eval, f_prime_apply, iterate,
)
from .norms import (
    m_exponents, pair_catalog, sobolev_norm, spatial_lq, time_norm,
)
from .spectral import (
    Field, apply_symbol, bump, compose, delta_bracket_symbol, gradient,
    is_dyadic, make_grid, make_i_symbol,
)

log = logging.getLogger(__name__)


def modified_energy(f: Field, N: float, gamma: float, spec: NonlinearitySpec,
                    potential: bool = True) -> float:
    """``E(I_N u)``."""
    return energy(apply_symbol(f, make_i_symbol(N, gamma)), spec, potential=potential)


def i_h2_norm(f: Field, N: float, gamma: float) -> float:
    """``||I_N f||_{H^2}`` with weight ``(1 + |xi|^2)^2``."""
    return sobolev_norm(apply_symbol(f, make_i_symbol(N, gamma)), 2.0, homogeneous=False)


# -- Z_I --------------------------------------------------------------------

def _z_operand(f: Field, N: float, gamma: float) -> Field:
    return apply_symbol(f, compose(make_i_symbol(N, gamma), delta_bracket_symbol()))


def z_norm_table(traj: Trajectory, N: float, gamma: float) -> dict:
    """``||<Delta> I u||_{L^p_t L^q_x}`` for every catalog pair, keyed by label."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    catalog = pair_catalog(traj.grid.d)
    qs = sorted({pair.q for pair in catalog})
    per_q = {q: [] for q in qs}
    for f in traj.fields:
        v = _z_operand(f, N, gamma)
        for q in qs:
            per_q[q].append(spatial_lq(v, q))
    return {pair.label(): time_norm(traj.times, per_q[pair.q], pair.p) for pair in catalog}


def z_norm(traj: Trajectory, N: float, gamma: float) -> float:
    """Catalog supremum standing in for ``Z_I(J)``."""
    return max(z_norm_table(traj, N, gamma).values())


# -- commutator -------------------------------------------------------------

@dataclass
class CommutatorReport:
    lhs: float
    reference: float
    ratio: float
    z: float
    N: float
    gamma: float
    delta: float


def commutator_series(f: Field, N: float, gamma: float, spec: NonlinearitySpec) -> float:
    """``|| grad I F(u) - (I grad u) F'(u) ||_{L^{2d/(d+2)}_x}`` at one time."""
    d = f.grid.d
    m = make_i_symbol(N, gamma)
    u = f.physical
    grad_iF = gradient(apply_symbol(Field(f.grid, f_eval(u, spec), "physical"), m))
    i_grad_u = gradient(apply_symbol(f, m))
    acc = np.zeros(f.grid.shape)
    for a, b in zip(grad_iF, i_grad_u):
        diff = a.physical - f_prime_apply(u, b.physical, spec)
        acc += diff.real ** 2 + diff.imag ** 2
    q = 2.0 * d / (d + 2.0)
    return float((np.sum(acc ** (0.5 * q)) * f.grid.cell_volume) ** (1.0 / q))


def commutator_diagnostic(traj: Trajectory, N: float, gamma: float, delta: float,
                          spec: NonlinearitySpec) -> CommutatorReport:
    """Commutator ``L^2_t L^{2d/(d+2)}_x`` norm against ``N^-(2-gamma+delta) Z^(1+8/d)``."""
    d = traj.grid.d
    if d not in (5, 6, 7):
        raise ValueError(f"commutator diagnostic needs d in 5..7, got {d}")
    if not 1 < gamma < 2:
        raise ValueError(f"gamma={gamma} must lie in (1, 2)")
    if not 0 < delta < gamma - 1:
        raise ValueError(f"delta={delta} must lie in (0, gamma - 1) = (0, {gamma - 1:g})")
    values = [commutator_series(f, N, gamma, spec) for f in traj.fields]
    lhs = time_norm(traj.times, values, 2) if len(traj) > 1 else values[0]
    z = z_norm(traj, N, gamma)
    ref = N ** (-(2.0 - gamma + delta)) * z ** (1.0 + 8.0 / d)
    ratio = lhs / ref if ref > 0 else 0.0
    return CommutatorReport(lhs, ref, ratio, z, N, gamma, delta)


# -- almost conservation ----------------------------------------------------

@dataclass
class IMethodConfig:
    gamma: float
    delta: float
    N_values: Sequence[float]
    solver: SolverConfig
    potential: bool = True
    mu: float = 0.1
    enforce_delta_bound: bool = True
    data: str = ""

    def __post_init__(self):
        d = self.solver.grid.d
        if not 1 < self.gamma < 2:
            raise ValueError(f"gamma={self.gamma} must lie in (1, 2)")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.enforce_delta_bound and d in (5, 6, 7) and not self.delta < self.gamma + 8.0 / d - 3.0:
            raise ValueError(
                f"delta={self.delta} violates delta < gamma + 8/d - 3 = {self.gamma + 8.0 / d - 3.0:g}")
        if not self.N_values:
            raise ValueError("at least one N is required")
        for N in self.N_values:
            if not (N >= 1 and is_dyadic(N)):
                raise ValueError(f"N={N} must be a dyadic value >= 1")
            if 2 * N > self.solver.grid.nyquist:
                raise ValueError(f"N={N} unresolved: 2N exceeds the Nyquist frequency "
                                 f"{self.solver.grid.nyquist:g}")


@dataclass
class AlmostConservationReport:
    N_values: list
    increments: dict
    slope: Optional[float]
    slope_residual: Optional[float]
    decay_exponent: float
    z_values: dict
    m_norm: Optional[float]
    initial_ih2: dict
    small_data: bool
    mu: float = 0.1
    times: np.ndarray = field(repr=False, default=None)
    modified_energies: dict = field(repr=False, default_factory=dict)
    mass: np.ndarray = field(repr=False, default=None)
    energy: np.ndarray = field(repr=False, default=None)
    h_half: np.ndarray = field(repr=False, default=None)
    m_samples: np.ndarray = field(repr=False, default=None)

    @property
    def m_small(self) -> Optional[bool]:
        return None if self.m_norm is None else bool(self.m_norm <= self.mu)


def fit_log2_slope(xs, ys) -> tuple[Optional[float], Optional[float]]:
    """Least-squares slope of ``log2 y`` against ``log2 x`` and the RMS residual.

    Returns ``(None, None)`` with fewer than two points or non-positive values.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or np.any(ys <= 0) or np.any(xs <= 0):
        return None, None
    lx, ly = np.log2(xs), np.log2(ys)
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    return float(slope), float(np.sqrt(np.mean(resid ** 2)))


def almost_conservation_experiment(config: IMethodConfig, u0: Field) -> AlmostConservationReport:
    """Evolve once and track ``E(I_N u(t))`` for every ``N``.

    The sup over time is a max over the stored samples.  States are consumed
    as they are produced so long runs do not hold the whole trajectory.
    """
    solver = config.solver
    grid = solver.grid
    d = grid.d
    spec = solver.spec
    Ns = [float(N) for N in config.N_values]
    symbols = {N: make_i_symbol(N, config.gamma) for N in Ns}
    m_norm_defined = d in (5, 6, 7)
    if m_norm_defined:
        catalog = pair_catalog(d)
        qs = sorted({pair.q for pair in catalog})
        zsyms = {N: compose(symbols[N], delta_bracket_symbol()) for N in Ns}
        mp, mq = m_exponents(d)

    ih2 = {N: sobolev_norm(apply_symbol(u0, symbols[N]), 2.0, homogeneous=False) for N in Ns}
    small = all(v <= 1.0 for v in ih2.values())
    if not small:
        log.warning("initial data violates ||I u0||_H2 <= 1: %s", ih2)

    times, mass_series, energy_series, h_half = [], [], [], []
    e_i = {N: [] for N in Ns}
    zq = {N: {q: [] for q in qs} for N in Ns} if m_norm_defined else {}
    m_vals = []
    for t, f in iterate(u0, solver):
        times.append(t)
        mass_series.append(spatial_lq(f, 2) ** 2)
        energy_series.append(energy(f, spec, potential=config.potential))
        h_half.append(sobolev_norm(f, 0.5))
        for N in Ns:
            e_i[N].append(energy(apply_symbol(f, symbols[N]), spec, potential=config.potential))
            if m_norm_defined:
                v = apply_symbol(f, zsyms[N])
                for q in qs:
                    zq[N][q].append(spatial_lq(v, q))
        if m_norm_defined:
            m_vals.append(spatial_lq(f, mq))

    times = np.asarray(times)
    increments = {N: float(np.max(np.abs(np.asarray(e_i[N]) - e_i[N][0]))) for N in Ns}
    slope, resid = fit_log2_slope(Ns, [increments[N] for N in Ns])
    z_values, m_norm = {}, None
    if m_norm_defined and len(times) > 1:
        for N in Ns:
            z_values[N] = max(time_norm(times, zq[N][pair.q], pair.p) for pair in catalog)
        m_norm = time_norm(times, m_vals, mp)
    return AlmostConservationReport(
        N_values=Ns,
        increments=increments,
        slope=slope,
        slope_residual=resid,
        decay_exponent=-(2.0 - config.gamma + config.delta),
        z_values=z_values,
        m_norm=m_norm,
        initial_ih2=ih2,
        small_data=small,
        times=times,
        modified_energies={N: np.asarray(v) for N, v in e_i.items()},
        mass=np.asarray(mass_series),
        energy=np.asarray(energy_series),
        h_half=np.asarray(h_half),
        m_samples=np.asarray(m_vals) if m_norm_defined else None,
        mu=config.mu,
    )


# -- scaling and frequency split -------------------------------------------

def rescale(f: Field, lam: float, direction: str = "forward") -> Field:
    """``u_lam(x) = lam^(-d/2) u(x/lam)`` on the box ``lam L``.

    Mode ``k`` of ``u`` becomes mode ``k`` of ``u_lam`` with amplitude
    ``lam^(-d/2)``, so the map is exact on the same number of points.
    ``direction="inverse"`` applies ``1/lam``.  The time rescaling
    ``t -> lam^4 t`` is recorded as ``meta["time_scale"]``.
    """
    if not (lam >= 1 and is_dyadic(lam)):
        raise ValueError(f"lambda={lam!r} must be a power of two >= 1")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    g = f.grid
    s = float(lam) if direction == "forward" else 1.0 / float(lam)
    target = make_grid(g.d, g.n, g.L * s)
    meta = dict(f.meta)
    meta["lambda"] = meta.get("lambda", 1.0) * s
    meta["time_scale"] = meta.get("time_scale", 1.0) * s ** 4
    return Field(target, s ** (-0.5 * g.d) * f.spectral, "spectral", meta)


def tri_decompose(f: Field, lam: float, N: float) -> tuple[Field, Field, Field]:
    """Split ``f`` into low, middle and high frequency parts summing to ``f``.

    ``chi1 = phi(lam |xi|)`` lives on ``|xi| <= 2/lam``, ``chi3 = 1 - phi(2|xi|/N)``
    on ``|xi| >= N/2`` and ``chi2 = 1 - chi1 - chi3``.  ``chi2`` is non-negative
    once ``lam N >= 4``.
    """
    if not lam > 0 or not N > 0:
        raise ValueError("lambda and N must be positive")
    if 1.0 / lam >= N:
        raise ValueError(f"cutoffs out of order: 1/lambda={1.0 / lam:g} >= N={N:g}")
    r = f.grid.xi_abs
    chi1 = bump(lam * r)
    chi3 = 1.0 - bump(2.0 * r / N)
    chi2 = 1.0 - chi1 - chi3
    uh = f.spectral
    return tuple(Field(f.grid, c * uh, "spectral", f.meta) for c in (chi1, chi2, chi3))
