"""Nonlinearity, exact sub-flows, Strang splitting and the conserved functionals.

The equation is ``i u_t + Delta^2 u = -|u|^(8/d) u``.  In Fourier variables the
linear part is ``uhat_t = i |xi|^4 uhat`` and the nonlinear part
``u_t = i |u|^(8/d) u`` keeps ``|u|`` fixed pointwise, so both sub-flows are
solved exactly and the splitting error is the only time discretisation error.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
import scipy.fft

from .norms import spatial_lq
from .spectral import Field, Grid, gradient

log = logging.getLogger(__name__)

BLOWUP_FACTOR = 1e6


class BlowUpError(RuntimeError):
    """Raised when the solver state becomes non-finite or grows past the guard."""


@dataclass(frozen=True)
class NonlinearitySpec:
    """``F(z) = |z|^(8/d) z``.  ``d`` outside 5..7 requires ``generic=True``."""

    d: int
    generic: bool = False

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d={self.d} must be positive")
        if not self.generic and self.d not in (5, 6, 7):
            raise ValueError(f"d={self.d} is outside 5..7; pass generic=True for other dimensions")

    @property
    def exponent(self) -> float:
        return 8.0 / self.d

    @property
    def potential_power(self) -> float:
        """``(2d + 8)/d``, the Lebesgue exponent of the potential energy."""
        return (2.0 * self.d + 8.0) / self.d


def f_eval(z, spec: NonlinearitySpec):
    """``F(z) = |z|^(8/d) z``, exactly zero at ``z = 0``."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.abs(z) ** spec.exponent * z
    return out[()] if out.ndim == 0 else out


def f_prime(z, spec: NonlinearitySpec):
    """``(dF/dz, dF/dzbar)`` with the value ``(0, 0)`` at ``z = 0``."""
    z = np.asarray(z, dtype=np.complex128)
    d = spec.d
    a = np.abs(z)
    mod = a ** spec.exponent
    dz = (2 * d + 8) / (2 * d) * mod
    safe = np.where(a == 0, 1.0, z)
    dzbar = np.where(a == 0, 0.0, 4.0 / d * mod * safe / np.conj(safe))
    if dz.ndim == 0:
        return complex(dz), complex(dzbar)
    return dz.astype(np.complex128), dzbar


def f_prime_norm(z, spec: NonlinearitySpec):
    """``|F'(z)| = |dF/dz| + |dF/dzbar|``."""
    dz, dzbar = f_prime(z, spec)
    return np.abs(dz) + np.abs(dzbar)


def f_prime_apply(z, w, spec: NonlinearitySpec):
    """Real-linear action ``F'(z).w = w dF/dz + conj(w) dF/dzbar``."""
    dz, dzbar = f_prime(z, spec)
    return w * dz + np.conj(w) * dzbar


# -- exact sub-flows --------------------------------------------------------

def linear_step(f: Field, t: float) -> Field:
    """Free flow ``exp(i t Delta^2)``: multiply ``uhat`` by ``exp(i t |xi|^4)``."""
    phase = np.exp(1j * t * f.grid.xi_sq ** 2)
    return Field(f.grid, phase * f.spectral, "spectral", f.meta)


def nonlinear_step(f: Field, t: float, spec: NonlinearitySpec) -> Field:
    """Exact flow of ``u_t = i F(u)``: ``u -> exp(i t |u|^(8/d)) u`` pointwise."""
    u = f.physical
    return Field(f.grid, _rotate(u, t, spec.exponent), "physical", f.meta)


def _rotate(u: np.ndarray, t: float, exponent: float) -> np.ndarray:
    theta = t * (u.real ** 2 + u.imag ** 2) ** (0.5 * exponent)
    return u * (np.cos(theta) + 1j * np.sin(theta))


def strang_step(f: Field, dt: float, spec: NonlinearitySpec) -> Field:
    """``NL(dt/2) o L(dt) o NL(dt/2)``."""
    half = nonlinear_step(f, 0.5 * dt, spec)
    return nonlinear_step(linear_step(half, dt), 0.5 * dt, spec)


# -- solver -----------------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    grid: Grid
    dt: float
    steps: int
    sample_stride: int = 1
    nonlinear: bool = True
    spectral_filter: bool = False
    generic: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt={self.dt!r} must be positive")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.sample_stride < 1 or self.steps % self.sample_stride:
            raise ValueError(f"sample_stride={self.sample_stride} must divide steps={self.steps}")

    @property
    def horizon(self) -> float:
        return self.steps * self.dt

    @property
    def spec(self) -> NonlinearitySpec:
        return NonlinearitySpec(self.grid.d, generic=self.generic)

    @property
    def sample_times(self) -> np.ndarray:
        return self.dt * np.arange(0, self.steps + 1, self.sample_stride)


@dataclass
class Trajectory:
    """Time samples ``(t_k, u(t_k))`` on one grid, ``t_0 = 0``."""

    times: np.ndarray
    fields: list
    grid: Optional[Grid] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.fields):
            raise ValueError("times and fields differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if self.fields:
            g = self.fields[0].grid
            if any(f.grid != g for f in self.fields):
                raise ValueError("all samples must share one grid")
            self.grid = g

    def __len__(self) -> int:
        return len(self.fields)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0]) if len(self) else 0.0

    @property
    def weights(self) -> np.ndarray:
        """Composite trapezoid weights for integrating over the samples."""
        t = self.times
        w = np.zeros_like(t)
        if len(t) > 1:
            dt = np.diff(t)
            w[:-1] += 0.5 * dt
            w[1:] += 0.5 * dt
        return w

    def window(self, start: int, stop: int) -> "Trajectory":
        """Samples ``start:stop`` as a new trajectory (times are kept)."""
        return Trajectory(self.times[start:stop], self.fields[start:stop], meta=dict(self.meta))

    def map(self, fn) -> "Trajectory":
        return Trajectory(self.times, [fn(f) for f in self.fields], meta=dict(self.meta))


def _two_thirds_mask(grid: Grid) -> np.ndarray:
    cut = (2.0 / 3.0) * grid.nyquist
    mask = np.ones(grid.shape, dtype=bool)
    for j in range(grid.d):
        mask &= np.abs(grid.xi_component(j)) <= cut
    return mask


def iterate(u0: Field, config: SolverConfig) -> Iterator[tuple[float, Field]]:
    """Yield ``(t, u(t))`` at every ``sample_stride``-th step, starting with ``t = 0``.

    Consecutive nonlinear half steps are merged into one full rotation,
    which is exact because the rotation preserves ``|u|``.
    """
    grid = config.grid
    if u0.grid != grid:
        raise ValueError("initial data lives on a different grid than the solver")
    dt = config.dt
    p = config.spec.exponent
    yield 0.0, u0
    if config.steps == 0:
        return
    if not config.nonlinear and not config.spectral_filter:
        # composition of exact free flows: sample directly from u0
        for k in range(config.sample_stride, config.steps + 1, config.sample_stride):
            yield k * dt, linear_step(u0, k * dt)
        return

    lin = np.exp(1j * dt * grid.xi_sq ** 2)
    mask = _two_thirds_mask(grid) if config.spectral_filter else None
    u = np.array(u0.physical, copy=True)
    guard = BLOWUP_FACTOR * max(float(np.abs(u).max()), 1e-300)
    stride = config.sample_stride
    for k in range(0, config.steps, stride):
        for j in range(stride):
            if config.nonlinear:
                u = _rotate(u, 0.5 * dt if j == 0 else dt, p)
            uh = scipy.fft.fftn(u, norm="forward")
            uh *= lin
            if mask is not None:
                uh *= mask
            u = scipy.fft.ifftn(uh, norm="forward")
        if config.nonlinear:
            u = _rotate(u, 0.5 * dt, p)
        peak = float(np.abs(u).max())
        if not math.isfinite(peak) or peak > guard:
            raise BlowUpError(f"solver guard tripped at t={(k + stride) * dt:.6g}: max|u|={peak:.3e}")
        yield (k + stride) * dt, Field(grid, u, "physical")


def evolve(u0: Field, config: SolverConfig) -> Trajectory:
    """Run the solver and keep every sampled state."""
    times, fields = [], []
    for t, f in iterate(u0, config):
        times.append(t)
        fields.append(f)
    return Trajectory(np.array(times), fields, meta={"dt": config.dt, "steps": config.steps})


# -- conserved quantities ---------------------------------------------------

def mass(f: Field) -> float:
    """``||u||_{L^2}^2``."""
    return spatial_lq(f, 2) ** 2


def energy(f: Field, spec: NonlinearitySpec, potential: bool = True) -> float:
    """``1/2 ||Delta u||^2 + d/(2d+8) ||u||_{L^{(2d+8)/d}}^{(2d+8)/d}``.

    ``potential=False`` keeps only the kinetic term.
    """
    g = f.grid
    kinetic = 0.5 * g.volume * float(np.sum(g.xi_sq ** 2 * np.abs(f.spectral) ** 2))
    if not potential:
        return kinetic
    r = spec.potential_power
    a2 = np.abs(f.physical) ** 2
    pot = float(np.sum(a2 ** (0.5 * r))) * g.cell_volume
    return kinetic + spec.d / (2.0 * spec.d + 8.0) * pot


def chain_rule_defect(f: Field, spec: NonlinearitySpec) -> float:
    """``||grad F(u) - F'(u) grad u||_{L^2}`` with spectral gradients."""
    u = f.physical
    lhs = gradient(Field(f.grid, f_eval(u, spec), "physical"))
    rhs = gradient(f)
    total = 0.0
    for a, b in zip(lhs, rhs):
        diff = a.physical - f_prime_apply(u, b.physical, spec)
        total += float(np.vdot(diff, diff).real)
    return math.sqrt(total * f.grid.cell_volume)
