"""Periodic grids, physical/spectral fields and radial Fourier multipliers.

Spectral coefficients follow the convention

    u(x) = sum_k uhat(k) exp(i xi(k).x),   xi(k) = 2 pi k / L,

so a plane wave ``A exp(i xi(k0).x)`` has the single coefficient
``uhat(k0) = A`` and Parseval reads ``sum_x |u|^2 dV = V sum_k |uhat|^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np
import scipy.fft

__all__ = [
    "Grid", "Field", "RadialSymbol", "make_grid", "to_spectral", "to_physical",
    "bump", "apply_symbol", "make_i_symbol", "lp_project", "is_dyadic",
    "identity_symbol", "power_symbol", "bracket_symbol", "delta_bracket_symbol",
    "propagator_symbol", "compose", "gradient", "lp_partition",
]

ANNIHILATE = "annihilate"


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def is_dyadic(M: float) -> bool:
    """True when ``M = 2**j`` for some integer ``j`` (negative allowed)."""
    if not (M > 0 and math.isfinite(M)):
        return False
    mant, _ = math.frexp(M)
    return mant == 0.5


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on the torus ``[0, L)^d`` with ``n`` points per axis."""

    d: int
    n: int
    L: float = 2 * math.pi

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n ** self.d

    @property
    def volume(self) -> float:
        return self.L ** self.d

    @property
    def cell_volume(self) -> float:
        return (self.L / self.n) ** self.d

    @property
    def nyquist(self) -> float:
        """Per-axis Nyquist frequency ``(2 pi / L)(n / 2)``."""
        return 2 * math.pi / self.L * (self.n // 2)

    @property
    def xi_max(self) -> float:
        """Largest resolved radial frequency, at the corner of the lattice."""
        return self.nyquist * math.sqrt(self.d)

    @cached_property
    def k_axis(self) -> np.ndarray:
        """Integer indices in FFT order; the set is ``[-n/2, n/2)``."""
        return np.rint(scipy.fft.fftfreq(self.n, 1.0 / self.n)).astype(np.int64)

    @cached_property
    def xi_axis(self) -> np.ndarray:
        return 2 * np.pi / self.L * self.k_axis

    @cached_property
    def x_axis(self) -> np.ndarray:
        return np.arange(self.n) * (self.L / self.n)

    def xi_component(self, j: int) -> np.ndarray:
        """Component ``xi_j`` shaped to broadcast against the full grid."""
        shape = [1] * self.d
        shape[j] = self.n
        return self.xi_axis.reshape(shape)

    def x_component(self, j: int) -> np.ndarray:
        shape = [1] * self.d
        shape[j] = self.n
        return self.x_axis.reshape(shape)

    @cached_property
    def xi_sq(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for j in range(self.d):
            out = out + self.xi_component(j) ** 2
        return out

    @cached_property
    def xi_abs(self) -> np.ndarray:
        return np.sqrt(self.xi_sq)

    @cached_property
    def zero_mode(self) -> tuple[int, ...]:
        return (0,) * self.d

    def index_of(self, k) -> tuple[int, ...]:
        """Array position of the integer wavevector ``k`` (each entry in [-n/2, n/2))."""
        k = tuple(int(v) for v in k)
        if len(k) != self.d:
            raise ValueError(f"wavevector {k} has wrong dimension for d={self.d}")
        for v in k:
            if not -self.n // 2 <= v < self.n // 2:
                raise ValueError(f"wavevector index {v} outside [-n/2, n/2)")
        return tuple(v % self.n for v in k)

    def radius_of(self, k) -> float:
        return 2 * math.pi / self.L * math.sqrt(sum(int(v) ** 2 for v in k))


def make_grid(d: int, n: int, L: float = 2 * math.pi) -> Grid:
    """Build a ``Grid``; ``n`` must be a power of two at least 4 and ``1 <= d <= 7``."""
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= 7:
        raise ValueError(f"dimension d={d!r} outside 1..7")
    if not isinstance(n, (int, np.integer)) or n < 4 or not _is_power_of_two(int(n)):
        raise ValueError(f"n={n!r} must be a power of two and at least 4")
    if not (L > 0 and math.isfinite(L)):
        raise ValueError(f"box length L={L!r} must be positive")
    return Grid(int(d), int(n), float(L))


class Field:
    """Complex field on a ``Grid``, stored physically or spectrally.

    The other representation is computed on demand and cached.  Arrays are
    treated as immutable; every operation returns a new ``Field``.
    """

    __slots__ = ("grid", "_phys", "_spec", "space", "meta")

    def __init__(self, grid: Grid, values, space: str = "physical", meta=None):
        if space not in ("physical", "spectral"):
            raise ValueError(f"unknown representation {space!r}")
        arr = np.asarray(values, dtype=np.complex128)
        if arr.shape != grid.shape:
            raise ValueError(f"values shape {arr.shape} does not match grid {grid.shape}")
        self.grid = grid
        self.space = space
        self._phys = arr if space == "physical" else None
        self._spec = arr if space == "spectral" else None
        self.meta = dict(meta or {})

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def plane_wave(cls, grid: Grid, k, amplitude: complex = 1.0) -> "Field":
        coeffs = np.zeros(grid.shape, dtype=np.complex128)
        coeffs[grid.index_of(k)] = amplitude
        return cls(grid, coeffs, "spectral")

    @property
    def physical(self) -> np.ndarray:
        if self._phys is None:
            self._phys = scipy.fft.ifftn(self._spec, norm="forward")
        return self._phys

    @property
    def spectral(self) -> np.ndarray:
        if self._spec is None:
            self._spec = scipy.fft.fftn(self._phys, norm="forward")
        return self._spec

    def _with(self, values, space) -> "Field":
        return Field(self.grid, values, space, self.meta)

    def to_spectral(self) -> "Field":
        out = Field(self.grid, self.spectral, "spectral", self.meta)
        out._phys = self._phys
        return out

    def to_physical(self) -> "Field":
        out = Field(self.grid, self.physical, "physical", self.meta)
        out._spec = self._spec
        return out

    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        if self.space == "spectral" and other.space == "spectral":
            return self._with(self._spec + other._spec, "spectral")
        return self._with(self.physical + other.physical, "physical")

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        if self.space == "spectral" and other.space == "spectral":
            return self._with(self._spec - other._spec, "spectral")
        return self._with(self.physical - other.physical, "physical")

    def __mul__(self, c) -> "Field":
        if isinstance(c, Field):
            raise TypeError("use .physical for pointwise products of fields")
        if self.space == "spectral":
            return self._with(c * self._spec, "spectral")
        return self._with(c * self._phys, "physical")

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return self * -1.0

    def _check(self, other: "Field") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __repr__(self) -> str:
        return f"Field(grid={self.grid}, space={self.space!r})"


def to_spectral(f: Field) -> Field:
    return f.to_spectral()


def to_physical(f: Field) -> Field:
    return f.to_physical()


# -- radial symbols ---------------------------------------------------------

ZeroPolicy = Union[None, complex, float, str]


@dataclass(frozen=True, eq=False)
class RadialSymbol:
    """Fourier multiplier ``xi -> sigma(|xi|)``.

    ``rule`` is vectorised over an array of radii.  ``zero`` fixes the value
    at ``r = 0``: ``None`` means "evaluate ``rule`` there", a number sets it
    explicitly, and ``"annihilate"`` sets it to zero.  A symbol flagged
    ``singular`` must carry a zero policy.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    zero: ZeroPolicy = None
    singular: bool = False
    name: str = "sigma"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.zero is None:
            if self.singular:
                raise ValueError(f"symbol {self.name} is singular at 0 and has no zero-mode policy")
            return self.rule(r)
        at_zero = r == 0
        out = np.asarray(self.rule(np.where(at_zero, 1.0, r)))
        value = 0.0 if self.zero == ANNIHILATE else self.zero
        out = np.where(at_zero, value, out)
        return out[()] if out.ndim == 0 else out

    def on(self, grid: Grid) -> np.ndarray:
        """Symbol sampled on the wavevector lattice of ``grid`` (cached)."""
        arr = self._cache.get(grid)
        if arr is None:
            arr = np.broadcast_to(self(grid.xi_abs), grid.shape)
            self._cache[grid] = arr
        return arr


def identity_symbol() -> RadialSymbol:
    return RadialSymbol(lambda r: np.ones_like(r), name="1")


def power_symbol(s: float, zero: ZeroPolicy = ANNIHILATE) -> RadialSymbol:
    """``|xi|^s``; the zero mode is annihilated by default (``|grad|^s``)."""
    if s < 0:
        return RadialSymbol(lambda r: r ** s, zero=zero, singular=True, name=f"|xi|^{s}")
    return RadialSymbol(lambda r: r ** s, zero=zero, name=f"|xi|^{s}")


def bracket_symbol(s: float) -> RadialSymbol:
    """``<xi>^s = (1 + |xi|^2)^(s/2)``."""
    return RadialSymbol(lambda r: (1.0 + r * r) ** (0.5 * s), name=f"<xi>^{s}")


def delta_bracket_symbol() -> RadialSymbol:
    """Symbol ``1 + |xi|^2`` of ``<Delta>``."""
    return RadialSymbol(lambda r: 1.0 + r * r, name="<Delta>")


def propagator_symbol(t: float) -> RadialSymbol:
    """Free fourth-order propagator ``exp(i t |xi|^4)``."""
    return RadialSymbol(lambda r: np.exp(1j * t * (r * r) ** 2), name=f"exp(i{t}|xi|^4)")


def compose(*symbols: RadialSymbol) -> RadialSymbol:
    """Pointwise product of symbols; each factor applies its own zero policy.

    Two-factor products are bitwise symmetric in their arguments, so
    ``compose(a, b)`` and ``compose(b, a)`` act identically.
    """
    def rule(r):
        out = symbols[0](r)
        for s in symbols[1:]:
            out = out * s(r)
        return out

    return RadialSymbol(rule, name="*".join(s.name for s in symbols))


def apply_symbol(f: Field, sigma: RadialSymbol) -> Field:
    """Multiply the spectral coefficients of ``f`` by ``sigma(|xi|)``."""
    return Field(f.grid, sigma.on(f.grid) * f.spectral, "spectral", f.meta)


# -- bump, I-operator and Littlewood-Paley pieces ---------------------------

def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def bump(r):
    """Radial bump: 1 on ``r <= 1``, 0 on ``r >= 2``, quintic smoothstep between."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("bump is defined for r >= 0")
    out = 1.0 - _smoothstep(r - 1.0)
    return out[()] if out.ndim == 0 else out


def make_i_symbol(N: float, gamma: float, smooth: bool = False) -> RadialSymbol:
    """Multiplier ``m_N``: 1 for ``r <= N`` and ``(r/N)^(gamma-2)`` for ``r >= 2N``.

    The default transition is ``min(1, (r/N)^(gamma-2))``, continuous with a
    kink at ``r = N``.  ``smooth=True`` instead ramps the exponent with the
    quintic smoothstep in ``log2(r/N)``; both are non-increasing.
    """
    if not N >= 1:
        raise ValueError(f"N={N!r} must be >= 1")
    if not 0 <= gamma < 2:
        raise ValueError(f"gamma={gamma!r} must satisfy 0 <= gamma < 2")
    N = float(N)
    expo = float(gamma) - 2.0

    if smooth:
        def rule(r):
            rr = np.maximum(r / N, 1.0)
            t = np.log2(rr)
            return rr ** (expo * np.where(t >= 1.0, 1.0, _smoothstep(t)))
    else:
        def rule(r):
            return np.minimum(1.0, np.maximum(r / N, 1.0) ** expo)

    return RadialSymbol(rule, name=f"m_N(N={N:g},gamma={gamma:g}{',smooth' if smooth else ''})")


_LP_RULES = {
    "<=": lambda r, M: bump(r / M),
    ">": lambda r, M: 1.0 - bump(r / M),
    "=": lambda r, M: bump(r / M) - bump(2.0 * r / M),
    "<": lambda r, M: bump(2.0 * r / M),
    ">=": lambda r, M: 1.0 - bump(2.0 * r / M),
}


def lp_symbol(M: float, part: str = "=") -> RadialSymbol:
    if not is_dyadic(M):
        raise ValueError(f"Littlewood-Paley scale M={M!r} is not a power of two")
    if part not in _LP_RULES:
        raise ValueError(f"unknown projector part {part!r}; use one of {sorted(_LP_RULES)}")
    rule = _LP_RULES[part]
    return RadialSymbol(lambda r: rule(r, M), name=f"P_{part}{M:g}")


def lp_project(f: Field, M: float, part: str = "=") -> Field:
    """Littlewood-Paley projection ``P_{part M} f`` for dyadic ``M``."""
    return apply_symbol(f, lp_symbol(M, part))


def lp_partition(f: Field, M0: float) -> list[Field]:
    """``[P_{<=M0} f, P_{2 M0} f, ..., P_{Mtop} f]`` summing to ``f``.

    ``Mtop`` is the first dyadic scale with ``Mtop >= xi_max`` so every
    resolved mode is covered.
    """
    pieces = [lp_project(f, M0, "<=")]
    M = 2.0 * M0
    while True:
        pieces.append(lp_project(f, M, "="))
        if M >= f.grid.xi_max:
            break
        M *= 2.0
    return pieces


def gradient(f: Field) -> list[Field]:
    """Spectral gradient, one ``Field`` per coordinate direction."""
    g = f.grid
    uh = f.spectral
    return [Field(g, 1j * g.xi_component(j) * uh, "spectral") for j in range(g.d)]
