"""Spatial and space-time norms, admissible pairs and Bernstein/Strichartz diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .spectral import Field, apply_symbol, lp_symbol, power_symbol, is_dyadic

Exponent = Union[int, float, Fraction]
INF = math.inf


def as_exponent(p: Exponent):
    """Exact rational form of an exponent; floats are snapped to the nearest
    fraction with denominator below 10^6 (so ``14/3`` typed as a float works)."""
    if p == INF:
        return INF
    if isinstance(p, (int, np.integer, Fraction)):
        return Fraction(int(p)) if not isinstance(p, Fraction) else p
    return Fraction(float(p)).limit_denominator(10**6)


def _recip(p: Exponent) -> Fraction:
    """``1/p`` with ``1/inf = 0``."""
    p = as_exponent(p)
    if p == INF:
        return Fraction(0)
    return 1 / p


def gamma_pq(p: Exponent, q: Exponent, d: int):
    """Scaling defect ``d/2 - d/q - 4/p`` (exact when p, q are ints/Fractions/inf)."""
    return Fraction(d, 2) - d * _recip(q) - 4 * _recip(p)


def is_schrodinger_admissible(p: Exponent, q: Exponent, d: int) -> bool:
    if not (2 <= p <= INF and 2 <= q <= INF):
        return False
    if p == 2 and q == INF and d == 2:
        return False
    return 2 * _recip(p) + d * _recip(q) <= Fraction(d, 2)


def classify_pair(p: Exponent, q: Exponent, d: int) -> str:
    """``"biharmonic"``, ``"schrodinger"`` or ``"not admissible"``."""
    if not is_schrodinger_admissible(p, q, d):
        return "not admissible"
    return "biharmonic" if gamma_pq(p, q, d) == 0 else "schrodinger"


@dataclass(frozen=True)
class AdmissiblePair:
    p: Exponent
    q: Exponent
    d: int

    @property
    def gamma(self):
        return gamma_pq(self.p, self.q, self.d)

    @property
    def schrodinger(self) -> bool:
        return is_schrodinger_admissible(self.p, self.q, self.d)

    @property
    def biharmonic(self) -> bool:
        return classify_pair(self.p, self.q, self.d) == "biharmonic"

    def label(self) -> str:
        return f"({_fmt(self.p)},{_fmt(self.q)})"


def _fmt(x) -> str:
    if x == INF:
        return "inf"
    return str(x)


def _q(num, den):
    """Exponent ``num/den`` with a zero denominator read as infinity."""
    return INF if den == 0 else Fraction(num, den)


def pair_catalog(d: int) -> list[AdmissiblePair]:
    """Finite list of biharmonic pairs standing in for the sup in ``Z_I``.

    All pairs have ``q < inf``.  At ``d = 5`` the pair
    ``(2(d-3)/(d-5), ...)`` degenerates to ``(inf, 2)`` and is left out.
    """
    if d not in (5, 6, 7):
        raise ValueError(f"pair catalog is defined for d in 5..7, got {d}")
    raw = [
        (INF, Fraction(2)),
        (Fraction(2), _q(2 * d, d - 4)),
        (Fraction(4), _q(2 * d, d - 2)),
        (_q(16, d), Fraction(4)),
        (_q(8 * (d - 3), d), _q(2 * (d - 3), d - 4)),
        (_q(2 * (d - 3), d - 4), _q(2 * d * (d - 3), d * d - 7 * d + 16)),
        (_q(16 * (d - 3), d), _q(4 * (d - 3), 2 * d - 7)),
        (Fraction(4 * (d - 3)), _q(2 * d * (d - 3), d * d - 3 * d - 2)),
        (Fraction(32, 11), _q(8 * d, 4 * d - 11)),
        (_q(16 * (8 - d), d), _q(4 * (8 - d), 15 - 2 * d)),
    ]
    if d != 5:
        raw.append((_q(2 * (d - 3), d - 5), _q(2 * d * (d - 3), d * d - 7 * d + 20)))
    pairs = [AdmissiblePair(p, q, d) for p, q in raw]
    for pair in pairs:
        if not pair.biharmonic or pair.q == INF:
            raise AssertionError(f"catalog pair {pair.label()} is not biharmonic with q < inf")
    return pairs


# -- spatial norms ----------------------------------------------------------

def spatial_lq(f: Field, q: Exponent) -> float:
    """``(sum_x |u|^q dV)^(1/q)``; ``q = inf`` gives ``max |u|``."""
    a = np.abs(f.physical)
    if q == INF:
        return float(a.max())
    q = float(q)
    if q == 2.0:
        s = np.vdot(a, a).real
    else:
        s = np.sum(a ** q)
    return float((s * f.grid.cell_volume) ** (1.0 / q))


def sobolev_norm(f: Field, s: float, homogeneous: bool = True) -> float:
    """``H^s`` / ``Hdot^s`` norm from spectral coefficients.

    The homogeneous norm drops the zero mode, which has no weight on R^d.
    """
    g = f.grid
    p2 = np.abs(f.spectral) ** 2
    if homogeneous:
        w = power_symbol(2.0 * s).on(g) if s != 0 else _nonzero_mask(g)
    else:
        w = (1.0 + g.xi_sq) ** s
    return float(math.sqrt(g.volume * float(np.sum(w * p2))))


def _nonzero_mask(grid) -> np.ndarray:
    m = np.ones(grid.shape)
    m[grid.zero_mode] = 0.0
    return m


# -- space-time norms -------------------------------------------------------

def time_norm(times: Sequence[float], values: Sequence[float], p: Exponent) -> float:
    """``(int |v(t)|^p dt)^(1/p)`` by the composite trapezoid rule; ``p = inf`` is a max.

    Summation is sequential, so the value on a prefix window never exceeds
    the value on a longer one (exactly, not just up to roundoff).
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty time series")
    if p == INF:
        return float(v.max())
    if v.size < 2:
        raise ValueError("a finite time exponent needs at least two samples")
    return float(cumulative_time_norm(times, v, p)[-1])


def cumulative_time_norm(times, values, p: Exponent) -> np.ndarray:
    """Time norm over every prefix ``[t_0, t_k]`` (zero for the first sample)."""
    v = np.asarray(values, dtype=float)
    if p == INF:
        return np.maximum.accumulate(v)
    t = np.asarray(times, dtype=float)
    p = float(p)
    w = v ** p
    acc = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(t))])
    return acc ** (1.0 / p)


def spacetime_norm(traj, p: Exponent, q: Exponent) -> float:
    """``||u||_{L^p_t L^q_x}`` over the trajectory's time window."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    return time_norm(traj.times, [spatial_lq(f, q) for f in traj.fields], p)


def m_exponents(d: int) -> tuple[Fraction, Fraction]:
    """Exponents ``(8(d-3)/d, 2(d-3)/(d-4))`` of the interpolated Morawetz norm."""
    if d not in (5, 6, 7):
        raise ValueError(f"M(J) norm is defined for d in 5..7, got {d}")
    return Fraction(8 * (d - 3), d), Fraction(2 * (d - 3), d - 4)


def morawetz_m_norm(traj, d: int) -> float:
    p, q = m_exponents(d)
    return spacetime_norm(traj, p, q)


# -- diagnostics ------------------------------------------------------------

_BERNSTEIN_PARTS = {"annulus": "=", "low": "<=", "high": ">="}


def bernstein_ratio(f: Field, M: float, s: float, direction: str = "annulus") -> float:
    """Measured Bernstein constant for a dyadic block.

    ``annulus``: ``||P_M |grad|^s f|| / (M^s ||P_M f||)``, which lies in
    ``[2^-|s|, 2^|s|]`` since ``P_M`` lives on ``M/2 < |xi| < 2M``.
    ``low`` uses ``P_{<=M}`` (bounded by ``2^s`` for ``s >= 0``); ``high`` returns
    ``M^s ||P_{>=M} f|| / || |grad|^s P_{>=M} f||`` (bounded by ``2^s``).
    All norms are L^2.  A vanishing projection returns 0.
    """
    if direction not in _BERNSTEIN_PARTS:
        raise ValueError(f"unknown direction {direction!r}")
    if not is_dyadic(M):
        raise ValueError(f"M={M!r} is not dyadic")
    if M > 2 * f.grid.xi_max:
        raise ValueError(f"M={M} is not resolved by the grid")
    piece = apply_symbol(f, lp_symbol(M, _BERNSTEIN_PARTS[direction]))
    base = sobolev_norm(piece, 0.0, homogeneous=False)
    derived = sobolev_norm(piece, s, homogeneous=True)
    if direction == "high":
        if derived == 0.0:
            return 0.0
        return M ** s * sobolev_norm(piece, 0.0, homogeneous=True) / derived
    if base == 0.0:
        return 0.0
    return derived / (M ** s * base)


def strichartz_quotient(traj, pair: AdmissiblePair) -> float:
    """``||u||_{L^p_t L^q_x} / ||u_0||_{L^2}`` for a free-flow trajectory."""
    if not pair.biharmonic:
        raise ValueError(f"pair {pair.label()} is not biharmonic admissible for d={pair.d}")
    u0 = spatial_lq(traj.fields[0], 2)
    if u0 == 0.0:
        raise ValueError("initial data has zero L^2 norm")
    return spacetime_norm(traj, pair.p, pair.q) / u0
