"""Interaction Morawetz monitors and the Hdot^{1/2} frequency-split bound.

On the torus these are measurements, not theorems: reports carry the
measured constants and nothing here asserts the inequalities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .norms import m_exponents, sobolev_norm, spatial_lq, time_norm
from .spectral import Field, apply_symbol, make_i_symbol, power_symbol


def _check_d(d: int) -> None:
    if d not in (5, 6, 7):
        raise ValueError(f"Morawetz monitors are defined for d in 5..7, got {d}")


def _safe_ratio(a: float, b: float) -> float:
    return a / b if b > 0 else 0.0


def morawetz_lhs(traj: Trajectory, d: int) -> float:
    """``|| |grad|^{-(d-5)/4} u ||_{L^4_t L^4_x}`` with the mean annihilated for d > 5."""
    _check_d(d)
    s = -(d - 5) / 4.0
    if s == 0:
        values = [spatial_lq(f, 4) for f in traj.fields]
    else:
        sym = power_symbol(s)
        values = [spatial_lq(apply_symbol(f, sym), 4) for f in traj.fields]
    return time_norm(traj.times, values, 4)


@dataclass
class MorawetzReport:
    lhs: float
    rhs: float
    ratio: float
    m_norm: float
    m_rhs: float
    m_ratio: float
    mass0: float
    h_half_sup: float


def morawetz_check(traj: Trajectory, d: int) -> MorawetzReport:
    """Both sides of the interaction Morawetz bound and its interpolated M(J) form."""
    _check_d(d)
    l2_0 = spatial_lq(traj.fields[0], 2)
    if l2_0 == 0.0:
        raise ValueError("initial data has zero L^2 norm")
    h_half = max(sobolev_norm(f, 0.5) for f in traj.fields)
    lhs = morawetz_lhs(traj, d)
    rhs = np.sqrt(l2_0) * np.sqrt(h_half)

    p, q = m_exponents(d)
    m_norm = time_norm(traj.times, [spatial_lq(f, q) for f in traj.fields], p)
    span = traj.duration
    m_rhs = (span ** ((d - 4) / (8.0 * (d - 3)))
             * l2_0 ** (1.0 / (d - 3))
             * h_half ** ((d - 4) / (d - 3.0)))
    return MorawetzReport(
        lhs=lhs, rhs=float(rhs), ratio=_safe_ratio(lhs, float(rhs)),
        m_norm=m_norm, m_rhs=m_rhs, m_ratio=_safe_ratio(m_norm, m_rhs),
        mass0=l2_0 ** 2, h_half_sup=h_half,
    )


@dataclass
class HalfSplitReport:
    lhs: float
    low_term: float
    high_term: float
    ratio: float


def h_half_split_bound(f: Field, N: float, gamma: float) -> HalfSplitReport:
    """``||u||_{Hdot^1/2}`` against ``||u||_2^{3/4} ||Iu||_{Hdot^2}^{1/4} + N^{-3/2} ||Iu||_{Hdot^2}``."""
    lhs = sobolev_norm(f, 0.5)
    l2 = spatial_lq(f, 2)
    ih2 = sobolev_norm(apply_symbol(f, make_i_symbol(N, gamma)), 2.0)
    low = l2 ** 0.75 * ih2 ** 0.25
    high = N ** -1.5 * ih2
    return HalfSplitReport(lhs, low, high, _safe_ratio(lhs, low + high))
