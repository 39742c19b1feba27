"""Bookkeeping for the global argument: thresholds, scaling, subinterval counts,
the N-T feasibility condition and the growth exponent of the H^gamma norm.

Inputs given as floats are read by their decimal literal (``1.7`` is 17/10),
so inequalities are decided in exact rational arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

Number = Union[int, float, Fraction]


def _rational(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if not math.isfinite(x):
        raise ValueError(f"{x!r} is not finite")
    return Fraction(repr(float(x)))


def _check_d(d: int) -> None:
    if d not in (5, 6, 7):
        raise ValueError(f"d={d} must be 5, 6 or 7")


def gamma_threshold(d: int) -> Fraction:
    """``max{3 - 8/d, 8/d, 8(d-4)/(3d-8)}``: 8/5, 5/3, 13/7 for d = 5, 6, 7."""
    _check_d(d)
    return max(3 - Fraction(8, d), Fraction(8, d), Fraction(8 * (d - 4), 3 * d - 8))


def lambda_exponent(gamma: Number) -> Fraction:
    g = _rational(gamma)
    return (2 - g) / g


def choose_lambda(N: Number, gamma: Number) -> tuple[float, int]:
    """``N^((2-gamma)/gamma)`` and its nearest power of two in log scale (ties up).

    When ``N`` is a power of two and the exponent is rational the power is
    evaluated exactly, so ``N = 512, gamma = 1.8`` gives exactly 2.
    """
    if not N >= 1:
        raise ValueError(f"N={N!r} must be >= 1")
    if not 0 < gamma <= 2:
        raise ValueError(f"gamma={gamma!r} must lie in (0, 2]")
    e = lambda_exponent(gamma)
    log2N = _exact_log2(N)
    if log2N is not None:
        log2lam = e * log2N
        if log2lam.denominator == 1:
            value = float(2 ** int(log2lam)) if log2lam >= 0 else 2.0 ** int(log2lam)
        else:
            value = 2.0 ** float(log2lam)
        dyadic_exp = math.floor(log2lam + Fraction(1, 2))
    else:
        value = float(N) ** float(e)
        dyadic_exp = math.floor(math.log2(value) + 0.5)
    return value, 2 ** dyadic_exp if dyadic_exp >= 0 else 2.0 ** dyadic_exp


def _exact_log2(N: Number):
    if isinstance(N, float) and N.is_integer():
        N = int(N)
    if isinstance(N, Fraction) and N.denominator == 1:
        N = N.numerator
    if isinstance(N, int) and N > 0 and N & (N - 1) == 0:
        return Fraction(N.bit_length() - 1)
    return None


def subinterval_count_value(T0: Number, K: Number, mu: Number, d: int) -> float:
    """``(2 K T0^{(d-4)/(8(d-3))} / mu)^{8(d-3)/d}`` before rounding."""
    _check_d(d)
    for name, v in (("T0", T0), ("K", K), ("mu", mu)):
        if not v > 0:
            raise ValueError(f"{name}={v!r} must be positive")
    base = 2.0 * float(K) * float(T0) ** ((d - 4) / (8.0 * (d - 3))) / float(mu)
    return base ** (8.0 * (d - 3) / d)


def subinterval_count(T0: Number, K: Number, mu: Number, d: int) -> int:
    """Number of subintervals with ``||u||_{M(J_k)} <= mu``, rounded up."""
    return math.ceil(subinterval_count_value(T0, K, mu, d))


@dataclass
class GlobalCondition:
    passed: bool
    lhs: Fraction
    rhs: Fraction
    reasons: list = field(default_factory=list)


def check_global_condition(gamma: Number, delta: Number, d: int) -> GlobalCondition:
    """``4(2-gamma)(d-4)/(gamma d) < 2 - gamma + delta`` plus the ranges of gamma, delta."""
    _check_d(d)
    g, dl = _rational(gamma), _rational(delta)
    reasons = []
    if not g < 2:
        reasons.append(f"gamma={g} is not below 2")
    floor_g = max(3 - Fraction(8, d), Fraction(8, d))
    if not g > floor_g:
        reasons.append(f"gamma={g} is not above max(3 - 8/d, 8/d) = {floor_g}")
    top = g + Fraction(8, d) - 3
    if top <= 0:
        reasons.append(f"delta range (0, gamma + 8/d - 3) = (0, {top}) is empty")
    elif not 0 < dl < top:
        reasons.append(f"delta={dl} outside (0, {top})")
    lhs = 4 * (2 - g) * (d - 4) / (g * d) if g != 0 else Fraction(0)
    rhs = 2 - g + dl
    if not lhs < rhs:
        reasons.append(f"4(2-gamma)(d-4)/(gamma d) = {lhs} is not below 2 - gamma + delta = {rhs}")
    return GlobalCondition(not reasons, lhs, rhs, reasons)


@dataclass
class BudgetInput:
    d: int
    gamma: Number
    delta: Number
    T: Number = 1.0
    K: Number = 1.0
    mu: Number = 0.1
    c: Number = Fraction(1, 100)

    def __post_init__(self):
        _check_d(self.d)
        for name in ("T", "K", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.mu < 1:
            raise ValueError("mu must lie in (0, 1)")


@dataclass
class BudgetReport:
    d: int
    gamma_threshold: Fraction
    exponent: float
    N: int
    lam: float
    lam_dyadic: float
    T0: float
    L: int
    alpha: float
    condition: GlobalCondition

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "gamma_threshold": str(self.gamma_threshold),
            "exponent_e": self.exponent,
            "N": self.N,
            "lambda": self.lam,
            "lambda_dyadic": self.lam_dyadic,
            "T0": self.T0,
            "L": self.L,
            "alpha": self.alpha,
            "condition_passed": self.condition.passed,
            "condition_lhs": str(self.condition.lhs),
            "condition_rhs": str(self.condition.rhs),
            "alpha_formula": "(2-gamma)((d-4)/d)/e,  e = (2-gamma+delta) - 4(2-gamma)(d-4)/(gamma d)",
        }


def net_exponent(gamma: Number, delta: Number, d: int) -> Fraction:
    """``e = (2 - gamma + delta) - 4(2-gamma)(d-4)/(gamma d)``."""
    g, dl = _rational(gamma), _rational(delta)
    return (2 - g + dl) - 4 * (2 - g) * (d - 4) / (g * d)


def growth_exponent(gamma: Number, delta: Number, d: int) -> float:
    """``alpha(gamma, d) = (2 - gamma)((d-4)/d) / e``."""
    e = net_exponent(gamma, delta, d)
    if e <= 0:
        raise ValueError(f"net exponent e={float(e):.6g} is not positive")
    g = _rational(gamma)
    return float((2 - g) * Fraction(d - 4, d) / e)


def feasible(N: Number, e: float, T: Number, c: Number, d: int) -> bool:
    """``N^e >= (4/c) T^((d-4)/d)``, compared in log2."""
    lhs = e * math.log2(float(N))
    rhs = math.log2(4.0 / float(c)) + (d - 4) / d * math.log2(float(T))
    return lhs >= rhs


def solve_min_N_and_alpha(inp: BudgetInput) -> BudgetReport:
    """Smallest dyadic ``N`` with ``N^e >= (4/c) T^((d-4)/d)`` and the induced budget."""
    cond = check_global_condition(inp.gamma, inp.delta, inp.d)
    e_exact = net_exponent(inp.gamma, inp.delta, inp.d)
    if e_exact <= 0:
        raise ValueError(f"net exponent e={float(e_exact):.6g} <= 0; no N works ({cond.reasons})")
    e = float(e_exact)
    d = inp.d
    target = math.log2(4.0 / float(inp.c)) + (d - 4) / d * math.log2(float(inp.T))
    j = max(0, math.ceil(target / e))
    while j > 0 and feasible(2 ** (j - 1), e, inp.T, inp.c, d):
        j -= 1
    while not feasible(2 ** j, e, inp.T, inp.c, d):
        j += 1
    N = 2 ** j
    lam, lam_dyadic = choose_lambda(N, inp.gamma)
    T0 = lam ** 4 * float(inp.T)
    L = subinterval_count(T0, inp.K, inp.mu, d)
    return BudgetReport(
        d=d, gamma_threshold=gamma_threshold(d), exponent=e, N=N, lam=lam,
        lam_dyadic=lam_dyadic, T0=T0, L=L, alpha=growth_exponent(inp.gamma, inp.delta, d),
        condition=cond,
    )
