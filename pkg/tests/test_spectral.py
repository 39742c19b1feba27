import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from nl4s.spectral import (
    Field, apply_symbol, bracket_symbol, bump, compose, identity_symbol, is_dyadic,
    lp_partition, lp_project, lp_symbol, make_grid, make_i_symbol, power_symbol,
    propagator_symbol, to_physical, to_spectral,
)


def rand_field(grid, rng, band=None):
    f = Field(grid, oracles.random_field(rng, grid.d, grid.n))
    if band is None:
        return f
    return Field(grid, f.spectral * (grid.xi_abs <= band), "spectral")


# -- grid -------------------------------------------------------------------

def test_grid_axis_frequencies():
    g = make_grid(1, 8)
    assert sorted(g.k_axis.tolist()) == [-4, -3, -2, -1, 0, 1, 2, 3]
    assert np.allclose(sorted(g.xi_axis), range(-4, 4))


def test_grid_d5_point_count():
    g = make_grid(5, 16)
    assert g.size == 1_048_576
    assert g.shape == (16,) * 5


@pytest.mark.parametrize("args", [(2, 6, 1.0), (0, 8, 1.0), (8, 8, 1.0), (2, 8, 0.0), (2, 2, 1.0)])
def test_grid_rejects_invalid(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_grid_single_zero_mode_and_nyquist():
    g = make_grid(3, 8, L=4.0)
    assert np.count_nonzero(g.xi_sq == 0) == 1
    assert g.nyquist == pytest.approx(2 * math.pi / 4.0 * 4)
    assert g.xi_max == pytest.approx(g.nyquist * math.sqrt(3))


# -- transforms -------------------------------------------------------------

def test_plane_wave_single_coefficient():
    g = make_grid(2, 8, L=3.0)
    k = (2, -1)
    x0, x1 = g.x_component(0), g.x_component(1)
    xi = np.array(k) * 2 * math.pi / g.L
    u = (0.3 - 0.7j) * np.exp(1j * (xi[0] * x0 + xi[1] * x1))
    uh = Field(g, u).spectral
    assert uh[g.index_of(k)] == pytest.approx(0.3 - 0.7j, abs=1e-14)
    uh[g.index_of(k)] = 0
    assert np.max(np.abs(uh)) < 1e-14


def test_roundtrip_relative(rng):
    g = make_grid(3, 16)
    f = rand_field(g, rng)
    back = to_physical(Field(g, to_spectral(f).spectral, "spectral")).physical
    assert np.linalg.norm(back - f.physical) / np.linalg.norm(f.physical) < 1e-12


def test_spectral_matches_direct_dft(rng):
    g = make_grid(2, 8, L=5.0)
    u = oracles.random_field(rng, 2, 8)
    assert np.allclose(Field(g, u).spectral, oracles.dft(u, 5.0), atol=1e-13)


def test_parseval_against_direct_sums(rng):
    g = make_grid(2, 8, L=2.5)
    u = oracles.random_field(rng, 2, 8)
    phys = oracles.lq(u, 2, 2.5) ** 2
    spec = g.volume * sum(abs(c) ** 2 for c in oracles.dft(u, 2.5).reshape(-1))
    assert phys == pytest.approx(spec, rel=1e-10)


def test_field_arithmetic(rng):
    g = make_grid(2, 8)
    f, h = rand_field(g, rng), rand_field(g, rng)
    assert np.allclose((f + h).physical, f.physical + h.physical)
    assert np.allclose((f - h).spectral, f.spectral - h.spectral)
    assert np.allclose((2j * f).physical, 2j * f.physical)
    assert np.allclose((-f).physical, -f.physical)


# -- bump and symbols -------------------------------------------------------

def test_bump_values():
    assert bump(0.5) == 1.0
    assert bump(3.0) == 0.0
    assert bump(1.5) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        bump(-0.1)


@given(st.floats(0, 4), st.floats(0, 4))
def test_bump_monotone_and_bounded(a, b):
    lo, hi = min(a, b), max(a, b)
    assert 0.0 <= bump(hi) <= bump(lo) <= 1.0


def test_identity_and_power_symbols(rng):
    g = make_grid(2, 8)
    f = rand_field(g, rng)
    assert np.array_equal(apply_symbol(f, identity_symbol()).spectral, f.spectral)
    w = Field.plane_wave(g, (3, 1), 2.0)
    out = apply_symbol(w, power_symbol(1.5)).spectral[g.index_of((3, 1))]
    assert out == pytest.approx(2.0 * math.sqrt(10) ** 1.5)


def test_negative_power_annihilates_mean(rng):
    g = make_grid(2, 8)
    f = Field(g, rand_field(g, rng).physical + 5.0)
    out = apply_symbol(f, power_symbol(-0.5))
    assert abs(out.physical.mean()) < 1e-14
    nz = g.xi_abs > 0
    assert np.allclose(out.spectral[nz], f.spectral[nz] * g.xi_abs[nz] ** -0.5)


def test_singular_symbol_without_policy_rejected(rng):
    g = make_grid(2, 8)
    with pytest.raises(ValueError):
        apply_symbol(rand_field(g, rng), power_symbol(-1.0, zero=None))


def test_symbol_deterministic():
    r = np.linspace(0, 10, 101)
    m = make_i_symbol(2, 1.3)
    assert np.array_equal(m(r), m(r))


def test_i_symbol_values():
    m = make_i_symbol(2, 1.0)
    assert m(1.0) == 1.0
    assert m(8.0) == pytest.approx(0.25)
    for bad in [(0.5, 1.0), (2, 2.0), (2, -0.1)]:
        with pytest.raises(ValueError):
            make_i_symbol(*bad)


@pytest.mark.parametrize("smooth", [False, True])
@given(N=st.sampled_from([1, 2, 4, 8]), gamma=st.floats(0, 1.99),
       r=st.lists(st.floats(0, 200), min_size=2, max_size=20))
def test_i_symbol_shape(smooth, N, gamma, r):
    m = make_i_symbol(N, gamma, smooth=smooth)
    r = np.sort(np.array(r))
    v = m(r)
    assert np.all(v <= 1.0)
    assert np.all(np.diff(v) <= 1e-15)
    assert np.all(v[r <= N] == 1.0)
    far = r >= 2 * N
    assert np.allclose(v[far], (r[far] / N) ** (gamma - 2), rtol=1e-13)


def test_i_operator_identity_beyond_resolved_modes(rng):
    g = make_grid(3, 8)
    f = rand_field(g, rng)
    out = apply_symbol(f, make_i_symbol(g.xi_max, 1.5))
    assert np.array_equal(out.spectral, f.spectral)


def test_linearity(rng):
    g = make_grid(2, 16)
    f, h = rand_field(g, rng), rand_field(g, rng)
    a, b = 0.3 - 1j, 2.5
    sym = make_i_symbol(2, 1.4)
    lhs = apply_symbol(a * f + b * h, sym).spectral
    rhs = a * apply_symbol(f, sym).spectral + b * apply_symbol(h, sym).spectral
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(lhs))


def test_composition_matches_sequential(rng):
    g = make_grid(2, 16)
    f = rand_field(g, rng)
    s1, s2 = bracket_symbol(1.5), propagator_symbol(0.01)
    seq = apply_symbol(apply_symbol(f, s1), s2).spectral
    prod = apply_symbol(f, compose(s1, s2)).spectral
    assert np.max(np.abs(seq - prod)) <= 1e-12 * np.max(np.abs(seq))


def test_i_commutes_with_derivative_bitwise(rng):
    g = make_grid(3, 8)
    f = rand_field(g, rng)
    m, d = make_i_symbol(2, 1.7), power_symbol(0.5)
    assert np.array_equal(apply_symbol(f, compose(m, d)).spectral,
                          apply_symbol(f, compose(d, m)).spectral)


def test_zero_policy_only_touches_zero_mode():
    g = make_grid(2, 8)
    sym_a, sym_b = power_symbol(-1.0, zero=7.0), power_symbol(-1.0)
    a, b = sym_a.on(g), sym_b.on(g)
    nz = g.xi_abs > 0
    assert np.array_equal(a[nz], b[nz])
    assert a[g.zero_mode] == 7.0 and b[g.zero_mode] == 0.0


# -- Littlewood-Paley -------------------------------------------------------

def test_lp_low_projection_on_plane_waves():
    g = make_grid(1, 64)
    M = 8
    low = Field.plane_wave(g, (2,), 1.0)        # |xi| = M/4
    high = Field.plane_wave(g, (32 - 1,), 1.0)  # |xi| = 31 > 2M
    assert np.allclose(lp_project(low, M, "<=").spectral, low.spectral)
    assert np.all(lp_project(high, M, "<=").spectral == 0)


def test_lp_rejects_bad_arguments(rng):
    g = make_grid(1, 16)
    f = rand_field(g, rng)
    with pytest.raises(ValueError):
        lp_project(f, 3.0)
    with pytest.raises(ValueError):
        lp_project(f, 4.0, "~")


def test_lp_window_identity(rng):
    g = make_grid(2, 32)
    f = rand_field(g, rng)
    M1, M2 = 1.0, 16.0
    lhs = lp_project(f, M2, "<=").spectral - lp_project(f, M1, "<=").spectral
    rhs = sum(lp_project(f, 2.0 ** j, "=").spectral for j in range(1, 5))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


@pytest.mark.parametrize("M0", [0.5, 1.0, 4.0])
def test_lp_partition_reconstructs(rng, M0):
    g = make_grid(3, 16)
    f = rand_field(g, rng)
    total = sum((p.spectral for p in lp_partition(f, M0)), np.zeros(g.shape, complex))
    assert np.max(np.abs(total - f.spectral)) <= 1e-12


def test_lp_complementary_parts():
    r = np.linspace(0, 40, 401)
    for M in (1.0, 4.0):
        assert np.allclose(lp_symbol(M, "<=")(r) + lp_symbol(M, ">")(r), 1.0)
        assert np.allclose(lp_symbol(M, "<")(r) + lp_symbol(M, ">=")(r), 1.0)
        assert np.allclose(lp_symbol(M, "<=")(r) - lp_symbol(M, "<")(r), lp_symbol(M, "=")(r))


def test_is_dyadic():
    assert is_dyadic(0.25) and is_dyadic(1) and is_dyadic(1024)
    assert not is_dyadic(3) and not is_dyadic(0) and not is_dyadic(-2)
