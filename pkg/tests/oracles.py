"""Direct-summation reference implementations, independent of scipy.fft and
of the package's multiplier machinery.  Only for small grids."""
import itertools
import math

import numpy as np


def lattice(d, n, L):
    """Integer mode indices and wavevectors in numpy FFT storage order."""
    idx = [k if k < n // 2 else k - n for k in range(n)]
    modes = list(itertools.product(idx, repeat=d))
    xi = np.array(modes, dtype=float) * (2 * math.pi / L)
    return modes, xi


def points(d, n, L):
    return np.array(list(itertools.product(range(n), repeat=d)), dtype=float) * (L / n)


def dft(u, L):
    """``uhat(k) = n^-d sum_x u(x) exp(-i xi(k).x)`` by explicit summation."""
    d, n = u.ndim, u.shape[0]
    _, xi = lattice(d, n, L)
    x = points(d, n, L)
    flat = u.reshape(-1)
    out = np.empty(len(xi), dtype=complex)
    for j, v in enumerate(xi):
        out[j] = np.sum(flat * np.exp(-1j * (x @ v))) / n ** d
    return out.reshape(u.shape)


def lq(u, q, L):
    d, n = u.ndim, u.shape[0]
    dv = (L / n) ** d
    a = [abs(complex(v)) for v in u.reshape(-1)]
    if q == math.inf:
        return max(a)
    return math.fsum(x ** q for x in a) ** (1.0 / q) * dv ** (1.0 / q)


def sobolev(u, s, L, homogeneous=True):
    d, n = u.ndim, u.shape[0]
    uh = dft(u, L).reshape(-1)
    _, xi = lattice(d, n, L)
    total = 0.0
    terms = []
    for c, v in zip(uh, xi):
        r2 = float(v @ v)
        if homogeneous:
            w = 0.0 if r2 == 0 else r2 ** s
        else:
            w = (1.0 + r2) ** s
        terms.append(w * abs(c) ** 2)
    total = math.fsum(terms)
    return math.sqrt(L ** d * total)


def mass(u, L):
    return lq(u, 2, L) ** 2


def energy(u, L, d_eq):
    """``1/2 ||Delta u||^2 + d/(2d+8) int |u|^{(2d+8)/d}`` with exponent dimension ``d_eq``."""
    r = (2 * d_eq + 8) / d_eq
    return 0.5 * sobolev(u, 2, L) ** 2 + d_eq / (2 * d_eq + 8) * lq(u, r, L) ** r


def random_field(rng, d, n, scale=1.0):
    shape = (n,) * d
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
