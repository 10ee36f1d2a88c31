"""Shared fixtures and independent numerical oracles for the test suite."""

from math import comb

import numpy as np
import pytest

import steptwo as st


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def h1():
    return st.heisenberg(1)


@pytest.fixture(scope="session")
def quat():
    return st.quaternionic_heisenberg()


def random_skew_group(rng, n=None, r=None):
    n = int(rng.integers(1, 5)) if n is None else n
    r = int(rng.integers(1, 4)) if r is None else r
    B = rng.standard_normal((r, 2 * n, 2 * n))
    return st.make_group(n, r, B - np.transpose(B, (0, 2, 1)))


def laguerre_series_oracle(kmax, p, sigma):
    """Taylor coefficients of (1-z)^(-p-1) exp(-sigma z / (1-z)).

    Independent of the recurrence: composes the exponential of the power
    series -sigma(z + z^2 + ...) with binomial coefficients.
    """
    w = np.zeros(kmax + 1)
    w[1:] = -sigma
    E = np.zeros(kmax + 1)
    E[0] = 1.0
    for m in range(1, kmax + 1):
        E[m] = sum(j * w[j] * E[m - j] for j in range(1, m + 1)) / m
    binom = np.array([comb(p + k, k) for k in range(kmax + 1)], dtype=float)
    return np.convolve(E, binom)[: kmax + 1]


def fd_directional(fn, pts, direction, h):
    """Fourth-order central difference of fn along a fixed direction."""
    d = np.asarray(direction, dtype=float)
    return (
        fn(pts - 2 * h * d)
        - 8.0 * fn(pts - h * d)
        + 8.0 * fn(pts + h * d)
        - fn(pts + 2 * h * d)
    ) / (12.0 * h)


def dense_fs_integrand(group, tau, y, t):
    """Matrix-function oracle for the fundamental-solution integrand.

    Evaluates det[|B|/sinh|B|]^(1/2) and <|B| coth|B| y, y> through a dense
    eigendecomposition of the symmetric matrix |B|^2 = B^T B, instead of
    the 2x2-block spectral reduction used by the library.
    """
    tau = np.asarray(tau, dtype=float)
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    M = group.b_tau(tau)
    w, V = np.linalg.eigh(M.T @ M)
    lam = np.sqrt(np.clip(w, 0.0, None))
    det_factor = float(np.prod(np.sqrt(lam / np.sinh(lam))))
    coth_mat = V @ np.diag(lam / np.tanh(lam)) @ V.T
    base = float(y @ coth_mat @ y) + 1j * float(t @ tau)
    power = group.n + group.r - 1
    return det_factor * base ** (-power)


def axis_derivative_4th(values, axis, step):
    """Fourth-order interior derivative along one grid axis (edges garbage)."""
    out = np.zeros_like(values)
    sl = [slice(None)] * values.ndim

    def shifted(k):
        s = list(sl)
        s[axis] = slice(2 + k, values.shape[axis] - 2 + k or None)
        return values[tuple(s)]

    s_mid = list(sl)
    s_mid[axis] = slice(2, -2)
    out[tuple(s_mid)] = (
        shifted(-2) - 8.0 * shifted(-1) + 8.0 * shifted(1) - shifted(2)
    ) / (12.0 * step)
    return out
