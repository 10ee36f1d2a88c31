"""Quadrature rules shared by the kernel integrals.

Sphere rules: two signed points for r = 1, uniform angles for r = 2, and a
Gauss-Legendre (polar) x uniform (azimuth) product rule for r = 3, which
integrates spherical polynomials exactly up to the rule's degree.  Radial
half-line integrals are compactified by u = tanh(rho * s / 2), i.e.
rho = (2/s) log((1+u)/(1-u)), with the scale s matched to the integrand's
exponential decay rate, then handled by Gauss-Legendre nodes on (0, 1).
"""

import numpy as np

from .errors import DimensionError


def gauss_legendre(count, lo=0.0, hi=1.0):
    """Gauss-Legendre nodes and weights mapped to the interval (lo, hi)."""
    x, w = np.polynomial.legendre.leggauss(count)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def sphere_rule(r, level):
    """Nodes and weights integrating over the unit sphere in R^r.

    ``level`` controls resolution: the number of polar Gauss nodes for
    r = 3, the number of uniform angles for r = 2; ignored for r = 1.
    Weights sum to the sphere measure (2, 2*pi, 4*pi).
    """
    if r == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if r == 2:
        angles = 2.0 * np.pi * np.arange(level) / level
        pts = np.column_stack([np.cos(angles), np.sin(angles)])
        return pts, np.full(level, 2.0 * np.pi / level)
    if r == 3:
        cosines, cw = gauss_legendre(level, -1.0, 1.0)
        n_azi = 2 * level
        angles = 2.0 * np.pi * np.arange(n_azi) / n_azi
        sines = np.sqrt(np.clip(1.0 - cosines**2, 0.0, None))
        pts = np.empty((level * n_azi, 3))
        wts = np.empty(level * n_azi)
        for i in range(level):
            block = slice(i * n_azi, (i + 1) * n_azi)
            pts[block, 0] = sines[i] * np.cos(angles)
            pts[block, 1] = sines[i] * np.sin(angles)
            pts[block, 2] = cosines[i]
            wts[block] = cw[i] * 2.0 * np.pi / n_azi
        return pts, wts
    raise DimensionError(f"no sphere rule for r = {r}")


def radial_nodes(count, scale=1.0):
    """Nodes/weights for integral_0^inf f(rho) d(rho) with decay rate ~scale.

    Returns (rho, w) such that sum w_i f(rho_i) approximates the integral
    for f smooth with f = O(exp(-scale * rho)).
    """
    if scale <= 0:
        raise DimensionError(f"radial decay scale must be positive, got {scale}")
    a = 2.0 / scale
    u, w = gauss_legendre(count, 0.0, 1.0)
    rho = a * np.log((1.0 + u) / (1.0 - u))
    jac = a * 2.0 / (1.0 - u**2)
    return rho, w * jac


def x_over_sinh(x):
    """x / sinh(x) for x >= 0, overflow-free, series below 1e-4."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-4
    xs = np.where(small, 1.0, x)
    e = np.exp(-xs)
    out = 2.0 * xs * e / (1.0 - e * e)
    return np.where(small, 1.0 - x * x / 6.0 + 7.0 * x**4 / 360.0, out)


def x_coth(x):
    """x * coth(x) for x >= 0, overflow-free, series below 1e-4."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-4
    xs = np.where(small, 1.0, x)
    e = np.exp(-2.0 * xs)
    out = xs * (1.0 + e) / (1.0 - e)
    return np.where(small, 1.0 + x * x / 3.0 - x**4 / 45.0, out)
