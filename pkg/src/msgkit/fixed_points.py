"""Fixed points of the static MSG equation, ``sin(phi) + N*eps*sin(N*phi) = 0``.

The left-hand side factors as ``sin(phi) * h(phi)`` with
``h = 1 + N*eps*U_{N-1}(cos(phi))`` (Chebyshev polynomial of the second kind),
so besides the trivial roots 0, pi, 2*pi every fixed point is a root of the
smooth function ``h``.  Those are bracketed on a uniform grid and bisected to
machine precision; tangencies of ``h`` with zero are reported as double roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NotAFixedPoint
from .model import ModelParams, potential_derivative, potential_second_derivative

__all__ = [
    "FixedPoint",
    "POTENTIAL_MINIMUM",
    "POTENTIAL_MAXIMUM",
    "INFLECTION",
    "find_fixed_points",
    "classify_fixed_point",
    "bifurcation_scan",
]

TWO_PI = 2.0 * math.pi
POTENTIAL_MINIMUM = "potential_minimum"
POTENTIAL_MAXIMUM = "potential_maximum"
INFLECTION = "inflection"
CURVATURE_TOL = 1e-10
RESIDUAL_TOL = 1e-8
DOUBLE_ROOT_TOL = 1e-10


@dataclass(frozen=True)
class FixedPoint:
    phi: float
    curvature: float
    kind: str


def _chebyshev_u(order, c):
    u_prev, u = np.ones_like(c), 2.0 * c
    if order == 0:
        return u_prev
    for _ in range(order - 1):
        u_prev, u = u, 2.0 * c * u - u_prev
    return u


def _reduced(params, phi):
    n, eps = params.n_harmonic, params.epsilon
    c = np.cos(np.asarray(phi, dtype=float))
    return 1.0 + n * eps * _chebyshev_u(n - 1, c)


def _bisect(f, a, b):
    fa = f(a)
    while True:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            return m
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m


def _kind(curvature):
    if abs(curvature) <= CURVATURE_TOL:
        return INFLECTION
    return POTENTIAL_MINIMUM if curvature > 0 else POTENTIAL_MAXIMUM


def classify_fixed_point(params: ModelParams, phi: float) -> FixedPoint:
    residual = float(potential_derivative(params, phi))
    if abs(residual) > RESIDUAL_TOL:
        raise NotAFixedPoint(f"phi={phi!r} leaves residual {residual:.3g} in sin(phi) + N eps sin(N phi)")
    curvature = float(potential_second_derivative(params, phi))
    return FixedPoint(float(phi), curvature, _kind(curvature))


def find_fixed_points(params: ModelParams) -> list[FixedPoint]:
    """All fixed points in [0, 2*pi], ascending, always including 0, pi and 2*pi."""
    n = params.n_harmonic
    cells = 16 * n * n
    grid = np.linspace(0.0, TWO_PI, cells + 1)
    h = _reduced(params, grid)
    f = lambda p: float(_reduced(params, p))

    roots = []  # (phi, is_double)
    for k in range(cells):
        if h[k] == 0.0:
            roots.append((grid[k], False))
        elif h[k] * h[k + 1] < 0:
            roots.append((_bisect(f, grid[k], grid[k + 1]), False))

    # pairs of roots closer than one cell hide behind a local extremum of h
    for k in range(1, cells):
        lo_min = h[k] > 0 and h[k] <= h[k - 1] and h[k] <= h[k + 1]
        hi_max = h[k] < 0 and h[k] >= h[k - 1] and h[k] >= h[k + 1]
        if not (lo_min or hi_max):
            continue
        sign = 1.0 if lo_min else -1.0
        res = minimize_scalar(
            lambda p: sign * f(p), bounds=(grid[k - 1], grid[k + 1]), method="bounded",
            options={"xatol": 1e-14},
        )
        p_ext, h_ext = float(res.x), f(float(res.x))
        if sign * h_ext < 0:
            for a, b in ((grid[k - 1], p_ext), (p_ext, grid[k + 1])):
                if f(a) * f(b) < 0:
                    roots.append((_bisect(f, a, b), False))
        elif abs(math.sin(p_ext) * h_ext) <= DOUBLE_ROOT_TOL:
            roots.append((p_ext, True))

    points = {0.0: False, math.pi: False, TWO_PI: False}
    for phi, double in roots:
        if any(abs(phi - t) < 1e-9 for t in (0.0, math.pi, TWO_PI)):
            continue
        if any(abs(phi - q) < 1e-12 for q in points):
            continue
        points[phi] = double

    out = []
    for phi in sorted(points):
        curvature = float(potential_second_derivative(params, phi))
        kind = INFLECTION if points[phi] else _kind(curvature)
        out.append(FixedPoint(float(phi), curvature, kind))
    return out


def bifurcation_scan(n_harmonic: int, eps_grid) -> list[tuple[float, list[FixedPoint]]]:
    eps_grid = [float(e) for e in eps_grid]
    if any(e < 0 for e in eps_grid):
        raise ValueError("eps_grid must be non-negative")
    if any(b < a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps_grid must be ascending")
    return [(e, find_fixed_points(ModelParams(n_harmonic, e))) for e in eps_grid]
