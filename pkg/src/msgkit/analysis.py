"""Periods, energies, subkink counts and equation-of-state scans.

Everything here works from the first integral ``s**2/2 = P + V(phi)`` by
quadrature between turning points; :func:`trajectory_half_period` extracts
the same numbers from an RK4 trajectory for cross-checking.

One "soliton" of a periodic chain is one monotone transit between turning
points, so the spacing L is the half-period and E integrates rho over it.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from ._signal import count_maxima, lobes_to_subkinks
from .errors import RegimeError
from .fixed_points import POTENTIAL_MINIMUM, find_fixed_points
from .model import ModelParams, potential
from .static_solver import Trajectory

__all__ = [
    "TurningPair",
    "EnergyPoint",
    "EosPoint",
    "EosScan",
    "EnergyScan",
    "turning_points",
    "half_period",
    "energy_per_soliton",
    "mean_density",
    "mean_density_steplike",
    "count_subkinks",
    "scan_equation_of_state",
    "scan_energy",
    "phase_portrait",
    "find_cusps",
    "trajectory_half_period",
]

TWO_PI = 2.0 * math.pi
_QUAD = dict(limit=500, epsabs=1e-13, epsrel=1e-12)


@dataclass(frozen=True)
class TurningPair:
    phi_lo: float
    phi_hi: float


@dataclass(frozen=True)
class EnergyPoint:
    pressure: float
    energy_per_soliton: float
    spacing: float
    subkinks: int


@dataclass(frozen=True)
class EosPoint:
    pressure: float
    mean_density: float
    subkinks: int


@dataclass
class EosScan:
    """Scan output ordered by pressure; failed grid points are kept aside."""

    points: list[EosPoint]
    failures: list[tuple[float, str]] = field(default_factory=list)

    @property
    def pressure(self) -> np.ndarray:
        return np.array([p.pressure for p in self.points])

    @property
    def mean_density(self) -> np.ndarray:
        return np.array([p.mean_density for p in self.points])

    @property
    def subkinks(self) -> np.ndarray:
        return np.array([p.subkinks for p in self.points], dtype=int)

    def compressibility(self) -> np.ndarray:
        """Finite-difference d(rho_bar)/dP, separately on each side of P = 0."""
        P, rho = self.pressure, self.mean_density
        chi = np.full(P.size, np.nan)
        for mask in (P < 0, P > 0):
            idx = np.flatnonzero(mask)
            if idx.size >= 2:
                chi[idx] = np.gradient(rho[idx], P[idx])
        return chi

    def incompressible_pressures(self) -> list[float]:
        """Pressures where the compressibility changes sign (maximum-density points)."""
        P, chi = self.pressure, self.compressibility()
        out = []
        for i in range(P.size - 1):
            a, b = chi[i], chi[i + 1]
            if np.isfinite(a) and np.isfinite(b) and a * b < 0:
                out.append(float(P[i] - a * (P[i + 1] - P[i]) / (b - a)))
        return out


@dataclass
class EnergyScan:
    points: list[EnergyPoint]
    failures: list[tuple[float, str]] = field(default_factory=list)


def _periodic_guard(params, pressure):
    floor = -params.v_center
    if not floor < pressure < 0:
        raise RegimeError(
            f"P={pressure!r} outside the periodic band ({floor!r}, 0) for N={params.n_harmonic}, "
            f"eps={params.epsilon!r}"
        )


def _half_width(params, pressure):
    """Distance u from pi to the nearest zero of V(pi + u) + P."""
    n = params.n_harmonic
    u = np.linspace(0.0, math.pi, 4096 * n + 1)
    g = potential(params, math.pi + u) + pressure
    below = np.flatnonzero(g <= 0)
    if below.size == 0:
        return math.pi
    k = below[0]
    if g[k] == 0:
        return float(u[k])
    f = lambda w: float(potential(params, math.pi + w)) + pressure
    a, b = float(u[k - 1]), float(u[k])
    while True:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            return m
        if f(m) > 0:
            a = m
        else:
            b = m


def turning_points(params: ModelParams, pressure: float) -> TurningPair:
    """Zero-slope points bracketing pi on the periodic orbit through pi.

    The orbit is symmetric about pi, so ``phi_lo = 2*pi - phi_hi``.
    """
    _periodic_guard(params, pressure)
    w = _half_width(params, pressure)
    return TurningPair(math.pi - w, math.pi + w)


def _saddle_breaks(params, width):
    """theta breakpoints at local minima of V inside (pi, pi + width)."""
    out = []
    for fp in find_fixed_points(params):
        if fp.kind == POTENTIAL_MINIMUM and math.pi < fp.phi < math.pi + width:
            out.append(math.asin((fp.phi - math.pi) / width))
    return out


def _gap(params, pressure, width, residual, theta):
    """P + V(phi) at phi = pi + width*sin(theta), written relative to the turning point."""
    n, eps = params.n_harmonic, params.epsilon
    hi = math.pi + width
    phi = math.pi + width * math.sin(theta)
    # hi - phi = width * (1 - sin) = width * cos^2 / (1 + sin), free of cancellation
    d = width * math.cos(theta) ** 2 / (1.0 + math.sin(theta))
    s = hi + phi
    dv = -2.0 * math.sin(0.5 * s) * math.sin(0.5 * d) - 2.0 * eps * math.sin(0.5 * n * s) * math.sin(0.5 * n * d)
    return max(residual + dv, 0.0)


def _orbit_integrals(params, pressure):
    """(L, A) with L the half-period and A = integral of the slope over one transit."""
    width = _half_width(params, pressure)
    residual = float(potential(params, math.pi + width)) + pressure
    breaks = _saddle_breaks(params, width) or None

    def inv_slope(theta):
        g = _gap(params, pressure, width, residual, theta)
        if g <= 0:
            return 0.0
        return width * math.cos(theta) / math.sqrt(2.0 * g)

    def slope(theta):
        g = _gap(params, pressure, width, residual, theta)
        return width * math.cos(theta) * math.sqrt(2.0 * g)

    L, _ = quad(inv_slope, 0.0, 0.5 * math.pi, points=breaks, **_QUAD)
    A, _ = quad(slope, 0.0, 0.5 * math.pi, points=breaks, **_QUAD)
    return 2.0 * L, 2.0 * A


def half_period(params: ModelParams, pressure: float) -> float:
    """Spacing L between neighbouring solitons of the periodic chain at pressure P."""
    _periodic_guard(params, pressure)
    return _orbit_integrals(params, pressure)[0]


def energy_per_soliton(params: ModelParams, pressure: float) -> EnergyPoint:
    _periodic_guard(params, pressure)
    L, A = _orbit_integrals(params, pressure)
    # rho = s^2 - P along the orbit, so the transit energy is A - P*L
    return EnergyPoint(pressure, A - pressure * L, L, count_subkinks(params, pressure))


def mean_density(params: ModelParams, pressure: float) -> EosPoint:
    e = energy_per_soliton(params, pressure)
    return EosPoint(pressure, e.energy_per_soliton / e.spacing, e.subkinks)


def _steplike_integrals(params, pressure):
    breaks = [fp.phi for fp in find_fixed_points(params) if fp.kind == POTENTIAL_MINIMUM and math.pi < fp.phi < TWO_PI]
    kw = dict(points=breaks or None, **_QUAD)
    length, _ = quad(lambda p: 1.0 / math.sqrt(2.0 * (pressure + float(potential(params, p)))), math.pi, TWO_PI, **kw)
    area, _ = quad(lambda p: math.sqrt(2.0 * (pressure + float(potential(params, p)))), math.pi, TWO_PI, **kw)
    return 2.0 * length, 2.0 * area


def mean_density_steplike(params: ModelParams, pressure: float) -> EosPoint:
    """Mean energy density over one 2*pi advance of a step-like (P > 0) solution."""
    if not pressure > 0:
        raise RegimeError(f"step-like solutions need P > 0, got {pressure!r}")
    length, area = _steplike_integrals(params, pressure)
    energy = area - pressure * length
    return EosPoint(pressure, energy / length, count_subkinks(params, pressure))


def count_subkinks(params: ModelParams, pressure: float, samples: int = 20001) -> int:
    """Number of slope lobes along one transit; a single lobe counts as 0.

    Periodic pressures look between the turning points, P >= 0 over a full
    period of phi.  The slope is sampled on half the transit and mirrored, so
    the count respects the symmetry about pi exactly.
    """
    if pressure < 0:
        _periodic_guard(params, pressure)
        width = _half_width(params, pressure)
    else:
        width = math.pi
    u = np.linspace(0.0, width, samples // 2 + 1)
    half = np.sqrt(2.0 * np.maximum(pressure + potential(params, math.pi + u), 0.0))
    full = np.concatenate([half[:0:-1], half])
    return lobes_to_subkinks(count_maxima(full))


def _eos_point(params, pressure):
    if pressure < 0:
        return mean_density(params, pressure)
    return mean_density_steplike(params, pressure)


def _energy_point(params, pressure):
    return energy_per_soliton(params, pressure)


def _safe(fn, params, pressure):
    try:
        return fn(params, pressure), None
    except RegimeError as exc:
        return None, str(exc)


def _scan(fn, params, p_grid, jobs):
    grid = sorted(float(p) for p in p_grid)
    work = partial(_safe, fn, params)
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, grid, chunksize=max(1, len(grid) // (4 * jobs))))
    else:
        results = [work(p) for p in grid]
    points, failures = [], []
    for p, (value, err) in zip(grid, results):
        if err is None:
            points.append(value)
        else:
            failures.append((p, err))
    return points, failures


def scan_equation_of_state(params: ModelParams, p_grid, jobs: int = 1) -> EosScan:
    """One EosPoint per grid pressure, periodic for P < 0 and step-like for P > 0."""
    return EosScan(*_scan(_eos_point, params, p_grid, jobs))


def scan_energy(params: ModelParams, p_grid, jobs: int = 1) -> EnergyScan:
    return EnergyScan(*_scan(_energy_point, params, p_grid, jobs))


def phase_portrait(params: ModelParams, pressure: float, samples: int = 801) -> np.ndarray:
    """Closed (phi, slope) loop of the periodic orbit, shape ``(samples, 2)``.

    Runs from the lower turning point along the positive-slope branch and back;
    the first and last rows coincide.
    """
    _periodic_guard(params, pressure)
    if samples < 5:
        raise ValueError("samples must be >= 5")
    width = _half_width(params, pressure)
    theta = np.linspace(0.0, TWO_PI, samples)
    phi = math.pi - width * np.cos(theta)
    magnitude = np.sqrt(2.0 * np.maximum(pressure + potential(params, phi), 0.0))
    slope = np.sign(np.round(np.sin(theta), 15)) * magnitude
    loop = np.column_stack([phi, slope])
    loop[-1] = loop[0]
    return loop


def find_cusps(scan: EosScan, jump: float = 10.0) -> list[float]:
    """Pressures of cusps on the periodic branch of an equation-of-state scan.

    A cusp is a local minimum of rho_bar along the pressure-ordered grid where
    the finite-difference dP/d(rho_bar) differs by more than ``jump`` times
    between the two adjacent cells.
    """
    P, rho = scan.pressure, scan.mean_density
    keep = P < 0
    P, rho = P[keep], rho[keep]
    out = []
    for i in range(1, P.size - 1):
        dl, dr = rho[i] - rho[i - 1], rho[i + 1] - rho[i]
        if not (dl < 0 < dr):
            continue
        sl = (P[i] - P[i - 1]) / dl
        sr = (P[i + 1] - P[i]) / dr
        big, small = max(abs(sl), abs(sr)), min(abs(sl), abs(sr))
        if big > jump * small:
            out.append(float(P[i]))
    return out


def _hermite_crossing(x0, x1, p0, p1, s0, s1, level):
    h = x1 - x0

    def cubic(t):
        t2, t3 = t * t, t * t * t
        return (
            (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * h * s0
            + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * h * s1 - level
        )

    return x0 + h * brentq(cubic, 0.0, 1.0, xtol=1e-15)


def trajectory_half_period(traj: Trajectory) -> tuple[float, float]:
    """(L, E) of a periodic RK4 trajectory from its first return to phi = pi.

    The return point is located by cubic Hermite interpolation; E is rho
    integrated over the full period (trapezoid) divided by two.
    """
    if traj.classification.kind != "periodic":
        raise RegimeError("trajectory is not periodic")
    phi, s, x = traj.phi, traj.slope, traj.x
    up = np.flatnonzero((phi[1:-1] < math.pi) & (phi[2:] >= math.pi) & (s[2:] > 0)) + 1
    if up.size == 0:
        raise RegimeError("trajectory shorter than one period; increase x_max")
    i = int(up[0])
    xc = _hermite_crossing(x[i], x[i + 1], phi[i], phi[i + 1], s[i], s[i + 1], math.pi)
    rho = traj.rho
    frac = (xc - x[i]) / (x[i + 1] - x[i])
    rho_c = rho[i] + frac * (rho[i + 1] - rho[i])
    energy = float(np.trapezoid(rho[: i + 1], x[: i + 1])) + 0.5 * (rho[i] + rho_c) * (xc - x[i])
    return 0.5 * xc, 0.5 * energy
