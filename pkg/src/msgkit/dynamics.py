"""Linear stability around fixed points and finite-difference evolution.

Small perturbations ``phi_n + A cos(kx) cos(wt)`` of a fixed point obey
``w**2 = k**2 + f_n`` with ``f_n = V''(phi_n)``; negative ``f_n`` makes every
wavelength longer than ``2*pi/sqrt(-f_n)`` grow.  :func:`evolve` checks this
with a leapfrog integration of the full nonlinear field equation on a
periodic domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUp, CflViolation, NotAFixedPoint
from .model import ModelParams, potential, potential_derivative, potential_second_derivative

__all__ = [
    "DispersionResult",
    "PerturbationSpec",
    "EvolutionRecord",
    "dispersion",
    "critical_wavelength",
    "evolve",
    "mode_spectrum",
    "growth_rate",
    "oscillation_frequency",
]

FIXED_POINT_TOL = 1e-8
MAX_AMPLITUDE = 0.1


@dataclass(frozen=True)
class DispersionResult:
    k: float
    omega_sq: float
    stable: bool


def _mass_term(params, phi_n):
    residual = float(potential_derivative(params, phi_n))
    if abs(residual) > FIXED_POINT_TOL:
        raise NotAFixedPoint(f"phi_n={phi_n!r} is not a fixed point (residual {residual:.3g})")
    return float(potential_second_derivative(params, phi_n))


def dispersion(params: ModelParams, phi_n: float, k: float) -> DispersionResult:
    omega_sq = k * k + _mass_term(params, phi_n)
    return DispersionResult(float(k), omega_sq, omega_sq > 0)


def critical_wavelength(params: ModelParams, phi_n: float) -> float | None:
    """Longest stable wavelength, or None when every wavelength is stable."""
    f_n = _mass_term(params, phi_n)
    if f_n >= 0:
        return None
    return 2.0 * math.pi / math.sqrt(-f_n)


@dataclass(frozen=True)
class PerturbationSpec:
    """Standing-wave perturbation ``amplitude * cos(k x)`` of the fixed point phi_n.

    ``extra_k`` superposes further modes of the same amplitude; every mode
    must fit the periodic domain an integer number of times.
    """

    phi_n: float
    amplitude: float
    k: float
    domain_length: float
    dx: float = 0.05
    dt: float = 0.02
    steps: int = 200
    snapshot_every: int = 10
    extra_k: tuple[float, ...] = ()

    def __post_init__(self):
        if not 0 <= self.amplitude <= MAX_AMPLITUDE:
            raise ValueError(f"amplitude must lie in [0, {MAX_AMPLITUDE}] (linear regime), got {self.amplitude}")
        if self.dx <= 0 or self.dt <= 0 or self.domain_length <= 0:
            raise ValueError("dx, dt and domain_length must be positive")
        if self.steps < 1 or self.snapshot_every < 1:
            raise ValueError("steps and snapshot_every must be >= 1")
        for k in self.wavenumbers:
            if k <= 0:
                raise ValueError(f"wave numbers must be positive, got {k}")
            cycles = k * self.domain_length / (2.0 * math.pi)
            if abs(cycles - round(cycles)) > 1e-9 * max(1.0, cycles):
                raise ValueError(
                    f"k={k} does not fit the periodic domain: k*L/2pi = {cycles:.6g} is not an integer"
                )
        if self.dt > 0.5 * self.grid_spacing:
            raise CflViolation(
                f"dt={self.dt} exceeds 0.5*dx={0.5 * self.grid_spacing:.6g} "
                "(CFL bound dt <= dx with a factor-2 margin)"
            )

    @property
    def wavenumbers(self) -> tuple[float, ...]:
        return (self.k,) + tuple(self.extra_k)

    @property
    def n_points(self) -> int:
        return max(4, int(round(self.domain_length / self.dx)))

    @property
    def grid_spacing(self) -> float:
        """dx rounded so an integer number of cells fills the domain."""
        return self.domain_length / self.n_points

    @classmethod
    def fitted(cls, phi_n, amplitude, k, wavelengths=1, **kw):
        """Spec whose domain holds ``wavelengths`` periods of the mode k."""
        return cls(phi_n, amplitude, k, wavelengths * 2.0 * math.pi / k, **kw)


@dataclass(eq=False)
class EvolutionRecord:
    spec: PerturbationSpec
    x: np.ndarray
    times: np.ndarray
    snapshots: np.ndarray  # (n_snapshots, n_points)
    wavenumbers: np.ndarray
    mode_coefficients: np.ndarray  # complex, (n_snapshots, n_modes)
    energies: np.ndarray
    mode_amplitudes: np.ndarray = field(init=False)

    def __post_init__(self):
        self.mode_amplitudes = np.abs(self.mode_coefficients)

    def _index(self, k):
        j = int(np.argmin(np.abs(self.wavenumbers - k)))
        if not math.isclose(self.wavenumbers[j], k, rel_tol=1e-9):
            raise ValueError(f"k={k} is not a grid wave number")
        return j

    def mode(self, k: float) -> np.ndarray:
        """Amplitude history of the mode with wave number k."""
        return self.mode_amplitudes[:, self._index(k)]

    def mode_signed(self, k: float) -> np.ndarray:
        """Cosine-component history of mode k (real part of its coefficient)."""
        return self.mode_coefficients[:, self._index(k)].real

    @property
    def energy_drift(self) -> float:
        """max |E(t) - E(0)| / |E(0)| over the recorded snapshots."""
        e0 = self.energies[0]
        return float(np.max(np.abs(self.energies - e0)) / abs(e0)) if e0 else float(np.max(np.abs(self.energies)))


def _fourier(field_values):
    n = field_values.size
    c = np.fft.rfft(field_values - field_values.mean()) / n
    c[1 : (n + 1) // 2] *= 2.0
    return c


def mode_spectrum(snapshot, dx: float):
    """Wave numbers ``2*pi*j/L`` and cosine-mode amplitudes of a periodic field."""
    snapshot = np.asarray(snapshot, dtype=float)
    n = snapshot.size
    k = 2.0 * math.pi * np.arange(n // 2 + 1) / (n * dx)
    return k, np.abs(_fourier(snapshot))


def _energy(params, cur, nxt, dx, dt):
    """Staggered leapfrog energy between time levels n and n+1.

    The kinetic and gradient parts are the ones leapfrog conserves exactly for
    the linear wave equation; the potential is averaged over the two levels.
    """
    v = (nxt - cur) / dt
    grad_cur = (np.roll(cur, -1) - cur) / dx
    grad_nxt = (np.roll(nxt, -1) - nxt) / dx
    pot = 0.5 * (potential(params, cur) + potential(params, nxt))
    return float(np.sum(0.5 * v * v + 0.5 * grad_cur * grad_nxt + pot) * dx)


def evolve(params: ModelParams, spec: PerturbationSpec) -> EvolutionRecord:
    """Leapfrog evolution of ``phi_tt = phi_xx - V'(phi)`` from a resting perturbation."""
    _mass_term(params, spec.phi_n)
    n, dx, dt = spec.n_points, spec.grid_spacing, spec.dt
    if dt > dx:
        raise CflViolation(f"dt={dt} > dx={dx}")
    x = np.arange(n) * dx
    cur = np.full(n, float(spec.phi_n))
    for k in spec.wavenumbers:
        cur = cur + spec.amplitude * np.cos(k * x)

    def accel(f):
        lap = (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / (dx * dx)
        return lap - potential_derivative(params, f)

    # zero initial velocity: second-order Taylor start
    nxt = cur + 0.5 * dt * dt * accel(cur)
    prev = cur

    times, snaps, coeffs, energies = [], [], [], []
    for step in range(spec.steps + 1):
        if step > 0:
            prev, cur = cur, nxt
            nxt = 2.0 * cur - prev + dt * dt * accel(cur)
        excursion = float(np.max(np.abs(cur - spec.phi_n)))
        if excursion > math.pi:
            raise BlowUp(
                f"perturbation reached |phi - phi_n| = {excursion:.3g} > pi at step {step}", step=step
            )
        if step % spec.snapshot_every == 0 or step == spec.steps:
            times.append(step * dt)
            snaps.append(cur.copy())
            coeffs.append(_fourier(cur))
            energies.append(_energy(params, cur, nxt, dx, dt))

    wavenumbers = 2.0 * math.pi * np.arange(n // 2 + 1) / (n * dx)
    return EvolutionRecord(
        spec=spec,
        x=x,
        times=np.array(times),
        snapshots=np.array(snaps),
        wavenumbers=wavenumbers,
        mode_coefficients=np.array(coeffs),
        energies=np.array(energies),
    )


def growth_rate(times, amplitudes) -> float:
    """Rate g of a resting unstable mode, fitted as ``a(t) = a(0) cosh(g t)`` at the last sample."""
    times = np.asarray(times, dtype=float)
    amplitudes = np.asarray(amplitudes, dtype=float)
    ratio = amplitudes[-1] / amplitudes[0]
    if ratio <= 1:
        return 0.0
    return float(np.arccosh(ratio) / (times[-1] - times[0]))


def oscillation_frequency(times, signal) -> float:
    """Angular frequency from the first and last zero crossings of an oscillating signal."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(signal, dtype=float)
    idx = np.flatnonzero(np.sign(y[1:]) * np.sign(y[:-1]) < 0)
    if idx.size < 2:
        raise ValueError("need at least two zero crossings")
    cross = t[idx] - y[idx] * (t[idx + 1] - t[idx]) / (y[idx + 1] - y[idx])
    return float(math.pi * (cross.size - 1) / (cross[-1] - cross[0]))
