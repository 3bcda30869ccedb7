"""Static MSG solutions by fixed-step RK4, plus the kink quadratures.

The static equation ``phi'' = V'(phi)`` is integrated as the first-order
system ``(phi, s)' = (s, V'(phi))`` from the launch point ``phi(0) = pi``.
Its first integral ``P = s**2/2 - V(phi)`` (the pressure) is monitored on
every step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit
from scipy.integrate import quad

from ._signal import count_maxima, lobes_to_subkinks
from .errors import ConservationViolation, DomainError, NonMonotone, RegimeError
from .model import FieldState, ModelParams, potential, potential_second_derivative

__all__ = [
    "SolverConfig",
    "SolutionClass",
    "Trajectory",
    "KinkProfile",
    "STEP_LIKE",
    "PERIODIC",
    "SEPARATRIX_KINK",
    "EQUILIBRIUM",
    "classify_pressure",
    "launch_slope",
    "rk4_step",
    "rk4_run",
    "integrate",
    "kink_profile",
    "kink_energy_quadrature",
    "kink_position_quadrature",
]

TWO_PI = 2.0 * math.pi
STEP_LIKE = "step_like"
PERIODIC = "periodic"
SEPARATRIX_KINK = "separatrix_kink"
EQUILIBRIUM = "equilibrium"
SEPARATRIX_TOL = 1e-12
KINK_DELTA = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    step: float = 1e-3
    x_max: float = 100.0
    conservation_tol: float = 1e-6

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive, got {self.step}")
        if not (self.x_max > self.step and math.isfinite(self.x_max)):
            raise ValueError(f"x_max must exceed the step, got {self.x_max}")
        if not self.conservation_tol > 0:
            raise ValueError("conservation_tol must be positive")

    @property
    def n_steps(self) -> int:
        return int(round(self.x_max / self.step))


@dataclass(frozen=True)
class SolutionClass:
    kind: str
    subkinks: int | None = None


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled static solution launched from phi = pi."""

    params: ModelParams
    x: np.ndarray
    phi: np.ndarray
    slope: np.ndarray
    pressure: float
    classification: SolutionClass
    config: SolverConfig
    mirrored: bool = False

    @property
    def states(self):
        return [FieldState(float(a), float(b), float(c)) for a, b, c in zip(self.x, self.phi, self.slope)]

    @property
    def rho(self) -> np.ndarray:
        return 0.5 * self.slope**2 + potential(self.params, self.phi)

    @property
    def pressure_samples(self) -> np.ndarray:
        return 0.5 * self.slope**2 - potential(self.params, self.phi)

    @property
    def drift(self) -> float:
        return float(np.max(np.abs(self.pressure_samples - self.pressure)))


@dataclass(frozen=True, eq=False)
class KinkProfile:
    params: ModelParams
    x: np.ndarray
    phi: np.ndarray
    slope: np.ndarray
    energy: float
    charge: int
    slope_maxima: int
    center: float = 0.0
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def subkinks(self) -> int:
        return lobes_to_subkinks(self.slope_maxima)

    @property
    def states(self):
        return [FieldState(float(a), float(b), float(c)) for a, b, c in zip(self.x, self.phi, self.slope)]

    @property
    def rho(self) -> np.ndarray:
        return 0.5 * self.slope**2 + potential(self.params, self.phi)


# --- numba kernels -----------------------------------------------------------

@njit(cache=True)
def _force(phi, n, eps):
    return math.sin(phi) + n * eps * math.sin(n * phi)


@njit(cache=True)
def _step(phi, s, h, n, eps):
    k1p = s
    k1s = _force(phi, n, eps)
    k2p = s + 0.5 * h * k1s
    k2s = _force(phi + 0.5 * h * k1p, n, eps)
    k3p = s + 0.5 * h * k2s
    k3s = _force(phi + 0.5 * h * k2p, n, eps)
    k4p = s + h * k3s
    k4s = _force(phi + h * k3p, n, eps)
    return (
        phi + h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0,
        s + h * (k1s + 2.0 * k2s + 2.0 * k3s + k4s) / 6.0,
    )


@njit(cache=True)
def _run(phi0, s0, h, n_steps, n, eps):
    phi = np.empty(n_steps + 1)
    s = np.empty(n_steps + 1)
    phi[0] = phi0
    s[0] = s0
    for i in range(n_steps):
        phi[i + 1], s[i + 1] = _step(phi[i], s[i], h, n, eps)
    return phi, s


@njit(cache=True)
def _shoot(phi0, s0, h, max_steps, n, eps, target, delta):
    """Integrate until |phi - target| < delta.  Status 0 ok, 1 slope sign flip, 2 ran out."""
    phi = np.empty(max_steps + 1)
    s = np.empty(max_steps + 1)
    phi[0] = phi0
    s[0] = s0
    for i in range(max_steps):
        phi[i + 1], s[i + 1] = _step(phi[i], s[i], h, n, eps)
        if s[i + 1] <= 0.0:
            return phi[: i + 2], s[: i + 2], 1
        if abs(phi[i + 1] - target) < delta:
            return phi[: i + 2], s[: i + 2], 0
    return phi, s, 2


# --- public API -------------------------------------------------------------

def launch_slope(params: ModelParams, pressure: float) -> float:
    """Slope at phi = pi that puts a trajectory on the given pressure level."""
    kinetic = pressure + params.v_center
    if kinetic < 0:
        raise RegimeError(
            f"P={pressure!r} is below -V(pi)={-params.v_center!r}; not reachable from phi=pi"
        )
    return math.sqrt(2.0 * kinetic)


def classify_pressure(params: ModelParams, pressure: float) -> str:
    """Solution kind of the trajectory launched from phi = pi at this pressure.

    Periodic for ``-V(pi) < P < 0``, step-like for ``P > 0``.
    """
    floor = -params.v_center
    if pressure < floor:
        raise RegimeError(
            f"P={pressure!r} outside the reachable range P >= -V(pi) = {floor!r}"
        )
    if pressure == floor:
        return EQUILIBRIUM
    if abs(pressure) <= SEPARATRIX_TOL:
        return SEPARATRIX_KINK
    return STEP_LIKE if pressure > 0 else PERIODIC


def rk4_step(params: ModelParams, state: FieldState, h: float) -> FieldState:
    if h == 0:
        raise ValueError("step must be nonzero")
    phi, s = _step(float(state.phi), float(state.slope), float(h), params.n_harmonic, params.epsilon)
    return FieldState(state.x + h, phi, s)


def rk4_run(params: ModelParams, phi0: float, slope0: float, h: float, n_steps: int):
    """Raw RK4 samples ``(phi, slope)`` of length ``n_steps + 1``; any sign of slope0 or h."""
    return _run(float(phi0), float(slope0), float(h), int(n_steps), params.n_harmonic, params.epsilon)


def _transit_subkinks(phi, slope):
    crossings = np.flatnonzero(np.sign(slope[1:]) != np.sign(slope[:-1]))
    if crossings.size < 2:
        return None
    i, j = crossings[0] + 1, crossings[1] + 1
    return lobes_to_subkinks(count_maxima(np.abs(slope[i:j])))


def _separatrix_subkinks(phi, slope):
    half = slope[(phi >= math.pi) & (phi <= TWO_PI)]
    if half.size < 3:
        return None
    full = np.concatenate([half[:0:-1], half])
    return lobes_to_subkinks(count_maxima(full))


def _steplike_subkinks(phi, slope):
    a = np.searchsorted(phi, TWO_PI)
    b = np.searchsorted(phi, 2.0 * TWO_PI)
    if b >= phi.size:
        return None
    return lobes_to_subkinks(count_maxima(slope[a : b + 1]))


def integrate(params: ModelParams, slope0: float, cfg: SolverConfig | None = None) -> Trajectory:
    """Trajectory from ``(x=0, phi=pi, slope=slope0)`` over ``[0, x_max]``.

    A negative ``slope0`` is integrated as its mirror image ``phi -> 2*pi - phi``
    and flagged with ``mirrored=True``.
    """
    cfg = cfg or SolverConfig()
    mirrored = slope0 < 0
    s0 = abs(float(slope0))
    n_steps = cfg.n_steps
    phi, slope = _run(math.pi, s0, cfg.step, n_steps, params.n_harmonic, params.epsilon)
    pressure = 0.5 * s0 * s0 - params.v_center
    samples = 0.5 * slope**2 - potential(params, phi)
    drift = float(np.max(np.abs(samples - pressure)))
    if not drift <= cfg.conservation_tol:
        raise ConservationViolation(
            f"|P(x) - P(0)| reached {drift:.3g} > {cfg.conservation_tol:g}; reduce the step"
        )

    kind = classify_pressure(params, pressure)
    if kind == PERIODIC:
        subkinks = _transit_subkinks(phi, slope)
    elif kind == SEPARATRIX_KINK:
        subkinks = _separatrix_subkinks(phi, slope)
    elif kind == STEP_LIKE:
        subkinks = _steplike_subkinks(phi, slope)
    else:
        subkinks = None

    if mirrored:
        phi = TWO_PI - phi
        slope = -slope
    x = np.arange(n_steps + 1) * cfg.step
    return Trajectory(
        params=params,
        x=x,
        phi=phi,
        slope=slope,
        pressure=pressure,
        classification=SolutionClass(kind, subkinks),
        config=cfg,
        mirrored=mirrored,
    )


def kink_profile(params: ModelParams, cfg: SolverConfig | None = None, max_refinements: int = 4) -> KinkProfile:
    """Single kink from 0 to 2*pi, shot both ways from its centre ``phi(0) = pi``.

    Tails are cut where the field is within 1e-6 of a vacuum; the energy left
    in each cut tail is added from the exponential asymptote.  When RK4 error
    pushes a tail off the separatrix before the cut (slope turning back), the
    step is halved up to ``max_refinements`` times; the step actually used is
    kept in ``profile.config``.
    """
    cfg = cfg or SolverConfig()
    n, eps = params.n_harmonic, params.epsilon
    s0 = math.sqrt(2.0 * params.v_center)
    for attempt in range(max_refinements + 1):
        max_steps = cfg.n_steps
        right_phi, right_s, status_r = _shoot(math.pi, s0, cfg.step, max_steps, n, eps, TWO_PI, KINK_DELTA)
        left_phi, left_s, status_l = _shoot(math.pi, s0, -cfg.step, max_steps, n, eps, 0.0, KINK_DELTA)
        if status_r == 2 or status_l == 2:
            raise NonMonotone(f"kink tail did not reach the vacuum within x_max={cfg.x_max}")
        if status_r == 0 and status_l == 0:
            break
        if attempt == max_refinements:
            raise NonMonotone(
                f"kink tail turned back before reaching the vacuum at step {cfg.step:g}; reduce the step"
            )
        cfg = replace(cfg, step=0.5 * cfg.step)

    phi = np.concatenate([left_phi[:0:-1], right_phi])
    slope = np.concatenate([left_s[:0:-1], right_s])
    x = np.arange(-(left_phi.size - 1), right_phi.size) * cfg.step
    rho = 0.5 * slope**2 + potential(params, phi)
    mass = math.sqrt(float(potential_second_derivative(params, 0.0)))
    tails = 0.5 * mass * (phi[0] ** 2 + (TWO_PI - phi[-1]) ** 2)
    energy = float(np.trapezoid(rho, x)) + tails
    return KinkProfile(
        params=params,
        x=x,
        phi=phi,
        slope=slope,
        energy=energy,
        charge=int(round((phi[-1] - phi[0]) / TWO_PI)),
        slope_maxima=count_maxima(slope),
        config=cfg,
    )


def kink_energy_quadrature(params: ModelParams) -> float:
    """Single-kink energy as the integral of sqrt(2 V) over one period of phi."""
    value, _ = quad(
        lambda p: math.sqrt(max(2.0 * float(potential(params, p)), 0.0)),
        0.0,
        TWO_PI,
        limit=400,
        epsabs=1e-13,
        epsrel=1e-13,
        points=[math.pi],
    )
    return value


def _half_kink_position(params: ModelParams, phi: float) -> float:
    # phi in (0, pi]: integrate in u = log(psi) to tame the 1/psi tail
    def integrand(u):
        psi = math.exp(u)
        return psi / math.sqrt(2.0 * float(potential(params, psi)))

    value, _ = quad(integrand, math.log(phi), math.log(math.pi), limit=400, epsabs=1e-13, epsrel=1e-12)
    return -value


def kink_position_quadrature(params: ModelParams, phi: float) -> float:
    """Position x(phi) on the kink centred at x=0 where phi = pi."""
    if not 0.0 < phi < TWO_PI:
        raise DomainError(f"phi={phi!r} outside the open interval (0, 2pi)")
    if phi < 1e-12:
        return -math.inf
    if TWO_PI - phi < 1e-12:
        return math.inf
    if phi == math.pi:
        return 0.0
    if phi < math.pi:
        return _half_kink_position(params, phi)
    return -_half_kink_position(params, TWO_PI - phi)
