"""Multiple-sine-Gordon potential family and pointwise stress quantities.

All functions accept scalars or numpy arrays for ``phi``.  Field values are
never reduced modulo 2*pi; callers keep track of winding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "FieldState",
    "StressSample",
    "potential",
    "potential_derivative",
    "potential_second_derivative",
    "stress",
    "topological_charge",
]


@dataclass(frozen=True)
class ModelParams:
    """One MSG theory, ``V = 1 + eps - cos(phi) - eps*cos(n_harmonic*phi)``.

    ``n_harmonic=1`` is plain sine-Gordon, ``n_harmonic=2`` double sine-Gordon.
    """

    n_harmonic: int
    epsilon: float

    def __post_init__(self):
        if isinstance(self.n_harmonic, bool) or int(self.n_harmonic) != self.n_harmonic:
            raise ValueError(f"n_harmonic must be an integer, got {self.n_harmonic!r}")
        if self.n_harmonic < 1:
            raise ValueError(f"n_harmonic must be >= 1, got {self.n_harmonic}")
        if not math.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        object.__setattr__(self, "n_harmonic", int(self.n_harmonic))
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def v_center(self) -> float:
        """Potential at phi = pi, the launch point of every static trajectory."""
        return float(potential(self, math.pi))


@dataclass(frozen=True)
class FieldState:
    x: float
    phi: float
    slope: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.phi, self.slope)):
            raise ValueError(f"non-finite field state {self}")


@dataclass(frozen=True)
class StressSample:
    """Energy density ``rho = T^0_0`` and pressure ``P = -T^1_1``."""

    rho: float
    pressure: float


def potential(params: ModelParams, phi):
    n, eps = params.n_harmonic, params.epsilon
    return 1.0 + eps - np.cos(phi) - eps * np.cos(n * phi)


def potential_derivative(params: ModelParams, phi):
    """dV/dphi, the right-hand side of the static equation phi'' = V'(phi)."""
    n, eps = params.n_harmonic, params.epsilon
    return np.sin(phi) + n * eps * np.sin(n * phi)


def potential_second_derivative(params: ModelParams, phi):
    """V''(phi); at a fixed point this is the mass term of the dispersion relation."""
    n, eps = params.n_harmonic, params.epsilon
    return np.cos(phi) + n * n * eps * np.cos(n * phi)


def stress(params: ModelParams, state: FieldState) -> StressSample:
    kinetic = 0.5 * state.slope * state.slope
    v = float(potential(params, state.phi))
    return StressSample(rho=kinetic + v, pressure=kinetic - v)


def topological_charge(phi_left: float, phi_right: float) -> float:
    """Charge of a static configuration from its asymptotic field values."""
    return (phi_right - phi_left) / (2.0 * math.pi)
