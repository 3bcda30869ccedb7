"""Expansion of periodic functions in the MSG basis.

The basis functions are ``F_N(phi) = 1 + eps - cos(phi) - eps*cos(N*phi)``.
Because every F_N vanishes at the vacuum, only functions with
``f(0) = f(2*pi) = 0`` are representable.  The front end is a plain Fourier
cosine quadrature; the MSG coefficients follow by matching cosine harmonics.

Note that ``F_1 = (1 + eps) * F_0``, so the basis is linearly dependent.  The
mean-value identity ``sum(a) = mean(f) / (1 + eps)`` used here fixes that
freedom and always yields ``a_0 = 0``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "ExpansionWarning",
    "PeriodicFunction",
    "ExpansionResult",
    "basis_function",
    "fourier_cosine_coefficients",
    "expand_in_msg_basis",
    "synthesize",
    "triangle_wave",
    "raised_cosine",
    "builtin_function",
    "BUILTIN_FUNCTIONS",
]

TWO_PI = 2.0 * math.pi
N_PANELS = 4096
BOUNDARY_TOL = 1e-9
SUM_RULE_TOL = 1e-3
DECAY_RATIO = 1e-6


class ExpansionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PeriodicFunction:
    """A function on one period [0, 2*pi] that vanishes at both ends."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str = "f"

    def __post_init__(self):
        ends = np.asarray(self.evaluator(np.array([0.0, TWO_PI])), dtype=float)
        if np.any(np.abs(ends) > BOUNDARY_TOL):
            raise ValueError(
                f"{self.label}: f(0)={ends[0]:.3g}, f(2pi)={ends[1]:.3g}; "
                "MSG expansion needs f(0) = f(2pi) = 0"
            )

    def __call__(self, phi):
        return self.evaluator(phi)


@dataclass(frozen=True)
class ExpansionResult:
    fourier_coeffs: np.ndarray
    msg_coeffs: np.ndarray
    coeff_sum: float
    epsilon: float
    truncation: int
    label: str = field(default="f", compare=False)

    def reconstruct(self, phi):
        """Evaluate sum_N a_N F_N(phi)."""
        return synthesize(self.msg_coeffs, self.epsilon, phi)


def basis_function(n: int, epsilon: float, phi):
    return 1.0 + epsilon - np.cos(phi) - epsilon * np.cos(n * phi)


def synthesize(coeffs, epsilon: float, phi):
    phi = np.asarray(phi, dtype=float)
    total = np.zeros_like(phi)
    for n, a in enumerate(coeffs):
        total = total + a * basis_function(n, epsilon, phi)
    return total


def _simpson_grid():
    phi = np.linspace(0.0, TWO_PI, N_PANELS + 1)
    w = np.ones(N_PANELS + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (TWO_PI / N_PANELS) / 3.0
    return phi, w


def _integrate(values, weights):
    # np.sum uses pairwise summation: deterministic and well conditioned
    return float(np.sum(values * weights))


def fourier_cosine_coefficients(f: PeriodicFunction, truncation: int) -> np.ndarray:
    """Cosine coefficients b_0..b_M of f with b_0 the mean value.

    Composite Simpson on 4096 panels.  Warns with :class:`ExpansionWarning`
    when the truncated sum rule ``sum(b) = f(0) = 0`` is off by more than 1e-3.
    """
    if truncation < 0:
        raise ValueError("truncation must be >= 0")
    phi, w = _simpson_grid()
    fv = np.asarray(f(phi), dtype=float)
    b = np.empty(truncation + 1)
    b[0] = _integrate(fv, w) / TWO_PI
    for n in range(1, truncation + 1):
        b[n] = _integrate(fv * np.cos(n * phi), w) / math.pi
    residual = float(np.sum(b))
    if abs(residual) > SUM_RULE_TOL:
        warnings.warn(
            f"{f.label}: sum of b_0..b_{truncation} = {residual:.3g}, expected 0 "
            "(slow convergence or f(0) != 0)",
            ExpansionWarning,
            stacklevel=2,
        )
    return b


def expand_in_msg_basis(f: PeriodicFunction, epsilon: float, truncation: int) -> ExpansionResult:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0 for the MSG expansion, got {epsilon}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExpansionWarning)
        b = fourier_cosine_coefficients(f, truncation)
    residual = float(np.sum(b))
    if abs(residual) > SUM_RULE_TOL:
        warnings.warn(
            f"{f.label}: sum of b_0..b_{truncation} = {residual:.3g}, expected 0",
            ExpansionWarning,
            stacklevel=2,
        )

    phi, w = _simpson_grid()
    coeff_sum = _integrate(np.asarray(f(phi), dtype=float), w) / (TWO_PI * (1.0 + epsilon))

    a = np.empty_like(b)
    a[0] = ((1.0 + epsilon) * coeff_sum - b[0]) / epsilon
    if truncation >= 1:
        a[1] = -(coeff_sum + b[1]) / epsilon
    a[2:] = -b[2:] / epsilon

    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if truncation >= 2 and scale > 0 and abs(a[-1]) >= DECAY_RATIO * scale:
        warnings.warn(
            f"{f.label}: |a_{truncation}| = {abs(a[-1]):.3g} has not decayed below "
            f"{DECAY_RATIO:g} of max|a|; increase the truncation",
            ExpansionWarning,
            stacklevel=2,
        )
    return ExpansionResult(
        fourier_coeffs=b,
        msg_coeffs=a,
        coeff_sum=coeff_sum,
        epsilon=float(epsilon),
        truncation=int(truncation),
        label=f.label,
    )


def _triangle(phi):
    phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
    return np.where(phi <= math.pi, phi, TWO_PI - phi)


def triangle_wave() -> PeriodicFunction:
    """phi on [0, pi], 2*pi - phi on [pi, 2*pi], extended periodically."""
    return PeriodicFunction(_triangle, "triangle")


def raised_cosine(power: int = 1) -> PeriodicFunction:
    """((1 - cos(phi)) / 2) ** power, a smooth pulse centred on pi."""
    return PeriodicFunction(
        lambda phi: (0.5 * (1.0 - np.cos(np.asarray(phi, dtype=float)))) ** power,
        f"raised-cosine{power}",
    )


BUILTIN_FUNCTIONS = {
    "triangle": triangle_wave,
    "raised-cosine": lambda: raised_cosine(1),
    "raised-cosine2": lambda: raised_cosine(2),
    "raised-cosine3": lambda: raised_cosine(3),
}


def builtin_function(label: str) -> PeriodicFunction:
    try:
        return BUILTIN_FUNCTIONS[label]()
    except KeyError:
        raise ValueError(
            f"unknown function {label!r}; choose from {', '.join(sorted(BUILTIN_FUNCTIONS))}"
        ) from None
