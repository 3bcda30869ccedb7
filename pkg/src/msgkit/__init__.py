"""msgkit: static solutions, equations of state and linear stability of
multiple-sine-Gordon field theories."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    FieldState,
    ModelParams,
    StressSample,
    potential,
    potential_derivative,
    potential_second_derivative,
    stress,
    topological_charge,
)
