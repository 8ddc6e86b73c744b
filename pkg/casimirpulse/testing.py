"""Closed-form references used to check the numerics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import numpy.typing as npt

from .constants import CODATA, PhysicalConstants
from .materials import OpticalDataTable

Values = Union[float, npt.NDArray[np.float64]]


@dataclass(frozen=True)
class LorentzOscillator:
    """eps(omega) = 1 + s w0^2 / (w0^2 - omega^2 - i gamma omega).

    Both its absorption on the real axis and eps(i xi) are known in closed
    form, which makes it the reference for the Kramers-Kronig transform.
    """

    strength: float = 1.0
    omega_0: float = 1e15
    gamma: float = 1e14

    def im_eps(self, omega: Values) -> Values:
        w = np.asarray(omega, dtype=np.float64)
        w0 = self.omega_0
        value = self.strength * w0**2 * self.gamma * w / ((w0**2 - w**2) ** 2 + (self.gamma * w) ** 2)
        return float(value) if value.ndim == 0 else value

    def eps_imag(self, xi: Values) -> Values:
        """eps(i xi)."""
        x = np.asarray(xi, dtype=np.float64)
        w0 = self.omega_0
        value = 1.0 + self.strength * w0**2 / (w0**2 + x**2 + self.gamma * x)
        return float(value) if value.ndim == 0 else value

    def optical_table(
        self, points: int = 2000, span: Tuple[float, float] = (1e-3, 1e3)
    ) -> OpticalDataTable:
        """Im eps sampled at `points` log-spaced frequencies span * omega_0."""
        omega = np.geomspace(span[0] * self.omega_0, span[1] * self.omega_0, points)
        return OpticalDataTable(tuple(omega), tuple(self.im_eps(omega)))


def ideal_metal_pressure(separation: float, constants: PhysicalConstants = CODATA) -> float:
    """Zero-temperature pressure between ideal metals in vacuum, -pi^2 hbar c / (240 a^4)."""
    return -(math.pi**2) * constants.hbar * constants.c_light / (240.0 * separation**4)
