"""Finite-temperature Casimir pressure between two plates in a medium.

P(a, T) = -(k_B T / 8 pi a^3) sum'_l int_{sqrt(eps0) zeta_l}^inf y^2 dy
          [ (e^y / (r_TM1 r_TM2) - 1)^-1 + (e^y / (r_TE1 r_TE2) - 1)^-1 ]

The primed sum gives the l = 0 term weight 1/2. Negative pressure is
attraction, positive pressure is repulsion.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, replace
from collections import deque
from typing import Deque, Optional, Sequence, Tuple

from .constants import CODATA, PhysicalConstants
from .materials import PermittivityModel
from .operators import DomainError, adaptive_simpson, r_te, r_tm

logger = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    """Raised when the y-integral or the Matsubara sum does not converge.

    Attributes
    ----------
        partial: the value accumulated so far (a float for one Matsubara
            term, a `PressurePoint` for a pressure)
        separation: plate separation, m
        l: Matsubara index of a failing term

    """

    def __init__(
        self,
        message: str,
        partial: object = None,
        separation: Optional[float] = None,
        l: Optional[int] = None,
    ):
        super().__init__(message)
        self.partial = partial
        self.separation = separation
        self.l = l


@dataclass(frozen=True)
class QuadratureSettings:
    """Truncation and tolerance knobs for the Matsubara sum and the y-integral.

    Attributes
    ----------
        rel_tol: relative tolerance on the pressure, in (0, 1e-2]
        max_matsubara: largest Matsubara index evaluated
        y_upper_margin: the y-integral runs from its lower limit to
            lower limit + y_upper_margin
        max_subdivisions: maximum bisection depth of the adaptive Simpson rule

    """

    rel_tol: float = 1e-6
    max_matsubara: int = 5000
    y_upper_margin: float = 60.0
    max_subdivisions: int = 30

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_tol <= 1e-2:
            raise ValueError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol}")
        if self.max_matsubara < 1:
            raise ValueError(f"max_matsubara must be >= 1, got {self.max_matsubara}")
        if not self.y_upper_margin >= 20.0:
            raise ValueError(f"y_upper_margin must be >= 20, got {self.y_upper_margin}")
        if self.max_subdivisions < 3:
            raise ValueError(f"max_subdivisions must be >= 3, got {self.max_subdivisions}")

    def halved(self) -> QuadratureSettings:
        """Same settings with half the relative tolerance."""
        return replace(self, rel_tol=0.5 * self.rel_tol)


DEFAULT_SETTINGS = QuadratureSettings()


@dataclass(frozen=True)
class LayerSystem:
    """Plate 1 | medium | plate 2 at temperature `temperature` (K)."""

    plate1: PermittivityModel
    medium: PermittivityModel
    plate2: PermittivityModel
    temperature: float = 300.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.temperature) and self.temperature > 0.0):
            raise ValueError(f"temperature must be > 0 K, got {self.temperature}")
        if self.medium.perfect_conductor or math.isinf(self.medium.static_permittivity()):
            raise ValueError("The medium between the plates must have a finite eps(0)")

    def swapped(self) -> LayerSystem:
        return LayerSystem(self.plate2, self.medium, self.plate1, self.temperature)


@dataclass(frozen=True)
class PressurePoint:
    """Casimir pressure at one separation.

    Attributes
    ----------
        separation: m
        pressure: Pa, negative = attraction, positive = repulsion
        terms_used: number of Matsubara terms evaluated
        est_error: bound on truncation + quadrature error, Pa

    """

    separation: float
    pressure: float
    terms_used: int
    est_error: float

    def __post_init__(self) -> None:
        if not self.est_error >= 0.0:
            raise ValueError(f"est_error must be >= 0, got {self.est_error}")
        if self.terms_used < 1:
            raise ValueError(f"terms_used must be >= 1, got {self.terms_used}")

    @property
    def attractive(self) -> bool:
        return self.pressure < 0.0

    @property
    def repulsive(self) -> bool:
        return self.pressure > 0.0


def matsubara_frequency(
    l: int, temperature: float, constants: PhysicalConstants = CODATA
) -> float:
    """xi_l = 2 pi k_B T l / hbar, rad/s."""
    return 2.0 * math.pi * constants.k_b * temperature * l / constants.hbar


def matsubara_zeta(
    l: int, separation: float, temperature: float, constants: PhysicalConstants = CODATA
) -> float:
    """Dimensionless Matsubara frequency zeta_l = 2 a xi_l / c = 4 pi k_B T a l / (hbar c)."""
    if l < 0:
        raise DomainError(f"Matsubara index must be >= 0, got {l}")
    if not separation > 0.0:
        raise DomainError(f"separation must be > 0, got {separation}")
    if not temperature > 0.0:
        raise DomainError(f"temperature must be > 0, got {temperature}")
    return (
        4.0 * math.pi * constants.k_b * temperature * separation * l
        / (constants.hbar * constants.c_light)
    )


def _check_reflection_args(eps_plate: float, eps_medium: float, zeta: float, y: float) -> None:
    if not eps_plate >= 1.0:
        raise DomainError(f"plate permittivity must be >= 1, got {eps_plate}")
    if not (math.isfinite(eps_medium) and eps_medium >= 1.0):
        raise DomainError(f"medium permittivity must be finite and >= 1, got {eps_medium}")
    if not (math.isfinite(zeta) and zeta >= 0.0):
        raise DomainError(f"zeta must be >= 0, got {zeta}")
    lower = math.sqrt(eps_medium) * zeta
    if not (y >= 0.0 and y >= lower * (1.0 - 1e-12)):
        raise DomainError(f"y = {y} lies below the integration limit {lower}")


def reflection_tm(eps_plate: float, eps_medium: float, zeta: float, y: float) -> float:
    """TM reflection coefficient for a plate immersed in a medium.

    (eps_p y - eps_0 q) / (eps_p y + eps_0 q), q = sqrt(y^2 + (eps_p - eps_0) zeta^2)

    Raises
    ------
        DomainError: for eps < 1 or y < sqrt(eps_medium) zeta.

    """
    _check_reflection_args(eps_plate, eps_medium, zeta, y)
    return float(r_tm(float(eps_plate), float(eps_medium), float(zeta), float(y)))


def reflection_te(eps_plate: float, eps_medium: float, zeta: float, y: float) -> float:
    """TE reflection coefficient for a plate immersed in a medium.

    (q - y) / (q + y), q = sqrt(y^2 + (eps_p - eps_0) zeta^2)
    """
    _check_reflection_args(eps_plate, eps_medium, zeta, y)
    return float(r_te(float(eps_plate), float(eps_medium), float(zeta), float(y)))


def zero_frequency_reflection(
    plate: PermittivityModel, medium: PermittivityModel
) -> Tuple[float, float]:
    """(r_TM, r_TE) of `plate` in the limit zeta -> 0.

    TM: +1 when eps(0) diverges, else (eps(0) - eps0(0)) / (eps(0) + eps0(0)).
    TE: +1 for an ideal metal, 0 otherwise (Drude metals included).
    """
    eps_medium = medium.static_permittivity()
    eps_plate = plate.static_permittivity()
    if math.isinf(eps_plate):
        tm = 1.0
    else:
        tm = (eps_plate - eps_medium) / (eps_plate + eps_medium)
    te = 1.0 if plate.perfect_conductor else 0.0
    return tm, te


def _matsubara_term(
    system: LayerSystem,
    separation: float,
    l: int,
    settings: QuadratureSettings,
    constants: PhysicalConstants,
) -> Tuple[float, float]:
    zeta = matsubara_zeta(l, separation, system.temperature, constants)
    if l == 0:
        tm1, te1 = zero_frequency_reflection(system.plate1, system.medium)
        tm2, te2 = zero_frequency_reflection(system.plate2, system.medium)
        rho_tm0, rho_te0 = tm1 * tm2, te1 * te2
        eps1 = eps2 = eps0 = 1.0
        lower = 0.0
    else:
        xi = matsubara_frequency(l, system.temperature, constants)
        eps1 = system.plate1.evaluate(xi)
        eps2 = system.plate2.evaluate(xi)
        eps0 = system.medium.evaluate(xi)
        rho_tm0 = rho_te0 = 0.0
        lower = math.sqrt(eps0) * zeta
    value, error, converged = adaptive_simpson(
        lower,
        lower + settings.y_upper_margin,
        0.1 * settings.rel_tol,
        settings.max_subdivisions,
        eps1,
        eps2,
        eps0,
        zeta,
        rho_tm0,
        rho_te0,
    )
    if not converged:
        raise ConvergenceError(
            f"y-integral of Matsubara term l={l} at a={separation:g} m did not converge "
            f"within {settings.max_subdivisions} subdivisions",
            partial=value,
            separation=separation,
            l=l,
        )
    return value, error


def matsubara_term(
    system: LayerSystem,
    separation: float,
    l: int,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    constants: PhysicalConstants = CODATA,
) -> float:
    """The y-integral of Matsubara term `l`, without the 1/2 weight of l = 0.

    Args:
    ----
        system: plates, medium and temperature.
        separation: plate separation, m.
        l: Matsubara index, >= 0.
        settings: quadrature settings.
        constants: physical constants.

    Returns:
    -------
        float: dimensionless term value.

    Raises:
    ------
        ConvergenceError: if the adaptive integration does not converge.

    """
    return _matsubara_term(system, separation, l, settings, constants)[0]


def _tail_estimate(recent: Sequence[float]) -> float:
    """Bound on the sum of the truncated terms from the last few |terms|.

    Uses the largest recent term and the slowest recent decay ratio, doubled.
    """
    if not recent or max(recent) == 0.0:
        return 0.0
    ratio = 0.0
    for previous, last in zip(recent, recent[1:]):
        ratio = max(ratio, last / previous if previous != 0.0 else 0.999)
    ratio = min(ratio, 0.999) if len(recent) > 1 else 0.999
    return 2.0 * max(recent[1:] or recent) * ratio / (1.0 - ratio)


def pressure(
    system: LayerSystem,
    separation: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    constants: PhysicalConstants = CODATA,
) -> PressurePoint:
    """Casimir pressure between the plates of `system` at `separation`.

    The Matsubara sum stops once three consecutive terms each fall below
    rel_tol/10 of the accumulated sum (or of 1e-3 of the largest term when
    the sum nearly cancels).

    Args:
    ----
        system: plates, medium and temperature.
        separation: plate separation, m.
        settings: quadrature settings.
        constants: physical constants.

    Returns:
    -------
        PressurePoint: pressure in Pa, negative for attraction.

    Raises:
    ------
        ConvergenceError: if the sum is not converged at `max_matsubara`, or
            a y-integral fails.

    """
    if not (math.isfinite(separation) and separation > 0.0):
        raise DomainError(f"separation must be > 0, got {separation}")
    prefactor = -constants.k_b * system.temperature / (8.0 * math.pi * separation**3)

    total = 0.0
    quadrature_error = 0.0
    magnitude = 0.0
    largest = 0.0
    quiet = 0
    term = 0.0
    recent: Deque[float] = deque(maxlen=4)
    threshold = 0.1 * settings.rel_tol
    l = 0
    for l in range(settings.max_matsubara + 1):
        value, error = _matsubara_term(system, separation, l, settings, constants)
        weight = 0.5 if l == 0 else 1.0
        term = weight * value
        total += term
        quadrature_error += weight * error
        magnitude += abs(term)
        largest = max(largest, abs(term))
        if l == 0:
            continue
        recent.append(abs(term))
        scale = max(abs(total), 1e-3 * largest)
        quiet = quiet + 1 if abs(term) <= threshold * scale else 0
        if quiet >= 3:
            break
    else:
        partial = PressurePoint(
            separation,
            prefactor * total + 0.0,
            l + 1,
            abs(prefactor) * (quadrature_error + abs(term)),
        )
        raise ConvergenceError(
            f"Matsubara sum at a={separation:g} m not converged after "
            f"{settings.max_matsubara} terms",
            partial=partial,
            separation=separation,
        )

    # quadrature and tail estimates carry a safety factor of 2
    tail = _tail_estimate(list(recent))
    rounding = 8.0 * sys.float_info.epsilon * magnitude
    est_error = abs(prefactor) * (2.0 * quadrature_error + tail + rounding)
    point = PressurePoint(separation, prefactor * total + 0.0, l + 1, est_error)
    logger.debug(
        "a=%.6g m: P=%.6g Pa (+/- %.2g) from %d Matsubara terms",
        separation,
        point.pressure,
        est_error,
        point.terms_used,
    )
    return point
