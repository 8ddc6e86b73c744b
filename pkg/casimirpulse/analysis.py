"""Scenario-level computations on top of `pressure`.

Pressure-separation sweeps, location of the attraction/repulsion crossover,
light-on/off modulation and the quasi-static plate displacement.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from .constants import CODATA, PhysicalConstants
from .lifshitz import (
    DEFAULT_SETTINGS,
    ConvergenceError,
    LayerSystem,
    PressurePoint,
    QuadratureSettings,
    pressure,
)

logger = logging.getLogger(__name__)

Range = Tuple[float, float]


class CrossoverError(RuntimeError):
    """Raised when a pressure inside the crossover search fails to converge."""

    def __init__(self, message: str, separation: float):
        super().__init__(message)
        self.separation = separation


def _check_range(a_range: Range) -> Range:
    a_min, a_max = (float(a) for a in a_range)
    if not (math.isfinite(a_max) and 0.0 < a_min < a_max):
        raise ValueError(f"Separation range must satisfy 0 < a_min < a_max, got {a_range}")
    return a_min, a_max


def _sign(x: float) -> int:
    if x < 0:
        return -1
    elif x > 0:
        return +1
    return 0


@dataclass(frozen=True)
class Scenario:
    """A plate system in the dark and under illumination.

    Attributes
    ----------
        name: identifier, e.g. "au-ethanol-si"
        dark_system: system without light
        lit_system: the same system with plate 2 carrier-augmented
        a_range: (a_min, a_max), m
        points: number of sweep points

    """

    name: str
    dark_system: LayerSystem
    lit_system: LayerSystem
    a_range: Range = (50e-9, 500e-9)
    points: int = 100

    def __post_init__(self) -> None:
        object.__setattr__(self, "a_range", _check_range(self.a_range))
        if self.points < 2:
            raise ValueError(f"points must be >= 2, got {self.points}")
        dark, lit = self.dark_system, self.lit_system
        if (
            dark.plate1 != lit.plate1
            or dark.medium != lit.medium
            or dark.temperature != lit.temperature
        ):
            raise ValueError(
                f"Scenario {self.name!r}: dark and lit systems may differ only in plate 2"
            )

    def system(self, light: bool) -> LayerSystem:
        return self.lit_system if light else self.dark_system

    def swapped(self) -> Scenario:
        """Scenario with the dark and lit systems exchanged."""
        return replace(self, dark_system=self.lit_system, lit_system=self.dark_system)


@dataclass(frozen=True)
class SweepFailure:
    separation: float
    message: str


@dataclass(frozen=True)
class PressureSweep:
    """Pressures on a log-spaced separation grid, in increasing separation.

    Failed points keep their place in `points` with a NaN pressure and an
    infinite error, and are listed again in `failures`.
    """

    points: Tuple[PressurePoint, ...]
    failures: Tuple[SweepFailure, ...] = ()

    @property
    def separations(self) -> npt.NDArray[np.float64]:
        return np.array([p.separation for p in self.points])

    @property
    def pressures(self) -> npt.NDArray[np.float64]:
        return np.array([p.pressure for p in self.points])

    @property
    def errors(self) -> npt.NDArray[np.float64]:
        return np.array([p.est_error for p in self.points])

    @property
    def complete(self) -> bool:
        return not self.failures

    def signs(self) -> List[int]:
        return [_sign(p.pressure) for p in self.points]


@dataclass(frozen=True)
class CrossoverResult:
    """Separation where the pressure changes sign.

    Attributes
    ----------
        separation: midpoint of the final bracket, m
        bracket: (a_lo, a_hi), pressure(a_lo) * pressure(a_hi) < 0, or (a, a) at an exact zero
        sign_below: sign of the pressure at a_lo
        sign_above: sign of the pressure at a_hi
        count: number of sign changes seen by the coarse scan

    """

    separation: float
    bracket: Range
    sign_below: int
    sign_above: int
    count: int = 1

    def __post_init__(self) -> None:
        lo, hi = self.bracket
        if not lo <= self.separation <= hi:
            raise ValueError(f"separation {self.separation} outside bracket {self.bracket}")
        if {self.sign_below, self.sign_above} != {-1, 1}:
            raise ValueError("A crossover needs opposite signs on both sides")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    @property
    def repulsive_above(self) -> bool:
        return self.sign_above > 0


@dataclass(frozen=True)
class ModulationResult:
    """Pressures of the dark and lit systems at one separation."""

    dark: PressurePoint
    lit: PressurePoint

    @property
    def p_dark(self) -> float:
        return self.dark.pressure

    @property
    def p_lit(self) -> float:
        return self.lit.pressure

    @property
    def delta(self) -> float:
        return self.lit.pressure - self.dark.pressure

    @property
    def delta_error(self) -> float:
        return self.lit.est_error + self.dark.est_error


def log_grid(a_range: Range, points: int) -> npt.NDArray[np.float64]:
    """`points` log-spaced separations from a_min to a_max inclusive."""
    a_min, a_max = _check_range(a_range)
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    return np.geomspace(a_min, a_max, points)


def sweep(
    system: LayerSystem,
    a_range: Range,
    points: int,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    workers: int = 1,
    constants: PhysicalConstants = CODATA,
) -> PressureSweep:
    """Pressure at `points` log-spaced separations.

    Args:
    ----
        system: plates, medium and temperature.
        a_range: (a_min, a_max), m.
        points: number of separations, >= 2.
        settings: quadrature settings.
        workers: number of threads evaluating separations concurrently.
        constants: physical constants.

    Returns:
    -------
        PressureSweep: points in increasing separation. A point whose
        Matsubara sum does not converge is recorded as failed.

    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    grid = log_grid(a_range, points)

    def evaluate(a: float) -> Tuple[PressurePoint, Optional[SweepFailure]]:
        try:
            return pressure(system, float(a), settings, constants), None
        except ConvergenceError as err:
            logger.warning("Sweep point a=%.6g m failed: %s", a, err)
            terms = err.partial.terms_used if isinstance(err.partial, PressurePoint) else 1
            failed = PressurePoint(float(a), math.nan, terms, math.inf)
            return failed, SweepFailure(float(a), str(err))

    if workers == 1:
        results = [evaluate(a) for a in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(evaluate, grid))

    result = PressureSweep(
        points=tuple(point for point, _ in results),
        failures=tuple(failure for _, failure in results if failure is not None),
    )
    logger.info(
        "Swept %d separations in [%.4g, %.4g] m, %d failed",
        points,
        grid[0],
        grid[-1],
        len(result.failures),
    )
    return result


def _checked_pressure(
    system: LayerSystem, a: float, settings: QuadratureSettings, constants: PhysicalConstants
) -> float:
    try:
        return pressure(system, a, settings, constants).pressure
    except ConvergenceError as err:
        raise CrossoverError(f"Pressure failed at a={a:.9g} m: {err}", a) from err


def find_crossover(
    system: LayerSystem,
    a_range: Range,
    tol: float = 1e-10,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    scan_points: int = 64,
    constants: PhysicalConstants = CODATA,
) -> Optional[CrossoverResult]:
    """Locates the smallest separation where the pressure changes sign.

    A coarse log-spaced scan finds the sign changes; the first one is then
    bisected until the bracket is narrower than `tol`. A pressure that is
    exactly zero on a scan or bisection point collapses the bracket to
    (a, a) at that point.

    Args:
    ----
        system: plates, medium and temperature.
        a_range: (a_min, a_max), m.
        tol: bracket width to reach, m.
        settings: quadrature settings.
        scan_points: number of coarse scan points.
        constants: physical constants.

    Returns:
    -------
        CrossoverResult, or None when the pressure keeps one sign.

    Raises:
    ------
        CrossoverError: naming the separation where a pressure failed.

    """
    if not tol > 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    grid = log_grid(a_range, scan_points)
    signs = [_sign(_checked_pressure(system, float(a), settings, constants)) for a in grid]
    # (i, k): consecutive nonzero scan signs that differ
    nonzero = [i for i, s in enumerate(signs) if s != 0]
    changes = [(i, k) for i, k in zip(nonzero, nonzero[1:]) if signs[i] * signs[k] < 0]
    if not changes:
        logger.info("No sign change in [%.4g, %.4g] m", grid[0], grid[-1])
        return None

    first, last = changes[0]
    sign_lo, sign_hi = signs[first], signs[last]
    root: Optional[float] = None
    if last > first + 1:
        # the pressure vanishes exactly on a scan point
        lo = hi = root = float(grid[first + 1])
    else:
        lo, hi = float(grid[first]), float(grid[last])
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            s = _sign(_checked_pressure(system, mid, settings, constants))
            if s == 0:
                lo = hi = root = mid
                break
            if s == sign_lo:
                lo = mid
            else:
                hi = mid
        if root is None:
            root = 0.5 * (lo + hi)
    result = CrossoverResult(root, (lo, hi), sign_lo, sign_hi, len(changes))

    if len(changes) > 1:
        logger.warning("%d sign changes found; reporting the first", len(changes))
    logger.info(
        "Crossover at a=%.6g m (%s above)",
        result.separation,
        "repulsive" if result.repulsive_above else "attractive",
    )
    return result


def modulation_depth(
    scenario: Scenario,
    separation: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    constants: PhysicalConstants = CODATA,
) -> ModulationResult:
    """Dark and lit pressures at `separation`; `delta` = p_lit - p_dark."""
    a_min, a_max = scenario.a_range
    if not a_min <= separation <= a_max:
        raise ValueError(
            f"separation {separation} outside the scenario range [{a_min}, {a_max}]"
        )
    return ModulationResult(
        dark=pressure(scenario.dark_system, separation, settings, constants),
        lit=pressure(scenario.lit_system, separation, settings, constants),
    )


def quasi_static_displacement(
    pressure: float, plate_area: float, spring_constant: float
) -> float:
    """Signed spring deflection, m, produced by `pressure` acting on `plate_area`."""
    if not plate_area > 0.0:
        raise ValueError(f"plate_area must be > 0, got {plate_area}")
    if not spring_constant > 0.0:
        raise ValueError(f"spring_constant must be > 0, got {spring_constant}")
    return pressure * plate_area / spring_constant
