"""Dielectric permittivities along the imaginary frequency axis.

Every model is an immutable dataclass with an `evaluate(xi)` method giving
eps(i xi) for an angular frequency `xi` in rad/s. Models also describe their
zero-frequency behaviour, which the Lifshitz l = 0 term needs:
`static_permittivity()` is eps(0) (infinite for Drude-like or ideal metals)
and `perfect_conductor` marks the ideal metal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
from typing_extensions import Literal, Protocol, TypeAlias

from .constants import CODATA, PhysicalConstants
from .operators import DomainError

Frequencies: TypeAlias = Union[float, Sequence[float], npt.NDArray[np.float64]]
Species: TypeAlias = Literal["electron", "hole"]


class DivergenceError(DomainError):
    """Raised when a Drude-divergent permittivity is evaluated at xi = 0."""

    pass


class MaterialError(ValueError):
    """Exception raised for bad input to a material operation."""

    pass


class InvariantViolation(MaterialError):
    """Exception raised when a material definition breaks a model invariant."""

    pass


class PermittivityModel(Protocol):
    perfect_conductor: bool

    def evaluate(self, xi: float) -> float:
        """eps(i xi) for xi in rad/s."""
        ...

    def static_permittivity(self) -> float:
        """eps(0); `math.inf` when the model diverges at zero frequency."""
        ...


def _check_xi(xi: float) -> float:
    xi = float(xi)
    if not xi >= 0.0:
        raise DomainError(f"Imaginary frequency must be >= 0, got {xi}")
    return xi


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvariantViolation(message)


def _positive(value: float) -> bool:
    return math.isfinite(value) and value > 0.0


# ## Simple models


@dataclass(frozen=True)
class ConstantPermittivity:
    """Frequency independent permittivity (vacuum is `value = 1`)."""

    value: float = 1.0
    perfect_conductor: ClassVar[bool] = False

    def __post_init__(self) -> None:
        _require(
            math.isfinite(self.value) and self.value >= 1.0,
            f"Constant permittivity must be finite and >= 1, got {self.value}",
        )

    def evaluate(self, xi: float) -> float:
        _check_xi(xi)
        return float(self.value)

    def static_permittivity(self) -> float:
        return float(self.value)


VACUUM = ConstantPermittivity(1.0)


@dataclass(frozen=True)
class IdealMetal:
    """Perfect conductor: eps = infinity at every frequency."""

    perfect_conductor: ClassVar[bool] = True

    def evaluate(self, xi: float) -> float:
        _check_xi(xi)
        return math.inf

    def static_permittivity(self) -> float:
        return math.inf


# ## Oscillator model


@dataclass(frozen=True)
class OscillatorModel:
    """Two-oscillator (IR + UV) dielectric.

    eps(i xi) = 1 + c_ir / (1 + xi^2/omega_ir^2) + c_uv / (1 + xi^2/omega_uv^2)

    Attributes
    ----------
        c_ir: IR oscillator strength
        c_uv: UV oscillator strength
        omega_ir: IR characteristic frequency, rad/s
        omega_uv: UV characteristic frequency, rad/s

    """

    c_ir: float
    c_uv: float
    omega_ir: float
    omega_uv: float
    perfect_conductor: ClassVar[bool] = False

    def __post_init__(self) -> None:
        _require(
            math.isfinite(self.c_ir) and self.c_ir >= 0.0,
            f"c_ir must be >= 0, got {self.c_ir}",
        )
        _require(
            math.isfinite(self.c_uv) and self.c_uv >= 0.0,
            f"c_uv must be >= 0, got {self.c_uv}",
        )
        _require(_positive(self.omega_ir), f"omega_ir must be > 0, got {self.omega_ir}")
        _require(_positive(self.omega_uv), f"omega_uv must be > 0, got {self.omega_uv}")

    @classmethod
    def single_uv(cls, static_value: float, omega_uv: float) -> OscillatorModel:
        """UV-only oscillator constrained to eps(0) = `static_value`."""
        return cls(c_ir=0.0, c_uv=static_value - 1.0, omega_ir=omega_uv, omega_uv=omega_uv)

    def evaluate(self, xi: float) -> float:
        return eval_oscillator(self, xi)

    def static_permittivity(self) -> float:
        return 1.0 + self.c_ir + self.c_uv


def eval_oscillator(model: OscillatorModel, xi: float) -> float:
    """Evaluates the oscillator permittivity at imaginary frequency `xi`.

    Args:
    ----
        model: oscillator parameters.
        xi: angular frequency, rad/s, >= 0.

    Returns:
    -------
        float: eps(i xi) >= 1.

    Raises:
    ------
        DomainError: if `xi` is negative.

    """
    xi = _check_xi(xi)
    ir = model.c_ir / (1.0 + (xi / model.omega_ir) ** 2)
    uv = model.c_uv / (1.0 + (xi / model.omega_uv) ** 2)
    return 1.0 + ir + uv


# ## Free carriers


@dataclass(frozen=True)
class CarrierParameters:
    """Photo-excited carrier population.

    Attributes
    ----------
        n_density: carriers of each type per unit volume, m^-3
        m_eff_e: electron effective mass, in units of the electron mass
        m_eff_h: hole effective mass, in units of the electron mass

    """

    n_density: float
    m_eff_e: float
    m_eff_h: float

    def __post_init__(self) -> None:
        _require(_positive(self.n_density), f"n_density must be > 0, got {self.n_density}")
        _require(_positive(self.m_eff_e), f"m_eff_e must be > 0, got {self.m_eff_e}")
        _require(_positive(self.m_eff_h), f"m_eff_h must be > 0, got {self.m_eff_h}")

    def with_density(self, n_density: float) -> CarrierParameters:
        return CarrierParameters(n_density, self.m_eff_e, self.m_eff_h)


def plasma_frequency(
    params: CarrierParameters,
    species: Species,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Plasma frequency sqrt(n e^2 / (m* eps_vacuum)) of one carrier species.

    Args:
    ----
        params: carrier density and effective masses.
        species: "electron" or "hole".
        constants: physical constants.

    Returns:
    -------
        float: angular frequency, rad/s.

    """
    if species == "electron":
        m_eff = params.m_eff_e
    elif species == "hole":
        m_eff = params.m_eff_h
    else:
        raise ValueError(f"Unknown carrier species {species!r}")
    mass = m_eff * constants.m_electron
    return math.sqrt(
        params.n_density * constants.e_charge**2 / (mass * constants.eps_vacuum)
    )


def _drude(omega_p: float, gamma: float, xi: float) -> float:
    return omega_p**2 / (xi * (xi + gamma))


@dataclass(frozen=True)
class DrudeModel:
    """Single-species Drude metal on top of a background model.

    eps(i xi) = base(i xi) + omega_p^2 / (xi (xi + gamma))
    """

    omega_p: float
    gamma: float
    base: PermittivityModel = VACUUM
    perfect_conductor: ClassVar[bool] = False

    def __post_init__(self) -> None:
        _require(_positive(self.omega_p), f"omega_p must be > 0, got {self.omega_p}")
        _require(_positive(self.gamma), f"gamma must be > 0, got {self.gamma}")

    def evaluate(self, xi: float) -> float:
        xi = _check_xi(xi)
        if xi == 0.0:
            raise DivergenceError("Drude permittivity diverges at xi = 0")
        return self.base.evaluate(xi) + _drude(self.omega_p, self.gamma, xi)

    def static_permittivity(self) -> float:
        return math.inf


@dataclass(frozen=True)
class CarrierAugmentedModel:
    """Semiconductor permittivity with electron and hole Drude terms added.

    Attributes
    ----------
        base: permittivity without the extra carriers
        omega_p_e: electron plasma frequency, rad/s
        omega_p_h: hole plasma frequency, rad/s
        gamma_e: electron relaxation parameter, rad/s
        gamma_h: hole relaxation parameter, rad/s

    """

    base: PermittivityModel
    omega_p_e: float
    omega_p_h: float
    gamma_e: float
    gamma_h: float
    perfect_conductor: ClassVar[bool] = False

    def __post_init__(self) -> None:
        for name in ("omega_p_e", "omega_p_h", "gamma_e", "gamma_h"):
            value = getattr(self, name)
            _require(_positive(value), f"{name} must be > 0, got {value}")

    @classmethod
    def from_carriers(
        cls,
        base: PermittivityModel,
        carriers: CarrierParameters,
        gamma_e: float,
        gamma_h: float,
        constants: PhysicalConstants = CODATA,
    ) -> CarrierAugmentedModel:
        """Builds the model from a carrier density and effective masses."""
        return cls(
            base=base,
            omega_p_e=plasma_frequency(carriers, "electron", constants),
            omega_p_h=plasma_frequency(carriers, "hole", constants),
            gamma_e=gamma_e,
            gamma_h=gamma_h,
        )

    def carrier_terms(self, xi: float) -> float:
        """The two Drude terms alone, for xi > 0."""
        return _drude(self.omega_p_e, self.gamma_e, xi) + _drude(
            self.omega_p_h, self.gamma_h, xi
        )

    def evaluate(self, xi: float) -> float:
        return eval_with_carriers(self, xi)

    def static_permittivity(self) -> float:
        return math.inf


def eval_with_carriers(model: CarrierAugmentedModel, xi: float) -> float:
    """Evaluates the carrier-augmented permittivity at `xi` > 0.

    Raises
    ------
        DivergenceError: at xi = 0, where the Drude terms diverge. The
            Lifshitz zero-frequency rule must be used instead.
        DomainError: for negative xi.

    """
    xi = _check_xi(xi)
    if xi == 0.0:
        raise DivergenceError(
            "Carrier-augmented permittivity diverges at xi = 0; "
            "use the zero-frequency limit"
        )
    return model.base.evaluate(xi) + model.carrier_terms(xi)


# ## Tabulated data


def _as_array(values: Sequence[float]) -> npt.NDArray[np.float64]:
    return np.asarray(values, dtype=np.float64)


@dataclass(frozen=True)
class TabulatedPermittivity:
    """eps(i xi) known on a grid of imaginary frequencies.

    Between grid points the table is interpolated linearly in log xi. Below
    the first point it is linear in xi down to `static_value` at xi = 0;
    above the last point the excess over 1 decays as 1/xi^2.
    """

    grid: Tuple[float, ...]
    values: Tuple[float, ...]
    static_value: float
    perfect_conductor: ClassVar[bool] = False
    _log_grid: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _values: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        grid = _as_array(self.grid)
        values = _as_array(self.values)
        _require(grid.ndim == 1 and len(grid) > 0, "Tabulated permittivity needs points")
        _require(len(grid) == len(values), "grid and values must have equal length")
        _require(bool(np.all(np.isfinite(grid)) and np.all(grid > 0.0)), "grid must be > 0")
        _require(bool(np.all(np.diff(grid) > 0.0)), "grid must be strictly increasing")
        _require(bool(np.all(np.isfinite(values))), "values must be finite")
        _require(bool(np.all(values >= 1.0)), "tabulated permittivity must be >= 1")
        _require(bool(np.all(np.diff(values) <= 0.0)), "values must be non-increasing")
        _require(
            math.isfinite(self.static_value) and self.static_value >= values[0],
            f"static_value {self.static_value} must be >= first value {values[0]}",
        )
        object.__setattr__(self, "grid", tuple(float(x) for x in grid))
        object.__setattr__(self, "values", tuple(float(v) for v in values))
        object.__setattr__(self, "_log_grid", np.log(grid))
        object.__setattr__(self, "_values", values)

    def evaluate(self, xi: float) -> float:
        xi = _check_xi(xi)
        first, last = self.grid[0], self.grid[-1]
        if xi == 0.0:
            return float(self.static_value)
        if xi < first:
            t = xi / first
            return float((1.0 - t) * self.static_value + t * self.values[0])
        if xi > last:
            return float(1.0 + (self.values[-1] - 1.0) * (last / xi) ** 2)
        return float(np.interp(math.log(xi), self._log_grid, self._values))

    def static_permittivity(self) -> float:
        return float(self.static_value)


@dataclass(frozen=True)
class OpticalDataTable:
    """Im eps(omega) sampled on the real frequency axis.

    Attributes
    ----------
        omega: angular frequencies, rad/s, strictly increasing
        im_eps: imaginary part of the permittivity, >= 0

    """

    omega: Tuple[float, ...]
    im_eps: Tuple[float, ...]

    def __post_init__(self) -> None:
        omega = _as_array(self.omega)
        im_eps = _as_array(self.im_eps)
        if omega.size == 0:
            raise MaterialError("Optical data table is empty")
        _require(omega.shape == im_eps.shape, "omega and im_eps must have equal length")
        _require(bool(np.all(np.isfinite(omega)) and np.all(omega > 0.0)), "omega must be > 0")
        _require(bool(np.all(np.diff(omega) > 0.0)), "omega must be strictly increasing")
        _require(
            bool(np.all(np.isfinite(im_eps)) and np.all(im_eps >= 0.0)),
            "Im eps must be >= 0 (passive medium)",
        )
        object.__setattr__(self, "omega", tuple(float(w) for w in omega))
        object.__setattr__(self, "im_eps", tuple(float(v) for v in im_eps))


def _tail_kernel(t: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """omega_N^3 * integral_{omega_N}^inf d omega / (omega^2 (omega^2 + xi^2)), t = xi/omega_N."""
    small = t < 1e-2
    safe = np.where(small, 1.0, t)
    closed = (1.0 - np.arctan(safe) / safe) / safe**2
    t2 = t * t
    series = 1.0 / 3.0 - t2 / 5.0 + t2 * t2 / 7.0
    return np.where(small, series, closed)


def kk_transform(data: OpticalDataTable, xi: Frequencies) -> Union[float, npt.NDArray[np.float64]]:
    """eps(i xi) = 1 + (2/pi) int_0^inf omega Im eps(omega) / (omega^2 + xi^2) d omega.

    The tabulated range is integrated with the trapezoidal rule in log omega.
    Above the last point Im eps is continued as omega^-3 and integrated
    analytically; below the first point it is taken as zero.

    Args:
    ----
        data: tabulated Im eps(omega).
        xi: one or many imaginary frequencies, rad/s, >= 0.

    Returns:
    -------
        eps(i xi), a float for scalar `xi`, else an array of the same shape.

    """
    xi_arr = np.asarray(xi, dtype=np.float64)
    if np.any(~(xi_arr >= 0.0)):
        raise DomainError("Imaginary frequency must be >= 0")
    omega = _as_array(data.omega)
    im_eps = _as_array(data.im_eps)

    xs = xi_arr[..., np.newaxis]
    integrand = omega**2 * im_eps / (omega**2 + xs**2)
    if omega.size > 1:
        body = np.trapezoid(integrand, np.log(omega), axis=-1)
    else:
        body = np.zeros(xi_arr.shape)
    tail = im_eps[-1] * _tail_kernel(xi_arr / omega[-1])
    result = 1.0 + (2.0 / math.pi) * (body + tail)
    if result.ndim == 0:
        return float(result)
    return result


def kk_table(
    data: OpticalDataTable,
    xi_grid: Optional[Sequence[float]] = None,
    points: int = 200,
) -> TabulatedPermittivity:
    """Reconstructs a `TabulatedPermittivity` from optical data.

    Args:
    ----
        data: tabulated Im eps(omega).
        xi_grid: imaginary frequencies to tabulate; by default `points`
            log-spaced values spanning the optical data range.
        points: grid size when `xi_grid` is not given.

    Returns:
    -------
        TabulatedPermittivity with `static_value` = eps(0).

    """
    if xi_grid is None:
        if points < 2:
            raise MaterialError(f"Need at least 2 grid points, got {points}")
        grid = np.geomspace(data.omega[0], data.omega[-1], points)
    else:
        grid = _as_array(xi_grid)
    values = np.asarray(kk_transform(data, grid))
    # rounding can break exact monotonicity where neighbouring values agree
    values = np.minimum.accumulate(values)
    static_value = max(float(kk_transform(data, 0.0)), float(values[0]))
    return TabulatedPermittivity(tuple(grid), tuple(values), static_value)
