"""Physical constants (CODATA, SI units)."""

from dataclasses import dataclass

from scipy import constants as codata


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants entering the Lifshitz formula and the plasma-frequency relation.

    Attributes
    ----------
        k_b: Boltzmann constant, J/K
        hbar: reduced Planck constant, J s
        c_light: speed of light, m/s
        e_charge: elementary charge, C
        m_electron: electron mass, kg
        eps_vacuum: vacuum permittivity, F/m

    """

    k_b: float = codata.Boltzmann
    hbar: float = codata.hbar
    c_light: float = codata.c
    e_charge: float = codata.e
    m_electron: float = codata.m_e
    eps_vacuum: float = codata.epsilon_0

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if not value > 0.0:
                raise ValueError(f"{name} must be positive, got {value}")


CODATA = PhysicalConstants()
