import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats

import casimirpulse
from casimirpulse import (
    CarrierAugmentedModel,
    CarrierParameters,
    ConstantPermittivity,
    DivergenceError,
    DomainError,
    DrudeModel,
    IdealMetal,
    InvariantViolation,
    LorentzOscillator,
    MaterialError,
    OpticalDataTable,
    OscillatorModel,
    TabulatedPermittivity,
    eval_oscillator,
    eval_with_carriers,
    kk_table,
    kk_transform,
    plasma_frequency,
)

from .material_strategies import carriers, oscillators, tabulated
from .strategies import assert_close, frequencies

ETHANOL = OscillatorModel(23.84, 0.852, 6.6e14, 1.14e16)
ALUMINA = OscillatorModel(7.03, 2.072, 1.0e14, 2.0e16)
LIT_SI = CarrierParameters(2.1e25, 0.2588, 0.2063)
XI_1 = 2.468e14


@pytest.mark.materials
@pytest.mark.acceptance
def test_static_permittivities() -> None:
    assert eval_oscillator(ETHANOL, 0.0) == pytest.approx(25.692, rel=1e-12)
    assert eval_oscillator(ALUMINA, 0.0) == pytest.approx(10.102, rel=1e-12)
    assert ETHANOL.static_permittivity() == pytest.approx(25.692, rel=1e-12)


@pytest.mark.materials
def test_oscillator_examples() -> None:
    assert 1.0 < eval_oscillator(ETHANOL, 1e16) < 1.852
    assert eval_oscillator(ETHANOL, 1.14e16) == pytest.approx(1.506, abs=1e-3)
    assert eval_oscillator(ETHANOL, 1e20) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        eval_oscillator(ETHANOL, -1.0)
    with pytest.raises(InvariantViolation):
        OscillatorModel(-1.0, 0.852, 6.6e14, 1.14e16)
    with pytest.raises(InvariantViolation):
        OscillatorModel(1.0, 0.852, 0.0, 1.14e16)


@pytest.mark.materials
@given(oscillators(), frequencies, frequencies)
def test_oscillator_monotone(model: OscillatorModel, xi_a: float, xi_b: float) -> None:
    lo, hi = sorted((xi_a, xi_b))
    assert model.evaluate(hi) <= model.evaluate(lo)
    assert model.evaluate(hi) >= 1.0
    assert model.evaluate(lo) <= model.static_permittivity()


@pytest.mark.materials
def test_single_uv() -> None:
    model = OscillatorModel.single_uv(11.66, 6.6e15)
    assert_close(model.static_permittivity(), 11.66, 1e-14)
    assert_close(model.evaluate(6.6e15), 1.0 + 10.66 / 2.0, 1e-14)


@pytest.mark.materials
@pytest.mark.acceptance
def test_plasma_frequencies() -> None:
    assert plasma_frequency(LIT_SI, "electron") == pytest.approx(5.08e14, rel=5e-3)
    assert plasma_frequency(LIT_SI, "hole") == pytest.approx(5.69e14, rel=5e-3)


@pytest.mark.materials
@given(carriers(), floats(min_value=1.5, max_value=100.0))
def test_plasma_frequency_scaling(params: CarrierParameters, factor: float) -> None:
    "omega_p grows as sqrt(n)."
    base = plasma_frequency(params, "electron")
    scaled = plasma_frequency(params.with_density(params.n_density * factor), "electron")
    assert_close(scaled / base, math.sqrt(factor), 1e-12)


@pytest.mark.materials
def test_carrier_model() -> None:
    silicon = OscillatorModel.single_uv(11.66, 6.6e15)
    lit = CarrierAugmentedModel.from_carriers(silicon, LIT_SI, 1.8e13, 5.0e12)
    assert lit.carrier_terms(XI_1) == pytest.approx(9.16, rel=1e-2)
    assert_close(eval_with_carriers(lit, XI_1), silicon.evaluate(XI_1) + lit.carrier_terms(XI_1))
    assert lit.evaluate(1e10) > 1e6
    assert math.isinf(lit.static_permittivity())
    with pytest.raises(DivergenceError):
        eval_with_carriers(lit, 0.0)
    with pytest.raises(InvariantViolation):
        CarrierAugmentedModel(silicon, 5e14, 5e14, 0.0, 1e13)


@pytest.mark.materials
def test_drude_and_ideal_metal() -> None:
    gold = DrudeModel(1.37e16, 5.32e13)
    assert gold.evaluate(XI_1) > 1e3
    assert math.isinf(gold.static_permittivity())
    assert not gold.perfect_conductor
    with pytest.raises(DivergenceError):
        gold.evaluate(0.0)

    ideal = IdealMetal()
    assert ideal.perfect_conductor
    assert math.isinf(ideal.evaluate(XI_1))
    assert math.isinf(ideal.static_permittivity())


@pytest.mark.materials
def test_constant() -> None:
    assert casimirpulse.VACUUM.evaluate(1e15) == 1.0
    assert ConstantPermittivity(2.25).static_permittivity() == 2.25
    with pytest.raises(InvariantViolation):
        ConstantPermittivity(0.5)


@pytest.mark.materials
def test_tabulated_interpolation() -> None:
    table = TabulatedPermittivity((1e14, 1e15, 1e16), (9.0, 5.0, 2.0), 10.0)
    assert_close(table.evaluate(1e15), 5.0)
    assert table.evaluate(0.0) == 10.0
    assert_close(table.evaluate(0.5e14), 9.5)
    assert_close(table.evaluate(math.sqrt(1e14 * 1e15)), 7.0)
    assert_close(table.evaluate(2e16), 1.0 + 1.0 / 4.0)
    with pytest.raises(DomainError):
        table.evaluate(-1.0)


@pytest.mark.materials
def test_tabulated_invariants() -> None:
    with pytest.raises(InvariantViolation):
        TabulatedPermittivity((1e14, 1e15), (2.0, 3.0), 3.0)
    with pytest.raises(InvariantViolation):
        TabulatedPermittivity((1e15, 1e14), (3.0, 2.0), 3.0)
    with pytest.raises(InvariantViolation):
        TabulatedPermittivity((1e14, 1e15), (3.0, 0.5), 3.0)
    with pytest.raises(InvariantViolation):
        TabulatedPermittivity((1e14, 1e15), (3.0, 2.0), 2.5)


@pytest.mark.materials
@given(tabulated(), frequencies, frequencies)
def test_tabulated_monotone(table: TabulatedPermittivity, xi_a: float, xi_b: float) -> None:
    lo, hi = sorted((xi_a, xi_b))
    assert table.evaluate(hi) <= table.evaluate(lo) * (1 + 1e-12)
    assert table.evaluate(hi) >= 1.0
    assert table.evaluate(lo) <= table.static_permittivity() * (1 + 1e-12)


@pytest.mark.materials
@pytest.mark.acceptance
def test_kk_lorentz_oracle() -> None:
    oscillator = LorentzOscillator(strength=2.0, omega_0=1e15, gamma=1e14)
    data = oscillator.optical_table(points=2000)
    xi = np.geomspace(1e-3, 1e3, 61) * oscillator.omega_0
    computed = kk_transform(data, xi)
    expected = oscillator.eps_imag(xi)
    np.testing.assert_allclose(computed, expected, rtol=5e-3)
    assert kk_transform(data, 0.0) == pytest.approx(3.0, rel=5e-3)


@pytest.mark.materials
def test_kk_without_absorption() -> None:
    omega = np.geomspace(1e13, 1e17, 50)
    data = OpticalDataTable(tuple(omega), tuple(np.zeros_like(omega)))
    xi = np.concatenate([[0.0], np.geomspace(1e10, 1e20, 21)])
    np.testing.assert_array_equal(kk_transform(data, xi), np.ones_like(xi))


@pytest.mark.materials
def test_kk_high_frequency_falloff() -> None:
    "eps(i xi) - 1 decays as 1/xi^2 far above the data."
    oscillator = LorentzOscillator(strength=2.0, omega_0=1e15, gamma=1e14)
    data = oscillator.optical_table(points=2000)
    xi = np.array([1e4, 1e5, 1e6]) * oscillator.omega_0
    excess = (kk_transform(data, xi) - 1.0) * xi**2
    assert np.all(excess > 0.0)
    np.testing.assert_allclose(excess[1:], excess[0], rtol=1e-2)


@pytest.mark.materials
def test_kk_table() -> None:
    oscillator = LorentzOscillator()
    table = kk_table(oscillator.optical_table(points=800), points=60)
    assert len(table.grid) == 60
    assert table.static_value >= table.values[0]
    assert all(b <= a for a, b in zip(table.values, table.values[1:]))
    assert table.evaluate(oscillator.omega_0) == pytest.approx(
        oscillator.eps_imag(oscillator.omega_0), rel=1e-2
    )


@pytest.mark.materials
def test_kk_errors() -> None:
    with pytest.raises(MaterialError):
        OpticalDataTable((), ())
    with pytest.raises(InvariantViolation):
        OpticalDataTable((1e14, 1e15), (0.1, -0.1))
    data = OpticalDataTable((1e15,), (0.5,))
    assert kk_transform(data, 1e15) > 1.0
    with pytest.raises(DomainError):
        kk_transform(data, -1.0)
