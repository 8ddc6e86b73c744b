import math

import numpy as np
import pytest
from hypothesis import given

from casimirpulse.operators import (
    adaptive_simpson,
    composite_simpson,
    lifshitz_integrand,
    mode_occupation,
    r_te,
    r_tm,
)

from .strategies import assert_close, permittivities, zetas

ZETA3 = 1.2020569031595942


@pytest.mark.lifshitz
def test_ideal_metal_reflects_fully() -> None:
    assert r_tm(math.inf, 1.0, 0.3, 0.5) == 1.0
    assert r_te(math.inf, 25.0, 0.3, 2.0) == 1.0


@pytest.mark.lifshitz
@given(permittivities, zetas)
def test_no_contrast_no_reflection(eps: float, zeta: float) -> None:
    y = math.sqrt(eps) * zeta + 0.5
    assert abs(r_tm(eps, eps, zeta, y)) < 1e-12
    assert abs(r_te(eps, eps, zeta, y)) < 1e-12


@pytest.mark.lifshitz
@given(permittivities, permittivities)
def test_static_limit(eps_p: float, eps_m: float) -> None:
    "At zeta = 0 the TM coefficient is the electrostatic image factor, TE vanishes."
    assert_close(r_tm(eps_p, eps_m, 0.0, 1.0), (eps_p - eps_m) / (eps_p + eps_m), 1e-12, 1e-15)
    assert r_te(eps_p, eps_m, 0.0, 1.0) == 0.0


@pytest.mark.lifshitz
@pytest.mark.acceptance
def test_reflection_bounded_random() -> None:
    rng = np.random.default_rng(20240611)
    n = 100_000
    eps_p = 10 ** rng.uniform(0.0, 5.0, n)
    eps_m = 10 ** rng.uniform(0.0, 2.0, n)
    zeta = 10 ** rng.uniform(-4.0, 2.0, n)
    lower = np.sqrt(eps_m) * zeta
    y = lower + 10 ** rng.uniform(-6.0, 2.0, n)
    for i in range(n):
        assert abs(r_tm(eps_p[i], eps_m[i], zeta[i], y[i])) <= 1.0
        assert abs(r_te(eps_p[i], eps_m[i], zeta[i], y[i])) <= 1.0


@pytest.mark.lifshitz
def test_te_sign_follows_contrast() -> None:
    assert r_te(4.0, 25.0, 0.5, 5.0) < 0.0
    assert r_te(25.0, 4.0, 0.5, 5.0) > 0.0


@pytest.mark.lifshitz
def test_mode_occupation() -> None:
    for y in (1e-6, 0.1, 1.0, 10.0):
        assert_close(mode_occupation(1.0, y), 1.0 / math.expm1(y), 1e-10)
        assert_close(mode_occupation(-0.5, y), -0.5 / (math.exp(y) + 0.5), 1e-12)
    assert mode_occupation(0.0, 1.0) == 0.0


@pytest.mark.lifshitz
def test_integrand_at_origin() -> None:
    assert lifshitz_integrand(0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0) == 0.0


@pytest.mark.lifshitz
def test_simpson_ideal_metal_static_term() -> None:
    "int_0^inf y^2 * 2 / (e^y - 1) dy = 4 zeta(3)"
    value = composite_simpson(0.0, 60.0, 4096, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0)
    assert_close(value, 4 * ZETA3, 1e-7)
    total, error, converged = adaptive_simpson(0.0, 60.0, 1e-9, 30, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0)
    assert converged
    assert_close(total, 4 * ZETA3, 1e-8)
    assert 0.0 <= error < 1e-6


@pytest.mark.lifshitz
def test_adaptive_reports_depth_cap() -> None:
    total, error, converged = adaptive_simpson(0.0, 60.0, 1e-9, 3, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0)
    assert not converged
    assert error > 0.0


@pytest.mark.lifshitz
def test_adaptive_zero_integrand() -> None:
    assert adaptive_simpson(0.0, 60.0, 1e-7, 30, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0) == (0.0, 0.0, True)
