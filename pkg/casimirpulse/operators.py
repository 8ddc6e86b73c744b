"""Collection of the core numerical operators used throughout the code base.

Everything here is a scalar function compiled with numba. The Lifshitz
integrand is evaluated millions of times per sweep, so the reflection
coefficients, the integrand and the adaptive Simpson rule live in one place
and never touch Python objects.
"""

import math
from typing import Tuple

import numpy as np
from numba import njit


class DomainError(ValueError):
    """Exception raised when an argument lies outside a function's domain."""

    pass


# ## Reflection coefficients
#
# Plate permittivity `eps_p`, medium permittivity `eps_m`, both taken at the
# same imaginary frequency. An infinite `eps_p` is an ideal metal.


@njit(cache=True, nogil=True)
def r_tm(eps_p: float, eps_m: float, zeta: float, y: float) -> float:
    """TM reflection coefficient of a plate seen from the medium.

    Args:
    ----
        eps_p: plate permittivity.
        eps_m: medium permittivity.
        zeta: dimensionless Matsubara frequency.
        y: dimensionless integration variable, y >= sqrt(eps_m) * zeta.

    Returns:
    -------
        float: the coefficient, within [-1, 1].

    """
    if math.isinf(eps_p):
        return 1.0
    root = math.sqrt(max(y * y + (eps_p - eps_m) * zeta * zeta, 0.0))
    den = eps_p * y + eps_m * root
    if den == 0.0:
        return 0.0
    return (eps_p * y - eps_m * root) / den


@njit(cache=True, nogil=True)
def r_te(eps_p: float, eps_m: float, zeta: float, y: float) -> float:
    """TE reflection coefficient of a plate seen from the medium.

    Args:
    ----
        eps_p: plate permittivity.
        eps_m: medium permittivity.
        zeta: dimensionless Matsubara frequency.
        y: dimensionless integration variable, y >= sqrt(eps_m) * zeta.

    Returns:
    -------
        float: the coefficient, within [-1, 1], with the sign of eps_p - eps_m.

    """
    if math.isinf(eps_p):
        return 1.0
    root = math.sqrt(max(y * y + (eps_p - eps_m) * zeta * zeta, 0.0))
    den = root + y
    if den == 0.0:
        return 0.0
    return (root - y) / den


@njit(cache=True, nogil=True)
def mode_occupation(rho: float, y: float) -> float:
    """Returns 1 / (e^y / rho - 1) written as rho e^-y / (1 - rho e^-y).

    The denominator is formed with expm1 so that rho = 1 stays accurate for
    small y.
    """
    if rho == 0.0:
        return 0.0
    den = (1.0 - rho) - rho * math.expm1(-y)
    return rho * math.exp(-y) / den


@njit(cache=True, nogil=True)
def lifshitz_integrand(
    y: float,
    eps1: float,
    eps2: float,
    eps0: float,
    zeta: float,
    rho_tm0: float,
    rho_te0: float,
) -> float:
    """y^2 [ (e^y/(r_TM1 r_TM2) - 1)^-1 + (e^y/(r_TE1 r_TE2) - 1)^-1 ].

    At zeta == 0 the coefficient products are the constants `rho_tm0` and
    `rho_te0` supplied by the caller (zero-frequency limits).
    """
    if y == 0.0:
        return 0.0
    if zeta == 0.0:
        rho_tm = rho_tm0
        rho_te = rho_te0
    else:
        rho_tm = r_tm(eps1, eps0, zeta, y) * r_tm(eps2, eps0, zeta, y)
        rho_te = r_te(eps1, eps0, zeta, y) * r_te(eps2, eps0, zeta, y)
    return y * y * (mode_occupation(rho_tm, y) + mode_occupation(rho_te, y))


# ## Quadrature


@njit(cache=True, nogil=True)
def composite_simpson(
    lower: float,
    upper: float,
    panels: int,
    eps1: float,
    eps2: float,
    eps0: float,
    zeta: float,
    rho_tm0: float,
    rho_te0: float,
) -> float:
    """Fixed composite Simpson rule with an even number of panels."""
    h = (upper - lower) / panels
    total = lifshitz_integrand(lower, eps1, eps2, eps0, zeta, rho_tm0, rho_te0)
    total += lifshitz_integrand(upper, eps1, eps2, eps0, zeta, rho_tm0, rho_te0)
    for i in range(1, panels):
        weight = 4.0 if i % 2 == 1 else 2.0
        total += weight * lifshitz_integrand(
            lower + i * h, eps1, eps2, eps0, zeta, rho_tm0, rho_te0
        )
    return total * h / 3.0


@njit(cache=True, nogil=True)
def adaptive_simpson(
    lower: float,
    upper: float,
    rel_tol: float,
    max_depth: int,
    eps1: float,
    eps2: float,
    eps0: float,
    zeta: float,
    rho_tm0: float,
    rho_te0: float,
) -> Tuple[float, float, bool]:
    """Adaptive Simpson integration of `lifshitz_integrand` on [lower, upper].

    Iterative version of the recursive rule, with an explicit stack. The
    absolute tolerance is `rel_tol` times the magnitude of a 64-panel
    composite estimate. Every accepted panel is Richardson corrected.

    Returns
    -------
        (value, error estimate, converged). `converged` is False when some
        panel hit `max_depth` before meeting its tolerance.

    """
    scale = abs(
        composite_simpson(lower, upper, 64, eps1, eps2, eps0, zeta, rho_tm0, rho_te0)
    )
    if scale == 0.0:
        return 0.0, 0.0, True
    tol = rel_tol * scale

    size = max_depth + 4
    st_a = np.empty(size)
    st_b = np.empty(size)
    st_fa = np.empty(size)
    st_fm = np.empty(size)
    st_fb = np.empty(size)
    st_whole = np.empty(size)
    st_tol = np.empty(size)
    st_depth = np.empty(size, dtype=np.int64)

    fa = lifshitz_integrand(lower, eps1, eps2, eps0, zeta, rho_tm0, rho_te0)
    fb = lifshitz_integrand(upper, eps1, eps2, eps0, zeta, rho_tm0, rho_te0)
    mid = 0.5 * (lower + upper)
    fm = lifshitz_integrand(mid, eps1, eps2, eps0, zeta, rho_tm0, rho_te0)
    st_a[0] = lower
    st_b[0] = upper
    st_fa[0] = fa
    st_fm[0] = fm
    st_fb[0] = fb
    st_whole[0] = (upper - lower) / 6.0 * (fa + 4.0 * fm + fb)
    st_tol[0] = tol
    st_depth[0] = 0
    top = 1

    total = 0.0
    error = 0.0
    converged = True
    while top > 0:
        top -= 1
        a = st_a[top]
        b = st_b[top]
        fa = st_fa[top]
        fm = st_fm[top]
        fb = st_fb[top]
        whole = st_whole[top]
        panel_tol = st_tol[top]
        depth = st_depth[top]

        m = 0.5 * (a + b)
        flm = lifshitz_integrand(0.5 * (a + m), eps1, eps2, eps0, zeta, rho_tm0, rho_te0)
        frm = lifshitz_integrand(0.5 * (m + b), eps1, eps2, eps0, zeta, rho_tm0, rho_te0)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole

        accept = depth >= 3 and abs(delta) <= 15.0 * panel_tol
        if accept or depth >= max_depth:
            if not accept:
                converged = False
            total += left + right + delta / 15.0
            error += abs(delta) / 15.0
            continue

        # right half first so the left half is refined first
        st_a[top] = m
        st_b[top] = b
        st_fa[top] = fm
        st_fm[top] = frm
        st_fb[top] = fb
        st_whole[top] = right
        st_tol[top] = 0.5 * panel_tol
        st_depth[top] = depth + 1
        top += 1
        st_a[top] = a
        st_b[top] = m
        st_fa[top] = fa
        st_fm[top] = flm
        st_fb[top] = fm
        st_whole[top] = left
        st_tol[top] = 0.5 * panel_tol
        st_depth[top] = depth + 1
        top += 1

    return total, error, converged
