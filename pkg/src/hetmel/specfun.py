"""Complex special functions for the transverse linearization.

Along the heteroclinic orbit the normal variational equation
eta'' + (omega^2 - beta1 x1h(t) - beta2 x1h(t)^2) eta = 0 transforms, under
tau = (1 + tanh(t/sqrt(2)))/2, into a Gauss hypergeometric equation with
regular singular points tau = 0, 1, infinity.  This module provides the
complex log-gamma (Lanczos) and 2F1 evaluations, the hypergeometric
parameters (rho_pm, chi_pm, c1, c2, c3), the connection coefficients l_ij
between the solution bases at tau = 0 and tau = 1, and the distinguished
solution eta_bar(t) with its exact asymptotics

    eta_bar(t) -> e^{i omega_- t}                        (t -> -inf),
    eta_bar(t) -> l12 e^{i omega_+ t} + l22 e^{-i omega_+ t}   (t -> +inf).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import NumericsError, ParameterDomainError
from .model import Center, ModelParams, equilibrium_data

__all__ = [
    "HypergeomParams",
    "ConnectionData",
    "log_gamma",
    "recip_gamma",
    "gauss_2f1",
    "hypergeom_params",
    "connection_coefficients",
    "nve_solution_analytic",
]

SQRT2 = math.sqrt(2.0)
_LOG_PI = math.log(math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation, g = 7, 9 coefficients (standard published table).
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SERIES_EPS = 1e-16
_SERIES_CAP = 10_000


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real)


def _log_gamma_upper(z: complex) -> complex:
    """Principal log-gamma for Im z >= 0 (reflection handled internally)."""
    if z.real >= 0.5:
        w = z - 1.0
        series = _LANCZOS_P[0]
        for i, pv in enumerate(_LANCZOS_P[1:], start=1):
            series += pv / (w + i)
        t = w + _LANCZOS_G + 0.5
        return _LOG_SQRT_2PI + (w + 0.5) * cmath.log(t) - t + cmath.log(series)
    # reflection, with log sin(pi z) written in the form that is both
    # overflow-safe and on the branch continuous in the upper half-plane:
    # sin(pi z) = e^{-i pi z} (1 - e^{2 i pi z}) * i/2
    w = cmath.pi * z
    log_sin = -1j * w + cmath.log(1.0 - cmath.exp(2j * w)) + 1j * cmath.pi / 2.0 - math.log(2.0)
    return _LOG_PI - log_sin - _log_gamma_upper(1.0 - z)


def log_gamma(z: complex) -> complex:
    """Principal-branch log-gamma; exp of it reproduces the gamma function."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise ParameterDomainError(f"log-gamma pole at non-positive integer z={z}")
    if z.imag < 0.0:
        return _log_gamma_upper(z.conjugate()).conjugate()
    return _log_gamma_upper(z)


def recip_gamma(z: complex) -> complex:
    """1/Gamma(z), with the poles of Gamma mapped to exact zeros."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        return 0.0 + 0.0j
    return cmath.exp(-log_gamma(z))


def _series_2f1(a: complex, b: complex, c: complex, z: complex) -> complex:
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    small_run = 0
    for k in range(_SERIES_CAP):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if term == 0.0:  # terminating (polynomial) case
            return total
        if abs(term) <= _SERIES_EPS * abs(total):
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
    raise NumericsError(
        "hypergeometric series did not converge",
        a=a, b=b, c=c, z=z, terms=_SERIES_CAP,
        last_term=abs(term), partial_sum=abs(total),
    )


def gauss_2f1(c1: complex, c2: complex, c3: complex, tau: complex) -> complex:
    """Gauss hypergeometric function F(c1, c2; c3; tau).

    Accurate to ~1e-12 relative for |tau| <= 0.75 via the defining series,
    with the Pfaff transformation applied whenever it shrinks the argument,
    and via the tau -> 1-tau connection formula near tau = 1 (which needs
    c3 - c1 - c2 away from the integers).
    """
    a, b, c, z = complex(c1), complex(c2), complex(c3), complex(tau)
    if _is_nonpositive_integer(c):
        raise ParameterDomainError(f"2F1 parameter pole: c3={c} is a non-positive integer")
    if z.imag == 0.0 and z.real >= 1.0:
        raise ParameterDomainError(f"2F1 argument on the branch cut [1, inf): tau={z}")
    if z == 0.0:
        return 1.0 + 0.0j
    zp = z / (z - 1.0)
    if abs(z) <= 0.75:
        if abs(zp) < abs(z):
            return (1.0 - z) ** (-a) * _series_2f1(a, c - b, c, zp)
        return _series_2f1(a, b, c, z)
    if abs(zp) <= 0.75:
        return (1.0 - z) ** (-a) * _series_2f1(a, c - b, c, zp)
    if abs(1.0 - z) <= 0.5:
        s = c - a - b
        if abs(s - round(s.real)) < 1e-8 and abs(s.imag) < 1e-8:
            raise NumericsError(
                "connection formula degenerates: c3-c1-c2 too close to an integer",
                c3_minus_c1_minus_c2=s,
            )
        u = 1.0 - z
        la = cmath.exp(log_gamma(c) + log_gamma(s)) * recip_gamma(c - a) * recip_gamma(c - b)
        lb = cmath.exp(log_gamma(c) + log_gamma(-s)) * recip_gamma(a) * recip_gamma(b)
        return la * _series_2f1(a, b, a + b - c + 1.0, u) + lb * u ** s * _series_2f1(
            c - a, c - b, s + 1.0, u
        )
    raise NumericsError(
        "2F1 argument outside the supported region (|tau|<=0.75, Pfaff image, or near 1)",
        tau=z, pfaff_image=zp,
    )


@dataclass(frozen=True)
class HypergeomParams:
    """Exponent data of the hypergeometric reduction for one parameter triple.

    rho_pm = -i omega_pm / sqrt(2) are the exponents at tau = 1 and 0;
    chi_pm = (1 +- sqrt(1 + 8 beta2))/2 the exponents at infinity;
    c1 = chi_+ + rho_+ + rho_-, c2 = chi_- + rho_+ + rho_-, c3 = 2 rho_- + 1.
    """

    rho_plus: complex
    rho_minus: complex
    chi_plus: complex
    chi_minus: complex
    c1: complex
    c2: complex
    c3: complex


@dataclass(frozen=True)
class ConnectionData:
    """Connection coefficients between the tau=0 and tau=1 solution bases."""

    l11: complex
    l12: complex
    l21: complex
    l22: complex
    l0: complex


def hypergeom_params(p: ModelParams) -> HypergeomParams:
    om_plus = equilibrium_data(p, Center.RIGHT).omega_pm
    om_minus = equilibrium_data(p, Center.LEFT).omega_pm
    rho_plus = -1j * om_plus / SQRT2
    rho_minus = -1j * om_minus / SQRT2
    disc = cmath.sqrt(1.0 + 8.0 * p.beta2)
    chi_plus = (1.0 + disc) / 2.0
    chi_minus = (1.0 - disc) / 2.0
    c1 = chi_plus + rho_plus + rho_minus
    c2 = chi_minus + rho_plus + rho_minus
    c3 = 2.0 * rho_minus + 1.0
    # c3 = 1 - i sqrt(2) omega_- always has nonzero imaginary part in the
    # valid domain, so it can never hit the integer degeneracies of 2F1.
    assert c3.imag != 0.0
    return HypergeomParams(
        rho_plus=rho_plus,
        rho_minus=rho_minus,
        chi_plus=chi_plus,
        chi_minus=chi_minus,
        c1=c1,
        c2=c2,
        c3=c3,
    )


def _gamma_ratio(num1: complex, num2: complex, den1: complex, den2: complex) -> complex:
    """Gamma(num1) Gamma(num2) / (Gamma(den1) Gamma(den2)) with exact zeros.

    Denominator poles give exact zeros through recip_gamma; numerator poles
    are not expected in the valid domain and are reported.
    """
    for znum in (num1, num2):
        if _is_nonpositive_integer(znum):
            raise NumericsError("gamma-ratio numerator pole", argument=znum)
    return cmath.exp(log_gamma(num1) + log_gamma(num2)) * recip_gamma(den1) * recip_gamma(den2)


def connection_coefficients(hp: HypergeomParams) -> ConnectionData:
    c1, c2, c3 = hp.c1, hp.c2, hp.c3
    l11 = _gamma_ratio(c3, c3 - c1 - c2, c3 - c1, c3 - c2)
    l12 = _gamma_ratio(2.0 - c3, c3 - c1 - c2, 1.0 - c1, 1.0 - c2)
    l21 = _gamma_ratio(c3, c1 + c2 - c3, c1, c2)
    l22 = _gamma_ratio(2.0 - c3, c1 + c2 - c3, c1 - c3 + 1.0, c2 - c3 + 1.0)
    return ConnectionData(l11=l11, l12=l12, l21=l21, l22=l22, l0=l11 * l22 - l12 * l21)


def _softplus(x: float) -> float:
    """log(1 + e^x), overflow-safe."""
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def _tau_logs(t: float) -> tuple[float, float, float, float]:
    """tau(t) = 1/(1+e^{-sqrt2 t}) and log tau, log(1-tau), overflow-safe.

    Computed directly from the exponential form; tanh would round to +-1
    beyond |t| ~ 28 and lose the tails entirely.
    """
    u = SQRT2 * t
    log_tau = -_softplus(-u)
    log_1mtau = -_softplus(u)
    return math.exp(log_tau), math.exp(log_1mtau), log_tau, log_1mtau


def _f_and_derivative(a: complex, b: complex, c: complex, z: complex) -> tuple[complex, complex]:
    f = gauss_2f1(a, b, c, z)
    fp = a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z)
    return f, fp


def nve_solution_analytic(t: float, p: ModelParams) -> tuple[complex, complex]:
    """The distinguished NVE solution eta_bar(t) and its time derivative.

    Two hypergeometric representations are used, switching at tau = 1/2
    (t = 0): around tau = 0 the single canonical solution with exponent
    -rho_-, and around tau = 1 the l12/l22 combination of the canonical
    solutions there.  Both keep every 2F1 argument inside [0, 1/2].
    Derivatives are analytic (chain rule through tau(t)), not numerical.
    """
    hp = hypergeom_params(p)
    rp, rm, c1, c2, c3 = hp.rho_plus, hp.rho_minus, hp.c1, hp.c2, hp.c3
    tau, one_m_tau, log_tau, log_1mtau = _tau_logs(float(t))
    if tau <= 0.5:
        f, fp = _f_and_derivative(c1 - c3 + 1.0, c2 - c3 + 1.0, 2.0 - c3, tau)
        pref = cmath.exp(-rm * log_tau + rp * log_1mtau)
        val = pref * f
        der = SQRT2 * pref * (-rm * one_m_tau * f - rp * tau * f + tau * one_m_tau * fp)
        return val, der
    cd = connection_coefficients(hp)
    u = one_m_tau
    f1, f1p = _f_and_derivative(c1, c2, c1 + c2 - c3 + 1.0, u)
    f2, f2p = _f_and_derivative(c3 - c1, c3 - c2, c3 - c1 - c2 + 1.0, u)
    pref1 = cmath.exp(rm * log_tau + rp * log_1mtau)
    pref2 = cmath.exp(rm * log_tau - rp * log_1mtau)
    val = cd.l12 * pref1 * f1 + cd.l22 * pref2 * f2
    der = SQRT2 * cd.l12 * pref1 * (rm * u * f1 - rp * tau * f1 - tau * u * f1p) + SQRT2 * cd.l22 * pref2 * (
        rm * u * f2 + rp * tau * f2 - tau * u * f2p
    )
    return val, der
