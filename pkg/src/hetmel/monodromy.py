"""Monodromy of the normal variational equation and the integrability test.

The NVE along the heteroclinic orbit is hypergeometric, so its monodromy
group is generated by explicit matrices: M0 and M1 around the regular
singular points of the reduced equation, assembled from the connection
coefficients, and m_pm = e(rho_pm) M_{0,1} around the complexified saddle
points (e(rho) = exp(2 pi i rho)).  Commuting monodromy is necessary for
real-meromorphic integrability; the family satisfies it exactly on
beta1 = 0, beta2 = n(n-1)/2, where also m_+ = m_-^{-1}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericsError, ParameterDomainError
from .model import Center, ModelParams, equilibrium_data, resonance_ratio_check
from .specfun import HypergeomParams, connection_coefficients, hypergeom_params

__all__ = [
    "MonodromyPair",
    "IntegrabilityVerdict",
    "Verdict",
    "monodromy_hypergeometric",
    "monodromy_nve",
    "monodromy_closed_form_equal_ratio",
    "integrability_verdict",
    "COMMUTATIVE_TOL",
    "NONCOMMUTATIVE_TOL",
]

# Two-sided decision band: below the first bound the pair counts as
# commutative, above the second as non-commutative, in between the decision
# is refused (never observed on the valid parameter domain).
COMMUTATIVE_TOL = 1e-9
NONCOMMUTATIVE_TOL = 1e-6


@dataclass(frozen=True)
class MonodromyPair:
    """Monodromy matrices of the NVE in the hypergeometric solution basis."""

    m_plus: np.ndarray
    m_minus: np.ndarray
    commutator_norm: float
    basis_note: str


@dataclass(frozen=True)
class IntegrabilityVerdict:
    condition_c_holds: bool
    n_witness: int | None
    commutative: bool
    inverse_relation_holds: bool
    verdict: "Verdict"


class Verdict:
    """Two-valued outcome of the necessary integrability condition."""

    NECESSARY_CONDITION_FAILS = "NecessaryConditionFails"  # nonintegrable
    NECESSARY_CONDITION_HOLDS = "NecessaryConditionHolds"  # inconclusive


def _e(rho: complex) -> complex:
    return cmath.exp(2j * cmath.pi * rho)


def _max_abs(m: np.ndarray) -> float:
    return float(np.abs(m).max())


def monodromy_hypergeometric(hp: HypergeomParams) -> tuple[np.ndarray, np.ndarray]:
    """Monodromy matrices M0 (around tau=0) and M1 (around tau=1)."""
    cd = connection_coefficients(hp)
    if abs(cd.l0) < 1e-12:
        raise NumericsError("degenerate connection determinant l0", l0=cd.l0)
    m0 = np.array([[1.0, 0.0], [0.0, _e(-hp.c3)]], dtype=complex)
    ep = _e(hp.c3 - hp.c1 - hp.c2)
    l11, l12, l21, l22, l0 = cd.l11, cd.l12, cd.l21, cd.l22, cd.l0
    m1 = (
        np.array(
            [
                [l11 * l22 - l12 * l21 * ep, l12 * l22 * (ep - 1.0)],
                [l11 * l21 * (1.0 - ep), l11 * l22 * ep - l12 * l21],
            ],
            dtype=complex,
        )
        / l0
    )
    return m0, m1


def monodromy_nve(p: ModelParams) -> MonodromyPair:
    """NVE monodromy around the two complexified saddle points."""
    hp = hypergeom_params(p)
    m0, m1 = monodromy_hypergeometric(hp)
    m_minus = _e(hp.rho_minus) * m0
    m_plus = _e(hp.rho_plus) * m1
    comm = m_plus @ m_minus - m_minus @ m_plus
    return MonodromyPair(
        m_plus=m_plus,
        m_minus=m_minus,
        commutator_norm=_max_abs(comm),
        basis_note="hypergeometric canonical basis at tau=0",
    )


def monodromy_closed_form_equal_ratio(p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Equal-frequency closed form (valid only when omega_+ = omega_-).

    Used purely as a spectral oracle: its eigenvalues e^{+-2 pi mu}
    (mu = omega_+/lambda_+) and trace 2 cosh(2 pi mu) are basis-free; the
    off-diagonal convention is not meant to match the NVE basis.
    """
    if not resonance_ratio_check(p):
        raise ParameterDomainError(
            "equal-ratio closed form requires omega_+/lambda_+ = omega_-/lambda_- (beta1 = 0)"
        )
    eq = equilibrium_data(p, Center.RIGHT)
    mu = eq.omega_pm / eq.lam
    ch = math.cosh(2.0 * math.pi * mu)
    sh = math.sinh(2.0 * math.pi * mu)
    ratio = math.sqrt(eq.sigma2 / eq.sigma1)
    m_plus = np.array([[ch, 1j * ratio * sh], [-1j * sh / ratio, ch]], dtype=complex)
    m_minus = np.array([[ch, -1j * ratio * sh], [1j * sh / ratio, ch]], dtype=complex)
    return m_plus, m_minus


def _triangular_witness(beta2: float, tol: float = 1e-9) -> int | None:
    """Smallest n >= 1 with |beta2 - n(n-1)/2| < tol, if any."""
    if beta2 < -tol:
        return None
    n_max = math.ceil((1.0 + math.sqrt(max(1.0 + 8.0 * beta2, 0.0))) / 2.0) + 1
    for n in range(1, n_max + 1):
        if abs(beta2 - 0.5 * n * (n - 1)) < tol:
            return n
    return None


def integrability_verdict(p: ModelParams) -> IntegrabilityVerdict:
    """Necessary-condition test: non-commuting monodromy certifies nonintegrability."""
    n = _triangular_witness(p.beta2) if abs(p.beta1) < 1e-12 else None
    condition = n is not None and abs(p.beta1) < 1e-12
    pair = monodromy_nve(p)
    if pair.commutator_norm < COMMUTATIVE_TOL:
        commutative = True
    elif pair.commutator_norm > NONCOMMUTATIVE_TOL:
        commutative = False
    else:
        raise NumericsError(
            "commutator norm falls in the indeterminate band",
            commutator_norm=pair.commutator_norm,
            band=(COMMUTATIVE_TOL, NONCOMMUTATIVE_TOL),
        )
    prod_dev = _max_abs(pair.m_plus @ pair.m_minus - np.eye(2))
    inverse_relation = prod_dev < COMMUTATIVE_TOL
    verdict = (
        Verdict.NECESSARY_CONDITION_HOLDS if commutative else Verdict.NECESSARY_CONDITION_FAILS
    )
    return IntegrabilityVerdict(
        condition_c_holds=condition,
        n_witness=n if condition else None,
        commutative=commutative,
        inverse_relation_holds=inverse_relation,
        verdict=verdict,
    )
