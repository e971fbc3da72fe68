"""Quartic two-saddle-center Hamiltonian family.

The family lives on R^2 x R^2 with canonical coordinates (x1, x2, y1, y2),
Hamiltonian

    H = 1/2 (x2^2 + y2^2) + 1/2 x1^2 - 1/4 x1^4
        + 1/2 omega^2 y1^2 + 1/4 y1^4
        - 1/2 beta1 x1 y1^2 - 1/2 beta2 x1^2 y1^2,

and equations of motion xdot = J D_x H, ydot = J D_y H.  The x-plane
{y1 = y2 = 0} is invariant and carries two saddles at (x1, x2) = (+-1, 0)
joined by a pair of heteroclinic orbits; transverse to the plane each saddle
is a center with frequency omega_pm = sqrt(omega^2 -+ beta1 - beta2), so the
equilibria are saddle-centers whenever omega^2 - beta2 > |beta1|.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError

__all__ = [
    "ModelParams",
    "PhaseState",
    "SaddleCenterData",
    "Branch",
    "Center",
    "SQRT2",
    "hamiltonian",
    "vector_field",
    "vector_field_x_plane",
    "jacobian",
    "equilibrium_data",
    "saddle_energy",
    "heteroclinic_orbit",
    "nve_coefficient",
    "same_sign_check",
    "resonance_ratio_check",
    "state_array",
]

SQRT2 = math.sqrt(2.0)

# Tolerance below which the ratio condition omega_+/lambda_+ = omega_-/lambda_-
# is treated as exact (the theory treats it as an identity).
RESONANCE_RATIO_TOL = 1e-12


class Branch(enum.Enum):
    """Selects one of the two heteroclinic orbits on the x-plane."""

    PLUS = 1    # left saddle -> right saddle, x1(t) = tanh(t/sqrt(2))
    MINUS = -1  # right saddle -> left saddle, the sign-flipped orbit


class Center(enum.Enum):
    """Selects a saddle-center equilibrium by its x1 sign."""

    RIGHT = 1
    LEFT = -1


@dataclass(frozen=True)
class ModelParams:
    """Parameter triple (beta1, beta2, omega) of one family member.

    Validity (the saddle-center condition) is enforced at construction; all
    downstream operations assume it.
    """

    beta1: float
    beta2: float
    omega: float

    def __post_init__(self) -> None:
        b1 = float(self.beta1)
        b2 = float(self.beta2)
        om = float(self.omega)
        object.__setattr__(self, "beta1", b1)
        object.__setattr__(self, "beta2", b2)
        object.__setattr__(self, "omega", om)
        if not (math.isfinite(b1) and math.isfinite(b2) and math.isfinite(om)):
            raise ParameterDomainError(f"non-finite parameters: {(b1, b2, om)}")
        if om <= 0.0:
            raise ParameterDomainError(f"omega must be positive, got {om}")
        if not om * om - b2 > abs(b1):
            raise ParameterDomainError(
                "saddle-center condition omega^2 - beta2 > |beta1| fails: "
                f"omega^2 - beta2 = {om * om - b2}, |beta1| = {abs(b1)}"
            )


@dataclass(frozen=True)
class PhaseState:
    """A point (x1, x2, y1, y2) in the four-dimensional phase space."""

    x1: float
    x2: float
    y1: float
    y2: float

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.y1, self.y2], dtype=float)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "PhaseState":
        x1, x2, y1, y2 = (float(v) for v in a)
        return cls(x1, x2, y1, y2)


def state_array(state) -> np.ndarray:
    """Coerce a PhaseState or any 4-sequence to a float ndarray of shape (4,)."""
    if isinstance(state, PhaseState):
        return state.array
    a = np.asarray(state, dtype=float)
    if a.shape != (4,):
        raise ValueError(f"phase state must have 4 components, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class SaddleCenterData:
    """Spectral data of one saddle-center equilibrium.

    sigma1, sigma2 are the eigenvalues of the transverse Hessian
    D_y^2 H(x_pm, 0) = diag(omega_pm^2, 1) listed so that
    sigma1 * sigma2 = omega_pm^2; lam is the hyperbolic rate on the x-plane.
    """

    location: tuple[float, float]
    lam: float
    omega_pm: float
    sigma1: float
    sigma2: float


def hamiltonian(state, p: ModelParams) -> float:
    x1, x2, y1, y2 = state_array(state)
    b1, b2, om = p.beta1, p.beta2, p.omega
    return (
        0.5 * (x2 * x2 + y2 * y2)
        + 0.5 * x1 * x1
        - 0.25 * x1 ** 4
        + 0.5 * om * om * y1 * y1
        + 0.25 * y1 ** 4
        - 0.5 * b1 * x1 * y1 * y1
        - 0.5 * b2 * x1 * x1 * y1 * y1
    )


def vector_field(state, p: ModelParams) -> np.ndarray:
    """Right-hand side of the equations of motion (equals J grad H)."""
    x1, x2, y1, y2 = state_array(state)
    b1, b2, om = p.beta1, p.beta2, p.omega
    return np.array(
        [
            x2,
            -x1 + x1 ** 3 + 0.5 * b1 * y1 * y1 + b2 * x1 * y1 * y1,
            y2,
            -om * om * y1 + b1 * x1 * y1 + b2 * x1 * x1 * y1 - y1 ** 3,
        ]
    )


def vector_field_x_plane(xpt: np.ndarray, p: ModelParams) -> np.ndarray:
    """Restriction of the field to the invariant x-plane (y identically 0).

    Integrating this 2-dimensional system keeps the y-components exactly
    zero by construction, which the integrator relies on for trajectories
    started on the plane.
    """
    x1, x2 = xpt
    return np.array([x2, -x1 + x1 ** 3])


def jacobian(state, p: ModelParams) -> np.ndarray:
    """Derivative matrix of vector_field at a state (for variational flow)."""
    x1, x2, y1, y2 = state_array(state)
    b1, b2, om = p.beta1, p.beta2, p.omega
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [
                -1.0 + 3.0 * x1 * x1 + b2 * y1 * y1,
                0.0,
                b1 * y1 + 2.0 * b2 * x1 * y1,
                0.0,
            ],
            [0.0, 0.0, 0.0, 1.0],
            [
                b1 * y1 + 2.0 * b2 * x1 * y1,
                0.0,
                -om * om + b1 * x1 + b2 * x1 * x1 - 3.0 * y1 * y1,
                0.0,
            ],
        ]
    )


def equilibrium_data(p: ModelParams, which: Center) -> SaddleCenterData:
    """Location and spectral data of the chosen saddle-center."""
    s = which.value  # +1 right, -1 left
    om2 = p.omega * p.omega - s * p.beta1 - p.beta2
    if om2 <= 0.0:
        raise ParameterDomainError(
            f"transverse frequency squared non-positive at {which}: {om2}"
        )
    return SaddleCenterData(
        location=(float(s), 0.0),
        lam=SQRT2,
        omega_pm=math.sqrt(om2),
        sigma1=1.0,
        sigma2=om2,
    )


def saddle_energy(p: ModelParams) -> float:
    """Energy of the saddle-centers, computed from the Hamiltonian itself."""
    return hamiltonian((1.0, 0.0, 0.0, 0.0), p)


def heteroclinic_orbit(t: float, b: Branch) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form heteroclinic orbit on the x-plane and its time derivative.

    Returns ((x1, x2), (x1dot, x2dot)).  The PLUS branch runs from (-1,0)
    at t=-inf to (+1,0) at t=+inf; MINUS is its sign flip.
    """
    s = float(b.value)
    u = t / SQRT2
    th = math.tanh(u)
    sech2 = 1.0 / math.cosh(u) ** 2
    pos = np.array([s * th, s * sech2 / SQRT2])
    vel = np.array([s * sech2 / SQRT2, -s * sech2 * th])
    return pos, vel


def nve_coefficient(t: float, p: ModelParams, b: Branch = Branch.PLUS) -> float:
    """Coefficient k(t) of the normal variational equation eta'' + k eta = 0.

    Along the heteroclinic orbit the transverse linearization decouples to
    eta1'' + (omega^2 - beta1 x1h(t) - beta2 x1h(t)^2) eta1 = 0.
    """
    x1 = float(b.value) * math.tanh(t / SQRT2)
    return p.omega * p.omega - p.beta1 * x1 - p.beta2 * x1 * x1


def same_sign_check(p: ModelParams) -> bool:
    """True iff sigma1 at both saddles share a sign (always true here)."""
    right = equilibrium_data(p, Center.RIGHT)
    left = equilibrium_data(p, Center.LEFT)
    return right.sigma1 * left.sigma1 > 0.0


def resonance_ratio_check(p: ModelParams) -> bool:
    """True iff omega_+/lambda_+ = omega_-/lambda_- within 1e-12.

    In this family lambda_+ = lambda_- = sqrt(2), so the condition reduces
    to omega_+ = omega_-, which holds iff beta1 = 0.
    """
    right = equilibrium_data(p, Center.RIGHT)
    left = equilibrium_data(p, Center.LEFT)
    return abs(right.omega_pm / right.lam - left.omega_pm / left.lam) < RESONANCE_RATIO_TOL
