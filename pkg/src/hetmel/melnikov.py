"""Manifold-splitting analysis: limit matrices, R matrix, Melnikov function.

The distance between the stable and unstable manifolds of the periodic
orbits continued from the two saddle-centers is measured, to leading order,
by M(t0) = m_-(eta0) - m_+(B0 Phi_-(t0) eta0), where B0 relates the
asymptotic rotation frames at the two ends of the heteroclinic orbit.  The
sign structure of M is decided by the symmetric matrix
R = D_y^2H(x_-,0) - B0^T D_y^2H(x_+,0) B0, and everything reduces to the
closed-form discriminant G(beta1, beta2, omega): G > 0 gives simple zeros
(transverse intersection), G < 0 no zeros (the manifolds miss), G = 0 the
degenerate boundary.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, NumericsError, ParameterDomainError
from .integrate import IntegratorConfig, integrate_with_nve
from .model import Branch, Center, ModelParams, equilibrium_data
from .specfun import connection_coefficients, hypergeom_params, nve_solution_analytic

__all__ = [
    "BMatrices",
    "Classification",
    "MelnikovReport",
    "fundamental_matrix_psi",
    "phi_matrices",
    "b_matrices_numeric",
    "b0_analytic",
    "r_matrix_and_classification",
    "melnikov_closed_form",
    "melnikov_direct",
    "g_function",
    "melnikov_amplitude_offset_phase",
    "trace_g_zero_curve",
    "trace_g_zero_curve_detailed",
]

# Agreement required between the two stabilization samples of the limit
# matrices, and between b_minus and the identity.
_B_LIMIT_TOL = 1e-6
# Zero tests for det R / tr R are scaled by the matrix size (the theory
# works with exact zeros; floating point needs a relative threshold).
_R_ZERO_TOL = 1e-9


@dataclass(frozen=True)
class BMatrices:
    """Limits B_-+ of the rotated fundamental matrix and their ratio B0."""

    b_minus: np.ndarray
    b_plus: np.ndarray
    b0: np.ndarray


class Classification(enum.Enum):
    """Zero structure of the Melnikov function over one period."""

    SIMPLE_ZERO = "SimpleZero"
    NO_ZERO = "NoZero"
    DOUBLE_ZEROS = "DoubleZeros"
    IDENTICALLY_ZERO = "IdenticallyZero"


@dataclass(frozen=True)
class MelnikovReport:
    r_matrix: np.ndarray
    det_r: float
    tr_r: float
    g_value: float
    phi0: float
    classification: Classification


def fundamental_matrix_psi(t: float, p: ModelParams) -> np.ndarray:
    """Fundamental NVE matrix built from the analytic solution.

    Columns are (Re eta_bar, Re eta_bar') and (Im eta_bar, Im eta_bar')/omega_-.
    """
    om_minus = equilibrium_data(p, Center.LEFT).omega_pm
    val, der = nve_solution_analytic(t, p)
    return np.array(
        [
            [val.real, val.imag / om_minus],
            [der.real, der.imag / om_minus],
        ]
    )


def phi_matrices(t: float, p: ModelParams, which: Center) -> np.ndarray:
    """Rotation-frame fundamental matrix at a saddle-center; Phi(0) = id."""
    om = equilibrium_data(p, which).omega_pm
    c, s = math.cos(om * t), math.sin(om * t)
    return np.array([[c, s / om], [-om * s, c]])


def b0_analytic(p: ModelParams) -> np.ndarray:
    """Closed-form B0 from the connection coefficients.

    Derived from the eta_bar asymptotics: the (2,1) entry carries
    Im l12 - Im l22 (with this sign det B0 = (omega_+/omega_-)
    (|l12|^2 - |l22|^2) = 1 exactly, and the closed-form M(t0) follows).
    """
    om_plus = equilibrium_data(p, Center.RIGHT).omega_pm
    om_minus = equilibrium_data(p, Center.LEFT).omega_pm
    cd = connection_coefficients(hypergeom_params(p))
    s = cd.l12 + cd.l22
    d = cd.l12 - cd.l22
    return np.array(
        [
            [s.real, s.imag / om_minus],
            [-om_plus * d.imag, om_plus * d.real / om_minus],
        ]
    )


def _check_t_limit(t_limit: float) -> None:
    if abs(math.tanh(t_limit / math.sqrt(2.0)) - 1.0) >= 1e-14:
        raise ParameterDomainError(
            f"t_limit={t_limit} too small: heteroclinic tail not below 1e-14"
        )


@lru_cache(maxsize=128)
def _b_matrices_cached(p: ModelParams, t_limit: float, cfg: IntegratorConfig) -> BMatrices:
    _check_t_limit(t_limit)
    t_anchor = t_limit + 15.0
    # Anchor the numerical fundamental matrix to the rotation frame deep in
    # the t -> -inf tail (tail size ~ e^{-sqrt2 t_anchor}, far below double
    # precision), then integrate the NVE across the heteroclinic transit.
    psi0 = phi_matrices(-t_anchor, p, Center.LEFT)
    nve = integrate_with_nve(psi0, (-t_anchor, t_limit + 5.0), Branch.PLUS, p, cfg)

    def b_minus_at(t: float) -> np.ndarray:
        return phi_matrices(t, p, Center.LEFT) @ nve.eta_matrix_exact(-t)

    def b_plus_at(t: float) -> np.ndarray:
        return phi_matrices(-t, p, Center.RIGHT) @ nve.eta_matrix_exact(t)

    bm1, bm2 = b_minus_at(t_limit), b_minus_at(t_limit + 5.0)
    bp1, bp2 = b_plus_at(t_limit), b_plus_at(t_limit + 5.0)
    dev_m = float(np.abs(bm1 - bm2).max())
    dev_p = float(np.abs(bp1 - bp2).max())
    if dev_m > _B_LIMIT_TOL or dev_p > _B_LIMIT_TOL:
        raise ConvergenceError(
            "limit matrices did not stabilize between t_limit and t_limit+5",
            t_limit=t_limit,
            b_minus_samples=(bm1.tolist(), bm2.tolist()),
            b_plus_samples=(bp1.tolist(), bp2.tolist()),
            deviation=(dev_m, dev_p),
        )
    dev_id = float(np.abs(bm1 - np.eye(2)).max())
    if dev_id > 10.0 * _B_LIMIT_TOL:
        raise NumericsError(
            "b_minus is not close to the identity", b_minus=bm1.tolist(), deviation=dev_id
        )
    b0 = bp1 @ np.linalg.inv(bm1)
    return BMatrices(b_minus=bm1, b_plus=bp1, b0=b0)


def b_matrices_numeric(
    p: ModelParams, t_limit: float = 40.0, cfg: IntegratorConfig | None = None
) -> BMatrices:
    """Limit matrices by numerical NVE integration with a stabilization check.

    The values at t_limit and t_limit+5 must agree entrywise to 1e-6; the
    t_limit sample is returned.  B0 = B_+ B_-^{-1} (the two published
    orderings coincide because B_- is the identity here, which is asserted).
    """
    if cfg is None:
        cfg = IntegratorConfig.analysis()
    return _b_matrices_cached(p, float(t_limit), cfg)


def melnikov_amplitude_offset_phase(p: ModelParams) -> tuple[float, float, float]:
    """(A, C, phi0) of the closed form M(t0) = A cos(2 omega_- t0 - phi0) + C."""
    om_plus = equilibrium_data(p, Center.RIGHT).omega_pm
    om_minus = equilibrium_data(p, Center.LEFT).omega_pm
    cd = connection_coefficients(hypergeom_params(p))
    a12, a22 = abs(cd.l12), abs(cd.l22)
    amp = om_plus ** 2 * a12 * a22
    off = 0.5 * (om_minus ** 2 - (a12 ** 2 + a22 ** 2) * om_plus ** 2)
    w = cd.l12 * cd.l22
    phi0 = math.atan2(w.imag, -w.real)
    return amp, off, phi0


def melnikov_closed_form(t0: float, p: ModelParams) -> float:
    amp, off, phi0 = melnikov_amplitude_offset_phase(p)
    om_minus = equilibrium_data(p, Center.LEFT).omega_pm
    return amp * math.cos(2.0 * om_minus * t0 - phi0) + off


def _m_quadratic(eta: np.ndarray, p: ModelParams, which: Center) -> float:
    """m_pm(eta) = 1/2 eta . D_y^2H(x_pm, 0) eta with the diagonal Hessian."""
    eq = equilibrium_data(p, which)
    return 0.5 * (eq.sigma2 * eta[0] ** 2 + eq.sigma1 * eta[1] ** 2)


def melnikov_direct(
    t0: float,
    eta0: np.ndarray,
    p: ModelParams,
    cfg: IntegratorConfig | None = None,
    t_limit: float = 40.0,
) -> float:
    """Melnikov value from the numerically computed limit matrices.

    Requires |eta0| = 1 (the theory normalizes the section direction).
    """
    eta0 = np.asarray(eta0, dtype=float)
    if abs(float(np.linalg.norm(eta0)) - 1.0) > 1e-12:
        raise ValueError(f"eta0 must be a unit vector, |eta0| = {np.linalg.norm(eta0)}")
    b = b_matrices_numeric(p, t_limit=t_limit, cfg=cfg)
    v = b.b0 @ (phi_matrices(t0, p, Center.LEFT) @ eta0)
    return _m_quadratic(eta0, p, Center.LEFT) - _m_quadratic(v, p, Center.RIGHT)


def _hessians(p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    eq_m = equilibrium_data(p, Center.LEFT)
    eq_p = equilibrium_data(p, Center.RIGHT)
    return (
        np.diag([eq_m.sigma2, eq_m.sigma1]),
        np.diag([eq_p.sigma2, eq_p.sigma1]),
    )


def r_matrix_and_classification(p: ModelParams) -> MelnikovReport:
    """Assemble R, cross-check det R against its closed formula, classify.

    Classification: det R < 0 simple zeros; det R > 0 no zeros; det R = 0
    with tr R != 0 double zeros; det R = 0 = tr R identically zero.  Zero
    tests use |.| < 1e-9 (1 + ||R||^2).
    """
    om_plus = equilibrium_data(p, Center.RIGHT).omega_pm
    om_minus = equilibrium_data(p, Center.LEFT).omega_pm
    b0 = b0_analytic(p)
    d_minus, d_plus = _hessians(p)
    r = d_minus - b0.T @ d_plus @ b0
    r = 0.5 * (r + r.T)  # symmetrize away representation noise
    det_r = float(np.linalg.det(r))
    tr_r = float(np.trace(r))
    b11, b12, b21, b22 = b0[0, 0], b0[0, 1], b0[1, 0], b0[1, 1]
    det_r_closed = (
        (om_plus - om_minus) ** 2
        - (om_plus * b11 - om_minus * b22) ** 2
        - (om_plus * om_minus * b12 + b21) ** 2
    )
    scale = 1.0 + float(np.abs(r).max()) ** 2 + (om_plus - om_minus) ** 2
    if abs(det_r - det_r_closed) > 1e-8 * scale:
        raise NumericsError(
            "det R disagrees with its closed formula",
            det_assembled=det_r, det_closed=det_r_closed,
        )
    zero_tol = _R_ZERO_TOL * (1.0 + float(np.linalg.norm(r)) ** 2)
    if det_r < -zero_tol:
        cls = Classification.SIMPLE_ZERO
    elif det_r > zero_tol:
        cls = Classification.NO_ZERO
    elif abs(tr_r) > zero_tol:
        cls = Classification.DOUBLE_ZEROS
    else:
        cls = Classification.IDENTICALLY_ZERO
    _, _, phi0 = melnikov_amplitude_offset_phase(p)
    return MelnikovReport(
        r_matrix=r,
        det_r=det_r,
        tr_r=tr_r,
        g_value=g_function(p),
        phi0=phi0,
        classification=cls,
    )


def g_function(p: ModelParams) -> float:
    """Discriminant G = omega_+^2 omega_-^2 |l22|^2 - omega_-^2 (omega_+ - omega_-)^2 / 4."""
    om_plus = equilibrium_data(p, Center.RIGHT).omega_pm
    om_minus = equilibrium_data(p, Center.LEFT).omega_pm
    cd = connection_coefficients(hypergeom_params(p))
    return om_plus ** 2 * om_minus ** 2 * abs(cd.l22) ** 2 - 0.25 * om_minus ** 2 * (
        om_plus - om_minus
    ) ** 2


def _bisect_g_root(
    omega: float, beta2: float, lo: float, hi: float, g_lo: float, g_hi: float, scale: float
) -> float:
    a, fa, b, fb = lo, g_lo, hi, g_hi
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = g_function(ModelParams(m, beta2, omega))
        if abs(fm) < 1e-12 * scale:
            return m
        if (fa < 0.0) == (fm < 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
        if b - a < 1e-17 * max(1.0, abs(b)):
            return 0.5 * (a + b)
    return 0.5 * (a + b)


def trace_g_zero_curve_detailed(
    omega: float, beta2_range: tuple[float, float], n_points: int
) -> tuple[list[tuple[float, float]], list[tuple[float, str]]]:
    """G = 0 curve in the (beta1, beta2) plane plus skipped-sample reasons."""
    b2_lo, b2_hi = beta2_range
    points: list[tuple[float, float]] = []
    skipped: list[tuple[float, str]] = []
    samples = (
        [b2_lo]
        if n_points == 1
        else [b2_lo + (b2_hi - b2_lo) * i / (n_points - 1) for i in range(n_points)]
    )
    for beta2 in samples:
        width = omega * omega - beta2
        if width <= 0.0:
            skipped.append((beta2, "beta2 outside the saddle-center domain"))
            continue
        # geometric scan: roots cluster near beta1 = 0 on this family
        grid = [width * (1.0 - 1e-9) * 10.0 ** (-e) for e in range(40, -1, -1)]
        g_vals = []
        ok = True
        for b1 in grid:
            try:
                g_vals.append(g_function(ModelParams(b1, beta2, omega)))
            except (ParameterDomainError, NumericsError) as exc:
                skipped.append((beta2, f"evaluation failed at beta1={b1}: {exc}"))
                ok = False
                break
        if not ok:
            continue
        bracket = None
        for i in range(len(grid) - 1):
            if (g_vals[i] < 0.0) != (g_vals[i + 1] < 0.0):
                bracket = i
        if bracket is None:
            skipped.append((beta2, "no sign change of G on (0, omega^2 - beta2)"))
            continue
        lo, hi = grid[bracket], grid[bracket + 1]
        scale = max(1.0, abs(g_vals[bracket]), abs(g_vals[bracket + 1]))
        root = _bisect_g_root(omega, beta2, lo, hi, g_vals[bracket], g_vals[bracket + 1], scale)
        points.append((root, beta2))
    return points, skipped


def trace_g_zero_curve(
    omega: float, beta2_range: tuple[float, float], n_points: int
) -> list[tuple[float, float]]:
    """For each beta2 sample, the beta1 > 0 root of G(., beta2, omega)."""
    points, _ = trace_g_zero_curve_detailed(omega, beta2_range, n_points)
    return points
