"""Adaptive Runge-Kutta integration with dense output and event location.

The stepper is the Dormand-Prince embedded 5(4) pair (coefficients from
Hairer, Norsett & Wanner, "Solving ODEs I", Table 5.2) with the usual
FSAL arrangement and an elementary step-size controller.  Dense output is
cubic Hermite on the stored node values and derivatives, which is all the
event logic needs; events are afterwards polished against the true solution
by short re-integrations, so located crossings are accurate to integrator
tolerance rather than interpolant accuracy.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import NumericsError
from .model import (
    Branch,
    ModelParams,
    PhaseState,
    heteroclinic_orbit,
    nve_coefficient,
    state_array,
    vector_field,
    vector_field_x_plane,
)

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "NveState",
    "NveTrajectory",
    "integrate",
    "integrate_rhs",
    "integrate_with_nve",
    "find_event",
]

# Dormand-Prince 5(4) tableau.
_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0)
_B4 = (
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
)
_ERR = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))

_EVENT_TOL = 1e-10
_EVENT_ITER_CAP = 60


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and work bounds for one integration.

    Defaults suit analysis-grade runs (limit matrices, Melnikov data);
    ``manifold_sweep`` relaxes them for the many seed integrations of the
    section-curve tracer.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    max_steps: int = 1_000_000

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise ValueError(f"tolerances and max_step must be positive: {self}")
        if self.max_steps <= 0:
            raise ValueError(f"max_steps must be positive: {self.max_steps}")

    @classmethod
    def analysis(cls) -> "IntegratorConfig":
        return cls()

    @classmethod
    def manifold_sweep(cls) -> "IntegratorConfig":
        return cls(rel_tol=1e-8, abs_tol=1e-10)


def _initial_step(f, t0: float, y0: np.ndarray, direction: float, cfg: IntegratorConfig) -> float:
    f0 = f(t0, y0)
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    return min(h, cfg.max_step) * direction


def integrate_rhs(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_span: Sequence[float],
    cfg: IntegratorConfig,
) -> tuple[list[float], list[np.ndarray], list[np.ndarray]]:
    """Drive the DP5(4) stepper from t_span[0] to t_span[1] (either order).

    Returns node times, states and derivatives, endpoints included.
    Raises NumericsError on step-count exhaustion or step-size underflow.
    """
    t0, tf = float(t_span[0]), float(t_span[1])
    y = np.array(y0, dtype=float)
    ts = [t0]
    ys = [y.copy()]
    k1 = f(t0, y)
    fs = [np.asarray(k1, dtype=float)]
    if tf == t0:
        return ts, ys, fs
    direction = 1.0 if tf > t0 else -1.0
    h = _initial_step(f, t0, y, direction, cfg)
    t = t0
    n_steps = 0
    k = [np.zeros_like(y) for _ in range(7)]
    k[0] = fs[0]
    while (tf - t) * direction > 0.0:
        if n_steps >= cfg.max_steps:
            raise NumericsError("step limit exceeded", t=t, max_steps=cfg.max_steps)
        if abs(h) < 16.0 * np.finfo(float).eps * max(abs(t), 1.0):
            raise NumericsError("step size underflow", t=t, h=h)
        if (t + h - tf) * direction > 0.0:
            h = tf - t
        for i in range(1, 7):
            yi = y.copy()
            ai = _A[i]
            for j in range(i):
                if ai[j] != 0.0:
                    yi += (h * ai[j]) * k[j]
            k[i] = f(t + _C[i] * h, yi)
        y_new = yi  # stage-7 state: its a-row is the 5th-order weight row
        err_vec = _ERR[0] * k[0]
        for i in range(1, 7):
            if _ERR[i] != 0.0:
                err_vec = err_vec + _ERR[i] * k[i]
        err_vec = h * err_vec
        sc = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / sc) ** 2)))
        n_steps += 1
        if err <= 1.0:
            t = t + h
            y = y_new
            k[0] = k[6]  # FSAL
            ts.append(t)
            ys.append(y.copy())
            fs.append(k[0].copy())
            factor = 10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = max(0.2, 0.9 * err ** -0.2)
        h = h * factor
        if abs(h) > cfg.max_step:
            h = cfg.max_step * direction
    return ts, ys, fs


class Trajectory:
    """Dense-output solution on one integration span.

    Node times are strictly monotone (increasing or decreasing with the
    integration direction); evaluation between nodes is cubic Hermite on
    the stored states and derivatives.
    """

    def __init__(
        self,
        ts: Sequence[float],
        ys: Sequence[np.ndarray],
        fs: Sequence[np.ndarray],
        rhs: Callable[[float, np.ndarray], np.ndarray] | None = None,
        cfg: IntegratorConfig | None = None,
    ) -> None:
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.fs = np.asarray(fs, dtype=float)
        self.rhs = rhs
        self.cfg = cfg
        d = np.diff(self.ts)
        if d.size and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("node times must be strictly monotone")
        self._ascending = bool(d.size == 0 or d[0] > 0)
        self._grid = (self.ts if self._ascending else -self.ts).tolist()

    @property
    def t0(self) -> float:
        return float(self.ts[0])

    @property
    def t1(self) -> float:
        return float(self.ts[-1])

    @property
    def n_steps(self) -> int:
        return len(self.ts) - 1

    def _segment(self, t: float) -> int:
        lo, hi = (self.t0, self.t1) if self._ascending else (self.t1, self.t0)
        if not (lo - 1e-12 <= t <= hi + 1e-12):
            raise ValueError(f"t={t} outside trajectory span [{lo}, {hi}]")
        tt = t if self._ascending else -t
        i = bisect_left(self._grid, tt)
        return min(max(i - 1, 0), len(self.ts) - 2)

    def __call__(self, t: float) -> np.ndarray:
        if len(self.ts) == 1:
            return self.ys[0].copy()
        i = self._segment(float(t))
        h = self.ts[i + 1] - self.ts[i]
        th = (t - self.ts[i]) / h
        th2 = th * th
        th3 = th2 * th
        return (
            (2 * th3 - 3 * th2 + 1) * self.ys[i]
            + (th3 - 2 * th2 + th) * h * self.fs[i]
            + (-2 * th3 + 3 * th2) * self.ys[i + 1]
            + (th3 - th2) * h * self.fs[i + 1]
        )

    def resample(self, t: float) -> "Trajectory":
        """Fresh integration from the nearest earlier node to t (true solution)."""
        if self.rhs is None or self.cfg is None:
            raise ValueError("trajectory carries no right-hand side to re-integrate")
        i = self._segment(float(t))
        sub_ts, sub_ys, sub_fs = integrate_rhs(self.rhs, self.ys[i], (self.ts[i], t), self.cfg)
        return Trajectory(sub_ts, sub_ys, sub_fs, self.rhs, self.cfg)

    def value_exact(self, t: float) -> np.ndarray:
        """State at t by re-integration (integrator-accurate, not interpolant)."""
        if self.rhs is None or self.cfg is None:
            return self(t)
        i = self._segment(float(t))
        if t == self.ts[i]:
            return self.ys[i].copy()
        _, sub_ys, _ = integrate_rhs(self.rhs, self.ys[i], (self.ts[i], t), self.cfg)
        return sub_ys[-1]


def _embed_x_plane(ts, ys2, fs2) -> tuple[list[np.ndarray], list[np.ndarray]]:
    ys = [np.array([y[0], y[1], 0.0, 0.0]) for y in ys2]
    fs = [np.array([g[0], g[1], 0.0, 0.0]) for g in fs2]
    return ys, fs


def integrate(initial, t_span: Sequence[float], p: ModelParams, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the model flow; exact on the invariant x-plane.

    Initial states with y1 = y2 = 0 are integrated through the restricted
    two-dimensional system so the y-components stay identically zero.
    """
    y0 = state_array(initial)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return vector_field(y, p)

    if y0[2] == 0.0 and y0[3] == 0.0:
        def rhs2(t: float, y: np.ndarray) -> np.ndarray:
            return vector_field_x_plane(y, p)

        ts, ys2, fs2 = integrate_rhs(rhs2, y0[:2], t_span, cfg)
        ys, fs = _embed_x_plane(ts, ys2, fs2)
        return Trajectory(ts, ys, fs, rhs, cfg)
    ts, ys, fs = integrate_rhs(rhs, y0, t_span, cfg)
    return Trajectory(ts, ys, fs, rhs, cfg)


@dataclass(frozen=True)
class NveState:
    """Base point on the heteroclinic orbit plus the 2x2 NVE fundamental matrix."""

    base: PhaseState
    eta_matrix: np.ndarray


class NveTrajectory:
    """Solution of the normal variational equation along a heteroclinic orbit.

    The base orbit is taken in closed form; only the linear 2x2 system
    eta'' + k(t) eta = 0 is integrated (flattened to first order).
    """

    def __init__(self, inner: Trajectory, branch: Branch, p: ModelParams) -> None:
        self._inner = inner
        self.branch = branch
        self.p = p

    @property
    def t0(self) -> float:
        return self._inner.t0

    @property
    def t1(self) -> float:
        return self._inner.t1

    def eta_matrix(self, t: float) -> np.ndarray:
        return self._inner(t).reshape(2, 2)

    def eta_matrix_exact(self, t: float) -> np.ndarray:
        return self._inner.value_exact(t).reshape(2, 2)

    def base(self, t: float) -> PhaseState:
        pos, _ = heteroclinic_orbit(t, self.branch)
        return PhaseState(float(pos[0]), float(pos[1]), 0.0, 0.0)

    def state_at(self, t: float) -> NveState:
        return NveState(base=self.base(t), eta_matrix=self.eta_matrix(t))


def integrate_with_nve(
    initial_eta: np.ndarray,
    t_span: Sequence[float],
    b: Branch,
    p: ModelParams,
    cfg: IntegratorConfig,
) -> NveTrajectory:
    """Integrate the NVE fundamental matrix along the closed-form orbit.

    initial_eta rows are (eta1 row, eta2 row); columns evolve independently
    under eta1' = eta2, eta2' = -k(t) eta1.
    """
    e0 = np.asarray(initial_eta, dtype=float).reshape(2, 2)

    def rhs(t: float, e: np.ndarray) -> np.ndarray:
        kk = nve_coefficient(t, p, b)
        return np.array([e[2], e[3], -kk * e[0], -kk * e[1]])

    ts, ys, fs = integrate_rhs(rhs, e0.reshape(4), t_span, cfg)
    return NveTrajectory(Trajectory(ts, ys, fs, rhs, cfg), b, p)


def _refine_bracket(
    g: Callable[[float], float],
    ta: float,
    ga: float,
    tb: float,
    gb: float,
) -> float:
    """Bisection then secant for a root of g on [ta, tb]; 60-iteration cap."""
    a, fa, b, fb = ta, ga, tb, gb
    t_best, g_best = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    for _ in range(_EVENT_ITER_CAP):
        if abs(g_best) < _EVENT_TOL or abs(b - a) < 1e-14 * max(abs(a), abs(b), 1.0):
            break
        # secant candidate, guarded to stay inside the bracket
        if fb != fa:
            tm = b - fb * (b - a) / (fb - fa)
        else:
            tm = 0.5 * (a + b)
        if not (min(a, b) < tm < max(a, b)):
            tm = 0.5 * (a + b)
        fm = g(tm)
        if abs(fm) < abs(g_best):
            t_best, g_best = tm, fm
        if (fa < 0.0) == (fm < 0.0):
            a, fa = tm, fm
        else:
            b, fb = tm, fm
    return t_best


def find_event(
    traj: Trajectory,
    event: Callable[[np.ndarray], float],
    direction: int = 0,
    subsamples: int = 4,
    polish: bool = True,
) -> list[tuple[float, np.ndarray]]:
    """Locate sign changes of event(state) along a trajectory.

    direction > 0 keeps only upward crossings (event increasing in the
    direction of integration), < 0 only downward, 0 both.  Each crossing is
    refined on dense output to |event| < 1e-10 and then, when the trajectory
    carries its right-hand side, polished against re-integrated states.
    Returns (t, state) pairs ordered along the integration direction.
    """
    if len(traj.ts) < 2:
        return []
    tdir = 1.0 if traj.t1 > traj.t0 else -1.0

    def g_interp(t: float) -> float:
        return float(event(traj(t)))

    # sample grid: nodes plus interior subsamples to catch intra-step wiggles
    times: list[float] = []
    for i in range(len(traj.ts) - 1):
        a, b = traj.ts[i], traj.ts[i + 1]
        for j in range(subsamples):
            times.append(a + (b - a) * j / subsamples)
    times.append(float(traj.ts[-1]))
    vals = [g_interp(t) for t in times]

    found: list[tuple[float, np.ndarray]] = []
    for i in range(len(times) - 1):
        ga, gb = vals[i], vals[i + 1]
        if ga == 0.0:
            crossing_sign = 1.0 if gb > 0 else -1.0
            t_root = times[i]
        elif (ga < 0.0) != (gb < 0.0):
            crossing_sign = 1.0 if gb > ga else -1.0
            t_root = _refine_bracket(g_interp, times[i], ga, times[i + 1], gb)
        else:
            continue
        # orientation is with respect to physical time, not traversal order
        crossing_sign *= tdir
        if direction != 0 and crossing_sign * direction < 0:
            continue
        if polish and traj.rhs is not None:
            t_root = _polish_event(traj, event, t_root)
            state = traj.value_exact(t_root)
        else:
            state = traj(t_root)
        if found and abs(found[-1][0] - t_root) < 1e-9 * max(1.0, abs(t_root)):
            continue
        found.append((t_root, state))
    return found


def _polish_event(traj: Trajectory, event, t_root: float) -> float:
    """Secant iteration on the true solution near an interpolant root."""
    lo = min(traj.t0, traj.t1)
    hi = max(traj.t0, traj.t1)

    def g_true(t: float) -> float:
        return float(event(traj.value_exact(t)))

    dt = max(1e-7, 1e-7 * abs(t_root))
    t_a = min(max(t_root - dt, lo), hi)
    t_b = min(max(t_root + dt, lo), hi)
    if t_a == t_b:
        return t_root
    fa, fb = g_true(t_a), g_true(t_b)
    t_prev, f_prev, t_cur, f_cur = t_a, fa, t_b, fb
    if abs(fa) < abs(fb):
        t_prev, f_prev, t_cur, f_cur = t_b, fb, t_a, fa
    for _ in range(12):
        if abs(f_cur) < 1e-13 or f_cur == f_prev:
            break
        t_next = t_cur - f_cur * (t_cur - t_prev) / (f_cur - f_prev)
        t_next = min(max(t_next, lo), hi)
        if t_next == t_cur:
            break
        t_prev, f_prev = t_cur, f_cur
        t_cur, f_cur = t_next, g_true(t_next)
    return t_cur


def with_tolerances(cfg: IntegratorConfig, rel: float | None = None, abs_: float | None = None) -> IntegratorConfig:
    """Copy of cfg with overridden tolerances (None keeps the field)."""
    kwargs = {}
    if rel is not None:
        kwargs["rel_tol"] = rel
    if abs_ is not None:
        kwargs["abs_tol"] = abs_
    return replace(cfg, **kwargs) if kwargs else cfg
