"""Adaptive explicit Runge-Kutta integration of the full SAIRS system.

The stepper is the classic Dormand-Prince 5(4) embedded pair with its
standard quartic dense-output interpolant. States live on the probability
simplex; the vector field keeps the simplex invariant analytically, and a
guard enforces it numerically to within a small tolerance, treating larger
excursions as integrator bugs rather than model behavior.

The hot loop works on plain float 4-tuples: the system is tiny and some
studies integrate tens of millions of steps, where per-step array overhead
would dominate.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite, sqrt
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import InvalidInputError, InvarianceViolationError, StiffnessError
from .model import SIMPLEX_TOL, ModelParams, StateFull

__all__ = [
    "DEFAULT_INITIAL_STATE",
    "IntegrationConfig",
    "Trajectory",
    "guard_simplex",
    "integrate",
]

#: Shared default initial state for simulations and parameter studies.
DEFAULT_INITIAL_STATE = StateFull(0.98, 0.01, 0.01, 0.0)

#: Adaptive steps below this (days) abort the run as too stiff.
MIN_STEP = 1e-12

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

# Quartic dense-output coefficients (one row per stage, powers theta..theta^4).
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@dataclass(frozen=True)
class IntegrationConfig:
    """Error tolerances, horizon, sampling grid, and steady-state detection.

    converged is declared once the max-norm of the vector field stays below
    steady_tol at every sample throughout a trailing window of steady_window
    days. max_step is an optional cap on the adaptive step, mainly useful to
    force fixed-step behavior in convergence-order measurements.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    t_max: float = 5000.0
    sample_dt: float = 1.0
    steady_tol: float = 1e-10
    steady_window: float = 100.0
    max_step: float = float("inf")

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "t_max", "sample_dt", "steady_tol", "steady_window"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive")
        if self.sample_dt > self.t_max:
            raise InvalidInputError("sample_dt must not exceed t_max")
        if not self.max_step > 0:
            raise InvalidInputError("max_step must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of one run.

    times is strictly increasing; every row of states lies on the simplex
    (the guard renormalizes roundoff-level drift). min_tail holds the
    componentwise minima of S, A, I over the trailing half of the samples,
    a cheap persistence estimate. limit is the final state when the run
    converged, else None.
    """

    times: np.ndarray
    states: np.ndarray
    converged: bool
    limit: Optional[StateFull]
    min_tail: np.ndarray

    @property
    def final_state(self) -> StateFull:
        return StateFull.from_array(self.states[-1])


def _rhs(params: ModelParams) -> Callable[[float, float, float, float], Tuple[float, float, float, float]]:
    """Scalar fast path of the full vector field, closed over the rates."""
    beta_a, beta_i = params.beta_a, params.beta_i
    alpha, gamma, nu, mu = params.alpha, params.gamma, params.nu, params.mu
    delta_a, delta_i = params.delta_a, params.delta_i
    out_s = mu + nu
    out_a = alpha + delta_a + mu
    out_i = delta_i + mu
    out_r = gamma + mu

    def f(s: float, a: float, i: float, r: float):
        infections = (beta_a * a + beta_i * i) * s
        return (
            mu - infections - out_s * s + gamma * r,
            infections - out_a * a,
            alpha * a - out_i * i,
            delta_a * a + delta_i * i + nu * s - out_r * r,
        )

    return f


def _guard_tuple(y: Tuple[float, ...], tol: float) -> Tuple[Tuple[float, ...], bool]:
    total = y[0] + y[1] + y[2] + y[3]
    low = min(y)
    if low < -tol or abs(total - 1.0) > tol:
        raise InvarianceViolationError(
            f"state {y} left the simplex beyond tolerance {tol} (min {low}, sum {total})"
        )
    if low >= 0.0 and abs(total - 1.0) <= 5e-16:
        return y, False
    clipped = tuple(0.0 if v < 0.0 else v for v in y)
    total = sum(clipped)
    return tuple(v / total for v in clipped), True


def guard_simplex(x, tol: float = SIMPLEX_TOL):
    """Clamp roundoff-level negatives to 0 and renormalize the sum to 1.

    Feasible states are returned unchanged. Violations beyond tol raise
    InvarianceViolationError: the analytic flow cannot leave the simplex,
    so a large excursion signals an integration bug.
    """
    if isinstance(x, StateFull):
        cleaned, changed = _guard_tuple((x.s, x.a, x.i, x.r), tol)
        return StateFull(*cleaned) if changed else x
    arr = np.asarray(x, dtype=float)
    if arr.shape != (4,):
        raise InvalidInputError(f"expected 4 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("state contains non-finite components")
    cleaned, changed = _guard_tuple(tuple(arr), tol)
    return np.array(cleaned) if changed else arr


def _initial_step(f, y, k1, rel_tol, abs_tol, max_step):
    """Starting step heuristic (scaled norms of y, f, and one Euler probe).

    Deliberately overflow-proof: with absurdly tight tolerances the scaled
    norms blow up, and the heuristic just proposes the minimum step and
    leaves the verdict to the error controller.
    """
    y_arr = np.asarray(y)
    k_arr = np.asarray(k1)
    scale = abs_tol + rel_tol * np.abs(y_arr)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        d0 = float(np.sqrt(np.mean((y_arr / scale) ** 2)))
        d1 = float(np.sqrt(np.mean((k_arr / scale) ** 2)))
        if not (isfinite(d0) and isfinite(d1)):
            return max(MIN_STEP, min(1e-6, max_step))
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        probe = tuple(v + h0 * k for v, k in zip(y, k1))
        k_probe = np.asarray(f(*probe))
        d2 = float(np.sqrt(np.mean(((k_probe - k_arr) / scale) ** 2))) / h0
        if not isfinite(d2):
            return max(MIN_STEP, min(1e-6, max_step))
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
    return max(MIN_STEP, min(100.0 * h0, h1, max_step))


def integrate(params: ModelParams, x0, cfg: Optional[IntegrationConfig] = None) -> Trajectory:
    """Integrate the full system from x0 with adaptive embedded-pair stepping.

    Local error per step is kept under rel_tol*|x| + abs_tol componentwise
    (RMS-controlled). States are sampled on the sample_dt grid via the
    dense-output interpolant; the run stops early once steady (see
    IntegrationConfig) and flags the trajectory converged.

    Raises InvalidInputError for an off-simplex x0 and StiffnessError if
    the controlled step underflows below 1e-12 days.
    """
    if cfg is None:
        cfg = IntegrationConfig()
    if not isinstance(x0, StateFull):
        try:
            x0 = StateFull.from_array(np.asarray(x0, dtype=float))
        except (ValueError, TypeError) as exc:
            raise InvalidInputError(f"initial state is not a simplex point: {exc}") from exc
    y, _ = _guard_tuple((x0.s, x0.a, x0.i, x0.r), SIMPLEX_TOL)

    f = _rhs(params)
    rel_tol, abs_tol = cfg.rel_tol, cfg.abs_tol
    t_max, sample_dt = cfg.t_max, cfg.sample_dt
    steady_tol, steady_window = cfg.steady_tol, cfg.steady_window

    times = [0.0]
    states = [y]
    last_bad = 0.0
    converged = False

    def observe(t_sample: float, y_sample: Tuple[float, ...]) -> None:
        nonlocal last_bad, converged
        norm = max(abs(v) for v in f(*y_sample))
        if norm >= steady_tol:
            last_bad = t_sample
        elif t_sample - last_bad >= steady_window:
            converged = True

    observe(0.0, y)

    t = 0.0
    k1 = f(*y)
    h = min(_initial_step(f, y, k1, rel_tol, abs_tol, cfg.max_step), t_max)
    sample_idx = 1

    while t < t_max and not converged:
        remaining = t_max - t
        if remaining <= MIN_STEP:
            break
        h_step = min(h, remaining)

        # Stage cascade.
        s0, a0, i0, r0 = y
        k1s, k1a, k1i, k1r = k1
        k2 = f(
            s0 + h_step * (_A21 * k1s),
            a0 + h_step * (_A21 * k1a),
            i0 + h_step * (_A21 * k1i),
            r0 + h_step * (_A21 * k1r),
        )
        k3 = f(
            s0 + h_step * (_A31 * k1s + _A32 * k2[0]),
            a0 + h_step * (_A31 * k1a + _A32 * k2[1]),
            i0 + h_step * (_A31 * k1i + _A32 * k2[2]),
            r0 + h_step * (_A31 * k1r + _A32 * k2[3]),
        )
        k4 = f(
            s0 + h_step * (_A41 * k1s + _A42 * k2[0] + _A43 * k3[0]),
            a0 + h_step * (_A41 * k1a + _A42 * k2[1] + _A43 * k3[1]),
            i0 + h_step * (_A41 * k1i + _A42 * k2[2] + _A43 * k3[2]),
            r0 + h_step * (_A41 * k1r + _A42 * k2[3] + _A43 * k3[3]),
        )
        k5 = f(
            s0 + h_step * (_A51 * k1s + _A52 * k2[0] + _A53 * k3[0] + _A54 * k4[0]),
            a0 + h_step * (_A51 * k1a + _A52 * k2[1] + _A53 * k3[1] + _A54 * k4[1]),
            i0 + h_step * (_A51 * k1i + _A52 * k2[2] + _A53 * k3[2] + _A54 * k4[2]),
            r0 + h_step * (_A51 * k1r + _A52 * k2[3] + _A53 * k3[3] + _A54 * k4[3]),
        )
        k6 = f(
            s0 + h_step * (_A61 * k1s + _A62 * k2[0] + _A63 * k3[0] + _A64 * k4[0] + _A65 * k5[0]),
            a0 + h_step * (_A61 * k1a + _A62 * k2[1] + _A63 * k3[1] + _A64 * k4[1] + _A65 * k5[1]),
            i0 + h_step * (_A61 * k1i + _A62 * k2[2] + _A63 * k3[2] + _A64 * k4[2] + _A65 * k5[2]),
            r0 + h_step * (_A61 * k1r + _A62 * k2[3] + _A63 * k3[3] + _A64 * k4[3] + _A65 * k5[3]),
        )
        y_new = (
            s0 + h_step * (_B1 * k1s + _B3 * k3[0] + _B4 * k4[0] + _B5 * k5[0] + _B6 * k6[0]),
            a0 + h_step * (_B1 * k1a + _B3 * k3[1] + _B4 * k4[1] + _B5 * k5[1] + _B6 * k6[1]),
            i0 + h_step * (_B1 * k1i + _B3 * k3[2] + _B4 * k4[2] + _B5 * k5[2] + _B6 * k6[2]),
            r0 + h_step * (_B1 * k1r + _B3 * k3[3] + _B4 * k4[3] + _B5 * k5[3] + _B6 * k6[3]),
        )
        k7 = f(*y_new)

        ks = (k1, k2, k3, k4, k5, k6, k7)
        try:
            err_sq = 0.0
            for j in range(4):
                err_j = h_step * (
                    _E1 * ks[0][j]
                    + _E3 * ks[2][j]
                    + _E4 * ks[3][j]
                    + _E5 * ks[4][j]
                    + _E6 * ks[5][j]
                    + _E7 * ks[6][j]
                )
                scale = abs_tol + rel_tol * max(abs(y[j]), abs(y_new[j]))
                err_sq += (err_j / scale) ** 2
            err_norm = sqrt(err_sq / 4.0)
        except OverflowError:
            err_norm = float("inf")

        if not isfinite(err_norm) or err_norm > 1.0:
            # Reject and shrink; underflow here means genuine stiffness.
            factor = _MIN_FACTOR if not isfinite(err_norm) else max(
                _MIN_FACTOR, _SAFETY * err_norm ** -0.2
            )
            h = h_step * factor
            if h < MIN_STEP:
                raise StiffnessError(f"step size underflow at t = {t}")
            continue

        t_new = t + h_step
        # Emit grid samples covered by this step via the dense interpolant.
        while not converged:
            t_sample = sample_idx * sample_dt
            if t_sample > t_new + 1e-12 or t_sample > t_max:
                break
            theta = (t_sample - t) / h_step
            y_sample = []
            for j in range(4):
                acc = 0.0
                for stage, prow in zip(ks, _P):
                    q = theta * (prow[0] + theta * (prow[1] + theta * (prow[2] + theta * prow[3])))
                    acc += stage[j] * q
                y_sample.append(y[j] + h_step * acc)
            y_sample, _ = _guard_tuple(tuple(y_sample), SIMPLEX_TOL)
            times.append(t_sample)
            states.append(y_sample)
            observe(t_sample, y_sample)
            sample_idx += 1

        y_new, changed = _guard_tuple(y_new, SIMPLEX_TOL)
        k1 = f(*y_new) if changed else k7
        y = y_new
        t = t_new
        if err_norm == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2))
        h = min(h_step * factor, cfg.max_step)

    if not converged and t >= t_max - MIN_STEP and times[-1] < t_max - 1e-9:
        times.append(t)
        states.append(y)
        observe(t, y)

    times_arr = np.asarray(times)
    states_arr = np.asarray(states)
    tail = states_arr[len(states_arr) // 2 :]
    min_tail = tail[:, :3].min(axis=0)
    limit = StateFull(*states[-1]) if converged else None
    return Trajectory(
        times=times_arr,
        states=states_arr,
        converged=converged,
        limit=limit,
        min_tail=min_tail,
    )
