"""Core SAIRS model: parameters, state spaces, vector fields, and closed forms.

The model tracks fractions of susceptible (S), asymptomatic infected (A),
symptomatic infected (I) and recovered (R) individuals. Susceptibles are
infected by contact with either infectious class (rates beta_a, beta_i),
asymptomatic individuals develop symptoms at rate alpha or recover at rate
delta_a, symptomatic ones recover at rate delta_i, immunity wanes at rate
gamma, susceptibles are vaccinated at rate nu, and births balance deaths at
rate mu. On the unit simplex S + A + I + R = 1 the dynamics close into a
three-dimensional system in (S, A, I) with R = 1 - S - A - I.

Everything here is a pure function of its inputs; all values are immutable
after construction.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DegenerateParameterError, InvalidInputError

__all__ = [
    "RATE_NAMES",
    "SIMPLEX_TOL",
    "ModelParams",
    "StateFull",
    "StateReduced",
    "NextGenPair",
    "HConstants",
    "Regime",
    "EquilibriumReport",
    "rhs_full",
    "rhs_reduced",
    "jacobian_full",
    "jacobian_reduced",
    "next_gen_pair",
    "r0_closed_form",
    "dfe",
    "endemic_equilibrium",
    "h_constants",
    "classify_regime",
    "equilibrium_report",
]

#: Names of the eight nonnegative rates, in canonical order.
RATE_NAMES = ("beta_a", "beta_i", "alpha", "delta_a", "delta_i", "gamma", "nu", "mu")

#: Tolerance for membership in the probability simplex.
SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """The eight nonnegative rates (1/day) defining one SAIRS instance.

    Attributes:
        beta_a: transmission rate from asymptomatic infected.
        beta_i: transmission rate from symptomatic infected.
        alpha: symptom-onset rate.
        delta_a: recovery rate of asymptomatic infected.
        delta_i: recovery rate of symptomatic infected.
        gamma: rate of loss of immunity.
        nu: vaccination rate.
        mu: birth/death rate.
    """

    beta_a: float
    beta_i: float
    alpha: float
    delta_a: float
    delta_i: float
    gamma: float
    nu: float
    mu: float

    def __post_init__(self) -> None:
        for name in RATE_NAMES:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidInputError(f"rate {name} must be finite, got {value!r}")
            if value < 0:
                raise InvalidInputError(f"rate {name} must be >= 0, got {value!r}")
        if self.alpha + self.delta_a + self.mu <= 0:
            raise InvalidInputError("alpha + delta_a + mu must be positive")
        if self.delta_i + self.mu <= 0:
            raise InvalidInputError("delta_i + mu must be positive")

    def replace(self, **changes: float) -> "ModelParams":
        """Return a copy with the given rates replaced (re-validated)."""
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in RATE_NAMES}


def _check_components(values, names, lo_tol: float) -> None:
    for name, value in zip(names, values):
        if not math.isfinite(value):
            raise InvalidInputError(f"state component {name} must be finite")
        if value < -lo_tol:
            raise InvalidInputError(f"state component {name} = {value!r} is negative")


@dataclass(frozen=True)
class StateFull:
    """A point on the unit simplex: fractions (s, a, i, r) summing to 1."""

    s: float
    a: float
    i: float
    r: float

    def __post_init__(self) -> None:
        values = (self.s, self.a, self.i, self.r)
        _check_components(values, "sair", SIMPLEX_TOL)
        total = self.s + self.a + self.i + self.r
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise InvalidInputError(f"components must sum to 1, got {total!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.a, self.i, self.r], dtype=float)

    def reduced(self) -> "StateReduced":
        return StateReduced(self.s, self.a, self.i)

    @classmethod
    def from_array(cls, arr) -> "StateFull":
        s, a, i, r = np.asarray(arr, dtype=float)
        return cls(float(s), float(a), float(i), float(r))


@dataclass(frozen=True)
class StateReduced:
    """A point of the reduced state space: s, a, i >= 0 with s + a + i <= 1."""

    s: float
    a: float
    i: float

    def __post_init__(self) -> None:
        values = (self.s, self.a, self.i)
        _check_components(values, "sai", SIMPLEX_TOL)
        total = self.s + self.a + self.i
        if total > 1.0 + SIMPLEX_TOL:
            raise InvalidInputError(f"s + a + i must be <= 1, got {total!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.a, self.i], dtype=float)

    def full(self) -> StateFull:
        return StateFull(self.s, self.a, self.i, 1.0 - self.s - self.a - self.i)

    @classmethod
    def from_array(cls, arr) -> "StateReduced":
        s, a, i = np.asarray(arr, dtype=float)
        return cls(float(s), float(a), float(i))


StateLike = Union[StateFull, StateReduced, "np.ndarray", list, tuple]


def _state_array(x: StateLike, dim: int) -> np.ndarray:
    """Coerce a state (object or array-like, trailing axis = dim) to floats."""
    if isinstance(x, (StateFull, StateReduced)):
        x = x.as_array()
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (dim,):
        raise InvalidInputError(f"expected trailing axis of size {dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("state contains non-finite components")
    return arr


@dataclass(frozen=True)
class NextGenPair:
    """New-infection matrix F and transition matrix V, linearized at the DFE.

    F has a zero second row (all new infections enter the asymptomatic
    class); V is lower-triangular with positive diagonal, hence invertible.
    """

    f_mat: np.ndarray
    v_mat: np.ndarray


@dataclass(frozen=True)
class HConstants:
    """Rate aggregates used by the closed forms and the endemic Jacobian.

    h0 = mu + nu + gamma, h1 = alpha + delta_a + mu, h2 = delta_i + mu,
    h3 = gamma*alpha + (h1 + gamma)*h2, h4 = (gamma + mu)/h0 <= 1.
    """

    h0: float
    h1: float
    h2: float
    h3: float
    h4: float

    def as_dict(self) -> dict:
        return {f"h{k}": getattr(self, f"h{k}") for k in range(5)}


class Regime(enum.Enum):
    """Long-run classification of an instance by its reproduction number."""

    DISEASE_FREE = "DiseaseFree"
    THRESHOLD = "Threshold"
    ENDEMIC = "Endemic"


@dataclass(frozen=True)
class EquilibriumReport:
    """Reproduction number, equilibria, and regime of one instance."""

    r0: float
    dfe: StateReduced
    endemic: Optional[StateReduced]
    regime: Regime
    h: HConstants


def rhs_full(params: ModelParams, x: StateLike) -> np.ndarray:
    """Time derivative (dS, dA, dI, dR)/dt of the four-compartment system.

    Broadcasts over leading axes: x may have shape (..., 4). On the unit
    simplex the four components sum to zero (total population conserved);
    off the simplex they sum to mu*(1 - S - A - I - R).
    """
    arr = _state_array(x, 4)
    s, a, i, r = arr[..., 0], arr[..., 1], arr[..., 2], arr[..., 3]
    p = params
    infections = (p.beta_a * a + p.beta_i * i) * s
    ds = p.mu - infections - (p.mu + p.nu) * s + p.gamma * r
    da = infections - (p.alpha + p.delta_a + p.mu) * a
    di = p.alpha * a - (p.delta_i + p.mu) * i
    dr = p.delta_a * a + p.delta_i * i + p.nu * s - (p.gamma + p.mu) * r
    return np.stack([ds, da, di, dr], axis=-1)


def rhs_reduced(params: ModelParams, x: StateLike) -> np.ndarray:
    """Time derivative (dS, dA, dI)/dt after eliminating R = 1 - S - A - I.

    Agrees with the first three components of rhs_full evaluated on the
    lifted state. Broadcasts over leading axes (x of shape (..., 3)).
    """
    arr = _state_array(x, 3)
    s, a, i = arr[..., 0], arr[..., 1], arr[..., 2]
    p = params
    infections = (p.beta_a * a + p.beta_i * i) * s
    ds = p.mu - infections - (p.mu + p.nu + p.gamma) * s + p.gamma * (1.0 - a - i)
    da = infections - (p.alpha + p.delta_a + p.mu) * a
    di = p.alpha * a - (p.delta_i + p.mu) * i
    return np.stack([ds, da, di], axis=-1)


def jacobian_reduced(params: ModelParams, x: StateLike) -> np.ndarray:
    """Jacobian of rhs_reduced at x, shape (..., 3, 3)."""
    arr = _state_array(x, 3)
    s, a, i = arr[..., 0], arr[..., 1], arr[..., 2]
    p = params
    force = p.beta_a * a + p.beta_i * i
    zero = np.zeros_like(s)
    rows = [
        [-force - (p.mu + p.nu + p.gamma), -p.beta_a * s - p.gamma, -p.beta_i * s - p.gamma],
        [force, p.beta_a * s - (p.alpha + p.delta_a + p.mu), p.beta_i * s],
        [zero, np.full_like(s, p.alpha), np.full_like(s, -(p.delta_i + p.mu))],
    ]
    return np.stack([np.stack(np.broadcast_arrays(*row), axis=-1) for row in rows], axis=-2)


def jacobian_full(params: ModelParams, x: StateLike) -> np.ndarray:
    """Jacobian of rhs_full at x, shape (..., 4, 4).

    Splits as -mu * Identity plus a part collecting all inter-compartment
    flows (see contact_part).
    """
    arr = _state_array(x, 4)
    phi = contact_part(params, arr)
    eye = np.eye(4)
    return phi - params.mu * eye


def contact_part(params: ModelParams, x: StateLike) -> np.ndarray:
    """The Jacobian of rhs_full with the -mu*I death term removed."""
    arr = _state_array(x, 4)
    s, a, i = arr[..., 0], arr[..., 1], arr[..., 2]
    p = params
    force = p.beta_a * a + p.beta_i * i
    zero = np.zeros_like(s)

    def const(c):
        return np.full_like(s, c)

    rows = [
        [-(force + p.nu), -p.beta_a * s, -p.beta_i * s, const(p.gamma)],
        [force, p.beta_a * s - (p.delta_a + p.alpha), p.beta_i * s, zero],
        [zero, const(p.alpha), const(-p.delta_i), zero],
        [const(p.nu), const(p.delta_a), const(p.delta_i), const(-p.gamma)],
    ]
    return np.stack([np.stack(np.broadcast_arrays(*row), axis=-1) for row in rows], axis=-2)


def next_gen_pair(params: ModelParams) -> NextGenPair:
    """F and V of the next-generation construction at the disease-free state."""
    p = params
    s0 = dfe(p).s
    f_mat = np.array([[p.beta_a * s0, p.beta_i * s0], [0.0, 0.0]])
    v_mat = np.array([[p.alpha + p.delta_a + p.mu, 0.0], [-p.alpha, p.delta_i + p.mu]])
    return NextGenPair(f_mat=f_mat, v_mat=v_mat)


def r0_closed_form(params: ModelParams) -> float:
    """Basic reproduction number, the spectral radius of F V^-1 in closed form.

    R0 = (beta_a + alpha*beta_i/(delta_i + mu))
         * (gamma + mu) / ((alpha + delta_a + mu) * (nu + gamma + mu))
    """
    p = params
    h2 = p.delta_i + p.mu
    return (
        (p.beta_a + p.alpha * p.beta_i / h2)
        * (p.gamma + p.mu)
        / ((p.alpha + p.delta_a + p.mu) * (p.nu + p.gamma + p.mu))
    )


def dfe(params: ModelParams) -> StateReduced:
    """Disease-free equilibrium ((gamma+mu)/(gamma+mu+nu), 0, 0)."""
    p = params
    return StateReduced((p.gamma + p.mu) / (p.gamma + p.mu + p.nu), 0.0, 0.0)


def h_constants(params: ModelParams) -> HConstants:
    p = params
    h0 = p.mu + p.nu + p.gamma
    h1 = p.alpha + p.delta_a + p.mu
    h2 = p.delta_i + p.mu
    h3 = p.gamma * p.alpha + (h1 + p.gamma) * h2
    h4 = (p.gamma + p.mu) / h0
    return HConstants(h0=h0, h1=h1, h2=h2, h3=h3, h4=h4)


def endemic_equilibrium(params: ModelParams) -> Optional[StateReduced]:
    """The unique interior equilibrium, or None when R0 <= 1.

    Evaluated through the h-aggregates to stay well conditioned near
    R0 = 1: S* = h1*h2/(beta_a*h2 + beta_i*alpha),
    I* = alpha*h0*h1*h2*(R0 - 1)/(h3*(beta_a*h2 + beta_i*alpha)),
    A* = (h2/alpha) * I*.
    """
    p = params
    r0 = r0_closed_form(p)
    if r0 <= 1.0:
        return None
    if p.alpha == 0.0:
        raise DegenerateParameterError(
            "endemic equilibrium undefined for alpha = 0 (A*/I* relation divides by alpha)"
        )
    h = h_constants(p)
    weight = p.beta_a * h.h2 + p.beta_i * p.alpha
    s_star = h.h1 * h.h2 / weight
    i_star = p.alpha * h.h0 * h.h1 * h.h2 * (r0 - 1.0) / (h.h3 * weight)
    a_star = (h.h2 / p.alpha) * i_star
    return StateReduced(s_star, a_star, i_star)


def classify_regime(params: ModelParams, boundary_tol: float = 1e-9) -> Regime:
    """Threshold R0 against 1 with an explicit boundary band of width boundary_tol."""
    if not boundary_tol > 0:
        raise InvalidInputError("boundary_tol must be positive")
    r0 = r0_closed_form(params)
    if r0 < 1.0 - boundary_tol:
        return Regime.DISEASE_FREE
    if r0 > 1.0 + boundary_tol:
        return Regime.ENDEMIC
    return Regime.THRESHOLD


def equilibrium_report(params: ModelParams, boundary_tol: float = 1e-9) -> EquilibriumReport:
    """Bundle R0, the equilibria, the regime, and the h-aggregates."""
    return EquilibriumReport(
        r0=r0_closed_form(params),
        dfe=dfe(params),
        endemic=endemic_equilibrium(params),
        regime=classify_regime(params, boundary_tol),
        h=h_constants(params),
    )
