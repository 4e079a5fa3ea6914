"""Parameter sweeps, trajectory families, persistence, and the endemic-stability probe.

The named studies reproduce the standard numerical exploration of the model:
a two-parameter sweep over the transmission rates (where the threshold line
R0 = 1 separates a constant disease-free plateau from the endemic surface),
one-parameter trajectory families over the immunity-loss, symptom-onset and
vaccination rates, and a randomized probe of endemic convergence outside the
parameter regime covered by the geometric certificate.

All results are deterministic given the seed; sweep cells and family members
are independent work items merged by grid index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError
from .integrator import DEFAULT_INITIAL_STATE, IntegrationConfig, Trajectory, integrate
from .model import (
    RATE_NAMES,
    EquilibriumReport,
    ModelParams,
    Regime,
    StateFull,
    equilibrium_report,
)

__all__ = [
    "MU_LIFESPAN_70Y",
    "AxisSpec",
    "SweepSpec",
    "SweepResult",
    "FamilyMember",
    "FamilyResult",
    "ProbeSample",
    "ProbeReport",
    "run_sweep",
    "run_family",
    "measure_persistence",
    "persistence_floor",
    "sample_params",
    "sample_interior_state",
    "settle_config",
    "probe_conjecture",
    "transmission_sweep_spec",
    "family_study",
    "FAMILY_STUDIES",
]

#: Demographic turnover for a 70-year average lifespan (1/day).
MU_LIFESPAN_70Y = 1.0 / (70.0 * 365.0)


@dataclass(frozen=True)
class AxisSpec:
    """One swept parameter: name, closed range, and grid count."""

    param: str
    lo: float
    hi: float
    count: int

    def __post_init__(self) -> None:
        if self.param not in RATE_NAMES:
            raise InvalidInputError(f"unknown rate {self.param!r}; expected one of {RATE_NAMES}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo < 0 or self.hi < self.lo:
            raise InvalidInputError("axis range must satisfy 0 <= lo <= hi")
        if self.count < 1:
            raise InvalidInputError("axis count must be >= 1")

    @property
    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.count)


class Quantity:
    """What a sweep is primarily after (all of it is computed regardless)."""

    ASYMPTOTIC_STATE = "AsymptoticState"
    R0 = "R0"
    REGIME = "Regime"


@dataclass(frozen=True)
class SweepSpec:
    """Two-axis grid around a base instance."""

    base: ModelParams
    axis1: AxisSpec
    axis2: AxisSpec
    quantity: str = Quantity.ASYMPTOTIC_STATE


@dataclass(frozen=True)
class SweepResult:
    """Per-cell records of a sweep, shaped (axis1.count, axis2.count).

    regime holds Regime enum members (object dtype). check_error is the
    max-norm gap between the integrated and closed-form asymptotic state on
    the integration-checked subsample, NaN elsewhere. converged is False
    only on checked cells whose integration failed to settle.
    """

    spec: SweepSpec
    values1: np.ndarray
    values2: np.ndarray
    r0: np.ndarray
    s_inf: np.ndarray
    a_inf: np.ndarray
    i_inf: np.ndarray
    r_inf: np.ndarray
    regime: np.ndarray
    converged: np.ndarray
    check_error: np.ndarray

    def iter_rows(self):
        """Yield per-cell dicts in deterministic row-major order."""
        for i, v1 in enumerate(self.values1):
            for j, v2 in enumerate(self.values2):
                yield {
                    self.spec.axis1.param: float(v1),
                    self.spec.axis2.param: float(v2),
                    "r0": float(self.r0[i, j]),
                    "regime": self.regime[i, j],
                    "S_inf": float(self.s_inf[i, j]),
                    "A_inf": float(self.a_inf[i, j]),
                    "I_inf": float(self.i_inf[i, j]),
                    "R_inf": float(self.r_inf[i, j]),
                }


def _asymptotic_state(report: EquilibriumReport) -> Tuple[float, float, float, float]:
    """Closed-form long-run state: the endemic point when it exists, else the DFE."""
    point = report.endemic if report.endemic is not None else report.dfe
    return point.s, point.a, point.i, 1.0 - point.s - point.a - point.i


def sweep_cell(base: ModelParams, axis1: AxisSpec, axis2: AxisSpec, v1: float, v2: float,
               boundary_tol: float = 1e-9):
    """Closed-form record for one grid cell; pure in its arguments."""
    params = base.replace(**{axis1.param: float(v1), axis2.param: float(v2)})
    report = equilibrium_report(params, boundary_tol)
    return params, report, _asymptotic_state(report)


def run_sweep(
    spec: SweepSpec,
    cfg: Optional[IntegrationConfig] = None,
    boundary_tol: float = 1e-9,
    check: Tuple[int, int] = (5, 5),
    check_tol: float = 1e-5,
) -> SweepResult:
    """Evaluate a sweep from closed forms, cross-checked by integration.

    Every cell gets R0, regime, and the closed-form asymptotic state. An
    evenly spaced check[0] x check[1] subsample of cells (capped by the grid
    shape) is additionally integrated from the default initial state and
    compared against the closed form; disagreement beyond check_tol or a
    non-settling run flags the cell (converged False) without aborting.
    """
    v1 = spec.axis1.values
    v2 = spec.axis2.values
    n1, n2 = len(v1), len(v2)
    shape = (n1, n2)
    r0 = np.empty(shape)
    s_inf = np.empty(shape)
    a_inf = np.empty(shape)
    i_inf = np.empty(shape)
    r_inf = np.empty(shape)
    regime = np.empty(shape, dtype=object)
    converged = np.ones(shape, dtype=bool)
    check_error = np.full(shape, np.nan)

    grid_params = np.empty(shape, dtype=object)
    for i in range(n1):
        for j in range(n2):
            params, report, state = sweep_cell(spec.base, spec.axis1, spec.axis2, v1[i], v2[j],
                                               boundary_tol)
            grid_params[i, j] = params
            r0[i, j] = report.r0
            regime[i, j] = report.regime
            s_inf[i, j], a_inf[i, j], i_inf[i, j], r_inf[i, j] = state

    k1, k2 = min(check[0], n1), min(check[1], n2)
    if k1 > 0 and k2 > 0:
        if cfg is None:
            cfg = IntegrationConfig(t_max=200000.0, sample_dt=20.0, steady_window=200.0)
        rows = np.unique(np.linspace(0, n1 - 1, k1).round().astype(int))
        cols = np.unique(np.linspace(0, n2 - 1, k2).round().astype(int))
        for i in rows:
            for j in cols:
                if abs(r0[i, j] - 1.0) <= boundary_tol:
                    continue
                trajectory = integrate(grid_params[i, j], DEFAULT_INITIAL_STATE, cfg)
                target = np.array([s_inf[i, j], a_inf[i, j], i_inf[i, j], r_inf[i, j]])
                gap = float(np.max(np.abs(trajectory.states[-1] - target)))
                check_error[i, j] = gap
                if not trajectory.converged or gap > check_tol:
                    converged[i, j] = False

    return SweepResult(
        spec=spec,
        values1=v1,
        values2=v2,
        r0=r0,
        s_inf=s_inf,
        a_inf=a_inf,
        i_inf=i_inf,
        r_inf=r_inf,
        regime=regime,
        converged=converged,
        check_error=check_error,
    )


@dataclass(frozen=True)
class FamilyMember:
    """One run of a one-parameter family, with its closed-form equilibria."""

    value: float
    params: ModelParams
    trajectory: Trajectory
    report: EquilibriumReport


@dataclass(frozen=True)
class FamilyResult:
    vary: str
    base: ModelParams
    members: Tuple[FamilyMember, ...]


def run_family(
    base: ModelParams,
    vary: str,
    values: Sequence[float],
    cfg: Optional[IntegrationConfig] = None,
    x0: StateFull = DEFAULT_INITIAL_STATE,
) -> FamilyResult:
    """Integrate one trajectory per parameter value from a shared initial state."""
    if vary not in RATE_NAMES:
        raise InvalidInputError(f"unknown rate {vary!r}; expected one of {RATE_NAMES}")
    if cfg is None:
        cfg = IntegrationConfig()
    members = []
    for value in values:
        params = base.replace(**{vary: float(value)})
        trajectory = integrate(params, x0, cfg)
        members.append(
            FamilyMember(
                value=float(value),
                params=params,
                trajectory=trajectory,
                report=equilibrium_report(params),
            )
        )
    return FamilyResult(vary=vary, base=base, members=tuple(members))


def measure_persistence(trajectory: Trajectory, tail_fraction: float = 0.5) -> np.ndarray:
    """Componentwise minima of S, A, I over the trailing tail_fraction of samples."""
    if not (0.0 < tail_fraction < 1.0):
        raise InvalidInputError("tail_fraction must lie strictly between 0 and 1")
    n = len(trajectory.times)
    count = int(n * tail_fraction)
    if count < 1:
        raise InvalidInputError("tail is empty for this trajectory and tail_fraction")
    return trajectory.states[n - count :, :3].min(axis=0)


def persistence_floor(trajectory: Trajectory, tail_fraction: float = 0.5, safety: float = 0.9) -> float:
    """Scalar floor for the geometric certificate: tail minimum shrunk for safety."""
    return float(measure_persistence(trajectory, tail_fraction).min() * safety)


def sample_params(
    rng: np.random.Generator,
    overrides: Optional[Dict[str, float]] = None,
    equal_rates: bool = False,
    predicate: Optional[Callable[[ModelParams], bool]] = None,
    max_tries: int = 100000,
) -> ModelParams:
    """Random instance: each rate log-uniform on [1e-4, 1], mu fixed at 70 years.

    equal_rates ties beta_i to beta_a and delta_i to delta_a; overrides are
    applied afterwards; draws are rejected until predicate holds.
    """
    names = ("beta_a", "beta_i", "alpha", "delta_a", "delta_i", "gamma", "nu")
    for _ in range(max_tries):
        draws = 10.0 ** rng.uniform(-4.0, 0.0, size=7)
        kw = dict(zip(names, draws))
        if equal_rates:
            kw["beta_i"] = kw["beta_a"]
            kw["delta_i"] = kw["delta_a"]
        if overrides:
            kw.update(overrides)
        params = ModelParams(mu=MU_LIFESPAN_70Y, **kw)
        if predicate is None or predicate(params):
            return params
    raise InvalidInputError("no parameter draw satisfied the predicate")


def sample_interior_state(rng: np.random.Generator) -> StateFull:
    """Uniform random strictly interior point of the probability simplex."""
    return StateFull.from_array(rng.dirichlet(np.ones(4)))


def settle_config(rate: float, target: float, floor: float = 5000.0,
                  cap: float = 5e8) -> IntegrationConfig:
    """Integration settings sized to settle within `target` of an equilibrium.

    rate is the slowest decay rate (1/day, the magnitude of the largest real
    part of the local spectrum): the horizon spans 22 e-folds of it and the
    steady threshold is scaled so detection cannot fire while the slow mode
    is still further out than about target/100.
    """
    rate = abs(rate)
    if rate <= 0.0 or not math.isfinite(rate):
        t_max = cap
    else:
        t_max = min(max(floor, 22.0 / rate), cap)
    sample_dt = max(1.0, t_max / 4000.0)
    return IntegrationConfig(
        t_max=t_max,
        sample_dt=sample_dt,
        steady_window=10.0 * sample_dt,
        steady_tol=max(rate * target * 1e-2, 1e-14),
    )


@dataclass(frozen=True)
class ProbeSample:
    params: ModelParams
    r0: float
    x0: StateFull
    converged: bool
    max_error: float


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of the randomized endemic-convergence probe."""

    n_samples: int
    seed: int
    proved_regime: bool
    fraction_converged: float
    samples: Tuple[ProbeSample, ...]


def probe_conjecture(
    n_samples: int,
    seed: int,
    cfg: Optional[IntegrationConfig] = None,
    proved_regime: bool = False,
    tol: float = 1e-5,
) -> ProbeReport:
    """Randomized check that endemic instances converge to the endemic point.

    Draws instances with R0 > 1 and beta_a >= delta_i, i.e. outside the
    regime the geometric certificate covers (proved_regime flips the
    constraint to beta_a < delta_i), integrates each from a random interior
    state, and reports the fraction landing within tol of the closed-form
    endemic equilibrium. When cfg is omitted, each run gets a horizon sized
    to its own endemic spectrum (near-threshold instances settle very
    slowly). Deterministic for a fixed seed.
    """
    if n_samples < 1:
        raise InvalidInputError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)

    def constraint(p: ModelParams) -> bool:
        from .model import r0_closed_form

        inside = p.beta_a < p.delta_i
        return r0_closed_form(p) > 1.0 and (inside if proved_regime else not inside)

    samples = []
    hits = 0
    for _ in range(n_samples):
        params = sample_params(rng, predicate=constraint)
        x0 = sample_interior_state(rng)
        report = equilibrium_report(params)
        target = np.array(_asymptotic_state(report))
        if cfg is None:
            from .stability import ee_spectrum

            run_cfg = settle_config(ee_spectrum(params).max_real_part, tol)
        else:
            run_cfg = cfg
        trajectory = integrate(params, x0, run_cfg)
        gap = float(np.max(np.abs(trajectory.states[-1] - target)))
        ok = gap <= tol
        hits += ok
        samples.append(
            ProbeSample(params=params, r0=report.r0, x0=x0, converged=ok, max_error=gap)
        )
    return ProbeReport(
        n_samples=n_samples,
        seed=seed,
        proved_regime=proved_regime,
        fraction_converged=hits / n_samples,
        samples=tuple(samples),
    )


# --- Named studies ---------------------------------------------------------

def transmission_sweep_spec(count_a: int = 80, count_i: int = 95) -> SweepSpec:
    """Sweep of both transmission rates with all other rates fixed.

    The default 80 x 95 grid steps each rate by 0.01. Along grid lines R0 is
    affine in the swept rate, so the threshold set R0 = 1 is a straight line
    separating a constant disease-free plateau from the endemic surface.
    """
    base = ModelParams(
        beta_a=0.01,
        beta_i=0.01,
        alpha=0.15,
        delta_a=0.1,
        delta_i=0.15,
        gamma=1.0 / 100.0,
        nu=0.01,
        mu=MU_LIFESPAN_70Y,
    )
    return SweepSpec(
        base=base,
        axis1=AxisSpec("beta_a", 0.01, 0.8, count_a),
        axis2=AxisSpec("beta_i", 0.01, 0.95, count_i),
    )


def _immunity_loss_study():
    base = ModelParams(
        beta_a=0.8, beta_i=0.95, alpha=0.15, delta_a=0.125, delta_i=0.15,
        gamma=0.01, nu=0.01, mu=MU_LIFESPAN_70Y,
    )
    return base, "gamma", (0.001, 0.01, 0.02, 0.05)


def _onset_study(beta_a: float, beta_i: float):
    base = ModelParams(
        beta_a=beta_a, beta_i=beta_i, alpha=0.15, delta_a=0.125, delta_i=0.15,
        gamma=1.0 / 100.0, nu=0.01, mu=MU_LIFESPAN_70Y,
    )
    return base, "alpha", (0.01, 0.3, 0.5, 0.7, 0.9)


def _vaccination_study():
    base = ModelParams(
        beta_a=0.5, beta_i=0.9, alpha=0.9, delta_a=0.1, delta_i=0.51,
        gamma=1.0 / 50.0, nu=0.01, mu=MU_LIFESPAN_70Y,
    )
    return base, "nu", (0.0, 0.005, 0.01, 0.02)


#: One-parameter studies: name -> (base params, varied rate, default values).
FAMILY_STUDIES: Dict[str, Callable[[], Tuple[ModelParams, str, Tuple[float, ...]]]] = {
    "immunity-loss": _immunity_loss_study,
    "onset-equal": lambda: _onset_study(0.9, 0.9),
    "onset-asymptomatic": lambda: _onset_study(0.9, 0.5),
    "onset-symptomatic": lambda: _onset_study(0.5, 0.9),
    "vaccination": _vaccination_study,
}


def family_study(name: str) -> Tuple[ModelParams, str, Tuple[float, ...]]:
    """Look up a named one-parameter study."""
    try:
        return FAMILY_STUDIES[name]()
    except KeyError:
        raise InvalidInputError(
            f"unknown study {name!r}; expected one of {sorted(FAMILY_STUDIES)}"
        ) from None
