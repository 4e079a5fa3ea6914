"""Seeded property suite behind the `verify` CLI command.

Each check draws its own cases from one shared generator, so the whole
suite is deterministic for a fixed (seed, n) and cheap enough to run as a
smoke test after installation. The pytest suite covers the same ground and
more; this module exists so a deployed CLI can audit itself without a test
harness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import experiments, model, stability
from .model import ModelParams

__all__ = ["CheckResult", "run_all_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _draws(rng: np.random.Generator, n: int, **kw) -> List[ModelParams]:
    return [experiments.sample_params(rng, **kw) for _ in range(n)]


def _interior_points(rng: np.random.Generator, n: int) -> np.ndarray:
    pts = rng.dirichlet(np.ones(3), size=n)
    return pts * rng.uniform(0.05, 0.999, size=(n, 1))


def _check_r0_spectral(rng, n):
    worst = 0.0
    for p in _draws(rng, n):
        pair = model.next_gen_pair(p)
        rho = float(np.max(np.abs(np.linalg.eigvals(pair.f_mat @ np.linalg.inv(pair.v_mat)))))
        r0 = model.r0_closed_form(p)
        ref = max(r0, 1e-300)
        worst = max(worst, abs(rho - r0) / ref)
    return worst <= 1e-12, f"max rel err {worst:.3e} (tol 1e-12)"


def _check_equilibria_roots(rng, n):
    worst_dfe = 0.0
    worst_ee = 0.0
    for p in _draws(rng, n):
        worst_dfe = max(worst_dfe, float(np.max(np.abs(model.rhs_reduced(p, model.dfe(p))))))
        ee = model.endemic_equilibrium(p)
        if ee is not None:
            worst_ee = max(worst_ee, float(np.max(np.abs(model.rhs_reduced(p, ee)))))
    ok = worst_dfe <= 1e-14 and worst_ee <= 1e-10
    return ok, f"max residual dfe {worst_dfe:.3e} (tol 1e-14), ee {worst_ee:.3e} (tol 1e-10)"


def _check_reduction(rng, n):
    worst = 0.0
    for p in _draws(rng, min(n, 200)):
        pts = rng.dirichlet(np.ones(4), size=16)
        full = model.rhs_full(p, pts)
        red = model.rhs_reduced(p, pts[:, :3])
        worst = max(worst, float(np.max(np.abs(full[:, :3] - red))))
        worst = max(worst, float(np.max(np.abs(full.sum(axis=1)))))
    return worst <= 1e-14, f"max gap {worst:.3e} (tol 1e-14)"


def _check_threshold_law(rng, n):
    bad = 0
    checked = 0
    while checked < n:
        p = experiments.sample_params(rng)
        r0 = model.r0_closed_form(p)
        if abs(r0 - 1.0) <= 1e-3:
            continue
        checked += 1
        if stability.dfe_spectrum(p).stable != (r0 < 1.0):
            bad += 1
    return bad == 0, f"{bad}/{checked} sign mismatches"


def _check_fv_real_spectrum(rng, n):
    worst = 0.0
    for p in _draws(rng, n):
        pair = model.next_gen_pair(p)
        eig = np.linalg.eigvals(pair.f_mat - pair.v_mat)
        worst = max(worst, float(np.max(np.abs(eig.imag))))
    return worst <= 1e-12, f"max imaginary part {worst:.3e} (tol 1e-12)"


def _fd_jacobian(f, x, step=1e-6):
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        cols.append((f(x + e) - f(x - e)) / (2 * step))
    return np.stack(cols, axis=-1)


def _check_jacobians(rng, n):
    worst = 0.0
    for p in _draws(rng, min(n, 60)):
        x4 = rng.dirichlet(np.ones(4))
        num4 = _fd_jacobian(lambda z: model.rhs_full(p, z), x4)
        ana4 = model.jacobian_full(p, x4)
        scale4 = np.max(np.abs(ana4)) + 1.0
        worst = max(worst, float(np.max(np.abs(num4 - ana4)) / scale4))
        x3 = x4[:3]
        num3 = _fd_jacobian(lambda z: model.rhs_reduced(p, z), x3)
        ana3 = model.jacobian_reduced(p, x3)
        scale3 = np.max(np.abs(ana3)) + 1.0
        worst = max(worst, float(np.max(np.abs(num3 - ana3)) / scale3))
    return worst <= 1e-5, f"max rel gap {worst:.3e} (tol 1e-5)"


def _check_compound(rng, n):
    worst_spec = 0.0
    worst_lin = 0.0
    for _ in range(min(n, 60)):
        m = rng.normal(size=(4, 4))
        comp = stability.third_additive_compound(m)
        lam = np.linalg.eigvals(m)
        triples = [
            lam[i] + lam[j] + lam[k]
            for i in range(4) for j in range(i + 1, 4) for k in range(j + 1, 4)
        ]
        got = np.sort_complex(np.linalg.eigvals(comp))
        want = np.sort_complex(np.array(triples))
        worst_spec = max(worst_spec, float(np.max(np.abs(got - want))))
        m2 = rng.normal(size=(4, 4))
        a = rng.normal()
        lin_gap = np.max(
            np.abs(
                stability.third_additive_compound(a * m + m2)
                - (a * comp + stability.third_additive_compound(m2))
            )
        )
        worst_lin = max(worst_lin, float(lin_gap))
    ok = worst_spec <= 1e-9 and worst_lin <= 1e-12
    return ok, f"spectrum gap {worst_spec:.3e} (tol 1e-9), linearity {worst_lin:.3e} (tol 1e-12)"


def _check_sstar_invariance(rng, n):
    worst = 0.0
    for p in _draws(rng, min(n, 50), predicate=lambda q: model.r0_closed_form(q) > 1.0):
        base = model.endemic_equilibrium(p)
        for gamma in (1e-4, 1e-2, 0.3):
            for nu in (0.0, 1e-3, 0.2):
                q = p.replace(gamma=gamma, nu=nu)
                ee = model.endemic_equilibrium(q)
                if ee is not None:
                    worst = max(worst, abs(ee.s - base.s))
    return worst <= 1e-12, f"max S* spread over gamma/nu grid {worst:.3e} (tol 1e-12)"


def _check_ee_ratio(rng, n):
    worst = 0.0
    for p in _draws(rng, min(n, 200), predicate=lambda q: model.r0_closed_form(q) > 1.0):
        ee = model.endemic_equilibrium(p)
        ratio = (p.delta_i + p.mu) / p.alpha
        worst = max(worst, abs(ee.a / ee.i - ratio) / ratio)
    return worst <= 1e-6, f"max rel gap of A*/I* {worst:.3e} (tol 1e-6)"


def _check_ee_switch(rng, n):
    for _ in range(min(n, 20)):
        p = experiments.sample_params(rng)
        for lam in np.geomspace(0.05, 20.0, 25):
            q = p.replace(beta_a=lam * p.beta_a, beta_i=lam * p.beta_i)
            exists = model.endemic_equilibrium(q) is not None
            if exists != (model.r0_closed_form(q) > 1.0):
                return False, f"existence mismatch at scale {lam}"
    return True, "existence tracks R0 > 1 across scalings"


def _lyapunov_worsts(sample):
    value = np.asarray(sample.value)
    deriv = np.asarray(sample.derivative)
    return float(value.min()), float(deriv.max())


def _check_lyapunov_sair(rng, n):
    worst_val = np.inf
    worst_der = -np.inf
    for _ in range(min(n, 10)):
        p = experiments.sample_params(
            rng, overrides={"gamma": 0.0}, predicate=lambda q: model.r0_closed_form(q) > 1.0
        )
        pts = _interior_points(rng, 1000)
        low, high = _lyapunov_worsts(stability.lyapunov_sair(p, pts))
        worst_val = min(worst_val, low)
        worst_der = max(worst_der, high)
    ok = worst_val >= -1e-15 and worst_der <= 1e-12
    return ok, f"min value {worst_val:.3e}, max dV/dt {worst_der:.3e} (tol 1e-12)"


def _check_lyapunov_symmetric(rng, n):
    worst_val = np.inf
    worst_der = -np.inf
    for _ in range(min(n, 10)):
        p = experiments.sample_params(
            rng, equal_rates=True, predicate=lambda q: model.r0_closed_form(q) > 1.0
        )
        pts = _interior_points(rng, 1000)
        low, high = _lyapunov_worsts(stability.lyapunov_sairs_equal(p, pts))
        worst_val = min(worst_val, low)
        worst_der = max(worst_der, high)
    ok = worst_val >= -1e-15 and worst_der <= 1e-12
    return ok, f"min value {worst_val:.3e}, max dV/dt {worst_der:.3e} (tol 1e-12)"


_CHECKS: List[Callable] = [
    ("r0-matches-spectral-radius", _check_r0_spectral),
    ("equilibria-are-roots", _check_equilibria_roots),
    ("reduction-and-conservation", _check_reduction),
    ("dfe-threshold-law", _check_threshold_law),
    ("infection-block-real-spectrum", _check_fv_real_spectrum),
    ("jacobians-match-finite-differences", _check_jacobians),
    ("compound-matrix-laws", _check_compound),
    ("sstar-independent-of-gamma-nu", _check_sstar_invariance),
    ("endemic-ratio-law", _check_ee_ratio),
    ("endemic-existence-switch", _check_ee_switch),
    ("lyapunov-permanent-immunity", _check_lyapunov_sair),
    ("lyapunov-symmetric-rates", _check_lyapunov_symmetric),
]


def run_all_checks(seed: int, n: int) -> List[CheckResult]:
    """Run every property check with its own derived seed; deterministic."""
    results = []
    for offset, (name, check) in enumerate(_CHECKS):
        rng = np.random.default_rng([seed, offset])
        passed, detail = check(rng, n)
        results.append(CheckResult(name=name, passed=passed, detail=detail))
    return results
