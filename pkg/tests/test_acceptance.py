"""Acceptance suite: one test per criterion, each at its stated tolerance.

Run `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line per
criterion with its runtime. Every test is seeded and deterministic.
"""

import time
from contextlib import contextmanager

import numpy as np

from conftest import MU
from sairs_lab.experiments import (
    family_study,
    persistence_floor,
    probe_conjecture,
    run_family,
    sample_interior_state,
    sample_params,
    settle_config,
)
from sairs_lab.integrator import DEFAULT_INITIAL_STATE, IntegrationConfig, integrate
from sairs_lab.model import (
    ModelParams,
    contact_part,
    dfe,
    endemic_equilibrium,
    next_gen_pair,
    r0_closed_form,
    rhs_reduced,
)
from sairs_lab.stability import (
    dfe_spectrum,
    ee_spectrum,
    geometric_certificate,
    lyapunov_sair,
    lyapunov_sairs_equal,
    third_additive_compound,
)

rng_seed = 20260809


@contextmanager
def criterion(name):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL ({time.perf_counter() - start:.2f}s)")
        raise
    print(f"\nACCEPTANCE {name}: PASS ({time.perf_counter() - start:.2f}s)")


def lifted(point3):
    return np.array([point3.s, point3.a, point3.i, 1.0 - point3.s - point3.a - point3.i])


def interior_points(rng, n):
    pts = rng.dirichlet(np.ones(3), size=n)
    return pts * rng.uniform(0.05, 0.999, size=(n, 1))


def vaccination_study_params():
    return ModelParams(0.5, 0.9, 0.9, 0.1, 0.51, 1.0 / 50.0, 0.01, MU)


def test_r0_equivalence():
    with criterion("r0-equivalence"):
        rng = np.random.default_rng(rng_seed)
        start = time.perf_counter()
        worst = 0.0
        for _ in range(1000):
            p = sample_params(rng)
            pair = next_gen_pair(p)
            rho = float(np.max(np.abs(np.linalg.eigvals(pair.f_mat @ np.linalg.inv(pair.v_mat)))))
            r0 = r0_closed_form(p)
            worst = max(worst, abs(rho - r0) / max(r0, 1e-300))
        elapsed = time.perf_counter() - start
        assert worst <= 1e-12, f"worst relative gap {worst}"
        assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"


def test_equilibrium_residuals():
    with criterion("equilibrium-residuals"):
        rng = np.random.default_rng(rng_seed + 1)
        start = time.perf_counter()
        worst_dfe = 0.0
        worst_ee = 0.0
        endemic_seen = 0
        while endemic_seen < 1000:
            p = sample_params(rng)
            worst_dfe = max(worst_dfe, float(np.max(np.abs(rhs_reduced(p, dfe(p))))))
            star = endemic_equilibrium(p)
            if star is not None:
                endemic_seen += 1
                worst_ee = max(worst_ee, float(np.max(np.abs(rhs_reduced(p, star)))))
        elapsed = time.perf_counter() - start
        assert worst_ee <= 1e-10, f"worst endemic residual {worst_ee}"
        assert worst_dfe <= 1e-14, f"worst disease-free residual {worst_dfe}"
        assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"


def test_threshold_law():
    with criterion("threshold-law"):
        rng = np.random.default_rng(rng_seed + 2)
        start = time.perf_counter()
        checked = 0
        while checked < 1000:
            p = sample_params(rng)
            r0 = r0_closed_form(p)
            if abs(r0 - 1.0) <= 1e-3:
                continue
            checked += 1
            report = dfe_spectrum(p)
            assert np.sign(report.max_real_part) == np.sign(r0 - 1.0), (p, r0)
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"runtime {elapsed:.2f}s exceeds 5s"


def test_global_dfe_stability_at_desk_scale():
    with criterion("global-dfe-stability"):
        rng = np.random.default_rng(rng_seed + 3)
        start = time.perf_counter()
        for _ in range(200):
            p = sample_params(rng, predicate=lambda q: r0_closed_form(q) < 1.0)
            x0 = sample_interior_state(rng)
            # Horizon sized to the slowest decay mode of this instance.
            cfg = settle_config(dfe_spectrum(p).max_real_part, 1e-6)
            trajectory = integrate(p, x0, cfg)
            target = lifted(dfe(p))
            gap = float(np.max(np.abs(trajectory.states[-1] - target)))
            assert gap <= 1e-6, (p, trajectory.converged, gap)
        elapsed = time.perf_counter() - start
        assert elapsed < 120.0, f"runtime {elapsed:.2f}s exceeds 2min"


def _lyapunov_protocol(evaluator, draw_kwargs, seed_shift):
    rng = np.random.default_rng(rng_seed + seed_shift)
    start = time.perf_counter()
    for _ in range(50):
        p = sample_params(rng, predicate=lambda q: r0_closed_form(q) > 1.0, **draw_kwargs)
        sample = evaluator(p, interior_points(rng, 10_000))
        assert float(np.max(sample.derivative)) <= 1e-12, p
    for _ in range(20):
        p = sample_params(rng, predicate=lambda q: r0_closed_form(q) > 1.0, **draw_kwargs)
        # Start at moderate multiplicative distance from the attractor.
        # Trajectories from far away pass exponentially close to extinction,
        # where the logarithmic terms of V amplify the integrator's absolute
        # error without bound and no floating-point scheme can resolve
        # monotonicity at 1e-10.
        star = lifted(endemic_equilibrium(p))
        x0 = star * np.exp(rng.uniform(-0.3, 0.3, size=4))
        x0 /= x0.sum()
        run_cfg = settle_config(
            ee_spectrum(p).max_real_part, 1e-8, floor=2000.0, cap=2e6
        )
        run_cfg = IntegrationConfig(
            rel_tol=1e-11, abs_tol=1e-16, t_max=run_cfg.t_max,
            sample_dt=run_cfg.sample_dt, steady_window=run_cfg.steady_window,
            steady_tol=run_cfg.steady_tol,
        )
        trajectory = integrate(p, x0, run_cfg)
        values = np.asarray(evaluator(p, trajectory.states[:, :3]).value)
        assert float(np.max(np.diff(values))) <= 1e-10, p
    return time.perf_counter() - start


def test_lyapunov_permanent_immunity():
    with criterion("lyapunov-permanent-immunity"):
        elapsed = _lyapunov_protocol(lyapunov_sair, {"overrides": {"gamma": 0.0}}, 4)
        assert elapsed < 60.0, f"runtime {elapsed:.2f}s exceeds 1min"


def test_lyapunov_symmetric_rates():
    with criterion("lyapunov-symmetric-rates"):
        elapsed = _lyapunov_protocol(lyapunov_sairs_equal, {"equal_rates": True}, 5)
        assert elapsed < 60.0, f"runtime {elapsed:.2f}s exceeds 1min"


def test_compound_matrix_law():
    with criterion("compound-matrix-law"):
        rng = np.random.default_rng(rng_seed + 6)
        for _ in range(100):
            m = rng.normal(size=(4, 4))
            lam = np.linalg.eigvals(m)
            want = np.sort_complex(
                np.array(
                    [
                        lam[i] + lam[j] + lam[k]
                        for i in range(4)
                        for j in range(i + 1, 4)
                        for k in range(j + 1, 4)
                    ]
                )
            )
            got = np.sort_complex(np.linalg.eigvals(third_additive_compound(m)))
            assert np.max(np.abs(got - want)) <= 1e-9
        for _ in range(100):
            p = sample_params(rng)
            x = rng.dirichlet(np.ones(4))
            phi = contact_part(p, x)
            s, a, i, _ = x
            force = p.beta_a * a + p.beta_i * i
            rows = np.array(
                [
                    [
                        -(force + p.nu) + p.beta_a * s - (p.delta_a + p.alpha) - p.delta_i,
                        0.0,
                        0.0,
                        p.gamma,
                    ],
                    [
                        p.delta_i,
                        -(force + p.nu) + p.beta_a * s - (p.delta_a + p.alpha) - p.gamma,
                        p.beta_i * s,
                        p.beta_i * s,
                    ],
                    [-p.delta_a, p.alpha, -(force + p.nu) - p.delta_i - p.gamma, -p.beta_a * s],
                    [
                        p.nu,
                        0.0,
                        force,
                        p.beta_a * s - (p.delta_a + p.alpha + p.delta_i + p.gamma),
                    ],
                ]
            )
            assert np.max(np.abs(third_additive_compound(phi) - rows)) <= 1e-12


def test_geometric_certificate_regime():
    with criterion("geometric-certificate"):
        p = vaccination_study_params()
        trajectory = integrate(p, DEFAULT_INITIAL_STATE, IntegrationConfig())
        assert trajectory.converged
        target = lifted(endemic_equilibrium(p))
        assert np.max(np.abs(trajectory.states[-1] - target)) <= 1e-6
        epsilon = persistence_floor(trajectory)
        certificate = geometric_certificate(p, epsilon)
        assert certificate.applicable
        assert certificate.h_bars is not None
        assert all(h < 0.0 for h in certificate.h_bars), certificate.h_bars
        assert certificate.certified


def test_figure_semantics():
    with criterion("figure-semantics"):
        start = time.perf_counter()

        # (a) immunity-loss family: common endemic S-limit; subcritical member dies out.
        base, vary, values = family_study("immunity-loss")
        family = run_family(base, vary, values)
        endemic = [m for m in family.members if m.report.r0 > 1.0]
        subcritical = [m for m in family.members if m.report.r0 < 1.0]
        assert len(endemic) == 3 and len(subcritical) == 1
        assert subcritical[0].value == 0.001
        s_limits = [m.trajectory.states[-1][0] for m in endemic]
        assert max(s_limits) - min(s_limits) <= 1e-4
        low = subcritical[0]
        assert low.trajectory.converged
        assert np.max(np.abs(low.trajectory.states[-1] - lifted(dfe(low.params)))) <= 1e-6

        # (b) onset families: asymptotic ordering of A and I follows (delta_i+mu)/alpha.
        for study in ("onset-equal", "onset-asymptomatic", "onset-symptomatic"):
            base, vary, values = family_study(study)
            family = run_family(base, vary, values)
            for member in family.members:
                assert member.report.r0 > 1.0
                ratio = (member.params.delta_i + member.params.mu) / member.params.alpha
                star = member.report.endemic
                assert (star.a > star.i) == (ratio > 1.0)
                final = member.trajectory.states[-1]
                assert (final[1] > final[2]) == (ratio > 1.0)

        # (c) vaccination family: infections strictly decreasing, S-limit unmoved.
        base, vary, values = family_study("vaccination")
        family = run_family(base, vary, values)
        stars = [m.report.endemic for m in family.members]
        assert all(star is not None for star in stars)
        assert all(x.a > y.a for x, y in zip(stars, stars[1:]))
        assert all(x.i > y.i for x, y in zip(stars, stars[1:]))
        assert len({star.s for star in stars}) == 1
        finals = np.array([m.trajectory.states[-1] for m in family.members])
        assert np.all(np.diff(finals[:, 1]) < 0.0) and np.all(np.diff(finals[:, 2]) < 0.0)
        assert np.max(np.abs(finals[:, 0] - stars[0].s)) <= 1e-6

        elapsed = time.perf_counter() - start
        assert elapsed < 300.0, f"runtime {elapsed:.2f}s exceeds 5min"


def test_conjecture_probe():
    with criterion("conjecture-probe"):
        report = probe_conjecture(100, seed=rng_seed)
        assert report.n_samples == 100
        assert 0.0 <= report.fraction_converged <= 1.0
        print(f"\nconjecture probe: fraction converged = {report.fraction_converged:.3f} "
              f"over {report.n_samples} draws (beta_a >= delta_i, R0 > 1)")
        if report.fraction_converged < 1.0:
            misses = [s for s in report.samples if not s.converged]
            print(f"FINDING: {len(misses)} draw(s) did not reach the endemic point; "
                  f"worst gap {max(s.max_error for s in misses):.3e}")


def test_positive_invariance():
    with criterion("positive-invariance"):
        rng = np.random.default_rng(rng_seed + 7)
        cfg = IntegrationConfig(t_max=150.0, sample_dt=5.0)
        for _ in range(10_000):
            p = sample_params(rng)
            x0 = rng.dirichlet(np.ones(4))
            trajectory = integrate(p, x0, cfg)  # raises beyond 1e-9 inflation
            assert np.min(trajectory.states) >= 0.0
