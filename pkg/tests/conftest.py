"""Shared fixtures and draw helpers for the test suite."""

import numpy as np
import pytest

from sairs_lab.experiments import MU_LIFESPAN_70Y, sample_params
from sairs_lab.model import ModelParams, r0_closed_form

MU = MU_LIFESPAN_70Y


def draw(rng, **kw) -> ModelParams:
    return sample_params(rng, **kw)


def draw_endemic(rng, **kw) -> ModelParams:
    return sample_params(rng, predicate=lambda p: r0_closed_form(p) > 1.0, **kw)


def draw_subcritical(rng, **kw) -> ModelParams:
    return sample_params(rng, predicate=lambda p: r0_closed_form(p) < 1.0, **kw)


def interior_reduced(rng, n):
    """Strictly positive points with s + a + i < 1."""
    pts = rng.dirichlet(np.ones(3), size=n)
    return pts * rng.uniform(0.05, 0.999, size=(n, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def vaccination_params():
    """Endemic instance with beta_a < delta_i (geometric-certificate regime)."""
    return ModelParams(
        beta_a=0.5, beta_i=0.9, alpha=0.9, delta_a=0.1, delta_i=0.51,
        gamma=1.0 / 50.0, nu=0.01, mu=MU,
    )


@pytest.fixture
def waning_base():
    """Base of the immunity-loss family (gamma gets replaced per member)."""
    return ModelParams(
        beta_a=0.8, beta_i=0.95, alpha=0.15, delta_a=0.125, delta_i=0.15,
        gamma=0.01, nu=0.01, mu=MU,
    )
