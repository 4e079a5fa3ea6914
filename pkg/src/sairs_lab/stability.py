"""Stability analysis: spectra, Lyapunov evaluators, and the geometric certificate.

Three global-stability certificates are evaluated numerically:

* a weighted sum of Volterra terms for the permanent-immunity model
  (gamma = 0), valid for any transmission/recovery asymmetry;
* a quadratic-plus-logarithmic function for the waning-immunity model with
  equal transmission and recovery rates across the two infectious classes,
  written in (S, M) coordinates with M = A + I;
* for the model without vaccination (nu = 0), a linear function built from
  the left Perron eigenvector of the infection growth matrix, certifying the
  disease-free state up to and including R0 = 1.

The general waning-immunity case is covered by a geometric (compound-matrix)
certificate: when R0 > 1 and beta_a < delta_i, four time-averaged row bounds
h_bar_1..h_bar_4 of a rescaled third-additive-compound system are all
negative, which rules out nontrivial limit sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import (
    CertificateParameterError,
    DegenerateParameterError,
    DomainError,
    InvalidInputError,
    NoEndemicEquilibriumError,
    WrongModelError,
)
from .model import (
    ModelParams,
    StateReduced,
    _state_array,
    dfe,
    endemic_equilibrium,
    jacobian_reduced,
    r0_closed_form,
    rhs_reduced,
)

__all__ = [
    "SpectrumReport",
    "LyapunovSample",
    "GeometricCertificate",
    "dfe_spectrum",
    "ee_spectrum",
    "lyapunov_sair",
    "lyapunov_sairs_equal",
    "lyapunov_dfe_novax",
    "growth_matrix_novax",
    "third_additive_compound",
    "geometric_certificate",
    "admissible_c_interval",
]


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of a Jacobian and the resulting local stability verdict."""

    eigenvalues: np.ndarray
    max_real_part: float
    stable: bool


@dataclass(frozen=True)
class LyapunovSample:
    """Value and flow derivative of a Lyapunov function at one state.

    value >= 0 with equality only at the certified equilibrium; derivative
    is the analytic gradient dotted with the vector field (no finite
    differences), so the <= 0 assertion stays sharp.
    """

    value: Union[float, np.ndarray]
    derivative: Union[float, np.ndarray]
    location: np.ndarray


@dataclass(frozen=True)
class GeometricCertificate:
    """Outcome of the compound-matrix certificate for one instance.

    applicable: the hypotheses R0 > 1 and beta_a < delta_i hold.
    c: rescaling constant used, strictly inside the admissible interval
       (None when the interval is empty and no c was supplied).
    epsilon: persistence floor the bounds were evaluated with.
    h_bars: the four averaged row bounds; certified means all four < 0.
    """

    applicable: bool
    c: Optional[float]
    epsilon: float
    h_bars: Optional[Tuple[float, float, float, float]]
    certified: bool


def _spectrum(matrix: np.ndarray) -> SpectrumReport:
    eigenvalues = np.linalg.eigvals(matrix)
    order = np.argsort(eigenvalues.real)[::-1]
    eigenvalues = eigenvalues[order]
    max_real = float(eigenvalues.real.max())
    return SpectrumReport(eigenvalues=eigenvalues, max_real_part=max_real, stable=max_real < 0.0)


def dfe_spectrum(params: ModelParams) -> SpectrumReport:
    """Spectrum of the reduced Jacobian at the disease-free equilibrium.

    Stable exactly when R0 < 1 (up to the eigensolver's resolution near
    the threshold).
    """
    return _spectrum(jacobian_reduced(params, dfe(params)))


def ee_spectrum(params: ModelParams) -> SpectrumReport:
    """Spectrum of the reduced Jacobian at the endemic equilibrium.

    Raises NoEndemicEquilibriumError when R0 <= 1.
    """
    equilibrium = endemic_equilibrium(params)
    if equilibrium is None:
        raise NoEndemicEquilibriumError("R0 <= 1: no endemic equilibrium to analyze")
    return _spectrum(jacobian_reduced(params, equilibrium))


def _volterra(x):
    """g(x) = x - 1 - ln(x), nonnegative with a single zero at x = 1."""
    d = x - 1.0
    return d - np.log1p(d)


def _endemic_or_raise(params: ModelParams) -> StateReduced:
    equilibrium = endemic_equilibrium(params)
    if equilibrium is None:
        raise NoEndemicEquilibriumError("R0 <= 1: certificate needs an endemic equilibrium")
    return equilibrium


def lyapunov_sair(params: ModelParams, x) -> LyapunovSample:
    """Volterra-type Lyapunov sample for the permanent-immunity model (gamma = 0).

    V = c1*S*g(S/S*) + c2*A*g(A/A*) + I*g(I/I*) with weights
    c1 = c2 = alpha*A*/(beta_i*I*S*). Requires strictly positive S, A, I.
    Broadcasts over leading axes of x.
    """
    if params.gamma != 0.0:
        raise WrongModelError("this certificate requires gamma = 0")
    star = _endemic_or_raise(params)
    scale = params.beta_i * star.i * star.s
    if scale == 0.0:
        raise DegenerateParameterError("weights undefined: beta_i * I* * S* = 0")
    c1 = params.alpha * star.a / scale

    arr = _state_array(x, 3)
    if np.any(arr <= 0.0):
        raise DomainError("all of S, A, I must be strictly positive")
    s, a, i = arr[..., 0], arr[..., 1], arr[..., 2]
    value = (
        c1 * star.s * _volterra(s / star.s)
        + c1 * star.a * _volterra(a / star.a)
        + star.i * _volterra(i / star.i)
    )
    grad_s = c1 * (1.0 - star.s / s)
    grad_a = c1 * (1.0 - star.a / a)
    grad_i = 1.0 - star.i / i
    f = rhs_reduced(params, arr)
    derivative = grad_s * f[..., 0] + grad_a * f[..., 1] + grad_i * f[..., 2]
    return LyapunovSample(value=value, derivative=derivative, location=arr)


def lyapunov_sairs_equal(params: ModelParams, x) -> LyapunovSample:
    """Lyapunov sample for the symmetric model (beta_a = beta_i, delta_a = delta_i).

    In M = A + I coordinates: V = (S - S*)^2 / 2 + w * M* * g(M/M*) with
    w = (beta*S* + gamma)/beta. Along the flow the derivative collapses to
    -(beta*M + mu + nu + gamma)*(S - S*)^2 <= 0. Requires M > 0.
    """
    if params.beta_a != params.beta_i or params.delta_a != params.delta_i:
        raise WrongModelError("this certificate requires beta_a = beta_i and delta_a = delta_i")
    beta = params.beta_a
    star = _endemic_or_raise(params)
    m_star = star.a + star.i
    w = (beta * star.s + params.gamma) / beta

    arr = _state_array(x, 3)
    s, a, i = arr[..., 0], arr[..., 1], arr[..., 2]
    m = a + i
    if np.any(m <= 0.0):
        raise DomainError("M = A + I must be strictly positive")
    value = 0.5 * (s - star.s) ** 2 + w * m_star * _volterra(m / m_star)
    f = rhs_reduced(params, arr)
    dm = f[..., 1] + f[..., 2]
    derivative = (s - star.s) * f[..., 0] + w * (1.0 - m_star / m) * dm
    return LyapunovSample(value=value, derivative=derivative, location=arr)


def growth_matrix_novax(params: ModelParams, s) -> np.ndarray:
    """Infection growth matrix M(S) of the (A, I) subsystem, scaled by V^-1 F.

    Its spectral radius at the disease-free susceptible level equals the
    reproduction number of the nu = 0 model.
    """
    p = params
    h1 = p.alpha + p.delta_a + p.mu
    h2 = p.delta_i + p.mu
    s = float(s)
    k = s / h1
    return np.array(
        [
            [p.beta_a * k, p.beta_i * k],
            [p.alpha * p.beta_a * k / h2, p.alpha * p.beta_i * k / h2],
        ]
    )


def lyapunov_dfe_novax(params: ModelParams, a, i, s: Optional[float] = None) -> LyapunovSample:
    """Linear Lyapunov sample certifying the disease-free state when nu = 0.

    V(A, I) = w C^-1 (A, I) with C the transition matrix of the infected
    subsystem and w the left Perron eigenvector of the growth matrix at the
    disease-free susceptible level (normalized to sum 1). The flow
    derivative w (M(S) - Id) (A, I) needs the current susceptible fraction;
    s defaults to the disease-free level 1.0, which upper-bounds the
    derivative for any feasible state.
    """
    if params.nu != 0.0:
        raise WrongModelError("this certificate requires nu = 0")
    if params.beta_a == 0.0 and params.beta_i == 0.0:
        raise DegenerateParameterError("no Perron vector: beta_a = beta_i = 0")
    a = np.asarray(a, dtype=float)
    i = np.asarray(i, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(i))):
        raise InvalidInputError("a and i must be finite")
    if np.any(a < 0.0) or np.any(i < 0.0):
        raise DomainError("a and i must be nonnegative")

    p = params
    c_mat = np.array([[p.alpha + p.delta_a + p.mu, 0.0], [-p.alpha, p.delta_i + p.mu]])
    m0 = growth_matrix_novax(p, 1.0)
    eigenvalues, left = np.linalg.eig(m0.T)
    w = left[:, np.argmax(eigenvalues.real)].real
    w = np.abs(w)
    w /= w.sum()

    y = np.stack(np.broadcast_arrays(a, i), axis=-1)
    value = y @ np.linalg.solve(c_mat.T, w)
    s_level = 1.0 if s is None else float(s)
    m_s = growth_matrix_novax(p, s_level)
    derivative = y @ ((m_s - np.eye(2)).T @ w)
    return LyapunovSample(value=value, derivative=derivative, location=y)


def third_additive_compound(m) -> np.ndarray:
    """Third additive compound of a square matrix (n >= 3).

    Linear in its argument; the spectrum of the result is exactly the
    multiset of triple sums lam_i + lam_j + lam_k (i < j < k) of the
    eigenvalues of m. For a 4x4 input the result is 4x4.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n < 3:
        raise InvalidInputError("third additive compound needs n >= 3")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix must be finite")

    triples = list(itertools.combinations(range(n), 3))
    index = {t: k for k, t in enumerate(triples)}
    out = np.zeros((len(triples), len(triples)), dtype=m.dtype)
    for row_t in triples:
        row = index[row_t]
        out[row, row] = m[row_t[0], row_t[0]] + m[row_t[1], row_t[1]] + m[row_t[2], row_t[2]]
        row_set = set(row_t)
        for col_t in triples:
            if col_t == row_t:
                continue
            common = row_set & set(col_t)
            if len(common) != 2:
                continue
            (src,) = row_set - common
            (dst,) = set(col_t) - common
            # Sign from the positions of the differing indices (1-based).
            sign = (-1) ** (row_t.index(src) + col_t.index(dst))
            out[row, index[col_t]] = sign * m[src, dst]
    return out


def admissible_c_interval(params: ModelParams, epsilon: float) -> Tuple[float, float]:
    """Open interval of valid rescaling constants c for the geometric certificate."""
    h2 = params.delta_i + params.mu
    lower = h2 / (params.beta_i * epsilon + params.nu + h2)
    return lower, 1.0


def geometric_certificate(
    params: ModelParams, epsilon: float, c: Optional[float] = None
) -> GeometricCertificate:
    """Evaluate the compound-matrix certificate at a persistence floor epsilon.

    When c is omitted it is set to the midpoint of the admissible interval;
    an empty interval yields a not-certifiable result rather than an error.
    A supplied c outside the open interval raises
    CertificateParameterError. Requires R0 > 1 and 0 < epsilon < 1.
    """
    r0 = r0_closed_form(params)
    if r0 <= 1.0:
        raise NoEndemicEquilibriumError("certificate requires R0 > 1")
    if not (0.0 < epsilon < 1.0):
        raise InvalidInputError("epsilon must lie in (0, 1)")

    p = params
    applicable = p.beta_a < p.delta_i
    lower, upper = admissible_c_interval(p, epsilon)
    if c is None:
        if lower >= upper:
            return GeometricCertificate(
                applicable=applicable, c=None, epsilon=epsilon, h_bars=None, certified=False
            )
        c = 0.5 * (lower + upper)
    elif not (lower < c < upper):
        raise CertificateParameterError(
            f"c = {c!r} outside the admissible interval ({lower!r}, {upper!r})"
        )

    h2 = p.delta_i + p.mu
    hb1 = p.beta_a - p.delta_a - p.alpha - p.delta_i
    hb2 = -epsilon * p.beta_a - p.nu - p.gamma - p.mu + c * (p.gamma + p.mu)
    hb3 = -epsilon * p.beta_i - p.nu - h2 + h2 / c
    hb4 = -p.delta_i + p.beta_a
    h_bars = (hb1, hb2, hb3, hb4)
    certified = all(h < 0.0 for h in h_bars)
    return GeometricCertificate(
        applicable=applicable, c=c, epsilon=epsilon, h_bars=h_bars, certified=certified
    )
