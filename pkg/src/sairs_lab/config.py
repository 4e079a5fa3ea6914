"""Flat key=value run configuration.

The format is line-oriented and diffable: one `section.key = value` pair per
line, `#` comments, blank lines ignored. Example:

    params.beta_a = 0.5
    params.beta_i = 0.9
    integration.t_max = 5000
    sweep.axis1.param = beta_a
    sweep.axis1.min = 0.01
    sweep.axis1.max = 0.8
    sweep.axis1.count = 80

Unknown keys are rejected so typos fail loudly (exit code 2 at the CLI).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

from .errors import ConfigError, SairsError
from .experiments import AxisSpec, SweepSpec
from .integrator import DEFAULT_INITIAL_STATE, IntegrationConfig
from .model import RATE_NAMES, ModelParams, StateFull

__all__ = ["RunConfig", "parse_config", "load_config"]

_PARAM_KEYS = {f"params.{name}" for name in RATE_NAMES}
_INITIAL_KEYS = {f"initial.{c}" for c in "sair"}
_INTEGRATION_FIELDS = (
    "rel_tol",
    "abs_tol",
    "t_max",
    "sample_dt",
    "steady_tol",
    "steady_window",
    "max_step",
)
_INTEGRATION_KEYS = {f"integration.{name}" for name in _INTEGRATION_FIELDS}
_SWEEP_KEYS = {
    f"sweep.axis{k}.{field}" for k in (1, 2) for field in ("param", "min", "max", "count")
} | {"sweep.check1", "sweep.check2"}
_FAMILY_KEYS = {"family.param", "family.values"}
_CERT_KEYS = {"certificate.epsilon", "certificate.c", "certificate.tail_fraction",
              "certificate.safety"}
_OTHER_KEYS = {"regime.boundary_tol"}

KNOWN_KEYS = (
    _PARAM_KEYS | _INITIAL_KEYS | _INTEGRATION_KEYS | _SWEEP_KEYS | _FAMILY_KEYS
    | _CERT_KEYS | _OTHER_KEYS
)


@dataclass(frozen=True)
class RunConfig:
    """Typed view of one configuration file."""

    params: Optional[ModelParams]
    initial: StateFull
    integration: IntegrationConfig
    boundary_tol: float
    sweep: Optional[SweepSpec]
    sweep_check: Tuple[int, int]
    family: Optional[Tuple[str, Tuple[float, ...]]]
    certificate_epsilon: Optional[float]
    certificate_c: Optional[float]
    certificate_tail_fraction: float
    certificate_safety: float

    def require_params(self) -> ModelParams:
        if self.params is None:
            raise ConfigError("this command needs the eight params.* rates in the config")
        return self.params


def _parse_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _key_values(text: str) -> Dict[str, str]:
    mapping: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in mapping:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text; raises ConfigError on any defect."""
    kv = _key_values(text)

    params: Optional[ModelParams] = None
    present = [k for k in _PARAM_KEYS if k in kv]
    if present:
        missing = sorted(k for k in _PARAM_KEYS if k not in kv)
        if missing:
            raise ConfigError(f"incomplete params block, missing {missing}")
        try:
            params = ModelParams(**{name: _parse_float(f"params.{name}", kv[f"params.{name}"])
                                    for name in RATE_NAMES})
        except SairsError as exc:
            raise ConfigError(f"invalid params: {exc}") from exc

    initial = DEFAULT_INITIAL_STATE
    present_initial = [k for k in _INITIAL_KEYS if k in kv]
    if present_initial:
        missing = sorted(k for k in _INITIAL_KEYS if k not in kv)
        if missing:
            raise ConfigError(f"incomplete initial block, missing {missing}")
        try:
            initial = StateFull(
                s=_parse_float("initial.s", kv["initial.s"]),
                a=_parse_float("initial.a", kv["initial.a"]),
                i=_parse_float("initial.i", kv["initial.i"]),
                r=_parse_float("initial.r", kv["initial.r"]),
            )
        except SairsError as exc:
            raise ConfigError(f"invalid initial state: {exc}") from exc

    integration_kwargs = {}
    for field in _INTEGRATION_FIELDS:
        key = f"integration.{field}"
        if key in kv:
            integration_kwargs[field] = _parse_float(key, kv[key])
    try:
        integration = IntegrationConfig(**integration_kwargs)
    except SairsError as exc:
        raise ConfigError(f"invalid integration block: {exc}") from exc

    boundary_tol = _parse_float("regime.boundary_tol", kv.get("regime.boundary_tol", "1e-9"))
    if not boundary_tol > 0:
        raise ConfigError("regime.boundary_tol must be positive")

    sweep: Optional[SweepSpec] = None
    sweep_keys_present = [k for k in kv if k.startswith("sweep.")]
    if sweep_keys_present:
        if params is None:
            raise ConfigError("a sweep needs the params.* block as grid base")
        axes = []
        for k in (1, 2):
            try:
                axes.append(
                    AxisSpec(
                        param=kv.get(f"sweep.axis{k}.param", ""),
                        lo=_parse_float(f"sweep.axis{k}.min", kv.get(f"sweep.axis{k}.min", "nan")),
                        hi=_parse_float(f"sweep.axis{k}.max", kv.get(f"sweep.axis{k}.max", "nan")),
                        count=_parse_int(f"sweep.axis{k}.count", kv.get(f"sweep.axis{k}.count", "0")),
                    )
                )
            except SairsError as exc:
                raise ConfigError(f"invalid sweep axis {k}: {exc}") from exc
        sweep = SweepSpec(base=params, axis1=axes[0], axis2=axes[1])
    sweep_check = (
        _parse_int("sweep.check1", kv.get("sweep.check1", "5")),
        _parse_int("sweep.check2", kv.get("sweep.check2", "5")),
    )
    if min(sweep_check) < 0:
        raise ConfigError("sweep.check1/check2 must be >= 0")

    family: Optional[Tuple[str, Tuple[float, ...]]] = None
    if "family.param" in kv or "family.values" in kv:
        if "family.param" not in kv or "family.values" not in kv:
            raise ConfigError("a family needs both family.param and family.values")
        name = kv["family.param"]
        if name not in RATE_NAMES:
            raise ConfigError(f"family.param: unknown rate {name!r}")
        pieces = [piece.strip() for piece in kv["family.values"].split(",") if piece.strip()]
        if not pieces:
            raise ConfigError("family.values must list at least one value")
        family = (name, tuple(_parse_float("family.values", piece) for piece in pieces))

    certificate_epsilon = (
        _parse_float("certificate.epsilon", kv["certificate.epsilon"])
        if "certificate.epsilon" in kv
        else None
    )
    certificate_c = (
        _parse_float("certificate.c", kv["certificate.c"]) if "certificate.c" in kv else None
    )
    tail_fraction = _parse_float(
        "certificate.tail_fraction", kv.get("certificate.tail_fraction", "0.5")
    )
    safety = _parse_float("certificate.safety", kv.get("certificate.safety", "0.9"))

    return RunConfig(
        params=params,
        initial=initial,
        integration=integration,
        boundary_tol=boundary_tol,
        sweep=sweep,
        sweep_check=sweep_check,
        family=family,
        certificate_epsilon=certificate_epsilon,
        certificate_c=certificate_c,
        certificate_tail_fraction=tail_fraction,
        certificate_safety=safety,
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
