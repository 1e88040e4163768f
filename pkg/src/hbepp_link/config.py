"""Scenario configuration: key-value text format, defaults, validation.

The format is one ``key = value`` assignment per line; blank lines and
``#`` comments are ignored. Unknown keys, duplicate keys, out-of-range
values, and conflicting alternatives (``source.g`` vs ``source.mu``, and
per arm ``channel.tauN`` vs ``channel.lossN_db``) are rejected at parse
time with the offending key named.

Defaults describe the reference satellite downlink experiment: source
brightness 0.037 pairs per temporal mode, 1.6 dB receiver loss on Alice's
arm, 20 dB on Bob's, dark-count probability 6.25e-7 per detector per mode.
Wavelength, coincidence window, and coherence time are fixed metadata; the
coherence time also sets the per-second display conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .params import ChannelParams, MeasurementAngles, SourceParams, gain_from_mean_photon, transmittance_from_db
from .postprocess import PostprocessingModel

# Reference-experiment metadata (display only; not configurable).
WAVELENGTH_NM = 810.0
COINCIDENCE_WINDOW_NS = 2.0
COHERENCE_TIME_NS = 6.25
COHERENCE_TIME_S = COHERENCE_TIME_NS * 1e-9

DEFAULT_MU = 0.037
DEFAULT_LOSS1_DB = 1.6
DEFAULT_LOSS2_DB = 20.0
DEFAULT_DARK_COUNT = 6.25e-7
DEFAULT_N_MAX = 40

SWEEP_VARIABLES = (
    "g",
    "mu",
    "theta1_deg",
    "tau1",
    "tau2",
    "loss1_db",
    "loss2_db",
    "dark_count",
)

_KEY_ORDER = (
    "source.g",
    "source.mu",
    "channel.tau1",
    "channel.loss1_db",
    "channel.tau2",
    "channel.loss2_db",
    "detector.dark_count",
    "angles.theta1_deg",
    "angles.theta2_deg",
    "model",
    "oracle.n_max",
    "output.per_second",
    "sweep.variable",
    "sweep.start",
    "sweep.stop",
    "sweep.steps",
)

_CONFLICTS = (
    ("source.g", "source.mu"),
    ("channel.tau1", "channel.loss1_db"),
    ("channel.tau2", "channel.loss2_db"),
)


class ConfigError(ValueError):
    """A scenario configuration could not be parsed or validated."""


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Validated scenario; unset fields fall back to the defaults above."""

    g: float | None = None
    mu: float | None = None
    tau1: float | None = None
    loss1_db: float | None = None
    tau2: float | None = None
    loss2_db: float | None = None
    dark_count: float = DEFAULT_DARK_COUNT
    theta1_deg: float = 0.0
    theta2_deg: float = 0.0
    model: PostprocessingModel = PostprocessingModel.SQUASH
    n_max: int = DEFAULT_N_MAX
    per_second: bool = False
    sweep_variable: str | None = None
    sweep_start: float | None = None
    sweep_stop: float | None = None
    sweep_steps: int | None = None
    explicit: frozenset[str] = field(default_factory=frozenset)

    def is_explicit(self, key: str) -> bool:
        return key in self.explicit

    def source_params(self) -> SourceParams:
        if self.g is not None:
            return SourceParams(self.g)
        mu = self.mu if self.mu is not None else DEFAULT_MU
        return SourceParams(gain_from_mean_photon(mu))

    def channel_params(self, dark_count: float | None = None) -> ChannelParams:
        if self.tau1 is not None:
            tau1 = self.tau1
        else:
            tau1 = transmittance_from_db(
                self.loss1_db if self.loss1_db is not None else DEFAULT_LOSS1_DB
            )
        if self.tau2 is not None:
            tau2 = self.tau2
        else:
            tau2 = transmittance_from_db(
                self.loss2_db if self.loss2_db is not None else DEFAULT_LOSS2_DB
            )
        dark = self.dark_count if dark_count is None else dark_count
        return ChannelParams(tau1=tau1, tau2=tau2, dark_count=dark)

    def angles(self) -> MeasurementAngles:
        return MeasurementAngles(
            math.radians(self.theta1_deg), math.radians(self.theta2_deg)
        )

    def sweep_or(
        self, variable: str, start: float, stop: float, steps: int
    ) -> tuple[str, float, float, int]:
        """Configured sweep, or the given subcommand default."""
        if self.sweep_variable is not None:
            return (
                self.sweep_variable,
                self.sweep_start if self.sweep_start is not None else start,
                self.sweep_stop if self.sweep_stop is not None else stop,
                self.sweep_steps if self.sweep_steps is not None else steps,
            )
        return variable, start, stop, steps

    def to_text(self) -> str:
        """Canonical serialization of the explicitly set keys.

        ``parse_config(cfg.to_text())`` reproduces ``cfg`` exactly, so the
        round trip is idempotent; defaults stay implicit.
        """
        lines = []
        for key in _KEY_ORDER:
            if key not in self.explicit:
                continue
            value = self._raw_value(key)
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, PostprocessingModel):
                text = value.value
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + ("\n" if lines else "")

    def _raw_value(self, key: str):
        return {
            "source.g": self.g,
            "source.mu": self.mu,
            "channel.tau1": self.tau1,
            "channel.loss1_db": self.loss1_db,
            "channel.tau2": self.tau2,
            "channel.loss2_db": self.loss2_db,
            "detector.dark_count": self.dark_count,
            "angles.theta1_deg": self.theta1_deg,
            "angles.theta2_deg": self.theta2_deg,
            "model": self.model,
            "oracle.n_max": self.n_max,
            "output.per_second": self.per_second,
            "sweep.variable": self.sweep_variable,
            "sweep.start": self.sweep_start,
            "sweep.stop": self.sweep_stop,
            "sweep.steps": self.sweep_steps,
        }[key]


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


def _parse_bool(key: str, text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {text!r}")


def _assignments(text: str, origin: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{origin} line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        pairs.append((key.strip(), value.strip()))
    return pairs


def parse_config(text: str, overrides: list[str] | None = None) -> ScenarioConfig:
    """Parse configuration text plus optional ``key=value`` overrides.

    Overrides replace values from the text but are subject to the same
    validation, including the mutual-exclusion rules.
    """
    pairs = _assignments(text, "config")
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise ConfigError(f"duplicate key {key}")
        seen.add(key)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, _, value = item.partition("=")
        key, value = key.strip(), value.strip()
        pairs = [(k, v) for k, v in pairs if k != key]  # override wins
        pairs.append((key, value))

    values: dict[str, object] = {}
    for key, text_value in pairs:
        if key not in _KEY_ORDER:
            raise ConfigError(f"unknown key {key}")
        values[key] = _convert(key, text_value)

    for first, second in _CONFLICTS:
        if first in values and second in values:
            raise ConfigError(f"{first} and {second} are mutually exclusive")

    cfg = ScenarioConfig(
        g=values.get("source.g"),
        mu=values.get("source.mu"),
        tau1=values.get("channel.tau1"),
        loss1_db=values.get("channel.loss1_db"),
        tau2=values.get("channel.tau2"),
        loss2_db=values.get("channel.loss2_db"),
        dark_count=values.get("detector.dark_count", DEFAULT_DARK_COUNT),
        theta1_deg=values.get("angles.theta1_deg", 0.0),
        theta2_deg=values.get("angles.theta2_deg", 0.0),
        model=values.get("model", PostprocessingModel.SQUASH),
        n_max=values.get("oracle.n_max", DEFAULT_N_MAX),
        per_second=values.get("output.per_second", False),
        sweep_variable=values.get("sweep.variable"),
        sweep_start=values.get("sweep.start"),
        sweep_stop=values.get("sweep.stop"),
        sweep_steps=values.get("sweep.steps"),
        explicit=frozenset(values),
    )
    _validate(cfg)
    return cfg


def _convert(key: str, text: str):
    if key == "model":
        if text not in ("squash", "discard"):
            raise ConfigError(f"model: expected squash or discard, got {text!r}")
        return PostprocessingModel(text)
    if key == "sweep.variable":
        if text not in SWEEP_VARIABLES:
            raise ConfigError(
                f"sweep.variable: expected one of {', '.join(SWEEP_VARIABLES)}, "
                f"got {text!r}"
            )
        return text
    if key == "output.per_second":
        return _parse_bool(key, text)
    if key in ("oracle.n_max", "sweep.steps"):
        return _parse_int(key, text)
    return _parse_float(key, text)


def _validate(cfg: ScenarioConfig) -> None:
    try:
        cfg.source_params()
    except ValueError as exc:
        key = "source.g" if cfg.g is not None else "source.mu"
        raise ConfigError(f"{key}: {exc}") from None
    try:
        cfg.channel_params()
    except ValueError as exc:
        raise ConfigError(f"channel/detector: {exc}") from None
    if cfg.n_max < 0:
        raise ConfigError(f"oracle.n_max: must be >= 0, got {cfg.n_max}")
    if cfg.sweep_steps is not None and cfg.sweep_steps < 1:
        raise ConfigError(f"sweep.steps: must be >= 1, got {cfg.sweep_steps}")
    if cfg.sweep_variable is not None:
        if cfg.sweep_start is None or cfg.sweep_stop is None or cfg.sweep_steps is None:
            raise ConfigError(
                "sweep.variable requires sweep.start, sweep.stop, and sweep.steps"
            )


def with_source_value(cfg: ScenarioConfig, variable: str, value: float) -> ScenarioConfig:
    """Copy of ``cfg`` with one sweep variable replaced by ``value``."""
    if variable == "g":
        return replace(cfg, g=value, mu=None)
    if variable == "mu":
        return replace(cfg, mu=value, g=None)
    if variable == "theta1_deg":
        return replace(cfg, theta1_deg=value)
    if variable == "tau1":
        return replace(cfg, tau1=value, loss1_db=None)
    if variable == "tau2":
        return replace(cfg, tau2=value, loss2_db=None)
    if variable == "loss1_db":
        return replace(cfg, loss1_db=value, tau1=None)
    if variable == "loss2_db":
        return replace(cfg, loss2_db=value, tau2=None)
    if variable == "dark_count":
        return replace(cfg, dark_count=value)
    raise ConfigError(f"unknown sweep variable {variable!r}")
