"""Override parsing and the optional [sim] / [disturbance] config sections."""

from __future__ import annotations

import math
from typing import Any, Iterable, Mapping

from ..errors import ConfigError, DomainError
from ..simulator import (
    Disturbance,
    SimConfig,
    constant,
    make_pulse,
    sinusoid,
    zero_disturbance,
)


def parse_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from exc
    if not vals:
        raise ConfigError("empty list")
    return vals


def _coerce(key: str, raw: str, like: Any) -> Any:
    try:
        if isinstance(like, bool):
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
        if isinstance(like, tuple):
            return parse_list(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def apply_overrides(defaults: Mapping[str, Any], overrides: Iterable[str]) -> dict[str, Any]:
    """Merge ``key=value`` strings into ``defaults``, coercing to the default's type."""
    params = dict(defaults)
    for item in overrides:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        if key not in params:
            raise ConfigError(f"unknown override key {key!r}; valid keys: {sorted(params)}")
        params[key] = _coerce(key, raw.strip(), defaults[key])
    return params


def sim_from_section(sec, horizon: float) -> SimConfig:
    vals = dict(sec) if sec is not None else {}
    allowed = {"h", "record_stride", "settle_eps", "sign_layer", "method", "horizon"}
    extra = set(vals) - allowed
    if extra:
        raise ConfigError(f"unknown keys in [sim]: {sorted(extra)}")
    try:
        return SimConfig(
            h=float(vals.get("h", 1e-5)),
            horizon=float(vals.get("horizon", horizon)),
            sign_layer=float(vals.get("sign_layer", 0.0)),
            settle_eps=float(vals.get("settle_eps", 1e-3)),
            record_stride=int(vals.get("record_stride", 100)),
            method=vals.get("method", "euler"),
        )
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"bad [sim] section: {exc}") from exc


def disturbance_from_section(sec) -> Disturbance:
    if sec is None:
        return zero_disturbance()
    kind = sec.get("kind", "zero")
    try:
        if kind == "zero":
            return zero_disturbance()
        if kind == "sinusoid":
            return sinusoid(float(sec.get("amplitude", 1.0)), float(sec.get("frequency", 1.0)))
        if kind == "constant":
            return constant(float(sec["value"]))
        if kind == "pulse":
            return make_pulse(float(sec["t_d"]), float(sec["width"]), float(sec["height"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad [disturbance] section: {exc}") from exc
    raise ConfigError(f"unknown disturbance kind {kind!r}")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".15g")
