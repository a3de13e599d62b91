"""Campaign config files: JSON schema, validation, and manifest digests.

The config is plain JSON. Every validation failure raises ConfigError with
the offending field path, so the CLI can print a usable diagnostic and exit
with the config-error status.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .detector import DefectModel
from .fuzzer import DEFAULT_PLANS, AngleMode, CampaignConfig, MutatorKind, SearchPlan
from .oracle import OracleConfig
from .scenario import DISTANCE_MAX, DISTANCE_MIN, SPEED_MAX, ScenarioKind
from .simulator import SimConfig, SimulationError


class ConfigError(ValueError):
    pass


_TOP_KEYS = {
    "kinds",
    "mutator",
    "budget",
    "rng_seed",
    "defect",
    "oracle",
    "sim",
    "plans",
    "scenario_overrides",
}
_PLAN_KEYS = {
    "distance_step",
    "distance_start",
    "speed_step",
    "speed_start",
    "distance_schedule",
    "speed_schedule",
    "angle_step_long",
    "angle_step_lat",
    "angle_mode",
    "k_nc",
}
_DEFECT_KEYS = {"sample_period", "min_penetration", "min_impact_speed"}
_SIM_KEYS = {"dt", "horizon", "settle_frames"}


def load_config_file(path) -> tuple[CampaignConfig, dict, str]:
    """Parse and validate a config file.

    Returns (config, parsed json, sha256 digest of the raw file bytes). The
    digest covers the bytes, not the parsed value, so any byte change in the
    file changes the digest.
    """
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_config(data), data, digest


def parse_config(data: dict) -> CampaignConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    kinds = _parse_kinds(data.get("kinds", [k.value for k in ScenarioKind]))
    budget = _require_int(data, "budget", minimum=0)
    mutator = _parse_enum(MutatorKind, data.get("mutator", "guided"), "mutator")
    rng_seed = int(data.get("rng_seed", 0))

    try:
        defect = DefectModel(**_checked_block(data.get("defect", {}), _DEFECT_KEYS, "defect"))
        oracle = OracleConfig(**_checked_block(data.get("oracle", {}), {"t_bbox"}, "oracle"))
        sim = SimConfig(**_checked_block(data.get("sim", {}), _SIM_KEYS, "sim"))
    except (ValueError, TypeError, SimulationError) as exc:
        raise ConfigError(str(exc)) from None

    plans = _parse_plans(data.get("plans", {}), kinds)
    overrides = _parse_overrides(data.get("scenario_overrides", {}))

    try:
        return CampaignConfig(
            kinds=kinds,
            budget=budget,
            mutator=mutator,
            plans=plans,
            defect=defect,
            oracle=oracle,
            sim=sim,
            rng_seed=rng_seed,
            scenario_overrides=overrides,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _parse_kinds(raw) -> tuple[ScenarioKind, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("kinds: must be a non-empty list")
    try:
        return tuple(ScenarioKind(k) for k in raw)
    except ValueError:
        valid = ", ".join(k.value for k in ScenarioKind)
        raise ConfigError(f"kinds: entries must be among {valid}") from None


def _parse_enum(enum_cls, raw, field: str):
    try:
        return enum_cls(raw)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise ConfigError(f"{field}: {raw!r} is not one of {valid}") from None


def _require_int(data: dict, key: str, minimum: int) -> int:
    if key not in data:
        raise ConfigError(f"{key}: required field missing")
    value = data[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{key}: must be an integer >= {minimum}")
    return value


def _checked_block(raw, allowed: set, label: str) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"{label}: must be an object")
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"{label}: unknown keys {sorted(unknown)}")
    return raw


def _parse_plans(raw: dict, kinds) -> dict[ScenarioKind, SearchPlan]:
    if not isinstance(raw, dict):
        raise ConfigError("plans: must be an object")
    default_block = raw.get("default", {})
    plans = {}
    for kind in ScenarioKind:
        block = dict(default_block)
        block.update(raw.get(kind.value, {}))
        plans[kind] = _plan_from_block(block, kind) if block else DEFAULT_PLANS[kind]
    unknown = set(raw) - {"default"} - {k.value for k in ScenarioKind}
    if unknown:
        raise ConfigError(f"plans: unknown keys {sorted(unknown)}")
    return plans


def _plan_from_block(block: dict, kind: ScenarioKind) -> SearchPlan:
    label = f"plans.{kind.value}"
    _checked_block(block, _PLAN_KEYS, label)
    base = DEFAULT_PLANS[kind]

    def _field(key, fallback):
        return block.get(key, fallback)

    try:
        if "distance_schedule" in block:
            distance_schedule = _validated_schedule(
                block["distance_schedule"], DISTANCE_MIN, DISTANCE_MAX, f"{label}.distance_schedule"
            )
        else:
            distance_schedule = _stepped(
                float(_field("distance_start", DISTANCE_MIN)),
                float(_field("distance_step", _infer_step(base.distance_schedule))),
                DISTANCE_MIN,
                DISTANCE_MAX,
                f"{label}.distance",
            )
        if "speed_schedule" in block:
            speed_schedule = _validated_schedule(
                block["speed_schedule"], 0.0, SPEED_MAX, f"{label}.speed_schedule", exclusive_lo=True
            )
        else:
            speed_schedule = _stepped(
                float(_field("speed_start", base.speed_schedule[0])),
                float(_field("speed_step", _infer_step(base.speed_schedule))),
                0.0,
                SPEED_MAX,
                f"{label}.speed",
                exclusive_lo=True,
            )
        return SearchPlan(
            distance_schedule=distance_schedule,
            speed_schedule=speed_schedule,
            angle_step_long=float(_field("angle_step_long", base.angle_step_long)),
            angle_step_lat=float(_field("angle_step_lat", base.angle_step_lat)),
            angle_mode=_parse_enum(AngleMode, _field("angle_mode", base.angle_mode.value), f"{label}.angle_mode"),
            k_nc=int(_field("k_nc", base.k_nc)),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{label}: {exc}") from None


def _infer_step(schedule) -> float:
    return schedule[1] - schedule[0] if len(schedule) > 1 else 1.0


def _range_text(lo: float, hi: float) -> str:
    return f"{lo:g}..{hi:g}"


def _stepped(start, step, lo, hi, label, exclusive_lo=False) -> tuple[float, ...]:
    if step <= 0.0:
        raise ConfigError(f"{label}_step: must be positive")
    if start > hi or start < lo or (exclusive_lo and start <= lo):
        raise ConfigError(f"{label}_start: {start:g} outside {_range_text(lo, hi)}")
    values = []
    v = start
    while v <= hi + 1e-9:
        values.append(round(v, 9))
        v += step
    return tuple(values)


def _validated_schedule(raw, lo, hi, label, exclusive_lo=False) -> tuple[float, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{label}: must be a non-empty list")
    values = [float(v) for v in raw]
    if values != sorted(values):
        raise ConfigError(f"{label}: must be ascending")
    for v in values:
        if v < lo or v > hi or (exclusive_lo and v <= lo):
            raise ConfigError(f"{label}: {v:g} outside {_range_text(lo, hi)}")
    return tuple(values)


def _parse_overrides(raw: dict) -> dict[ScenarioKind, dict]:
    if not isinstance(raw, dict):
        raise ConfigError("scenario_overrides: must be an object")
    out = {}
    for key, block in raw.items():
        try:
            kind = ScenarioKind(key)
        except ValueError:
            raise ConfigError(f"scenario_overrides: unknown kind {key!r}") from None
        if not isinstance(block, dict):
            raise ConfigError(f"scenario_overrides.{key}: must be an object")
        out[kind] = block
    return out
