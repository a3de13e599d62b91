"""Guided step-wise fuzzing campaigns from determined-collision seeds.

A guided round nests three sweeps: trigger distance (outer), post-trigger
speed (middle), and the collision angle (inner). Within each (distance,
speed) cell the angle is swept outward from the seed angle, first along the
positive branch and then the negative one; a branch ends after k_nc
consecutive non-collision verdicts or when it steps past the range bound.
Rounds never stop early on a found ignored collision: the point is to walk
the whole boundary of the collision region, where the misses live.

Two ablation baselines share the executor and oracle:
    random   - parameters drawn uniformly from the plan ranges
    nc_start - the same nested sweep, but each angle branch starts at the
               non-collision side (angle bound, far distances first) and
               walks back toward the seed angle

All bookkeeping time is virtual: each execution costs its simulated trace
duration in seconds. That keeps campaign logs byte-reproducible while still
penalizing time wasted in non-collision space, where traces run to the full
horizon instead of stopping at contact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Mapping

import numpy as np

from . import report as report_mod
from .detector import DefectModel
from .oracle import OracleConfig, ScenarioType, check_ic
from .scenario import (
    DISTANCE_MAX,
    DISTANCE_MIN,
    SPEED_MAX,
    ControlParameters,
    ScenarioKind,
    ScenarioSpec,
    apply_overrides,
    make_seed,
    validate_seed,
)
from .simulator import SimConfig, simulate


class SweepExhausted(Exception):
    """A mutation step would leave the parameter range."""


class InvalidSeedError(ValueError):
    """Seed scenario does not produce a determined collision."""


class MutatorKind(str, Enum):
    GUIDED = "guided"
    RANDOM = "random"
    NC_START = "nc_start"


class AngleMode(str, Enum):
    SCALAR = "scalar"
    PER_AXIS = "per-axis"


def _schedule(start: float, step: float, lo: float, hi: float) -> tuple[float, ...]:
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    values = []
    v = start
    while v <= hi + 1e-9:
        values.append(round(v, 9))
        v += step
    if not values:
        raise ValueError(f"empty schedule from start {start} step {step}")
    if values[0] < lo - 1e-9:
        raise ValueError(f"schedule start {start} below {lo}")
    return tuple(values)


@dataclass(frozen=True)
class SearchPlan:
    distance_schedule: tuple[float, ...]
    speed_schedule: tuple[float, ...]
    angle_step_long: float
    angle_step_lat: float
    angle_mode: AngleMode = AngleMode.SCALAR
    k_nc: int = 3

    def __post_init__(self) -> None:
        for name, sched, lo, hi in (
            ("distance", self.distance_schedule, DISTANCE_MIN, DISTANCE_MAX),
            ("speed", self.speed_schedule, 0.0, SPEED_MAX),
        ):
            if not sched:
                raise ValueError(f"{name} schedule must not be empty")
            if list(sched) != sorted(sched):
                raise ValueError(f"{name} schedule must be ascending")
            if sched[0] < lo - 1e-9 or sched[-1] > hi + 1e-9 or (name == "speed" and sched[0] <= 0.0):
                raise ValueError(f"{name} schedule outside {lo:g}..{hi:g}")
        if self.angle_step_long <= 0.0 or self.angle_step_lat <= 0.0:
            raise ValueError("angle steps must be positive")
        if self.k_nc < 1:
            raise ValueError("k_nc must be >= 1")

    @classmethod
    def from_steps(
        cls,
        distance_step: float = 1.0,
        speed_step: float = 1.0,
        angle_step_long: float = 0.04,
        angle_step_lat: float = 0.03,
        distance_start: float = DISTANCE_MIN,
        speed_start: float = 2.0,
        angle_mode: AngleMode = AngleMode.SCALAR,
        k_nc: int = 3,
    ) -> "SearchPlan":
        return cls(
            distance_schedule=_schedule(distance_start, distance_step, DISTANCE_MIN, DISTANCE_MAX),
            speed_schedule=_schedule(speed_start, speed_step, 0.0, SPEED_MAX),
            angle_step_long=angle_step_long,
            angle_step_lat=angle_step_lat,
            angle_mode=AngleMode(angle_mode),
            k_nc=k_nc,
        )


# Per-kind step defaults. FLB comes from the step-size study; LC, PSF and InC
# from its supplementary values. FLV and PCF are not listed anywhere, so they
# adopt the FLB and PSF steps for their matching struck-object classes.
DEFAULT_PLANS: Mapping[ScenarioKind, SearchPlan] = {
    ScenarioKind.FLB: SearchPlan.from_steps(1.0, 1.0, 0.04, 0.03),
    ScenarioKind.FLV: SearchPlan.from_steps(1.0, 1.0, 0.04, 0.03),
    ScenarioKind.LC: SearchPlan.from_steps(1.0, 1.0, 0.05, 0.04),
    ScenarioKind.InC: SearchPlan.from_steps(4.0, 1.0, 0.05, 0.02),
    ScenarioKind.PSF: SearchPlan.from_steps(1.0, 1.0, 0.03, 0.03),
    ScenarioKind.PCF: SearchPlan.from_steps(1.0, 1.0, 0.03, 0.03),
}

MUTATION_AXES = ("distance", "speed", "angle+", "angle-")


def mutate_step(params: ControlParameters, axis: str, plan: SearchPlan) -> ControlParameters:
    """Move exactly one parameter by one plan step in the plan direction."""
    if axis == "distance":
        return replace(params, d=_next_in(plan.distance_schedule, params.d, "distance"))
    if axis == "speed":
        return replace(params, v_hat=_next_in(plan.speed_schedule, params.v_hat, "speed"))
    if axis in ("angle+", "angle-"):
        sign = 1.0 if axis == "angle+" else -1.0
        if plan.angle_mode is AngleMode.SCALAR:
            a = round(params.a + sign * plan.angle_step_lat, 9)
            if abs(a) > 1.0 + 1e-9:
                raise SweepExhausted(f"angle {a} past range bound")
            return params.with_angle(max(-1.0, min(1.0, a)))
        lat = round(params.theta_lat + sign * plan.angle_step_lat, 9)
        if abs(lat) > 1.0 + 1e-9:
            raise SweepExhausted(f"theta_lat {lat} past range bound")
        return replace(params, theta_lat=max(-1.0, min(1.0, lat)))
    raise ValueError(f"unknown mutation axis {axis!r}")


def _next_in(schedule: tuple[float, ...], current: float, name: str) -> float:
    for value in schedule:
        if value > current + 1e-9:
            return value
    raise SweepExhausted(f"{name} {current} at range bound")


@dataclass(frozen=True)
class OutcomeRecord:
    kind: ScenarioKind
    params: ControlParameters
    verdict: ScenarioType
    first_contact_time: float | None
    ordinal: int
    sim_seconds: float
    clock_seconds: float
    buckets: report_mod.BucketLabels
    category: report_mod.CategoryLabel

    def to_json_dict(self) -> dict:
        return {
            "ordinal": self.ordinal,
            "kind": self.kind.value,
            "d": self.params.d,
            "v_hat": self.params.v_hat,
            "theta_long": self.params.theta_long,
            "theta_lat": self.params.theta_lat,
            "angle": self.params.a,
            "verdict": self.verdict.value,
            "first_contact_time": self.first_contact_time,
            "sim_seconds": self.sim_seconds,
            "clock_seconds": self.clock_seconds,
            "buckets": {
                "distance": self.buckets.distance,
                "speed": self.buckets.speed,
                "angle": self.buckets.angle,
            },
            "category": {
                "distance": self.category.distance,
                "speed": self.category.speed,
                "angle": self.category.angle,
            },
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "OutcomeRecord":
        params = ControlParameters(
            d=data["d"], v_hat=data["v_hat"], theta_long=data["theta_long"], theta_lat=data["theta_lat"]
        )
        return cls(
            kind=ScenarioKind(data["kind"]),
            params=params,
            verdict=ScenarioType(data["verdict"]),
            first_contact_time=data["first_contact_time"],
            ordinal=data["ordinal"],
            sim_seconds=data["sim_seconds"],
            clock_seconds=data["clock_seconds"],
            buckets=report_mod.bucket(params),
            category=report_mod.categorize(params),
        )


@dataclass(frozen=True)
class CampaignConfig:
    kinds: tuple[ScenarioKind, ...]
    budget: int
    mutator: MutatorKind = MutatorKind.GUIDED
    plans: Mapping[ScenarioKind, SearchPlan] = field(default_factory=lambda: dict(DEFAULT_PLANS))
    defect: DefectModel = DefectModel()
    oracle: OracleConfig = OracleConfig()
    sim: SimConfig = SimConfig()
    rng_seed: int = 0
    scenario_overrides: Mapping[ScenarioKind, dict] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if not self.kinds:
            raise ValueError("at least one scenario kind required")
        for kind in self.kinds:
            if kind not in self.plans:
                raise ValueError(f"no search plan for kind {kind.value}")

    def plan_for(self, kind: ScenarioKind) -> SearchPlan:
        return self.plans[kind]

    def seed_for(self, kind: ScenarioKind) -> tuple[ScenarioSpec, ControlParameters]:
        spec, params = make_seed(kind)
        overrides = self.scenario_overrides.get(kind)
        if overrides:
            spec = apply_overrides(spec, overrides)
        return spec, params


@dataclass
class CampaignResult:
    records: list[OutcomeRecord]
    config: CampaignConfig

    @property
    def totals(self) -> dict[ScenarioType, int]:
        out = {t: 0 for t in ScenarioType}
        for rec in self.records:
            out[rec.verdict] += 1
        return out

    @property
    def proportion(self) -> float:
        return self.totals[ScenarioType.IC] / len(self.records) if self.records else 0.0

    def manifest(self) -> dict:
        totals = self.totals
        summary = (
            report_mod.success_rates(self.records).summary
            if self.records
            else report_mod.empty_report().summary
        )
        return {
            "format": "silentcrash-manifest-v1",
            "mutator": self.config.mutator.value,
            "kinds": [k.value for k in self.config.kinds],
            "budget": self.config.budget,
            "executions": len(self.records),
            "totals": {t.value: totals[t] for t in ScenarioType},
            "rng_seed": self.config.rng_seed,
            "time_to_first_ics": summary["time_to_first_ics"],
            "mean_time_to_first_ics": summary["mean_time_to_first_ics"],
        }


class _Executor:
    """Runs executions, classifies them, and keeps the virtual clock."""

    def __init__(self, config: CampaignConfig):
        self.config = config
        self.records: list[OutcomeRecord] = []
        self.clock = 0.0

    def budget_left(self) -> int:
        return self.config.budget - len(self.records)

    def run(self, spec: ScenarioSpec, params: ControlParameters) -> OutcomeRecord:
        trace = simulate(spec, params, self.config.sim)
        verdict = check_ic(trace, self.config.defect, self.config.oracle)
        self.clock += trace.duration
        fc = trace.first_contact
        record = OutcomeRecord(
            kind=spec.kind,
            params=params,
            verdict=verdict,
            first_contact_time=None if fc is None else round(float(trace.times[fc]), 9),
            ordinal=len(self.records),
            sim_seconds=round(trace.duration, 9),
            clock_seconds=round(self.clock, 9),
            buckets=report_mod.bucket(params),
            category=report_mod.categorize(params),
        )
        self.records.append(record)
        return record


def _angle_branch(
    executor: _Executor,
    spec: ScenarioSpec,
    start: ControlParameters,
    axis: str,
    plan: SearchPlan,
    include_start: bool,
) -> None:
    """Sweep one angle branch until k_nc consecutive NCs or the range bound."""
    params = start
    if not include_start:
        try:
            params = mutate_step(params, axis, plan)
        except SweepExhausted:
            return
    consecutive_nc = 0
    while executor.budget_left() > 0:
        record = executor.run(spec, params)
        consecutive_nc = consecutive_nc + 1 if record.verdict is ScenarioType.NC else 0
        if consecutive_nc >= plan.k_nc:
            return
        try:
            params = mutate_step(params, axis, plan)
        except SweepExhausted:
            return


def run_round(
    seed: tuple[ScenarioSpec, ControlParameters],
    config: CampaignConfig,
    executor: _Executor | None = None,
) -> list[OutcomeRecord]:
    """One guided round over a seed: nested distance/speed/angle sweeps."""
    spec, seed_params = seed
    if not validate_seed(spec, seed_params, config.sim):
        raise InvalidSeedError(f"seed for {spec.kind.value} does not produce a determined collision")
    executor = executor if executor is not None else _Executor(config)
    plan = config.plan_for(spec.kind)
    start = len(executor.records)
    for d in plan.distance_schedule:
        for v in plan.speed_schedule:
            if executor.budget_left() <= 0:
                return executor.records[start:]
            center = ControlParameters.from_angle(d=d, v_hat=v, a=seed_params.a)
            _angle_branch(executor, spec, center, "angle+", plan, include_start=True)
            _angle_branch(executor, spec, center, "angle-", plan, include_start=False)
    return executor.records[start:]


def _run_nc_start_round(
    seed: tuple[ScenarioSpec, ControlParameters],
    config: CampaignConfig,
    executor: _Executor,
) -> None:
    """Baseline round starting each angle branch from the non-collision side.

    The round is displaced to the non-collision corner of the plan box (far
    trigger distance, +1 angle bound; validated non-colliding) and the
    stepping runs reversed from there: distance descending toward the seed,
    angle from the bound toward and past the seed angle. A branch's
    NC-termination counter arms once it has entered the collision region,
    so every cell pays for crossing the non-collision band before it can
    observe anything, which is the structural handicap of starting from
    non-collision scenarios.
    """
    spec, seed_params = seed
    plan = config.plan_for(spec.kind)
    displaced = ControlParameters.from_angle(
        d=plan.distance_schedule[-1], v_hat=plan.speed_schedule[0], a=1.0
    )
    if validate_seed(spec, displaced, config.sim):
        raise InvalidSeedError(
            f"nc_start displacement for {spec.kind.value} still collides; adjust the plan"
        )
    for d in reversed(plan.distance_schedule):
        for v in plan.speed_schedule:
            params = ControlParameters.from_angle(d=d, v_hat=v, a=1.0)
            armed = False
            consecutive_nc = 0
            while executor.budget_left() > 0:
                record = executor.run(spec, params)
                if record.verdict is ScenarioType.NC:
                    consecutive_nc += 1
                else:
                    armed = True
                    consecutive_nc = 0
                if armed and consecutive_nc >= plan.k_nc:
                    break
                try:
                    params = mutate_step(params, "angle-", plan)
                except SweepExhausted:
                    break
            if executor.budget_left() <= 0:
                return


def _run_random(config: CampaignConfig, executor: _Executor) -> None:
    rng = np.random.default_rng(config.rng_seed)
    seeds = {kind: config.seed_for(kind) for kind in config.kinds}
    i = 0
    while executor.budget_left() > 0:
        kind = config.kinds[i % len(config.kinds)]
        spec, _ = seeds[kind]
        plan = config.plan_for(kind)
        params = ControlParameters.from_angle(
            d=float(rng.uniform(plan.distance_schedule[0], plan.distance_schedule[-1])),
            v_hat=float(rng.uniform(plan.speed_schedule[0], plan.speed_schedule[-1])),
            a=float(rng.uniform(-1.0, 1.0)),
        )
        executor.run(spec, params)
        i += 1


def run_campaign(config: CampaignConfig) -> CampaignResult:
    """Run a full campaign; deterministic given the config (incl. rng_seed)."""
    executor = _Executor(config)
    if config.budget == 0:
        return CampaignResult(records=[], config=config)
    if config.mutator is MutatorKind.RANDOM:
        _run_random(config, executor)
    else:
        for kind in config.kinds:
            if executor.budget_left() <= 0:
                break
            seed = config.seed_for(kind)
            if config.mutator is MutatorKind.GUIDED:
                run_round(seed, config, executor)
            else:
                _run_nc_start_round(seed, config, executor)
    return CampaignResult(records=executor.records, config=config)


@dataclass(frozen=True)
class StepSweepPoint:
    step: float
    mean_ics: float
    counts: tuple[int, ...]


SWEEP_AXES = ("distance", "speed", "angle", "angle_long", "angle_lat")


def _axis_grid(axis: str, step: float, plan: SearchPlan, fixed: ControlParameters) -> Iterator[ControlParameters]:
    """Single-axis grid over the full range, other parameters held fixed."""
    if axis == "distance":
        v = DISTANCE_MIN
        while v <= DISTANCE_MAX + 1e-9:
            yield replace(fixed, d=round(min(v, DISTANCE_MAX), 9))
            v += step
    elif axis == "speed":
        v = step
        while v <= SPEED_MAX + 1e-9:
            yield replace(fixed, v_hat=round(min(v, SPEED_MAX), 9))
            v += step
    elif axis == "angle":
        yield fixed.with_angle(0.0)
        v = step
        while v <= 1.0 + 1e-9:
            a = round(min(v, 1.0), 9)
            yield fixed.with_angle(a)
            yield fixed.with_angle(-a)
            v += step
    elif axis == "angle_long":
        v = step
        while v <= 1.0 + 1e-9:
            yield replace(fixed, theta_long=round(min(v, 1.0), 9))
            v += step
    elif axis == "angle_lat":
        v = 0.0
        while v <= 1.0 + 1e-9:
            lat = round(min(v, 1.0), 9)
            yield replace(fixed, theta_lat=lat)
            if lat > 0.0:
                yield replace(fixed, theta_lat=-lat)
            v += step
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")


def step_size_sweep(
    kind: ScenarioKind,
    axis: str,
    step_values: list[float],
    trials: int,
    config: CampaignConfig | None = None,
) -> list[StepSweepPoint]:
    """Average ignored-collision counts of single-axis sweeps per step size.

    For each trial the off-axis parameters are drawn uniformly from the plan
    ranges with a trial-indexed rng, so trial i is identical no matter how
    many trials run in total.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}")
    for step in step_values:
        if step <= 0.0:
            raise ValueError(f"step values must be positive, got {step}")
    kind = ScenarioKind(kind)
    if config is None:
        config = CampaignConfig(kinds=(kind,), budget=1)
    spec, _ = config.seed_for(kind)
    plan = config.plan_for(kind)

    points = []
    for step in step_values:
        counts = []
        for trial in range(trials):
            rng = np.random.default_rng([config.rng_seed, trial])
            fixed = ControlParameters.from_angle(
                d=float(rng.uniform(DISTANCE_MIN, DISTANCE_MAX)),
                v_hat=float(rng.uniform(plan.speed_schedule[0], SPEED_MAX)),
                a=float(rng.uniform(-1.0, 1.0)),
            )
            ics = 0
            for params in _axis_grid(axis, float(step), plan, fixed):
                trace = simulate(spec, params, config.sim)
                if check_ic(trace, config.defect, config.oracle) is ScenarioType.IC:
                    ics += 1
            counts.append(ics)
        points.append(StepSweepPoint(step=float(step), mean_ics=sum(counts) / trials, counts=tuple(counts)))
    return points
