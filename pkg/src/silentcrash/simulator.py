"""Deterministic fixed-step kinematic simulation of one scenario execution.

The EV cruises along its initial heading until the center-to-center distance
to the NPC falls to the trigger distance d; from that frame on it moves with
speed v_hat along (initial heading + a * 90 deg). The NPC follows its spec
behavior throughout. Integration is forward-Euler at a fixed dt and contains
no randomness anywhere, so identical inputs give bit-identical traces.

Motion is piecewise linear, which lets the whole trace be computed with a
handful of vectorized array operations per phase. The per-frame overlap and
penetration values use the same face-normal projections as the scalar
geometry module; frame invariants are cross-checked against it in tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import OrientedBox, Point2
from .scenario import BehaviorKind, ControlParameters, ScenarioSpec


class SimulationError(RuntimeError):
    """Non-finite state or malformed configuration."""


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    horizon: float = 15.0
    settle_frames: int = 20

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise SimulationError(f"dt must be positive, got {self.dt}")
        if self.horizon < 10.0 * self.dt:
            raise SimulationError("horizon must cover at least 10 steps")
        if self.settle_frames < 0:
            raise SimulationError("settle_frames must be non-negative")


@dataclass(frozen=True)
class Frame:
    t: float
    ev_box: OrientedBox
    npc_box: OrientedBox
    gt_overlap: bool
    penetration: float
    closing_speed: float
    triggered: bool


@dataclass
class Trace:
    """Frame-by-frame record of one execution, backed by parallel arrays."""

    times: np.ndarray
    ev_centers: np.ndarray
    ev_yaws: np.ndarray
    npc_centers: np.ndarray
    npc_yaws: np.ndarray
    gt_overlap: np.ndarray
    penetration: np.ndarray
    closing_speed: np.ndarray
    triggered: np.ndarray
    ev_half: tuple[float, float]
    npc_half: tuple[float, float]
    first_contact: int | None
    trigger_frame: int | None
    _frames: tuple[Frame, ...] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def duration(self) -> float:
        """Simulated seconds consumed by this execution."""
        return float(self.times[-1])

    def ev_box(self, i: int) -> OrientedBox:
        return OrientedBox(
            Point2(float(self.ev_centers[i, 0]), float(self.ev_centers[i, 1])),
            self.ev_half[0],
            self.ev_half[1],
            float(self.ev_yaws[i]),
        )

    def npc_box(self, i: int) -> OrientedBox:
        return OrientedBox(
            Point2(float(self.npc_centers[i, 0]), float(self.npc_centers[i, 1])),
            self.npc_half[0],
            self.npc_half[1],
            float(self.npc_yaws[i]),
        )

    def frame(self, i: int) -> Frame:
        if i < 0:
            i += len(self)
        return Frame(
            t=float(self.times[i]),
            ev_box=self.ev_box(i),
            npc_box=self.npc_box(i),
            gt_overlap=bool(self.gt_overlap[i]),
            penetration=float(self.penetration[i]),
            closing_speed=float(self.closing_speed[i]),
            triggered=bool(self.triggered[i]),
        )

    @property
    def frames(self) -> tuple[Frame, ...]:
        if self._frames is None:
            self._frames = tuple(self.frame(i) for i in range(len(self)))
        return self._frames


def _behavior_velocity(actor) -> np.ndarray:
    if actor.behavior.kind is BehaviorKind.STATIC:
        return np.zeros(2)
    speed = actor.behavior.speed
    return np.array([speed * math.cos(actor.yaw), speed * math.sin(actor.yaw)])


def _pairwise_penetration(delta: np.ndarray, ev_yaw: float, ev_half, npc_yaw: float, npc_half) -> np.ndarray:
    """Signed minimum axis overlap for each frame of one constant-yaw phase.

    Negative values mean a separating axis exists; the value clamped at zero
    is the penetration depth, matching geometry.penetration_depth.
    """
    axes = []
    for yaw in (ev_yaw, npc_yaw):
        c, s = math.cos(yaw), math.sin(yaw)
        axes.append((c, s))
        axes.append((-s, c))
    axes = np.array(axes)  # (4, 2)

    def radius(yaw, half):
        c, s = math.cos(yaw), math.sin(yaw)
        u = np.array([c, s])
        v = np.array([-s, c])
        return half[0] * np.abs(axes @ u) + half[1] * np.abs(axes @ v)

    combined = radius(ev_yaw, ev_half) + radius(npc_yaw, npc_half)  # (4,)
    proj = np.abs(delta @ axes.T)  # (n, 4)
    return (combined[None, :] - proj).min(axis=1)


def simulate(spec: ScenarioSpec, params: ControlParameters, cfg: SimConfig = SimConfig()) -> Trace:
    """Run one execution and capture its trace.

    The trace stops at min(first contact + settle_frames, horizon); without
    contact it covers the whole horizon.
    """
    n = int(round(cfg.horizon / cfg.dt))
    times = np.arange(n + 1) * cfg.dt

    ev0 = np.array([spec.ev.position.x, spec.ev.position.y])
    npc0 = np.array([spec.npc.position.x, spec.npc.position.y])
    ev_v0 = _behavior_velocity(spec.ev)
    npc_v = _behavior_velocity(spec.npc)
    if not np.isfinite(np.concatenate([ev0, npc0, ev_v0, npc_v])).all():
        raise SimulationError("non-finite initial state")

    # phase A: both actors at their spec velocities; the first crossing of
    # the trigger distance along this path is the true trigger frame
    with np.errstate(over="ignore", invalid="ignore"):
        ev_pos = ev0[None, :] + times[:, None] * ev_v0[None, :]
        npc_pos = npc0[None, :] + times[:, None] * npc_v[None, :]
    dist_a = np.hypot(*(npc_pos - ev_pos).T)
    below = dist_a <= params.d
    trigger = int(np.argmax(below)) if below.any() else None

    ev_yaw0 = spec.ev.yaw
    ev_yaws = np.full(n + 1, ev_yaw0)
    ev_vel = np.broadcast_to(ev_v0, (n + 1, 2)).copy()
    if trigger is not None:
        yaw1 = ev_yaw0 + params.a * (math.pi / 2.0)
        v1 = np.array([params.v_hat * math.cos(yaw1), params.v_hat * math.sin(yaw1)])
        tail = times[trigger:] - times[trigger]
        ev_pos = ev_pos.copy()
        ev_pos[trigger:] = ev_pos[trigger] + tail[:, None] * v1[None, :]
        ev_yaws[trigger:] = yaw1
        ev_vel[trigger:] = v1

    if not (np.isfinite(ev_pos).all() and np.isfinite(npc_pos).all()):
        raise SimulationError("non-finite positions")
    delta = npc_pos - ev_pos

    ev_half = (spec.ev.half_length, spec.ev.half_width)
    npc_half = (spec.npc.half_length, spec.npc.half_width)
    min_overlap = np.empty(n + 1)
    split = n + 1 if trigger is None else trigger
    if split > 0:
        min_overlap[:split] = _pairwise_penetration(delta[:split], ev_yaw0, ev_half, spec.npc.yaw, npc_half)
    if split < n + 1:
        min_overlap[split:] = _pairwise_penetration(
            delta[split:], float(ev_yaws[split]), ev_half, spec.npc.yaw, npc_half
        )

    gt = min_overlap >= 0.0
    penetration = np.maximum(min_overlap, 0.0)

    dist = np.hypot(delta[:, 0], delta[:, 1])
    rel_v = ev_vel - npc_v[None, :]
    closing = np.where(dist > 1e-12, np.einsum("ij,ij->i", rel_v, delta) / np.maximum(dist, 1e-12), 0.0)

    first_contact = int(np.argmax(gt)) if gt.any() else None
    stop = n if first_contact is None else min(first_contact + cfg.settle_frames, n)
    end = stop + 1

    triggered = np.zeros(end, dtype=bool)
    trigger_frame = None
    if trigger is not None and trigger <= stop:
        trigger_frame = trigger
        triggered[trigger:] = True

    return Trace(
        times=times[:end],
        ev_centers=ev_pos[:end],
        ev_yaws=ev_yaws[:end],
        npc_centers=npc_pos[:end],
        npc_yaws=np.full(end, spec.npc.yaw),
        gt_overlap=gt[:end],
        penetration=penetration[:end],
        closing_speed=closing[:end],
        triggered=triggered,
        ev_half=ev_half,
        npc_half=npc_half,
        first_contact=first_contact,
        trigger_frame=trigger_frame,
    )


def trace_to_jsonl(trace: Trace) -> str:
    """Serialize a trace as JSONL, one frame per line."""
    lines = []
    for i in range(len(trace)):
        lines.append(
            json.dumps(
                {
                    "t": round(float(trace.times[i]), 9),
                    "ev": _box_fields(trace.ev_centers[i], trace.ev_yaws[i], trace.ev_half),
                    "npc": _box_fields(trace.npc_centers[i], trace.npc_yaws[i], trace.npc_half),
                    "gt_overlap": bool(trace.gt_overlap[i]),
                    "penetration": float(trace.penetration[i]),
                    "closing_speed": float(trace.closing_speed[i]),
                    "triggered": bool(trace.triggered[i]),
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"


def _box_fields(center, yaw, half) -> dict:
    return {
        "x": float(center[0]),
        "y": float(center[1]),
        "yaw": float(yaw),
        "half_length": half[0],
        "half_width": half[1],
    }
