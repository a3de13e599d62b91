"""Two collision verdicts per trace: exact ground truth and a flawed built-in.

The built-in detector under-reports by construction. Its defect model has
three knobs: it only inspects every k-th frame (fast contacts can fall
between samples), it needs a minimum penetration depth (shallow grazes slip
through), and it needs a minimum closing speed at the inspected frame
(slow or sliding contacts slip through). It never fabricates contact: a
frame only qualifies if the boxes actually overlap there, so with
(k=1, p_min=0, v_min=0) the built-in verdict coincides with ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulator import Trace


@dataclass(frozen=True)
class DefectModel:
    sample_period: int = 5
    min_penetration: float = 0.05
    min_impact_speed: float = 0.5

    def __post_init__(self) -> None:
        if self.sample_period < 1:
            raise ValueError("sample_period must be >= 1")
        if self.min_penetration < 0.0 or self.min_impact_speed < 0.0:
            raise ValueError("defect thresholds must be non-negative")


PERFECT_DETECTOR = DefectModel(sample_period=1, min_penetration=0.0, min_impact_speed=0.0)


def ground_truth(trace: Trace) -> int | None:
    """Index of the first frame with overlapping footprints, if any.

    Overlap here is the frame's separating-axis result. The same notion
    gates the built-in detector below, so the built-in can under-report but
    never fire on a trace without ground-truth contact.
    """
    hits = np.flatnonzero(trace.gt_overlap)
    return int(hits[0]) if hits.size else None


def builtin_cd(trace: Trace, defect: DefectModel) -> bool:
    """Verdict of the flawed built-in detector.

    True iff some inspected frame (every sample_period-th) has overlapping
    boxes with penetration >= min_penetration and, when the speed gate is
    enabled (min_impact_speed > 0), closing speed >= min_impact_speed.
    """
    idx = np.arange(0, len(trace), defect.sample_period)
    hit = trace.gt_overlap[idx] & (trace.penetration[idx] >= defect.min_penetration)
    if defect.min_impact_speed > 0.0:
        hit &= trace.closing_speed[idx] >= defect.min_impact_speed
    return bool(hit.any())
