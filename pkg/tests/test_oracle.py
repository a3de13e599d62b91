import numpy as np
import pytest

from silentcrash.detector import PERFECT_DETECTOR, DefectModel, builtin_cd, ground_truth
from silentcrash.oracle import (
    OracleConfig,
    ScenarioType,
    check_ic,
    classify,
    max_iou,
    recall_sweep,
)
from silentcrash.scenario import ControlParameters, ScenarioKind, make_seed
from silentcrash.simulator import simulate
from test_detector import PSF_GRAZE, sample_traces


def test_decision_table_is_exhaustive_and_exclusive():
    assert classify(True, False) is ScenarioType.IC
    assert classify(False, False) is ScenarioType.NC
    assert classify(True, True) is ScenarioType.DC
    assert classify(False, True) is ScenarioType.FP


def test_ignored_collision_verdict_on_graze():
    spec, _ = make_seed(ScenarioKind.PSF)
    trace = simulate(spec, PSF_GRAZE)
    assert check_ic(trace, DefectModel()) is ScenarioType.IC


def test_detected_collision_verdict_on_seed():
    spec, params = make_seed(ScenarioKind.FLV)
    assert check_ic(simulate(spec, params), DefectModel()) is ScenarioType.DC


def test_non_collision_verdict_on_miss():
    spec, _ = make_seed(ScenarioKind.PSF)
    trace = simulate(spec, ControlParameters.from_angle(d=7.0, v_hat=15.0, a=1.0))
    assert check_ic(trace, DefectModel()) is ScenarioType.NC


def test_verdict_agrees_with_recomputed_conditions():
    for trace in sample_traces(per_kind=10, seed=31):
        cond1 = ground_truth(trace) is not None
        cond2 = builtin_cd(trace, DefectModel())
        assert check_ic(trace, DefectModel()) is classify(cond1, cond2)


def test_perfect_detector_collapse():
    for trace in sample_traces(per_kind=10, seed=37):
        assert check_ic(trace, PERFECT_DETECTOR) in (ScenarioType.DC, ScenarioType.NC)


def test_raising_threshold_shrinks_the_overlap_condition():
    spec, params = make_seed(ScenarioKind.FLV)
    trace = simulate(spec, params)
    peak = max_iou(trace)
    assert 0.0 < peak < 1.0
    below = OracleConfig(t_bbox=round(peak - 0.01, 6))
    above = OracleConfig(t_bbox=round(peak + 0.01, 6))
    assert check_ic(trace, PERFECT_DETECTOR, below) is ScenarioType.DC
    # detector still fires but the overlap condition fails: the phantom cell
    assert check_ic(trace, PERFECT_DETECTOR, above) is ScenarioType.FP
    quiet = DefectModel(sample_period=1, min_penetration=10.0, min_impact_speed=0.0)
    assert check_ic(trace, quiet, above) is ScenarioType.NC


def test_overlap_condition_shrinks_monotonically_in_threshold():
    thresholds = [0.0, 0.02, 0.05, 0.1, 0.2, 0.5]
    for trace in sample_traces(per_kind=6, seed=43):
        conds = []
        for t in thresholds:
            if t == 0.0:
                conds.append(ground_truth(trace) is not None)
            else:
                conds.append(max_iou(trace) >= t)
        assert all(not later or earlier for earlier, later in zip(conds, conds[1:]))
        # and no NC ever turns into IC/DC as the threshold rises
        for t, cond in zip(thresholds, conds):
            verdict = check_ic(trace, DefectModel(), OracleConfig(t_bbox=t))
            assert (verdict in (ScenarioType.IC, ScenarioType.DC)) == cond


def test_oracle_config_range():
    with pytest.raises(ValueError):
        OracleConfig(t_bbox=1.0)
    with pytest.raises(ValueError):
        OracleConfig(t_bbox=-0.1)


def _labeled_set():
    defect = DefectModel()
    labeled = []
    rng = np.random.default_rng(41)
    for kind in (ScenarioKind.PSF, ScenarioKind.FLB, ScenarioKind.InC):
        spec, _ = make_seed(kind)
        for _ in range(30):
            params = ControlParameters.from_angle(
                d=float(rng.uniform(2, 7)), v_hat=float(rng.uniform(1, 50)), a=float(rng.uniform(-1, 1))
            )
            trace = simulate(spec, params)
            label = ground_truth(trace) is not None and not builtin_cd(trace, defect)
            labeled.append((trace, label))
    spec, _ = make_seed(ScenarioKind.PSF)
    labeled.append((simulate(spec, PSF_GRAZE), True))
    return labeled


def test_recall_sweep_trend():
    labeled = _labeled_set()
    assert sum(1 for _, lab in labeled if lab) > 0
    points = recall_sweep(labeled, [0.0, 0.05, 0.1, 0.15, 0.2])
    assert points[0].recall == 1.0
    assert points[0].precision == 1.0
    recalls = [p.recall for p in points]
    assert all(r is not None for r in recalls)
    assert all(recalls[i] >= recalls[i + 1] for i in range(len(recalls) - 1))


def test_recall_sweep_rejects_empty_input():
    with pytest.raises(ValueError):
        recall_sweep([], [0.0])


def test_recall_sweep_all_negative_reports_absent_recall():
    spec, _ = make_seed(ScenarioKind.PSF)
    trace = simulate(spec, ControlParameters.from_angle(d=7.0, v_hat=15.0, a=1.0))
    points = recall_sweep([(trace, False)], [0.0, 0.1])
    assert all(p.recall is None for p in points)
    assert all(p.tp == 0 for p in points)
