"""Campaign runner and utilities.

Subcommands:
    run             execute a campaign from a JSON config
    replay          re-simulate one logged execution and check its verdict
    report          rebuild CSV/SVG reports from a result log
    sweep-step      step-size sweep for one control-parameter axis
    sweep-threshold precision/recall sweep over overlap thresholds

Exit codes: 0 success, 1 config error, 2 I/O error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import enum
import json
import sys
from pathlib import Path

from . import report as report_mod
from .config import ConfigError, load_config_file, parse_config
from .detector import DefectModel, builtin_cd, ground_truth
from .fuzzer import (
    CampaignConfig,
    InvalidSeedError,
    OutcomeRecord,
    run_campaign,
    step_size_sweep,
)
from .oracle import ScenarioType, check_ic, recall_sweep
from .simulator import simulate, trace_to_jsonl


class ExitStatus(enum.IntEnum):
    OK = 0
    CONFIG_ERROR = 1
    IO_ERROR = 2
    INTERNAL_ERROR = 3


def _fail(status: ExitStatus, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return int(status)


def _write_records(records, path: Path) -> None:
    with path.open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_dict(), sort_keys=True))
            fh.write("\n")


def _read_records(path: Path) -> list[OutcomeRecord]:
    records = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(OutcomeRecord.from_json_dict(json.loads(line)))
    return records


def _read_record_at(path: Path, ordinal: int) -> tuple[OutcomeRecord | None, int]:
    """Parse only the requested record; returns (record, total line count)."""
    lines = [line for line in path.read_text().splitlines() if line.strip()]
    if not (0 <= ordinal < len(lines)):
        return None, len(lines)
    return OutcomeRecord.from_json_dict(json.loads(lines[ordinal])), len(lines)


def _kind_summary_line(kind, records) -> str:
    mine = [r for r in records if r.kind is kind]
    counts = {t: 0 for t in ScenarioType}
    for r in mine:
        counts[r.verdict] += 1
    collisions = counts[ScenarioType.IC] + counts[ScenarioType.DC]
    sr = f"{100.0 * counts[ScenarioType.IC] / collisions:.2f}%" if collisions else "-"
    return (
        f"{kind.value}: executions={len(mine)} IC={counts[ScenarioType.IC]} "
        f"DC={counts[ScenarioType.DC]} NC={counts[ScenarioType.NC]} "
        f"FP={counts[ScenarioType.FP]} SR={sr}"
    )


def cmd_run(args) -> int:
    try:
        config, data, digest = load_config_file(args.config)
    except FileNotFoundError:
        return _fail(ExitStatus.IO_ERROR, f"config file not found: {args.config}")
    except ConfigError as exc:
        return _fail(ExitStatus.CONFIG_ERROR, str(exc))

    try:
        result = run_campaign(config)
    except (InvalidSeedError, ValueError) as exc:
        return _fail(ExitStatus.CONFIG_ERROR, str(exc))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_records(result.records, out / "records.jsonl")

    manifest = result.manifest()
    manifest["config"] = data
    manifest["config_digest"] = digest
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")

    report = (
        report_mod.success_rates(result.records) if result.records else report_mod.empty_report()
    )
    report_mod.export(report, "csv", out)

    for kind in config.kinds:
        print(_kind_summary_line(kind, result.records))
    print(f"total executions={len(result.records)} proportion={result.proportion:.4f}")
    return int(ExitStatus.OK)


def _defect_override(args, base: DefectModel) -> tuple[DefectModel, bool]:
    fields = {}
    if args.sample_period is not None:
        fields["sample_period"] = args.sample_period
    if args.min_penetration is not None:
        fields["min_penetration"] = args.min_penetration
    if args.min_impact_speed is not None:
        fields["min_impact_speed"] = args.min_impact_speed
    if not fields:
        return base, False
    merged = {
        "sample_period": base.sample_period,
        "min_penetration": base.min_penetration,
        "min_impact_speed": base.min_impact_speed,
    }
    merged.update(fields)
    return DefectModel(**merged), True


def cmd_replay(args) -> int:
    log_path = Path(args.log)
    manifest_path = log_path.parent / "manifest.json"
    try:
        record, count = _read_record_at(log_path, args.ordinal)
        manifest = json.loads(manifest_path.read_text())
    except FileNotFoundError as exc:
        return _fail(ExitStatus.IO_ERROR, f"missing file: {exc.filename}")

    if record is None:
        return _fail(ExitStatus.IO_ERROR, f"ordinal {args.ordinal} outside log (0..{count - 1})")

    try:
        config = parse_config(manifest["config"])
    except (KeyError, ConfigError) as exc:
        return _fail(ExitStatus.CONFIG_ERROR, f"manifest config invalid: {exc}")

    defect, overridden = _defect_override(args, config.defect)
    spec, _ = config.seed_for(record.kind)
    trace = simulate(spec, record.params, config.sim)
    verdict = check_ic(trace, defect, config.oracle)

    out = Path(args.out) if args.out else log_path.parent / f"trace_{args.ordinal}.jsonl"
    out.write_text(trace_to_jsonl(trace))
    print(f"ordinal={args.ordinal} kind={record.kind.value} verdict={verdict.value} trace={out}")

    if not overridden and verdict is not record.verdict:
        return _fail(
            ExitStatus.INTERNAL_ERROR,
            f"replay verdict {verdict.value} != logged {record.verdict.value} (nondeterminism bug)",
        )
    return int(ExitStatus.OK)


def cmd_report(args) -> int:
    try:
        records = _read_records(Path(args.log))
    except FileNotFoundError:
        return _fail(ExitStatus.IO_ERROR, f"log not found: {args.log}")
    report = report_mod.success_rates(records) if records else report_mod.empty_report()
    paths = report_mod.export(report, args.format, args.out)
    for p in paths:
        print(p)
    return int(ExitStatus.OK)


def _parse_float_list(raw: str, field: str) -> list[float]:
    items = [s for s in (part.strip() for part in raw.split(",")) if s]
    if not items:
        raise ConfigError(f"{field}: list must not be empty")
    try:
        return [float(s) for s in items]
    except ValueError:
        raise ConfigError(f"{field}: entries must be numbers") from None


def _load_optional_config(path, fallback: CampaignConfig) -> CampaignConfig:
    if path is None:
        return fallback
    config, _, _ = load_config_file(path)
    return config


def cmd_sweep_step(args) -> int:
    try:
        steps = _parse_float_list(args.steps, "steps")
        fallback = parse_config({"kinds": [args.kind], "budget": 1})
        config = _load_optional_config(args.config, fallback)
        points = step_size_sweep(args.kind, args.axis, steps, args.trials, config)
    except FileNotFoundError:
        return _fail(ExitStatus.IO_ERROR, f"config file not found: {args.config}")
    except (ConfigError, ValueError) as exc:
        return _fail(ExitStatus.CONFIG_ERROR, str(exc))

    lines = ["step,mean_ics,trial_counts"]
    for pt in points:
        lines.append(f"{pt.step:g},{pt.mean_ics:.6f},{'|'.join(str(c) for c in pt.counts)}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(args.out)
    return int(ExitStatus.OK)


_SWEEP_THRESHOLD_DEFAULT = {
    "kinds": ["FLB", "PSF", "LC"],
    "budget": 600,
    "mutator": "guided",
    "plans": {"default": {"speed_start": 10.0, "speed_step": 10.0}},
}


def cmd_sweep_threshold(args) -> int:
    try:
        thresholds = _parse_float_list(args.thresholds, "thresholds")
        for t in thresholds:
            if not (0.0 <= t < 1.0):
                raise ConfigError(f"thresholds: {t:g} outside 0..1")
        config = _load_optional_config(args.config, parse_config(_SWEEP_THRESHOLD_DEFAULT))
    except FileNotFoundError:
        return _fail(ExitStatus.IO_ERROR, f"config file not found: {args.config}")
    except (ConfigError, ValueError) as exc:
        return _fail(ExitStatus.CONFIG_ERROR, str(exc))

    result = run_campaign(config)
    labeled = []
    specs = {kind: config.seed_for(kind)[0] for kind in config.kinds}
    for rec in result.records:
        trace = simulate(specs[rec.kind], rec.params, config.sim)
        label = ground_truth(trace) is not None and not builtin_cd(trace, config.defect)
        labeled.append((trace, label))

    try:
        points = recall_sweep(labeled, thresholds, config.defect)
    except ValueError as exc:
        return _fail(ExitStatus.CONFIG_ERROR, str(exc))

    lines = ["threshold,tp,fp,fn,precision,recall"]
    for pt in points:
        precision = "" if pt.precision is None else f"{pt.precision:.6f}"
        recall = "" if pt.recall is None else f"{pt.recall:.6f}"
        lines.append(f"{pt.threshold:g},{pt.tp},{pt.fp},{pt.fn},{precision},{recall}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(args.out)
    return int(ExitStatus.OK)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="silentcrash", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a fuzzing campaign")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="re-simulate one logged execution")
    p_replay.add_argument("--log", required=True)
    p_replay.add_argument("--ordinal", type=int, required=True)
    p_replay.add_argument("--out")
    p_replay.add_argument("--sample-period", type=int, dest="sample_period")
    p_replay.add_argument("--min-penetration", type=float, dest="min_penetration")
    p_replay.add_argument("--min-impact-speed", type=float, dest="min_impact_speed")
    p_replay.set_defaults(func=cmd_replay)

    p_report = sub.add_parser("report", help="rebuild reports from a result log")
    p_report.add_argument("--log", required=True)
    p_report.add_argument("--format", choices=("csv", "svg"), default="csv")
    p_report.add_argument("--out", required=True)
    p_report.set_defaults(func=cmd_report)

    p_step = sub.add_parser("sweep-step", help="step-size sweep for one axis")
    p_step.add_argument("--kind", required=True)
    p_step.add_argument("--axis", required=True)
    p_step.add_argument("--steps", required=True, help="comma-separated step sizes")
    p_step.add_argument("--trials", type=int, default=10)
    p_step.add_argument("--config")
    p_step.add_argument("--out", required=True)
    p_step.set_defaults(func=cmd_sweep_step)

    p_thr = sub.add_parser("sweep-threshold", help="oracle threshold precision/recall sweep")
    p_thr.add_argument("--thresholds", required=True, help="comma-separated thresholds")
    p_thr.add_argument("--config")
    p_thr.add_argument("--out", required=True)
    p_thr.set_defaults(func=cmd_sweep_threshold)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map them onto the config-error code
        return int(ExitStatus.CONFIG_ERROR) if exc.code else int(ExitStatus.OK)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
