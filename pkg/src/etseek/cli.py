"""Configuration parsing, experiment orchestration, and file outputs.

Configs are flat INI files with # comments and four sections: [map], [loop],
[trigger], [run]. Every run writes CSVs plus a plain-text report into its own
output directory; outputs are byte-deterministic for identical configs so
directories can be diffed or frozen as goldens.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from etseek import analysis, average, escore
from etseek.escore import LoopSpec, MapSpec
from etseek.trigger import TriggerSpec, validate_assumption

MODES = ("true-loop", "average", "both")

_REQUIRED = {
    "map": ("q_star", "h_star", "theta_star"),
    "loop": ("a", "omega", "epsilon", "k"),
    "trigger": ("sigma", "alpha"),
    "run": ("theta_hat0", "n_iters"),
}
_OPTIONAL = {
    "map": (),
    "loop": (),
    "trigger": (),
    "run": ("mode", "offset_constant", "out_dir"),
}

SWEEPABLE = (
    "map.q_star", "map.h_star", "map.theta_star",
    "loop.a", "loop.omega", "loop.epsilon", "loop.k",
    "trigger.sigma", "trigger.alpha",
    "run.theta_hat0", "run.n_iters", "run.offset_constant",
)

# Reference study values the golden report compares against.
_REFERENCE_EVENT_COUNT = 19
_REFERENCE_MEAN_GAP_SECONDS = 9.47
_REFERENCE_PARAMS = {
    "map.q_star": 2.0, "map.h_star": -0.7, "map.theta_star": 3.0,
    "loop.a": 0.1, "loop.omega": 7.0, "loop.epsilon": 0.18, "loop.k": -240.0,
    "trigger.sigma": 0.7, "trigger.alpha": 0.74,
    "run.theta_hat0": 0.5, "run.n_iters": 1000,
}


class ConfigError(ValueError):
    """Invalid configuration text, key set, value, or invariant."""


@dataclass(frozen=True)
class ExperimentConfig:
    map_spec: MapSpec
    loop_spec: LoopSpec
    trigger_spec: TriggerSpec
    theta_hat0: float
    n_iters: int
    mode: str
    offset_constant: float
    out_dir: str

    def scalar(self, key: str) -> float:
        """Value of one dotted sweepable key."""
        section, name = key.split(".", 1)
        if section == "map":
            return getattr(self.map_spec, name)
        if section == "loop":
            return getattr(self.loop_spec, {"a": "amplitude_a", "k": "gain_k"}.get(name, name))
        if section == "trigger":
            return getattr(self.trigger_spec, name)
        return getattr(self, name)


@dataclass(frozen=True)
class RunResult:
    out_dir: Path
    report_path: Path
    trajectory_path: Path | None
    events_path: Path | None
    avg_trajectory_path: Path | None
    event_stats: analysis.EventStats | None
    avg_event_stats: analysis.EventStats | None
    decay: analysis.DecayReport | None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate configuration text.

    Rejects unknown sections and keys, lists every missing required key at
    once, and names the offending key and constraint for bad values.
    """
    parser = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    unknown = [s for s in parser.sections() if s not in _REQUIRED]
    for section in _REQUIRED:
        if parser.has_section(section):
            allowed = set(_REQUIRED[section]) | set(_OPTIONAL[section])
            unknown.extend(
                f"{section}.{key}" for key in parser[section]
                if key not in allowed)
    if unknown:
        raise ConfigError("unknown keys: " + ", ".join(sorted(unknown)))

    missing = [
        f"{section}.{key}"
        for section, keys in _REQUIRED.items()
        for key in keys
        if not parser.has_option(section, key)]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    def number(section, key):
        raw = parser.get(section, key)
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(
                f"{section}.{key}: could not parse {raw!r} as a number") from None

    def integer(section, key):
        raw = parser.get(section, key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(
                f"{section}.{key}: could not parse {raw!r} as an integer") from None

    values = {
        f"{section}.{key}": number(section, key)
        for section, keys in _REQUIRED.items() for key in keys
        if (section, key) != ("run", "n_iters")}
    values["run.n_iters"] = integer("run", "n_iters")

    mode = parser.get("run", "mode", fallback="true-loop")
    offset = (number("run", "offset_constant")
              if parser.has_option("run", "offset_constant") else 0.3)
    out_dir = parser.get("run", "out_dir", fallback="out")

    _validate(values, mode, offset)
    return ExperimentConfig(
        map_spec=MapSpec(q_star=values["map.q_star"],
                         h_star=values["map.h_star"],
                         theta_star=values["map.theta_star"]),
        loop_spec=LoopSpec(amplitude_a=values["loop.a"],
                           omega=values["loop.omega"],
                           epsilon=values["loop.epsilon"],
                           gain_k=values["loop.k"]),
        trigger_spec=TriggerSpec(sigma=values["trigger.sigma"],
                                 alpha=values["trigger.alpha"]),
        theta_hat0=values["run.theta_hat0"],
        n_iters=values["run.n_iters"],
        mode=mode,
        offset_constant=offset,
        out_dir=out_dir,
    )


def _validate(values, mode, offset):
    problems = []
    if values["map.h_star"] == 0:
        problems.append("map.h_star must be nonzero")
    if values["loop.a"] <= 0:
        problems.append("loop.a must be > 0")
    if values["loop.omega"] <= 0:
        problems.append("loop.omega must be > 0")
    if values["loop.epsilon"] <= 0:
        problems.append("loop.epsilon must be > 0")
    if values["loop.k"] == 0:
        problems.append("loop.k must be nonzero")
    if not 0 < values["trigger.sigma"] < 1:
        problems.append("trigger.sigma must lie in (0,1)")
    if values["trigger.alpha"] <= 0:
        problems.append("trigger.alpha must be > 0")
    if values["run.n_iters"] < 1:
        problems.append("run.n_iters must be >= 1")
    if mode not in MODES:
        problems.append("run.mode must be one of " + ", ".join(MODES))
    if offset < 0:
        problems.append("run.offset_constant must be >= 0")
    if problems:
        raise ConfigError("; ".join(problems))


def _fmt(value) -> str:
    """Serialize one CSV cell: shortest round-trip floats, 1/0 booleans."""
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _stats_lines(title: str, stats: analysis.EventStats) -> list[str]:
    def cell(v):
        return "n/a" if v is None else _fmt(v)

    return [
        f"# events: {title}",
        f"count = {stats.count}",
        f"mean_gap_iters = {cell(stats.mean_gap_iters)}",
        f"mean_gap_seconds = {cell(stats.mean_gap_seconds)}",
        f"min_gap_iters = {cell(stats.min_gap_iters)}",
        f"max_gap_iters = {cell(stats.max_gap_iters)}",
    ]


def _envelope_lines(title: str, report: analysis.EnvelopeReport) -> list[str]:
    lines = [f"# envelopes: {title}", f"rho = {report.rho!r}"]
    for check in report.checks:
        if check.passed:
            lines.append(f"{check.name}: pass")
        else:
            lines.append(
                f"{check.name}: FAIL first_violation_k={check.first_violation_k} "
                f"max_excess={check.max_excess!r}")
    return lines


def _is_reference_config(config: ExperimentConfig) -> bool:
    return all(config.scalar(key) == value
               for key, value in _REFERENCE_PARAMS.items())


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Run the configured experiment and write its output files.

    true-loop mode writes trajectory.csv and events.csv; average mode writes
    avg_trajectory.csv; both writes all three. report.txt always carries the
    assumption check plus the per-loop statistics and envelope/decay checks.
    OSError from an unusable output directory propagates to the caller.
    """
    out = Path(config.out_dir)
    os.makedirs(out, exist_ok=True)
    report_lines = ["# assumption check"]
    report_lines += validate_assumption(
        config.map_spec, config.loop_spec, config.trigger_spec).lines()

    trajectory_path = events_path = avg_path = None
    event_stats = avg_event_stats = decay = None

    if config.mode in ("true-loop", "both"):
        traj, log = escore.run(config.map_spec, config.loop_spec,
                               config.trigger_spec, config.theta_hat0,
                               config.n_iters)
        trajectory_path = out / "trajectory.csv"
        events_path = out / "events.csv"
        _write_csv(
            trajectory_path,
            ("k", "theta_hat", "theta", "y", "g_hat", "e", "u", "triggered"),
            ((r.k, r.theta_hat, r.theta, r.y, r.gradient, r.error, r.control,
              r.triggered) for r in traj.records))
        _write_csv(
            events_path,
            ("l", "k_l", "g_hat_held", "u_held"),
            ((ev.index, ev.k, ev.gradient, ev.control) for ev in log.entries))
        event_stats = analysis.event_statistics(log)
        report_lines += _stats_lines("true loop", event_stats)
        if _is_reference_config(config):
            report_lines.append(f"reference_count = {_REFERENCE_EVENT_COUNT}")
            report_lines.append(
                f"reference_mean_gap_seconds = {_REFERENCE_MEAN_GAP_SECONDS!r}")
        report_lines += _envelope_lines(
            f"true loop (offset_constant = {config.offset_constant!r})",
            analysis.convergence_envelopes(traj, config.map_spec,
                                           config.loop_spec,
                                           config.trigger_spec,
                                           config.offset_constant))

    if config.mode in ("average", "both"):
        avg_traj = average.avg_run(
            config.map_spec, config.loop_spec, config.trigger_spec,
            config.theta_hat0 - config.map_spec.theta_star, config.n_iters)
        avg_path = out / "avg_trajectory.csv"
        _write_csv(
            avg_path,
            ("k", "g_av", "theta_tilde_av", "e_av", "triggered"),
            ((r.k, r.g_av, r.theta_tilde_av, r.error, r.triggered)
             for r in avg_traj.records))
        avg_event_stats = analysis.event_statistics(avg_traj.events)
        report_lines += _stats_lines("average loop", avg_event_stats)
        decay = analysis.check_decay(
            analysis.lyapunov_sequence(avg_traj), config.map_spec,
            config.loop_spec, config.trigger_spec)
        report_lines += [
            "# decay: average loop",
            f"rho = {decay.rho!r}",
            f"checked = {decay.checked}",
            f"passed = {'true' if decay.passed else 'false'}",
        ]
        if not decay.passed:
            report_lines.append(
                f"first_violation_k = {decay.first_violation_k}")
            report_lines.append(f"max_excess = {decay.max_excess!r}")
        report_lines += _envelope_lines(
            "average loop",
            analysis.convergence_envelopes(avg_traj, config.map_spec,
                                           config.loop_spec,
                                           config.trigger_spec))

    report_path = out / "report.txt"
    report_path.write_text("\n".join(report_lines) + "\n")
    return RunResult(out_dir=out, report_path=report_path,
                     trajectory_path=trajectory_path, events_path=events_path,
                     avg_trajectory_path=avg_path, event_stats=event_stats,
                     avg_event_stats=avg_event_stats, decay=decay)


def _with_scalar(config: ExperimentConfig, key: str, value: float) -> ExperimentConfig:
    section, name = key.split(".", 1)
    if section == "map":
        return replace(config, map_spec=replace(config.map_spec, **{name: value}))
    if section == "loop":
        attr = {"a": "amplitude_a", "k": "gain_k"}.get(name, name)
        return replace(config, loop_spec=replace(config.loop_spec, **{attr: value}))
    if section == "trigger":
        return replace(config, trigger_spec=replace(config.trigger_spec, **{name: value}))
    if name == "n_iters":
        return replace(config, n_iters=int(value))
    return replace(config, **{name: value})


def sweep(config: ExperimentConfig, param: str, values) -> Path:
    """Run one experiment per value of a scalar config key.

    Each entry runs both loops in its own subdirectory of the configured
    output directory; summary.csv collects the true-loop event economy, the
    final input error, the average-loop decay verdict, and the entry's rho0.
    All values are validated before anything runs.
    """
    if param not in SWEEPABLE:
        raise ConfigError(
            f"cannot sweep {param!r}; sweepable keys: " + ", ".join(SWEEPABLE))
    tokens = list(values)
    if not tokens:
        raise ConfigError("sweep requires at least one value")

    entries = []
    for token in tokens:
        try:
            value = int(token) if param == "run.n_iters" else float(token)
        except ValueError:
            raise ConfigError(
                f"{param}: could not parse {token!r} as a number") from None
        try:
            entry = _with_scalar(config, param, value)
            entry = replace(entry, mode="both",
                            out_dir=str(Path(config.out_dir) / str(token)))
        except ValueError as exc:
            raise ConfigError(f"{param} = {token}: {exc}") from exc
        entries.append((token, value, entry))

    rows = []
    for token, value, entry in entries:
        result = run_experiment(entry)
        traj_last_theta = None
        with open(result.trajectory_path, newline="") as fh:
            for row in csv.DictReader(fh):
                traj_last_theta = float(row["theta"])
        final_error = abs(traj_last_theta - entry.map_spec.theta_star)
        stats = result.event_stats
        rho0 = validate_assumption(entry.map_spec, entry.loop_spec,
                                   entry.trigger_spec).rho0
        rows.append((value, stats.count, stats.mean_gap_seconds,
                     final_error, result.decay.passed, rho0))

    summary = Path(config.out_dir) / "summary.csv"
    _write_csv(
        summary,
        ("value", "event_count", "mean_gap_seconds", "final_theta_error",
         "decay_pass", "rho0"),
        rows)
    return summary


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etseek",
        description="Event-triggered extremum seeking: simulate, average, verify.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--mode", choices=MODES)
    run_p.add_argument("--out")
    run_p.add_argument("--iters", type=int)

    sweep_p = sub.add_parser("sweep", help="run one experiment per parameter value")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--param", required=True)
    sweep_p.add_argument("--values", required=True,
                         help="comma-separated values")
    sweep_p.add_argument("--out", required=True)

    check_p = sub.add_parser("check", help="print the assumption report")
    check_p.add_argument("--config", required=True)
    return parser


def _load_config(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.command == "run":
            if args.mode:
                config = replace(config, mode=args.mode)
            if args.iters is not None:
                if args.iters < 1:
                    raise ConfigError("run.n_iters must be >= 1")
                config = replace(config, n_iters=args.iters)
            if args.out:
                config = replace(config, out_dir=args.out)
            result = run_experiment(config)
            for path in (result.trajectory_path, result.events_path,
                         result.avg_trajectory_path, result.report_path):
                if path is not None:
                    print(f"wrote {path}")
        elif args.command == "sweep":
            config = replace(config, out_dir=args.out)
            summary = sweep(config, args.param,
                            [v for v in args.values.split(",") if v != ""])
            print(f"wrote {summary}")
        else:
            report = validate_assumption(config.map_spec, config.loop_spec,
                                         config.trigger_spec)
            for line in report.lines():
                print(line)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
