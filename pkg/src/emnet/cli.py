"""Command-line entry point: ``emnet <command> --scenario <path> ...``.

Exit status: 0 success, 1 scenario load error, 2 analysis error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, fields
from pathlib import Path
from typing import Any, Sequence

from . import baselines, report
from .cycles import CycleOptions, enumerate_cycles
from .effectiveness import (
    RankOptions,
    deletion_reports,
    evaluate,
    rank_rows,
    targets,
)
from .network import BuildOptions, ScenarioError, build_network, id_key, load_scenario_file

log = logging.getLogger("emnet")

COMMANDS = ("capability", "rank", "centrality", "cycles", "report")
EXIT_LOAD, EXIT_ANALYSIS, EXIT_IO = 1, 2, 3

SECTIONS = {"build": BuildOptions, "cycle": CycleOptions, "rank": RankOptions}


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _coerce(section: str, key: str, value: Any) -> Any:
    """Coerce a scenario-file value or ``--set`` string into the field's type."""
    cls = SECTIONS[section]
    known = {f.name: f for f in fields(cls)}
    if key not in known:
        raise ConfigError(f"unknown option {section}.{key}")
    default = known[key].default
    text = isinstance(value, str)
    if key == "protected_nodes":
        items = value.split(",") if text else list(value)
        return frozenset(i.strip() for i in items if i.strip())
    if key == "target_weights":
        if text:
            pairs = [p.rsplit(":", 1) for p in value.split(",") if p.strip()]
            return {k.strip(): float(v) for k, v in pairs}
        return {str(k): float(v) for k, v in dict(value).items()}
    if isinstance(default, bool):
        return _parse_bool(value) if text else bool(value)
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def resolve_options(scenario, overrides: Sequence[str] = (), protect: Sequence[str] = (), max_edges: int | None = None):
    values: dict[str, dict[str, Any]] = {
        "build": asdict(scenario.build_options),
        "cycle": {},
        "rank": {},
    }
    for key, value in scenario.cycle_options.items():
        values["cycle"][key] = _coerce("cycle", key, value)
    for key, value in scenario.rank_options.items():
        values["rank"][key] = _coerce("rank", key, value)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        section, _, key = dotted.strip().partition(".")
        if section not in SECTIONS or not key:
            raise ConfigError(f"unknown option {dotted!r}; use build.*, cycle.* or rank.*")
        try:
            values[section][key] = _coerce(section, key, raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{dotted}: {exc}") from exc
    if protect:
        values["rank"]["protected_nodes"] = frozenset(values["rank"].get("protected_nodes", ())) | set(protect)
    if max_edges is not None:
        values["cycle"]["max_cycle_edges"] = max_edges
    try:
        return (
            BuildOptions(**values["build"]),
            CycleOptions(**values["cycle"]),
            RankOptions(**values["rank"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def dump_config(build: BuildOptions, cycle: CycleOptions, rank: RankOptions) -> str:
    def plain(obj) -> dict:
        out = {}
        for f in fields(obj):
            v = getattr(obj, f.name)
            if isinstance(v, frozenset):
                v = sorted(v, key=id_key)
            elif isinstance(v, dict):
                v = dict(sorted(v.items()))
            out[f.name] = v
        return out

    return json.dumps({"build": plain(build), "cycle": plain(cycle), "rank": plain(rank)}, indent=2) + "\n"


def _ext(fmt: str) -> str:
    return "csv" if fmt == "csv" else "json"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, type=Path, help="scenario JSON file")
    common.add_argument(
        "--format", default="csv", choices=("csv", "json", "json-syntax"),
        help="csv (printed precision) or json (full precision)",
    )
    common.add_argument("--out", type=Path, help="output file (a directory for 'report')")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override an option, e.g. cycle.penalty_gamma=0.9",
    )
    common.add_argument("--protect", action="append", default=[], metavar="ID",
                        help="exclude a platform from deletion (repeatable)")
    common.add_argument("--max-cycle-edges", type=int, help="shorthand for cycle.max_cycle_edges")
    common.add_argument("--dump-config", action="store_true", help="print the effective options and exit")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="emnet",
        description="Combat system-of-systems capability and key-node analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("capability", parents=[common], help="per-target and total capability")
    sub.add_parser("rank", parents=[common], help="node criticality by deletion")
    sub.add_parser("centrality", parents=[common], help="criticality against baseline centralities")
    cyc = sub.add_parser("cycles", parents=[common], help="list combat cycles against one target")
    cyc.add_argument("--target", required=True, help="opposing platform id")
    sub.add_parser("report", parents=[common], help="all tables plus plot data into --out")
    return parser


def _analyse(args, scenario, network, cycle, rank) -> None:
    fmt = "json" if args.format == "json-syntax" else args.format
    out = args.out

    if args.command == "capability":
        rep = evaluate(network, cycle, rank)
        report.emit_table(report.capability_rows(rep), report.CAPABILITY_COLUMNS, fmt, out)
    elif args.command == "rank":
        base, after = deletion_reports(network, cycle, rank)
        rows = rank_rows(base, after, network)
        report.emit_table(report.rank_table(base.total, rows), report.RANK_COLUMNS, fmt, out)
    elif args.command == "centrality":
        base, after = deletion_reports(network, cycle, rank)
        rows = rank_rows(base, after, network)
        tables = baselines.compare(network, cycle, rank)
        report.emit_table(
            report.centrality_rows(rows, tables), report.centrality_columns(list(tables)), fmt, out
        )
        for tie in report.tie_rows(tables):
            log.info("tie: %s rank %d shared by %s", tie["method"], tie["rank"], tie["nodes"])
    elif args.command == "cycles":
        cycles = enumerate_cycles(network, args.target, cycle, rank.attacker)
        report.emit_table(report.cycle_rows(cycles), report.CYCLE_COLUMNS, fmt, out)
    else:
        _write_report(scenario, network, cycle, rank, fmt, out or Path("report"))


def _write_report(scenario, network, cycle, rank, fmt, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    ext = _ext(fmt)
    base, after = deletion_reports(network, cycle, rank)
    rows = rank_rows(base, after, network)
    tables = baselines.compare(network, cycle, rank)
    emit = report.emit_table
    emit(report.capability_rows(base), report.CAPABILITY_COLUMNS, fmt, outdir / f"capability.{ext}")
    emit(report.rank_table(base.total, rows), report.RANK_COLUMNS, fmt, outdir / f"rank.{ext}")
    emit(report.centrality_rows(rows, tables), report.centrality_columns(list(tables)), fmt,
         outdir / f"centrality.{ext}")
    emit(report.tie_rows(tables), report.TIE_COLUMNS, fmt, outdir / f"ties.{ext}")
    cycles = [c for t in targets(network, rank.attacker)
              for c in enumerate_cycles(network, t, cycle, rank.attacker)]
    emit(report.cycle_rows(cycles), report.CYCLE_COLUMNS, fmt, outdir / f"cycles.{ext}")
    # plot data: BER curve per model in use, CRT bar heights
    used = {p.comm.ber_model for p in network.platforms.values()}
    # scenario-named models first; the built-in "default" only if still unclaimed
    named = sorted(scenario.ber_models.items(), key=lambda kv: (kv[0] == "default", kv[0]))
    for name, model in named:
        if model in used:
            emit(report.ber_curve_rows(model), report.BER_COLUMNS, fmt, outdir / f"ber_curve_{name}.{ext}")
            used.discard(model)
    emit(report.crt_bar_rows(rows), report.CRT_BAR_COLUMNS, fmt, outdir / f"crt_bars.{ext}")


def _configure_logging(verbose: bool) -> None:
    # own handler on the package logger: basicConfig is a no-op once the root has handlers
    for h in [h for h in log.handlers if getattr(h, "_emnet", False)]:
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("emnet: %(message)s"))
    handler._emnet = True
    log.addHandler(handler)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        scenario = load_scenario_file(args.scenario)
    except ScenarioError as exc:
        print(f"emnet: scenario error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except OSError as exc:
        print(f"emnet: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        build, cycle, rank = resolve_options(
            scenario, args.overrides, args.protect, args.max_cycle_edges
        )
    except ConfigError as exc:
        print(f"emnet: option error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    if args.dump_config:
        sys.stdout.write(dump_config(build, cycle, rank))
        return 0

    try:
        network = build_network(scenario, build)
        _analyse(args, scenario, network, cycle, rank)
    except OSError as exc:
        print(f"emnet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"emnet: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
