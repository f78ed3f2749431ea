"""Command-line frontend: parse, score, compare, history, report, run.

Batch operation only; the consumers are administrators and CI pipelines.
Exit codes are stable across subcommands: 0 success, 2 input or
validation error, 3 composite below a requested threshold.

Machine-readable output (``--json``) for ``score`` is a single history
record line, so ``auditscore score --json >> history.jsonl`` produces a
file the ``history``/``compare``/``report`` subcommands can read back.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import yaml

from . import __version__
from .analysis import decompose_delta, rank_contributions, trend_series
from .config import CONFIG_ENV_VAR, AppConfig, load_config, load_weight_profile
from .errors import AuditError, ParseError, ValidationError
from .model import (
    CompositeAssessment,
    NormalizedScore,
    RawToolReport,
    ScapProfile,
    ToolKind,
    WeightProfile,
    raw_report_to_dict,
)
from .parsers import (
    ParseDiagnostics,
    parse_aide,
    parse_lynis,
    parse_nmap,
    parse_tripwire,
    parse_xccdf,
)
from .render import (
    format_assessment_text,
    format_compare_text,
    format_parse_text,
    compare_to_dict,
    render_report_json,
    render_report_markdown,
    render_report_text,
)
from .runner import ToolInvocation, init_integrity_database, orchestrate_scan
from .scoring import aggregate, normalize_report
from .store import HistoryRecord, append_record, load_history, record_to_json

_CLI_TOOL_NAMES = {tool.value.replace("_", "-"): tool for tool in ToolKind}


def _read_text(path: Path) -> str:
    return path.read_text(encoding="utf-8", errors="replace")


def _parse_report(
    tool: ToolKind, text: str, source: str, firewall_override: bool | None = None
) -> tuple[RawToolReport, ParseDiagnostics]:
    if tool is ToolKind.LYNIS:
        return parse_lynis(text, source)
    if tool is ToolKind.OPENSCAP_STANDARD:
        return parse_xccdf(text, ScapProfile.STANDARD, source)
    if tool is ToolKind.OPENSCAP_CIS:
        return parse_xccdf(text, ScapProfile.CIS, source)
    if tool is ToolKind.AIDE:
        return parse_aide(text, source)
    if tool is ToolKind.TRIPWIRE:
        return parse_tripwire(text, source)
    return parse_nmap(text, source, firewall_override)


def _emit_diagnostics(diagnostics: ParseDiagnostics, verbose: bool) -> None:
    for warning in diagnostics.warnings:
        print(f"warning: {diagnostics.source_path}: {warning}", file=sys.stderr)
    if verbose:
        for note in diagnostics.trace:
            print(f"debug: {diagnostics.source_path}: {note}", file=sys.stderr)


def _profile_for(args: argparse.Namespace, config: AppConfig) -> WeightProfile:
    if getattr(args, "weights", None):
        return load_weight_profile(args.weights)
    return config.weights


# ---------------------------------------------------------------------------
# Manifest: maps each tool to a report file or a literal score
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    path: Path | None = None
    score: float | None = None
    firewall: bool | None = None


@dataclass(frozen=True)
class Manifest:
    label: str | None
    host: str | None
    entries: Mapping[ToolKind, ManifestEntry]


def load_manifest(path: Path) -> Manifest:
    """Load a score manifest; report paths are relative to the manifest."""
    try:
        data = yaml.safe_load(_read_text(path)) or {}
    except yaml.YAMLError as exc:
        raise ValidationError("MANIFEST_INVALID", f"{path}: {exc}") from exc
    except OSError as exc:
        raise ValidationError("MANIFEST_INVALID", f"cannot read {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ValidationError("MANIFEST_INVALID", f"{path}: manifest must be a mapping")
    unknown = sorted(set(data) - {"label", "host", "reports"})
    if unknown:
        raise ValidationError(
            "MANIFEST_INVALID", f"{path}: unknown key(s) {', '.join(unknown)}"
        )
    reports = data.get("reports", {})
    if not isinstance(reports, Mapping):
        raise ValidationError("MANIFEST_INVALID", f"{path}: 'reports' must be a mapping")
    base = path.parent
    entries: dict[ToolKind, ManifestEntry] = {}
    for name, value in reports.items():
        try:
            tool = ToolKind(str(name).replace("-", "_"))
        except ValueError:
            raise ValidationError(
                "MANIFEST_INVALID", f"{path}: unknown tool {name!r}"
            ) from None
        if isinstance(value, str):
            entries[tool] = ManifestEntry(path=base / value)
        elif isinstance(value, Mapping):
            extra = sorted(set(value) - {"path", "score", "firewall"})
            if extra:
                raise ValidationError(
                    "MANIFEST_INVALID", f"{path}: {name}: unknown key(s) {', '.join(extra)}"
                )
            has_path = "path" in value
            has_score = "score" in value
            if has_path == has_score:
                raise ValidationError(
                    "MANIFEST_INVALID",
                    f"{path}: {name}: exactly one of 'path' or 'score' is required",
                )
            entries[tool] = ManifestEntry(
                path=base / str(value["path"]) if has_path else None,
                score=float(value["score"]) if has_score else None,
                firewall=value.get("firewall"),
            )
        else:
            raise ValidationError(
                "MANIFEST_INVALID",
                f"{path}: {name}: entry must be a path string or a mapping",
            )
    label = data.get("label")
    host = data.get("host")
    return Manifest(
        label=str(label) if label is not None else None,
        host=str(host) if host is not None else None,
        entries=entries,
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_parse(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    profile = _profile_for(args, config)
    tool = _CLI_TOOL_NAMES[args.tool]
    override = {"auto": None, "active": True, "inactive": False}[args.firewall]
    text = _read_text(args.file)
    report, diagnostics = _parse_report(tool, text, str(args.file), override)
    score = normalize_report(report, profile)
    _emit_diagnostics(diagnostics, args.verbose)
    if args.json:
        print(
            json.dumps(
                {
                    "tool": score.tool.value,
                    "source": str(args.file),
                    "raw": raw_report_to_dict(report),
                    "score": score.value,
                    "warnings": list(diagnostics.warnings),
                },
                indent=2,
            )
        )
    else:
        print(format_parse_text(score.tool, str(args.file), report, score.value))
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    profile = _profile_for(args, config)
    manifest = load_manifest(args.manifest)
    label = args.label or manifest.label or "assessment"
    host = args.host or manifest.host or socket.gethostname()
    scores: dict[ToolKind, NormalizedScore] = {}
    for tool, entry in manifest.entries.items():
        if entry.score is not None:
            scores[tool] = NormalizedScore(tool, entry.score, None)
            continue
        assert entry.path is not None
        text = _read_text(entry.path)
        report, diagnostics = _parse_report(tool, text, str(entry.path), entry.firewall)
        _emit_diagnostics(diagnostics, args.verbose)
        scores[tool] = normalize_report(report, profile)
    assessment = aggregate(scores, profile, label)
    record = HistoryRecord(assessment=assessment, host_label=host)
    if args.json:
        print(record_to_json(record))
    else:
        print(format_assessment_text(assessment, host))
    if args.save or args.history:
        history_path = args.history or config.history_path
        append_record(history_path, record)
        if not args.json:
            print(f"appended to {history_path}")
    if args.min_score is not None and assessment.composite < args.min_score:
        print(
            f"composite {assessment.composite:.2f} below required minimum "
            f"{args.min_score:.2f}",
            file=sys.stderr,
        )
        return 3
    return 0


def _resolve_assessment(reference: str, history_path: Path) -> CompositeAssessment:
    """Resolve a stored label or a record-file path to an assessment."""
    as_path = Path(reference)
    if as_path.is_file():
        loaded = load_history(as_path)
        if not loaded.records:
            raise ValidationError(
                "UNKNOWN_LABEL", f"{reference}: file contains no parseable records"
            )
        return loaded.records[-1].assessment
    loaded = load_history(history_path)
    for record in reversed(loaded.records):
        if record.assessment.label == reference:
            return record.assessment
    raise ValidationError(
        "UNKNOWN_LABEL", f"no assessment labeled {reference!r} in {history_path}"
    )


def cmd_compare(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    history_path = args.history or config.history_path
    from_assessment = _resolve_assessment(args.from_ref, history_path)
    to_assessment = _resolve_assessment(args.to_ref, history_path)
    decomposition = decompose_delta(from_assessment, to_assessment)
    ranked = rank_contributions(decomposition)
    if args.json:
        print(json.dumps(compare_to_dict(decomposition, ranked), indent=2))
    else:
        print(format_compare_text(decomposition, ranked))
    return 0


def cmd_history(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    history_path = args.history or config.history_path
    loaded = load_history(history_path, host_filter=args.host)
    if loaded.skipped:
        print(f"warning: skipped {loaded.skipped} corrupt line(s)", file=sys.stderr)
    if args.json:
        for record in loaded.records:
            print(record_to_json(record))
    else:
        for record in loaded.records:
            assessment = record.assessment
            print(
                f"{assessment.label:<16} {assessment.timestamp.isoformat()} "
                f"composite={assessment.composite:.2f} host={record.host_label}"
            )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    history_path = args.history or config.history_path
    loaded = load_history(history_path)
    by_label: dict[str, HistoryRecord] = {}
    for record in loaded.records:
        by_label[record.assessment.label] = record
    records: list[HistoryRecord] = []
    for label in args.labels:
        if label not in by_label:
            raise ValidationError(
                "UNKNOWN_LABEL", f"no assessment labeled {label!r} in {history_path}"
            )
        records.append(by_label[label])
    assessments = [record.assessment for record in records]
    trends = trend_series(assessments) if len(assessments) >= 2 else None
    decomposition = (
        decompose_delta(assessments[0], assessments[-1]) if len(assessments) >= 2 else None
    )
    ranked = rank_contributions(decomposition) if decomposition is not None else None
    if args.format == "json":
        print(render_report_json(records, trends, decomposition, ranked))
    elif args.format == "text":
        print(render_report_text(records, trends, decomposition, ranked, args.timestamps))
    else:
        print(render_report_markdown(records, trends, decomposition, ranked, args.timestamps))
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    settings = config.runner
    tools = [_CLI_TOOL_NAMES[name] for name in args.tools] if args.tools else list(ToolKind)
    invocations = [settings.invocation(tool) for tool in tools]
    outcome = orchestrate_scan(
        invocations, parallel=args.parallel, substitutions=settings.substitutions()
    )
    for tool in ToolKind:
        if tool in outcome.reports:
            print(f"{tool.value}: {outcome.reports[tool]}")
        elif tool in outcome.failures:
            error = outcome.failures[tool]
            print(f"{tool.value}: FAILED [{error.code}] {error}", file=sys.stderr)
    return 2 if outcome.failures else 0


def cmd_init_integrity_db(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    settings = config.runner
    tool = _CLI_TOOL_NAMES[args.tool]
    if tool not in settings.init_commands:
        raise ValidationError(
            "CONFIG_INVALID", f"no init command configured for {tool.value}"
        )
    invocation = ToolInvocation(
        tool=tool,
        command_template=settings.init_commands[tool],
        output_path=settings.output_dir / f"{tool.value}-init.log",
        timeout=settings.commands[tool].timeout,
        exit_code_policy=frozenset({0}),
    )
    result = init_integrity_database(
        invocation,
        settings.databases[tool],
        force=args.force,
        substitutions=settings.substitutions(),
    )
    print(f"{tool.value}: initialized (log: {result.report_path})")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing and entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auditscore",
        description=(
            "Parse security tool reports, normalize them to 0-100 scores, and "
            "aggregate a weighted composite."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=Path,
        default=None,
        help=f"configuration file (default: ${CONFIG_ENV_VAR} if set)",
    )
    common.add_argument(
        "--weights", type=Path, default=None, help="weight profile file overriding the config"
    )
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument(
        "--verbose", action="store_true", help="print parser trace diagnostics to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "parse", parents=[common], help="parse one report file and print its normalized score"
    )
    p.add_argument("--tool", required=True, choices=sorted(_CLI_TOOL_NAMES))
    p.add_argument(
        "--firewall",
        choices=["auto", "active", "inactive"],
        default="auto",
        help="override firewall detection for vuln-scan reports",
    )
    p.add_argument("file", type=Path)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser(
        "score",
        parents=[common],
        help="parse a manifest of six reports, aggregate, and print the composite",
    )
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--label", default=None, help="assessment label (overrides manifest)")
    p.add_argument("--host", default=None, help="host label for history records")
    p.add_argument(
        "--min-score",
        type=float,
        default=None,
        help="exit with status 3 when the composite is below this threshold",
    )
    p.add_argument("--save", action="store_true", help="append the assessment to history")
    p.add_argument(
        "--history", type=Path, default=None, help="history file (implies --save here)"
    )
    p.set_defaults(func=cmd_score)

    p = sub.add_parser(
        "compare", parents=[common], help="decompose the composite delta between two assessments"
    )
    p.add_argument("from_ref", metavar="FROM", help="stored label or record file")
    p.add_argument("to_ref", metavar="TO", help="stored label or record file")
    p.add_argument("--history", type=Path, default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("history", parents=[common], help="list stored assessments")
    p.add_argument("--history", type=Path, default=None)
    p.add_argument("--host", default=None, help="only records for this host label")
    p.set_defaults(func=cmd_history)

    p = sub.add_parser(
        "report", parents=[common], help="render a score table with trends and change drivers"
    )
    p.add_argument("labels", nargs="+", metavar="LABEL")
    p.add_argument("--history", type=Path, default=None)
    p.add_argument("--format", choices=["markdown", "json", "text"], default="markdown")
    p.add_argument(
        "--timestamps", action="store_true", help="include record timestamps in the body"
    )
    p.set_defaults(func=cmd_report)

    p = sub.add_parser(
        "run", parents=[common], help="invoke the configured scan tools and capture reports"
    )
    p.add_argument(
        "--tools",
        nargs="+",
        choices=sorted(_CLI_TOOL_NAMES),
        default=None,
        help="subset of tools to run (default: all six)",
    )
    p.add_argument("--parallel", action="store_true", help="run tools concurrently")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser(
        "init-integrity-db",
        parents=[common],
        help="initialize a file integrity baseline database (refuses to clobber one)",
    )
    p.add_argument("--tool", required=True, choices=["aide", "tripwire"])
    p.add_argument("--force", action="store_true", help="reinitialize even if a database exists")
    p.set_defaults(func=cmd_init_integrity_db)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error[{exc.code}] {exc.location()}: {exc}", file=sys.stderr)
        return 2
    except AuditError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[IO_FAILURE]: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
