"""Configuration loading: weight profiles, history path, scan commands.

Everything runs with zero configuration: the default weight profile is
embedded and the default scan commands cover stock installations of the
six tools. A YAML file (path via ``--config`` or the ``AUDITSCORE_CONFIG``
environment variable) overrides any subset; see docs/formats.md for the
schema.
"""

from __future__ import annotations

import os
import socket
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ValidationError
from .model import Severity, ToolKind, WeightProfile, validate_weights
from .runner import ToolInvocation

CONFIG_ENV_VAR = "AUDITSCORE_CONFIG"

DEFAULT_HISTORY_PATH = Path("auditscore-history.jsonl")
DEFAULT_OUTPUT_DIR = Path("scan-reports")
DEFAULT_TARGET = "127.0.0.1"
DEFAULT_DATASTREAM = "/usr/share/xml/scap/ssg/content/ssg-ubuntu2204-ds.xml"

DEFAULT_COMMANDS: Mapping[ToolKind, str] = {
    ToolKind.LYNIS: "lynis audit system --quiet --report-file {output}",
    ToolKind.OPENSCAP_STANDARD: (
        "oscap xccdf eval --profile xccdf_org.ssgproject.content_profile_standard "
        "--results {output} {datastream}"
    ),
    ToolKind.AIDE: "aide --check",
    ToolKind.TRIPWIRE: "tripwire --check",
    ToolKind.OPENSCAP_CIS: (
        "oscap xccdf eval --profile xccdf_org.ssgproject.content_profile_cis_level1_server "
        "--results {output} {datastream}"
    ),
    ToolKind.VULN_SCAN: "nmap -sV --script vuln -oX {output} {target}",
}

# File integrity checkers return a bitmask of change classes (1 added,
# 2 removed, 4 changed); the SCAP evaluator returns 2 when any rule
# fails; the system auditor may return 78 when it has warnings to show.
DEFAULT_EXIT_CODES: Mapping[ToolKind, frozenset[int]] = {
    ToolKind.LYNIS: frozenset({0, 78}),
    ToolKind.OPENSCAP_STANDARD: frozenset({0, 2}),
    ToolKind.AIDE: frozenset(range(8)),
    ToolKind.TRIPWIRE: frozenset(range(8)),
    ToolKind.OPENSCAP_CIS: frozenset({0, 2}),
    ToolKind.VULN_SCAN: frozenset({0}),
}

DEFAULT_OUTPUT_NAMES: Mapping[ToolKind, str] = {
    ToolKind.LYNIS: "lynis-report.dat",
    ToolKind.OPENSCAP_STANDARD: "openscap-standard.xml",
    ToolKind.AIDE: "aide-check.txt",
    ToolKind.TRIPWIRE: "tripwire-check.txt",
    ToolKind.OPENSCAP_CIS: "openscap-cis.xml",
    ToolKind.VULN_SCAN: "nmap-scan.xml",
}

DEFAULT_TIMEOUT = 3600.0

DEFAULT_INIT_COMMANDS: Mapping[ToolKind, str] = {
    ToolKind.AIDE: "aide --init",
    ToolKind.TRIPWIRE: "tripwire --init",
}


def _default_databases() -> dict[ToolKind, Path]:
    return {
        ToolKind.AIDE: Path("/var/lib/aide/aide.db"),
        ToolKind.TRIPWIRE: Path(f"/var/lib/tripwire/{socket.gethostname()}.twd"),
    }


@dataclass(frozen=True)
class ToolCommand:
    command: str
    timeout: float
    exit_codes: frozenset[int]
    output_name: str


@dataclass(frozen=True)
class RunnerSettings:
    output_dir: Path
    target: str
    datastream: str
    commands: Mapping[ToolKind, ToolCommand]
    init_commands: Mapping[ToolKind, str]
    databases: Mapping[ToolKind, Path]

    def invocation(self, tool: ToolKind) -> ToolInvocation:
        entry = self.commands[tool]
        return ToolInvocation(
            tool=tool,
            command_template=entry.command,
            output_path=self.output_dir / entry.output_name,
            timeout=entry.timeout,
            exit_code_policy=entry.exit_codes,
        )

    def substitutions(self) -> dict[str, str]:
        return {"target": self.target, "datastream": self.datastream}


@dataclass(frozen=True)
class AppConfig:
    weights: WeightProfile
    history_path: Path
    runner: RunnerSettings


def _default_commands() -> dict[ToolKind, ToolCommand]:
    return {
        tool: ToolCommand(
            command=DEFAULT_COMMANDS[tool],
            timeout=DEFAULT_TIMEOUT,
            exit_codes=DEFAULT_EXIT_CODES[tool],
            output_name=DEFAULT_OUTPUT_NAMES[tool],
        )
        for tool in ToolKind
    }


def default_config() -> AppConfig:
    return AppConfig(
        weights=WeightProfile(),
        history_path=DEFAULT_HISTORY_PATH,
        runner=RunnerSettings(
            output_dir=DEFAULT_OUTPUT_DIR,
            target=DEFAULT_TARGET,
            datastream=DEFAULT_DATASTREAM,
            commands=_default_commands(),
            init_commands=dict(DEFAULT_INIT_COMMANDS),
            databases=_default_databases(),
        ),
    )


def _require_mapping(value: Any, context: str) -> Mapping:
    if not isinstance(value, Mapping):
        raise ValidationError("CONFIG_INVALID", f"{context} must be a mapping")
    return value


def _reject_unknown(data: Mapping, allowed: set[str], context: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValidationError(
            "CONFIG_INVALID", f"{context}: unknown key(s) {', '.join(unknown)}"
        )


def _tool_by_name(name: str, context: str) -> ToolKind:
    try:
        return ToolKind(str(name).replace("-", "_"))
    except ValueError:
        raise ValidationError("CONFIG_INVALID", f"{context}: unknown tool {name!r}") from None


def weights_from_mapping(data: Mapping, context: str = "weights") -> WeightProfile:
    """Build a validated profile from a config mapping; defaults fill gaps."""
    _reject_unknown(
        data,
        {"tool_weights", "severity_weights", "port_penalty", "confirmed_penalty", "firewall_discount"},
        context,
    )
    tool_weights = dict(WeightProfile().tool_weights)
    for name, value in _require_mapping(data.get("tool_weights", {}), f"{context}.tool_weights").items():
        tool_weights[_tool_by_name(name, context)] = float(value)
    severity_weights = dict(WeightProfile().severity_weights)
    for name, value in _require_mapping(
        data.get("severity_weights", {}), f"{context}.severity_weights"
    ).items():
        try:
            severity = Severity(str(name).lower())
        except ValueError:
            raise ValidationError(
                "CONFIG_INVALID", f"{context}: unknown severity {name!r}"
            ) from None
        severity_weights[severity] = float(value)
    profile = WeightProfile(
        tool_weights=tool_weights,
        severity_weights=severity_weights,
        port_penalty=float(data.get("port_penalty", 3.0)),
        confirmed_penalty=float(data.get("confirmed_penalty", 10.0)),
        firewall_discount=float(data.get("firewall_discount", 10.0)),
    )
    return validate_weights(profile)


def load_weight_profile(path: Path | str) -> WeightProfile:
    """Load and validate a standalone weight profile file."""
    data = _load_yaml(Path(path))
    return weights_from_mapping(_require_mapping(data, str(path)), context=str(path))


def _load_yaml(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise ValidationError("CONFIG_INVALID", f"cannot read {path}: {exc}") from exc
    try:
        return yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ValidationError("CONFIG_INVALID", f"{path}: {exc}") from exc


def _runner_from_mapping(data: Mapping) -> RunnerSettings:
    _reject_unknown(data, {"output_dir", "target", "datastream", "tools", "init"}, "runner")
    commands = _default_commands()
    for name, entry in _require_mapping(data.get("tools", {}), "runner.tools").items():
        tool = _tool_by_name(name, "runner.tools")
        entry = _require_mapping(entry, f"runner.tools.{name}")
        _reject_unknown(entry, {"command", "timeout", "exit_codes", "output"}, f"runner.tools.{name}")
        base = commands[tool]
        commands[tool] = ToolCommand(
            command=str(entry.get("command", base.command)),
            timeout=float(entry.get("timeout", base.timeout)),
            exit_codes=frozenset(int(code) for code in entry.get("exit_codes", base.exit_codes)),
            output_name=str(entry.get("output", base.output_name)),
        )
    init_commands = dict(DEFAULT_INIT_COMMANDS)
    databases = _default_databases()
    for name, entry in _require_mapping(data.get("init", {}), "runner.init").items():
        tool = _tool_by_name(name, "runner.init")
        entry = _require_mapping(entry, f"runner.init.{name}")
        _reject_unknown(entry, {"command", "database"}, f"runner.init.{name}")
        if "command" in entry:
            init_commands[tool] = str(entry["command"])
        if "database" in entry:
            databases[tool] = Path(str(entry["database"]))
    return RunnerSettings(
        output_dir=Path(str(data.get("output_dir", DEFAULT_OUTPUT_DIR))),
        target=str(data.get("target", DEFAULT_TARGET)),
        datastream=str(data.get("datastream", DEFAULT_DATASTREAM)),
        commands=commands,
        init_commands=init_commands,
        databases=databases,
    )


def load_config(path: Path | str | None = None) -> AppConfig:
    """Load configuration from a file, the environment default, or defaults.

    Explicit ``path`` wins; otherwise the ``AUDITSCORE_CONFIG`` variable
    is consulted; with neither, the embedded defaults apply.
    """
    if path is None:
        env_path = os.environ.get(CONFIG_ENV_VAR, "").strip()
        if not env_path:
            return default_config()
        path = Path(env_path)
    data = _load_yaml(Path(path))
    data = _require_mapping(data, str(path))
    _reject_unknown(data, {"weights", "history", "runner"}, str(path))
    weights = weights_from_mapping(
        _require_mapping(data.get("weights", {}), "weights"), "weights"
    )
    runner = _runner_from_mapping(_require_mapping(data.get("runner", {}), "runner"))
    history = Path(str(data.get("history", DEFAULT_HISTORY_PATH)))
    return AppConfig(weights=weights, history_path=history, runner=runner)
