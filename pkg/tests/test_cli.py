import json
import stat

import pytest
import yaml

from auditscore.cli import load_manifest, main
from auditscore.errors import ValidationError
from auditscore.model import ToolKind
from auditscore.store import load_history


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------


def test_parse_aide_full_prints_total_and_score(capsys, data_dir):
    code, out, _ = run_cli(capsys, "parse", "--tool", "aide", str(data_dir / "aide-full.txt"))
    assert code == 0
    assert "total_changes: 317" in out
    assert "score: 74.99" in out


def test_parse_lynis_key_missing_exits_2(capsys, tmp_path):
    bad = tmp_path / "missing.dat"
    bad.write_text("os=Linux\n")
    code, _, err = run_cli(capsys, "parse", "--tool", "lynis", str(bad))
    assert code == 2
    assert "KEY_MISSING" in err


def test_parse_unreadable_file_exits_2(capsys, tmp_path):
    code, _, err = run_cli(capsys, "parse", "--tool", "lynis", str(tmp_path / "absent.dat"))
    assert code == 2
    assert "IO_FAILURE" in err


def test_parse_tripwire_json_output(capsys, data_dir):
    code, out, _ = run_cli(
        capsys, "parse", "--tool", "tripwire", str(data_dir / "tripwire-baseline.txt"), "--json"
    )
    assert code == 0
    document = json.loads(out)
    assert document["raw"] == {
        "kind": "tripwire",
        "objects_scanned": 76472,
        "violations": 13459,
    }
    assert document["score"] == pytest.approx(82.40, abs=0.005)


def test_parse_vuln_scan_firewall_override(capsys, data_dir):
    code, out, _ = run_cli(
        capsys,
        "parse",
        "--tool",
        "vuln-scan",
        str(data_dir / "nmap-partial.xml"),
        "--firewall",
        "inactive",
    )
    assert code == 0
    assert "firewall_active: no" in out


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------


def test_score_baseline_manifest_reproduces_composite(capsys, data_dir):
    code, out, _ = run_cli(
        capsys, "score", "--manifest", str(data_dir / "manifest-baseline.yaml")
    )
    assert code == 0
    assert "composite: 58.34" in out
    assert "label: baseline" in out


def test_score_json_is_a_loadable_history_record(capsys, data_dir, tmp_path):
    code, out, _ = run_cli(
        capsys, "score", "--manifest", str(data_dir / "manifest-baseline.yaml"), "--json"
    )
    assert code == 0
    saved = tmp_path / "one-record.jsonl"
    saved.write_text(out)
    loaded = load_history(saved)
    assert loaded.skipped == 0
    assert loaded.records[0].assessment.composite == pytest.approx(58.34, abs=0.01)
    assert loaded.records[0].host_label == "fabric-node-baseline"


def test_score_min_score_gate_fails_with_exit_3(capsys, data_dir):
    code, out, err = run_cli(
        capsys,
        "score",
        "--manifest",
        str(data_dir / "manifest-baseline.yaml"),
        "--min-score",
        "60",
    )
    assert code == 3
    assert "below required minimum" in err


def test_score_min_score_gate_passes(capsys, data_dir):
    code, _, _ = run_cli(
        capsys,
        "score",
        "--manifest",
        str(data_dir / "manifest-baseline.yaml"),
        "--min-score",
        "50",
    )
    assert code == 0


def test_score_missing_tool_exits_2_naming_it(capsys, tmp_path, data_dir):
    manifest = {
        "label": "incomplete",
        "reports": {
            "lynis": str(data_dir / "lynis-baseline.dat"),
            "openscap_standard": {"score": 67.4},
            "aide": {"score": 83.4},
            "tripwire": {"score": 82.4},
            "openscap_cis": {"score": 57.8},
        },
    }
    path = tmp_path / "manifest.yaml"
    path.write_text(yaml.safe_dump(manifest))
    code, _, err = run_cli(capsys, "score", "--manifest", str(path))
    assert code == 2
    assert "TOOL_MISSING" in err
    assert "vuln_scan" in err


def test_score_saves_history(capsys, data_dir, tmp_path):
    history = tmp_path / "history.jsonl"
    code, _, _ = run_cli(
        capsys,
        "score",
        "--manifest",
        str(data_dir / "manifest-baseline.yaml"),
        "--history",
        str(history),
    )
    assert code == 0
    assert len(load_history(history).records) == 1


def test_score_rejects_out_of_range_literal(capsys, tmp_path):
    manifest = tmp_path / "manifest.yaml"
    manifest.write_text(
        "reports:\n"
        "  lynis: {score: 150}\n"
        + "".join(
            f"  {name}: {{score: 50}}\n"
            for name in ("openscap_standard", "aide", "tripwire", "openscap_cis", "vuln_scan")
        )
    )
    code, _, err = run_cli(capsys, "score", "--manifest", str(manifest))
    assert code == 2
    assert "VALUE_OUT_OF_RANGE" in err


def test_manifest_rejects_entry_with_both_path_and_score(tmp_path):
    path = tmp_path / "manifest.yaml"
    path.write_text("reports:\n  lynis: {path: x.dat, score: 10}\n")
    with pytest.raises(ValidationError) as excinfo:
        load_manifest(path)
    assert excinfo.value.code == "MANIFEST_INVALID"


def test_manifest_rejects_unknown_tool(tmp_path):
    path = tmp_path / "manifest.yaml"
    path.write_text("reports:\n  nessus: scan.xml\n")
    with pytest.raises(ValidationError) as excinfo:
        load_manifest(path)
    assert "nessus" in str(excinfo.value)


def test_manifest_paths_resolve_relative_to_manifest(tmp_path, data_dir):
    nested = tmp_path / "nested"
    nested.mkdir()
    (nested / "lynis.dat").write_text("hardening_index=59\n")
    path = nested / "manifest.yaml"
    path.write_text("reports:\n  lynis: lynis.dat\n")
    manifest = load_manifest(path)
    assert manifest.entries[ToolKind.LYNIS].path == nested / "lynis.dat"


# ---------------------------------------------------------------------------
# history / compare / report against a populated store
# ---------------------------------------------------------------------------


@pytest.fixture
def populated_history(capsys, data_dir, tmp_path):
    history = tmp_path / "history.jsonl"
    for name in ("manifest-baseline-literal.yaml", "manifest-partial.yaml", "manifest-full.yaml"):
        code = main(
            ["score", "--manifest", str(data_dir / name), "--history", str(history)]
        )
        assert code == 0
    capsys.readouterr()
    return history


def test_history_lists_records_in_order(capsys, populated_history):
    code, out, _ = run_cli(capsys, "history", "--history", str(populated_history))
    assert code == 0
    labels = [line.split()[0] for line in out.strip().splitlines()]
    assert labels == ["baseline", "partial", "full"]
    assert "composite=58.34" in out
    assert "composite=64.80" in out
    assert "composite=68.17" in out


def test_history_json_lines_round_trip(capsys, populated_history, tmp_path):
    code, out, _ = run_cli(capsys, "history", "--history", str(populated_history), "--json")
    assert code == 0
    rewritten = tmp_path / "rewritten.jsonl"
    rewritten.write_text(out)
    loaded = load_history(rewritten)
    assert loaded.skipped == 0
    assert [r.assessment.label for r in loaded.records] == ["baseline", "partial", "full"]


def test_history_host_filter(capsys, populated_history):
    code, out, _ = run_cli(
        capsys, "history", "--history", str(populated_history), "--host", "fabric-node-full"
    )
    assert code == 0
    assert out.strip().splitlines()[0].startswith("full")
    assert len(out.strip().splitlines()) == 1


def test_compare_baseline_to_full(capsys, populated_history):
    code, out, _ = run_cli(
        capsys, "compare", "baseline", "full", "--history", str(populated_history)
    )
    assert code == 0
    assert "dominant: vuln_scan +7.05 (71.7%)" in out
    assert "total delta: +9.83" in out


def test_compare_identical_assessments(capsys, populated_history):
    code, out, _ = run_cli(
        capsys, "compare", "baseline", "baseline", "--history", str(populated_history)
    )
    assert code == 0
    assert "total delta: +0.00" in out
    assert "dominant: none" in out


def test_compare_unknown_label_exits_2(capsys, populated_history):
    code, _, err = run_cli(
        capsys, "compare", "baseline", "ultimate", "--history", str(populated_history)
    )
    assert code == 2
    assert "UNKNOWN_LABEL" in err


def test_compare_accepts_record_files(capsys, data_dir, tmp_path):
    for label, manifest in (("a", "manifest-baseline-literal.yaml"), ("b", "manifest-full.yaml")):
        code = main(
            [
                "score",
                "--manifest",
                str(data_dir / manifest),
                "--json",
                "--label",
                label,
            ]
        )
        assert code == 0
        (tmp_path / f"{label}.json").write_text(capsys.readouterr().out)
    code, out, _ = run_cli(
        capsys, "compare", str(tmp_path / "a.json"), str(tmp_path / "b.json")
    )
    assert code == 0
    assert "+9.83" in out


def test_compare_mismatched_weights_exits_2(capsys, data_dir, tmp_path):
    history = tmp_path / "history.jsonl"
    weights = tmp_path / "uniform.yaml"
    weights.write_text(
        "tool_weights:\n"
        + "".join(f"  {tool.value}: 0.16666666666666666\n" for tool in ToolKind)
    )
    assert (
        main(
            [
                "score",
                "--manifest",
                str(data_dir / "manifest-baseline-literal.yaml"),
                "--history",
                str(history),
            ]
        )
        == 0
    )
    assert (
        main(
            [
                "score",
                "--manifest",
                str(data_dir / "manifest-full.yaml"),
                "--history",
                str(history),
                "--weights",
                str(weights),
            ]
        )
        == 0
    )
    capsys.readouterr()
    code, _, err = run_cli(
        capsys, "compare", "baseline", "full", "--history", str(history)
    )
    assert code == 2
    assert "WEIGHT_MISMATCH" in err


def test_report_markdown_three_levels(capsys, populated_history):
    code, out, _ = run_cli(
        capsys,
        "report",
        "baseline",
        "partial",
        "full",
        "--history",
        str(populated_history),
    )
    assert code == 0
    assert "+16.8%" in out  # composite change
    assert "| Lynis | 59.00 | 61.00 | 66.00 | +11.9% |" in out
    assert "-8.4 pts" in out  # integrity change shown in points
    assert "| AIDE | down |" in out
    assert "| Lynis | up |" in out
    assert "Vulnerability" in out


def test_report_markdown_matches_golden_file(capsys, data_dir, populated_history):
    code, out, _ = run_cli(
        capsys,
        "report",
        "baseline",
        "partial",
        "full",
        "--history",
        str(populated_history),
    )
    assert code == 0
    assert out == (data_dir / "expected-report-three-levels.md").read_text()


def test_report_is_deterministic_and_timestamp_free(capsys, populated_history):
    code, first, _ = run_cli(
        capsys, "report", "baseline", "full", "--history", str(populated_history)
    )
    assert code == 0
    code, second, _ = run_cli(
        capsys, "report", "baseline", "full", "--history", str(populated_history)
    )
    assert first == second
    assert "T" not in first.split("## Scores")[0].replace("Tool", "")  # no ISO timestamps


def test_report_with_timestamps_flag(capsys, populated_history):
    code, out, _ = run_cli(
        capsys,
        "report",
        "baseline",
        "--history",
        str(populated_history),
        "--timestamps",
    )
    assert code == 0
    assert "baseline:" in out


def test_report_single_assessment_json(capsys, populated_history):
    code, out, _ = run_cli(
        capsys,
        "report",
        "partial",
        "--history",
        str(populated_history),
        "--format",
        "json",
    )
    assert code == 0
    document = json.loads(out)
    assert document["labels"] == ["partial"]
    assert document["trends"] is None
    assert document["decomposition"] is None
    assert document["records"][0]["assessment"]["composite"] == pytest.approx(64.80, abs=0.01)


def test_report_json_three_levels_has_trends(capsys, populated_history):
    code, out, _ = run_cli(
        capsys,
        "report",
        "baseline",
        "partial",
        "full",
        "--history",
        str(populated_history),
        "--format",
        "json",
    )
    document = json.loads(out)
    assert document["trends"]["directions"]["aide"] == "down"
    assert document["decomposition"]["dominant_tool"] == "vuln_scan"


def test_report_unknown_label_exits_2(capsys, populated_history):
    code, _, err = run_cli(
        capsys, "report", "mystery", "--history", str(populated_history)
    )
    assert code == 2
    assert "UNKNOWN_LABEL" in err


def test_report_text_format(capsys, populated_history):
    code, out, _ = run_cli(
        capsys,
        "report",
        "baseline",
        "full",
        "--history",
        str(populated_history),
        "--format",
        "text",
    )
    assert code == 0
    assert "Composite" in out
    assert "dominant: vuln_scan" in out


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def test_config_env_var_supplies_history_path(capsys, data_dir, tmp_path, monkeypatch):
    history = tmp_path / "via-config.jsonl"
    config = tmp_path / "config.yaml"
    config.write_text(f"history: {history}\n")
    monkeypatch.setenv("AUDITSCORE_CONFIG", str(config))
    code, _, _ = run_cli(
        capsys,
        "score",
        "--manifest",
        str(data_dir / "manifest-baseline-literal.yaml"),
        "--save",
    )
    assert code == 0
    assert len(load_history(history).records) == 1


def test_invalid_config_exits_2(capsys, data_dir, tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text("weights:\n  tool_weights:\n    lynis: 0.9\n")
    code, _, err = run_cli(
        capsys,
        "score",
        "--config",
        str(config),
        "--manifest",
        str(data_dir / "manifest-baseline-literal.yaml"),
    )
    assert code == 2
    assert "WEIGHT_SUM_INVALID" in err


def test_weights_flag_overrides_default(capsys, data_dir, tmp_path):
    weights = tmp_path / "weights.yaml"
    weights.write_text(
        "tool_weights:\n"
        + "".join(f"  {tool.value}: 0.16666666666666666\n" for tool in ToolKind)
    )
    code, out, _ = run_cli(
        capsys,
        "score",
        "--manifest",
        str(data_dir / "manifest-baseline-literal.yaml"),
        "--weights",
        str(weights),
    )
    assert code == 0
    # uniform weights: (59 + 67.4 + 83.4 + 82.4 + 57.8 + 0) / 6 = 58.33
    assert "composite: 58.33" in out


# ---------------------------------------------------------------------------
# run / init-integrity-db (driven through config with fake tools)
# ---------------------------------------------------------------------------


def _fake_tool(tmp_path, name, body):
    path = tmp_path / name
    path.write_text("#!/bin/sh\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return path


def test_run_subset_with_fake_tools(capsys, tmp_path):
    lynis = _fake_tool(tmp_path, "fake-lynis", 'echo "hardening_index=61" > "$1"\n')
    config = tmp_path / "config.yaml"
    config.write_text(
        f"runner:\n"
        f"  output_dir: {tmp_path / 'reports'}\n"
        f"  tools:\n"
        f"    lynis:\n"
        f"      command: '{lynis} {{output}}'\n"
    )
    code, out, _ = run_cli(
        capsys, "run", "--config", str(config), "--tools", "lynis"
    )
    assert code == 0
    assert "lynis:" in out
    assert (tmp_path / "reports" / "lynis-report.dat").read_text().strip() == "hardening_index=61"


def test_run_reports_partial_failure_with_exit_2(capsys, tmp_path):
    lynis = _fake_tool(tmp_path, "fake-lynis", 'echo "hardening_index=61" > "$1"\n')
    config = tmp_path / "config.yaml"
    config.write_text(
        f"runner:\n"
        f"  output_dir: {tmp_path / 'reports'}\n"
        f"  tools:\n"
        f"    lynis:\n"
        f"      command: '{lynis} {{output}}'\n"
        f"    aide:\n"
        f"      command: 'no-such-binary-qqq --check'\n"
    )
    code, out, err = run_cli(
        capsys, "run", "--config", str(config), "--tools", "lynis", "aide"
    )
    assert code == 2
    assert "lynis:" in out
    assert "TOOL_NOT_FOUND" in err


def test_init_integrity_db_refuses_then_forces(capsys, tmp_path):
    database = tmp_path / "aide.db"
    database.write_text("baseline")
    init = _fake_tool(tmp_path, "fake-aide-init", 'echo "new baseline written"\n')
    config = tmp_path / "config.yaml"
    config.write_text(
        f"runner:\n"
        f"  output_dir: {tmp_path / 'reports'}\n"
        f"  init:\n"
        f"    aide:\n"
        f"      command: '{init}'\n"
        f"      database: {database}\n"
    )
    code, _, err = run_cli(
        capsys, "init-integrity-db", "--config", str(config), "--tool", "aide"
    )
    assert code == 2
    assert "DATABASE_EXISTS" in err
    code, out, _ = run_cli(
        capsys, "init-integrity-db", "--config", str(config), "--tool", "aide", "--force"
    )
    assert code == 0
    assert "initialized" in out
