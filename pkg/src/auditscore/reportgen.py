"""Synthetic report writers for the six scanner formats.

These are inverses of the parsers for the metrics we extract: feeding a
generated report through its parser reproduces the source record. Used by
the test suite's round-trip properties and by scripts/make_sample_reports.py
for demo data.

One caveat: the scan-XML parser re-derives the firewall flag from the
filtered-port count, so a record whose flag disagrees with that heuristic
round-trips only when the parser is given the matching override.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from typing import Mapping

from .model import (
    AideReport,
    LynisReport,
    ScapReport,
    TripwireReport,
    VulnFinding,
    VulnReport,
)

_CVE_SHAPE = re.compile(r"CVE-\d{4}-\d{4,}$")

_XCCDF_NS = "http://checklists.nist.gov/xccdf/1.2"

# Deterministic port numbers for generated hosts: well-known services
# first, then a high range.
_PORT_SEQUENCE = (22, 80, 443, 8080, 3306, 5432, 8443, 25, 110, 143)


def assigned_port_ids(count: int) -> tuple[int, ...]:
    """The port numbers a generated scan assigns to ``count`` open ports."""
    ports = list(_PORT_SEQUENCE[:count])
    ports.extend(range(20000, 20000 + count - len(ports)))
    return tuple(ports[:count])


def render_lynis(report: LynisReport, hostname: str = "demo-host") -> str:
    return "\n".join(
        [
            "# Lynis report data",
            "report_version_major=1",
            "report_version_minor=0",
            f"hostname={hostname}",
            "os=Linux",
            "os_fullname=Ubuntu 22.04",
            "tests_executed=258",
            f"hardening_index={report.hardening_index}",
            "plugins_enabled=0",
            "",
        ]
    )


def render_xccdf(report: ScapReport, excluded: Mapping[str, int] | None = None) -> str:
    """An XCCDF TestResult whose rule results reproduce the given counts.

    ``excluded`` adds rule results outside the pass/fail buckets (e.g.
    ``{"notapplicable": 3}``) that a parser must not count.
    """
    root = ET.Element(f"{{{_XCCDF_NS}}}TestResult")
    root.set("id", f"xccdf_org.open-scap_testresult_{report.profile.value}")
    target = ET.SubElement(root, f"{{{_XCCDF_NS}}}target")
    target.text = "demo-host"
    sequence: list[str] = ["pass"] * report.pass_count + ["fail"] * report.fail_count
    for result_value, count in sorted((excluded or {}).items()):
        sequence.extend([result_value] * count)
    for index, result_value in enumerate(sequence, start=1):
        rule = ET.SubElement(root, f"{{{_XCCDF_NS}}}rule-result")
        rule.set("idref", f"xccdf_org.ssgproject.content_rule_generated_{index:04d}")
        result = ET.SubElement(rule, f"{{{_XCCDF_NS}}}result")
        result.text = result_value
    ET.register_namespace("", _XCCDF_NS)
    return ET.tostring(root, encoding="unicode")


def render_aide(report: AideReport) -> str:
    if report.total_changes == 0:
        return (
            "Start timestamp: 2025-10-02 14:20:33 +0000 (AIDE 0.17.4)\n"
            "AIDE found NO differences between database and filesystem. Looks okay!!\n"
        )
    return (
        "Start timestamp: 2025-10-02 14:20:33 +0000 (AIDE 0.17.4)\n"
        "AIDE found differences between database and filesystem!!\n"
        "\n"
        "Summary:\n"
        f"  Total number of entries:\t171742\n"
        f"  Added entries:\t\t{report.added}\n"
        f"  Removed entries:\t\t{report.removed}\n"
        f"  Changed entries:\t\t{report.changed}\n"
    )


def render_tripwire(report: TripwireReport) -> str:
    # Totals are rendered with thousands separators, as real reports are.
    return (
        "Open Source Tripwire(R) 2.4.3.7 Integrity Check Report\n"
        "\n"
        "Report generated by:          root\n"
        "Host name:                    demo-host\n"
        "\n"
        "===============================================================================\n"
        "Report Summary:\n"
        "===============================================================================\n"
        "\n"
        f"Total objects scanned:  {report.objects_scanned:,}\n"
        f"Total violations found:  {report.violations:,}\n"
    )


def _finding_output(finding: VulnFinding) -> str:
    lines: list[str] = [""]
    if finding.description:
        lines.append(f"  {finding.description}")
    if finding.confirmed:
        lines.append("    State: VULNERABLE")
    if _CVE_SHAPE.match(finding.identifier):
        if finding.cvss is not None:
            lines.append(
                f"    {finding.identifier}\t{finding.cvss}\t"
                f"https://vulners.com/cve/{finding.identifier}"
            )
        else:
            lines.append(f"    IDs:  CVE:{finding.identifier}")
    elif finding.cvss is not None:
        lines.append(f"    CVSS: {finding.cvss}")
    if finding.cvss is None:
        lines.append(f"    Risk factor: {finding.severity.value.capitalize()}")
    lines.append("")
    return "\n".join(lines)


def _script_element(finding: VulnFinding) -> ET.Element:
    script = ET.Element("script")
    if _CVE_SHAPE.match(finding.identifier):
        script.set("id", "vulners")
    else:
        script.set("id", finding.identifier)
    script.set("output", _finding_output(finding))
    return script


def render_nmap(report: VulnReport, address: str = "10.0.0.1") -> str:
    """A scan document whose ports and script findings reproduce ``report``.

    Findings with a port must reference one of the open-port numbers from
    :func:`assigned_port_ids`; port-less findings become host scripts.
    Findings must carry either a CVE-shaped identifier or the confirmed
    flag, otherwise the parser would not recognize them as findings.
    """
    port_ids = assigned_port_ids(report.open_ports)
    for finding in report.findings:
        if finding.port is not None and finding.port not in port_ids:
            raise ValueError(
                f"finding {finding.identifier} references port {finding.port}, "
                f"which is not among the generated open ports {port_ids}"
            )
        if not finding.confirmed and not _CVE_SHAPE.match(finding.identifier):
            raise ValueError(
                f"finding {finding.identifier} is neither confirmed nor CVE-shaped; "
                "the parser would not extract it"
            )

    root = ET.Element("nmaprun")
    root.set("scanner", "nmap")
    root.set("version", "7.80")
    root.set("args", f"nmap -sV --script vuln -oX - {address}")
    host = ET.SubElement(root, "host")
    status = ET.SubElement(host, "status")
    status.set("state", "up")
    addr = ET.SubElement(host, "address")
    addr.set("addr", address)
    addr.set("addrtype", "ipv4")
    ports_el = ET.SubElement(host, "ports")
    if report.filtered_ports > 0:
        extra = ET.SubElement(ports_el, "extraports")
        extra.set("state", "filtered")
        extra.set("count", str(report.filtered_ports))
    for port_id in port_ids:
        port_el = ET.SubElement(ports_el, "port")
        port_el.set("protocol", "tcp")
        port_el.set("portid", str(port_id))
        state = ET.SubElement(port_el, "state")
        state.set("state", "open")
        for finding in report.findings:
            if finding.port == port_id:
                port_el.append(_script_element(finding))
    hostscripts = [f for f in report.findings if f.port is None]
    if hostscripts:
        hostscript_el = ET.SubElement(host, "hostscript")
        for finding in hostscripts:
            hostscript_el.append(_script_element(finding))
    return ET.tostring(root, encoding="unicode")
