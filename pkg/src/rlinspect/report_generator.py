"""Merges analyzer output into one self-contained HTML report.

The report data is embedded as a single JSON block
(``<script id="rlinspect-data" type="application/json">``) next to the
inlined viewer bundle, so the file opens offline. A no-script fallback
lists section titles, warnings, and flag annotations as plain text.
Given a fixed timestamp the output is byte-deterministic, which the
golden tests rely on.
"""
from __future__ import annotations

import html
import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from . import __version__
from .analyzer_core import PlotSpec, SectionRun

DATA_BLOCK_ID = "rlinspect-data"
SCHEMA_VERSION = 1

_CSS = """
body { font-family: system-ui, sans-serif; margin: 2rem auto; max-width: 1100px; color: #1c2733; }
h1 { font-size: 1.5rem; } h2 { font-size: 1.2rem; margin-top: 2rem; }
.meta { color: #5b6b7b; font-size: 0.9rem; }
.fallback { background: #f6f8fa; border: 1px solid #d8dee4; padding: 1rem; border-radius: 6px; }
"""


@dataclass(frozen=True)
class ReportSection:
    analyzer: str
    plots: Sequence[PlotSpec]
    warnings: Sequence[str]


@dataclass(frozen=True)
class Report:
    run_id: str
    generated_at: str
    engine_version: str
    config: dict
    sections: Sequence[ReportSection] = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "metadata": {
                "run_id": self.run_id,
                "generated_at": self.generated_at,
                "engine_version": self.engine_version,
                "config": self.config,
            },
            "sections": [
                {
                    "analyzer": s.analyzer,
                    "plots": [p.to_json_dict() for p in s.plots],
                    "warnings": list(s.warnings),
                }
                for s in self.sections
            ],
        }


def build_report(
    sections: Sequence[SectionRun],
    run_id: str,
    generated_at: str,
    config: Optional[dict] = None,
) -> Report:
    return Report(
        run_id=run_id,
        generated_at=generated_at,
        engine_version=__version__,
        config=dict(sorted((config or {}).items())),
        sections=tuple(
            ReportSection(analyzer=s.analyzer, plots=tuple(s.plots), warnings=tuple(s.warnings))
            for s in sections
        ),
    )


def export_json(report: Report) -> bytes:
    """Serialize the report; the same bytes are embedded in the HTML data block.

    "</" is escaped to "<\\/" (a no-op for JSON parsers) so the payload can
    never terminate the surrounding script element.
    """
    text = json.dumps(report.to_json_dict(), separators=(",", ":"), allow_nan=False)
    return text.replace("</", "<\\/").encode("utf-8")


def _fallback_lines(report: Report) -> List[str]:
    lines: List[str] = []
    if not report.sections:
        lines.append("<p>no analyses</p>")
        return lines
    lines.append("<ul>")
    for section in report.sections:
        lines.append(f"<li><strong>{html.escape(section.analyzer)}</strong><ul>")
        for plot in section.plots:
            lines.append(f"<li>{html.escape(plot.title)}</li>")
            for annotation in plot.annotations or ():
                lines.append(f"<li>flag: {html.escape(annotation.message)}</li>")
        for warning in section.warnings:
            lines.append(f"<li>warning: {html.escape(warning)}</li>")
        lines.append("</ul></li>")
    lines.append("</ul>")
    return lines


def render(report: Report, viewer_bundle: bytes = b"") -> bytes:
    """Produce the single-file HTML document.

    With an empty viewer bundle the document still opens and shows the
    plain-text fallback, so the engine never depends on the built viewer.
    """
    bundle_text = viewer_bundle.decode("utf-8") if viewer_bundle else ""
    if "</script" in bundle_text.lower():
        raise AssertionError("viewer bundle must not contain a script close tag")
    data_json = export_json(report).decode("utf-8")
    fallback = "\n".join(_fallback_lines(report))
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8">',
        '<meta name="viewport" content="width=device-width, initial-scale=1">',
        f"<title>rlinspect report: {html.escape(report.run_id)}</title>",
        f"<style>{_CSS}</style>",
        "</head>",
        "<body>",
        f"<h1>rlinspect report: {html.escape(report.run_id)}</h1>",
        f'<p class="meta">generated at {html.escape(report.generated_at)} '
        f"by rlinspect {html.escape(report.engine_version)}</p>",
        '<noscript><div class="fallback"><p>JavaScript is disabled; section overview:</p>',
        fallback,
        "</div></noscript>",
        f'<script id="{DATA_BLOCK_ID}" type="application/json">{data_json}</script>',
        '<div id="rlinspect-app"></div>',
    ]
    if bundle_text:
        parts.append(f"<script>{bundle_text}</script>")
    else:
        parts.append('<div class="fallback"><p>Viewer bundle not built; section overview:</p>')
        parts.append(fallback)
        parts.append("</div>")
    parts.extend(["</body>", "</html>", ""])
    return "\n".join(parts).encode("utf-8")
