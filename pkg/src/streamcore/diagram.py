"""Timing diagrams: one row per stream, one column per time point."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional
from xml.sax.saxutils import escape

from .model import StreamTrace


class UnknownStream(KeyError):
    pass


@dataclass(frozen=True)
class DiagramSpec:
    streams: Optional[tuple] = None  # None: every column, in trace order
    start: int = 0
    end: Optional[int] = None  # exclusive
    style: str = "ascii"

    def resolve(self, trace: StreamTrace) -> tuple:
        streams = tuple(trace.columns) if self.streams is None else tuple(self.streams)
        for name in streams:
            if name not in trace:
                raise UnknownStream(name)
        end = trace.horizon if self.end is None else min(self.end, trace.horizon)
        start = max(0, self.start)
        return streams, range(start, max(start, end))


def render_ascii(trace: StreamTrace, spec: DiagramSpec = DiagramSpec()) -> str:
    streams, times = spec.resolve(trace)
    label_w = max([len("time")] + [len(s) for s in streams])
    if not times:
        return f"{'time'.ljust(label_w)} |\n"
    texts = [str(n) for n in times]
    for name in streams:
        texts.extend(str(trace[name][n]) for n in times if trace[name][n] is not None)
    w = max(len(t) for t in texts)

    def row(label: str, cells) -> str:
        return f"{label.ljust(label_w)} | " + "  ".join(c.rjust(w) for c in cells) + " |"

    lines = [row("time", [str(n) for n in times])]
    for name in streams:
        col = trace[name]
        lines.append(row(name, ["." if col[n] is None else str(col[n]) for n in times]))
    return "\n".join(lines) + "\n"


def render_svg(trace: StreamTrace, spec: DiagramSpec = DiagramSpec()) -> str:
    streams, times = spec.resolve(trace)
    label_w = 12 + 8 * max([4] + [len(s) for s in streams])
    step, lane = 40, 36
    width = label_w + step * max(len(times), 1) + 20
    height = 30 + lane * len(streams) + 10
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for k, n in enumerate(times):
        x = label_w + step * k + step // 2
        out.append(f'<text x="{x}" y="18" text-anchor="middle" fill="#555555">{n}</text>')
    for r, name in enumerate(streams):
        y = 30 + lane * r + lane // 2
        out.append(f'<text x="8" y="{y + 4}" fill="#111111">{escape(name)}</text>')
        x0, x1 = label_w, label_w + step * len(times)
        out.append(f'<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#dddddd"/>')
        col = trace[name]
        for k, n in enumerate(times):
            if col[n] is None:
                continue
            x = label_w + step * k + step // 2
            out.append(f'<circle cx="{x}" cy="{y}" r="5" fill="#333333"/>')
            out.append(f'<text x="{x}" y="{y - 8}" text-anchor="middle" font-size="10">{col[n]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(trace: StreamTrace, spec: DiagramSpec = DiagramSpec()) -> str:
    if spec.style == "ascii":
        return render_ascii(trace, spec)
    if spec.style == "svg":
        return render_svg(trace, spec)
    raise ValueError(f"unknown diagram style {spec.style!r}")
