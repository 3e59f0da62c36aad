"""Graph files: a ``udg 1`` header followed by one exact point per line.

Edges are never stored; they are recomputed on read.  ``#`` starts a comment.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, TextIO

from .exact import ParseError, format_point, parse_point
from .graph import UnitGraph, from_points

log = logging.getLogger(__name__)

HEADER = "udg 1"


class GraphFileError(ParseError):
    pass


def dumps(g: UnitGraph, comments: Iterable[str] = ()) -> str:
    lines = [HEADER]
    lines.extend(f"# {c}" for c in comments)
    lines.extend(format_point(p) for p in g.vertices)
    return "\n".join(lines) + "\n"


def loads(text: str, source: str = "<string>") -> UnitGraph:
    pts = []
    seen = set()
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if not header_seen:
            if body.strip() != HEADER:
                raise GraphFileError(f"expected header {HEADER!r}", 1, lineno)
            header_seen = True
            continue
        try:
            p = parse_point(body)
        except ParseError as exc:
            raise GraphFileError(exc.message, exc.column, lineno) from None
        if p in seen:
            log.warning("%s:%d: duplicate vertex %s ignored", source, lineno, format_point(p))
            continue
        seen.add(p)
        pts.append(p)
    if not header_seen:
        raise GraphFileError(f"missing header {HEADER!r}", 1, 1)
    return from_points(pts)


def write_graph(g: UnitGraph, path: str | Path | TextIO, comments: Iterable[str] = ()) -> None:
    text = dumps(g, comments)
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text)


def read_graph(path: str | Path) -> UnitGraph:
    return loads(Path(path).read_text(), str(path))


def to_json(g: UnitGraph) -> str:
    """Machine-readable form: exact vertex strings, float coordinates and edges."""
    return json.dumps(
        {
            "vertices": [format_point(p) for p in g.vertices],
            "xy": [[p.approx.real, p.approx.imag] for p in g.vertices],
            "edges": [list(e) for e in g.edges],
        },
        indent=1,
    )


def to_svg(g: UnitGraph, highlight: Iterable[int] = (), size: int = 600, margin: int = 20) -> str:
    """Vertices as ``circle`` dots, edges as ``line`` segments; highlighted dots are larger."""
    hl = set(highlight)
    xs = [p.approx.real for p in g.vertices] or [0.0]
    ys = [p.approx.imag for p in g.vertices] or [0.0]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    scale = (size - 2 * margin) / span
    x0, y1 = min(xs), max(ys)

    def xy(i):
        p = g.vertices[i].approx
        return margin + (p.real - x0) * scale, margin + (y1 - p.imag) * scale

    r = max(1.0, min(4.0, scale * 0.04))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        '<g stroke="#555" stroke-width="0.6">',
    ]
    for i, j in g.edges:
        (ax, ay), (bx, by) = xy(i), xy(j)
        out.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}"/>')
    out.append("</g>")
    out.append('<g fill="#000">')
    for i in range(g.n):
        cx, cy = xy(i)
        rr = 2.5 * r if i in hl else r
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{rr:.2f}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
