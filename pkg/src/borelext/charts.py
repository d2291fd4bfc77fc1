"""Chart documents: one coweight page of Borel Ext, as JSON and as SVG.

JSON output is canonical (sorted keys, fixed separators, ASCII), so equal
documents serialize to equal bytes.  The schema is described in
``docs/chart-schema.md``; :data:`SCHEMA` names its version.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union
from xml.sax.saxutils import escape

from . import __version__
from .catalog import pretty

SCHEMA = "borelext-chart/1"


@dataclass(frozen=True)
class ChartEntry:
    stem: int
    s: int
    w: int
    names: tuple[str, ...]
    summands: tuple[str, ...]

    @property
    def dim(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class ChartLine:
    source: tuple[int, int]     # (stem, s)
    target: tuple[int, int]
    source_label: str
    target_label: str


@dataclass
class ChartDocument:
    coweight: int
    stem_min: int
    stem_max: int
    s_max: int
    entries: list = field(default_factory=list)
    rho_lines: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def validate(self) -> None:
        """Entries lie in the declared ranges and every line joins two existing entries."""
        seen = {}
        for e in self.entries:
            if not (self.stem_min <= e.stem <= self.stem_max and 0 <= e.s <= self.s_max):
                raise ValueError(f"entry at (stem {e.stem}, s {e.s}) outside the page range")
            if e.w != e.stem - self.coweight:
                raise ValueError(f"entry at stem {e.stem} has weight {e.w}, not stem - coweight")
            if len(e.names) != len(e.summands):
                raise ValueError("names and summand tags differ in length")
            seen[(e.stem, e.s)] = set(e.names)
        for ln in self.rho_lines:
            for pos, label in ((ln.source, ln.source_label), (ln.target, ln.target_label)):
                if label not in seen.get(tuple(pos), ()):
                    raise ValueError(f"rho line endpoint {label} at {pos} has no entry")

    def entry_at(self, stem: int, s: int):
        for e in self.entries:
            if (e.stem, e.s) == (stem, s):
                return e
        return None

    # -- JSON -----------------------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "coweight": self.coweight,
            "stem_range": [self.stem_min, self.stem_max],
            "s_max": self.s_max,
            "entries": [{"stem": e.stem, "s": e.s, "w": e.w, "dimension": e.dim,
                         "names": list(e.names), "summands": list(e.summands)}
                        for e in self.entries],
            "rho_lines": [{"source": list(ln.source), "target": list(ln.target),
                           "source_label": ln.source_label, "target_label": ln.target_label}
                          for ln in self.rho_lines],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ChartDocument":
        if raw.get("schema") != SCHEMA:
            raise ValueError(f"unsupported chart schema {raw.get('schema')!r}")
        doc = cls(raw["coweight"], raw["stem_range"][0], raw["stem_range"][1], raw["s_max"],
                  [ChartEntry(e["stem"], e["s"], e["w"], tuple(e["names"]), tuple(e["summands"]))
                   for e in raw["entries"]],
                  [ChartLine(tuple(ln["source"]), tuple(ln["target"]),
                             ln["source_label"], ln["target_label"])
                   for ln in raw["rho_lines"]],
                  raw.get("provenance", {}))
        for e in raw["entries"]:
            if e["dimension"] != len(e["names"]):
                raise ValueError("dimension does not match the number of names")
        doc.validate()
        return doc

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ChartDocument":
        return cls.from_dict(json.loads(text))


def dumps(obj) -> str:
    """Canonical JSON text, newline-terminated."""
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=True) + "\n"


def page_document(engine, coweight: int) -> ChartDocument:
    """Build the chart page of one coweight from a :class:`~borelext.borel.BorelEngine`."""
    from .borel import SPLITTING
    entries = []
    for g in engine.page(coweight):
        order = sorted(range(g.dim), key=lambda i: g.basis[i].label)
        entries.append(ChartEntry(g.stem, g.s, g.w,
                                  tuple(g.basis[i].label for i in order),
                                  tuple(g.basis[i].summand for i in order)))
    lines = []
    for ln in engine.rho_lines(coweight):
        (s1, t1, _), (s2, t2, _) = ln.source, ln.target
        lines.append(ChartLine((t1 - s1, s1), (t2 - s2, s2), ln.source_label, ln.target_label))
    lines.sort(key=lambda x: (x.source, x.target, x.source_label, x.target_label))
    doc = ChartDocument(coweight, 0, engine.stem_max, engine.s_max, entries, lines, {
        "code_version": __version__,
        "method": "bounded-below column models",
        "splitting": SPLITTING,
        "unstable": [],
    })
    doc.validate()
    return doc


# -- SVG --------------------------------------------------------------------------------------

CELL = 48          # pixels per stem / filtration step
MARGIN = 40
DOT = 3.2


def _dot_positions(doc: ChartDocument) -> dict:
    """Pixel position of every named class; several classes in one bidegree spread sideways."""
    height = MARGIN + (doc.s_max + 1) * CELL
    pos = {}
    for e in doc.entries:
        x0 = MARGIN + (e.stem - doc.stem_min) * CELL + CELL / 2
        y0 = height - e.s * CELL - CELL / 2
        n = e.dim
        for k, name in enumerate(e.names):
            dx = (k - (n - 1) / 2) * min(10.0, (CELL - 12) / max(n, 1))
            pos[(e.stem, e.s, name)] = (round(x0 + dx, 2), round(y0, 2))
    return pos


def render_svg(doc: ChartDocument, labels: bool = True) -> str:
    """Standalone SVG: stems across, filtration up, rho lines in red."""
    width = 2 * MARGIN + (doc.stem_max - doc.stem_min + 1) * CELL
    height = 2 * MARGIN + (doc.s_max + 1) * CELL
    base = MARGIN + (doc.s_max + 1) * CELL
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="9">',
           f'<title>Borel Ext, coweight {doc.coweight}</title>',
           '<rect width="100%" height="100%" fill="white"/>']
    grid = []
    for i in range(doc.stem_max - doc.stem_min + 2):
        x = MARGIN + i * CELL
        grid.append(f'<line x1="{x}" y1="{MARGIN}" x2="{x}" y2="{base}"/>')
    for j in range(doc.s_max + 2):
        y = base - j * CELL
        grid.append(f'<line x1="{MARGIN}" y1="{y}" x2="{width - MARGIN}" y2="{y}"/>')
    out.append('<g stroke="#ddd" stroke-width="0.5">' + "".join(grid) + "</g>")
    ticks = []
    for stem in range(doc.stem_min, doc.stem_max + 1):
        x = MARGIN + (stem - doc.stem_min) * CELL + CELL / 2
        ticks.append(f'<text x="{x}" y="{base + 14}" text-anchor="middle">{stem}</text>')
    for s in range(doc.s_max + 1):
        y = base - s * CELL - CELL / 2 + 3
        ticks.append(f'<text x="{MARGIN - 6}" y="{y}" text-anchor="end">{s}</text>')
    out.append('<g fill="#444">' + "".join(ticks) + "</g>")
    pos = _dot_positions(doc)
    red = []
    for ln in doc.rho_lines:
        a = pos[(ln.source[0], ln.source[1], ln.source_label)]
        b = pos[(ln.target[0], ln.target[1], ln.target_label)]
        red.append(f'<line x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}"/>')
    out.append('<g stroke="red" stroke-width="1.2">' + "".join(red) + "</g>")
    dots, text = [], []
    unstable = {tuple(u) for u in doc.provenance.get("unstable", [])}
    for (stem, s, name), (x, y) in sorted(pos.items()):
        dots.append(f'<circle cx="{x}" cy="{y}" r="{DOT}"><title>{escape(pretty(name))}</title></circle>')
        if labels:
            text.append(f'<text x="{x + 4}" y="{y - 4}">{escape(pretty(name))}</text>')
        if (stem, s) in unstable:
            text.append(f'<text x="{x - 3}" y="{y + 12}" fill="#c60">!</text>')
    out.append('<g fill="black">' + "".join(dots) + "</g>")
    out.append('<g fill="#036" font-size="7">' + "".join(text) + "</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- files ------------------------------------------------------------------------------------

def write_atomic(path: Union[str, Path], text: str) -> None:
    """Write through a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
