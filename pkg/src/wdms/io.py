"""The ``.wdms`` text format.

A document is a list of directives, one per line::

    surface genus=0
    boundary 0 marked=5
    decoration z1 weight=1
    polygon z1 : arc:a bseg:0.0 bseg:0.1
    shift a=1
    select z1 z2

``#`` starts a comment.  An arc written twice without an occurrence tag
gets ``first`` on its earliest appearance; ``arc:a/second`` may be used
to say otherwise.  Serializing normalizes the order: surface, boundaries,
decorations, polygons in decoration order, shifts, selection.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .surface import (ArcSide, MixedAngulation, SurfaceSpec, WdmsError, build_angulation,
                      parse_side, resolve_occurrences)


class ParseError(WdmsError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col, self.msg = line, col, msg


@dataclass(frozen=True)
class WdmsDocument:
    spec: SurfaceSpec
    polygons: tuple  # (decoration, side tokens)
    shifts: tuple = ()  # (arc, int)
    selection: tuple = ()  # decoration names
    header: tuple = ()  # comment lines above the first directive

    def angulation(self) -> MixedAngulation:
        return build_angulation(self.spec, [(d, list(s)) for d, s in self.polygons], dict(self.shifts))


_NAME = r"[^\s:=#]+"
_PATTERNS = {
    "surface": re.compile(r"^surface\s+genus=(-?\d+)$"),
    "boundary": re.compile(rf"^boundary\s+({_NAME})\s+marked=(-?\d+)$"),
    "decoration": re.compile(rf"^decoration\s+({_NAME})\s+weight=(-?\d+)$"),
    "polygon": re.compile(rf"^polygon\s+({_NAME})\s*:\s*(.*)$"),
    "shift": re.compile(rf"^shift\s+({_NAME})\s*=\s*(-?\d+)$"),
    "select": re.compile(r"^select((?:\s+\S+)+)$"),
}
_SIDE = re.compile(r"^(arc:[^\s/]+(/(first|second))?|bseg:\S+\.\d+)$")


def parse(text: str) -> WdmsDocument:
    genus = None
    boundaries, decorations, polygons, shifts, selection = [], [], [], [], []
    header, started = [], False
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        line = body.strip()
        if not line:
            if not started and raw.strip():
                header.append(raw.rstrip())
            continue
        started = True
        col = len(body) - len(body.lstrip()) + 1
        kw = line.split()[0]
        pat = _PATTERNS.get(kw)
        if pat is None:
            raise ParseError(n, col, f"unknown directive {kw!r}")
        m = pat.match(line)
        if m is None:
            raise ParseError(n, col, f"malformed {kw} line")
        if kw == "surface":
            if genus is not None:
                raise ParseError(n, col, "surface declared twice")
            genus = int(m.group(1))
        elif kw == "boundary":
            boundaries.append((m.group(1), int(m.group(2))))
        elif kw == "decoration":
            decorations.append((m.group(1), int(m.group(2))))
        elif kw == "polygon":
            toks = m.group(2).split()
            if not toks:
                raise ParseError(n, col, "polygon without sides")
            for t in toks:
                if not _SIDE.match(t):
                    raise ParseError(n, raw.index(t) + 1, f"bad side {t!r}")
            polygons.append((m.group(1), tuple(toks)))
        elif kw == "shift":
            shifts.append((m.group(1), int(m.group(2))))
        else:
            selection.extend(m.group(1).split())
    if genus is None:
        raise ParseError(1, 1, "missing surface line")
    spec = SurfaceSpec(genus, tuple(boundaries), tuple(decorations))
    return WdmsDocument(spec, tuple(polygons), tuple(shifts), tuple(selection), tuple(header))


def load(path) -> WdmsDocument:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _tokens(polys) -> list:
    """Side tokens, dropping occurrence tags the reader would infer anyway."""
    count = {}
    out = []
    for dec, sides in polys:
        toks = []
        for s in sides:
            if isinstance(s, ArcSide):
                k = count.get(s.arc, 0)
                count[s.arc] = k + 1
                toks.append(f"arc:{s.arc}" if s.occ == k else s.token())
            else:
                toks.append(s.token())
        out.append((dec, toks))
    return out


def serialize(doc) -> str:
    """Text for a document or an angulation, in normal order."""
    if isinstance(doc, MixedAngulation):
        doc = document_of(doc)
    spec = doc.spec
    lines = list(doc.header) + [f"surface genus={spec.genus}"]
    lines += [f"boundary {b} marked={k}" for b, k in spec.boundaries]
    lines += [f"decoration {d} weight={w}" for d, w in spec.decorations]
    order = {d: i for i, (d, _) in enumerate(spec.decorations)}
    polys = sorted(doc.polygons, key=lambda p: order.get(p[0], len(order)))
    parsed = resolve_occurrences([(d, [parse_side(t) for t in toks]) for d, toks in polys])
    for dec, toks in _tokens(parsed):
        lines.append(f"polygon {dec} : {' '.join(toks)}")
    lines += [f"shift {a}={k}" for a, k in sorted(doc.shifts) if k]
    if doc.selection:
        lines.append("select " + " ".join(doc.selection))
    return "\n".join(lines) + "\n"


def document_of(A: MixedAngulation, selection=(), header=()) -> WdmsDocument:
    polys = tuple((p.dec, tuple(s.token() for s in p.sides)) for p in A.polygons)
    return WdmsDocument(A.spec, polys, tuple(A.shifts), tuple(selection), tuple(header))
