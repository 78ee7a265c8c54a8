"""Weighted decorated marked surfaces and their mixed-angulations.

A surface is never modelled directly.  It is the result of gluing the
polygons of a mixed-angulation along their arc sides, so every check here
is a check on that gluing.

Conventions used throughout the package:

* the sides of a polygon are listed in clockwise order around its
  decoration;
* side ``i`` runs from corner ``i - 1`` to corner ``i``, and corner ``i``
  sits between side ``i`` and side ``i + 1``;
* an arc occurs exactly twice, as occurrence 0 (``first``) and 1
  (``second``); a boundary segment occurs once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union


class WdmsError(Exception):
    """Base class for structural errors."""


class ValidationError(WdmsError):
    pass


class DanglingArc(ValidationError):
    pass


class PolygonSizeMismatch(ValidationError):
    pass


class GluingMismatch(ValidationError):
    pass


class DuplicateBoundarySegment(ValidationError):
    pass


class UnknownName(ValidationError):
    pass


class UnsupportedOrder(WdmsError):
    pass


class DegreeMismatch(WdmsError):
    pass


class ArcSide(NamedTuple):
    arc: str
    occ: int  # 0 = first, 1 = second

    def token(self) -> str:
        return f"arc:{self.arc}/{'first' if self.occ == 0 else 'second'}"


class BoundarySegment(NamedTuple):
    boundary: str
    index: int

    def token(self) -> str:
        return f"bseg:{self.boundary}.{self.index}"


Side = Union[ArcSide, BoundarySegment]


@dataclass(frozen=True)
class SurfaceSpec:
    """The wDMS signature: genus, marked points per boundary, weights."""

    genus: int
    boundaries: tuple[tuple[str, int], ...]
    decorations: tuple[tuple[str, int], ...]

    @property
    def marked_points(self) -> int:
        return sum(k for _, k in self.boundaries)

    def weight(self, dec: str) -> int:
        return dict(self.decorations)[dec]

    def boundary_size(self, name: str) -> int:
        return dict(self.boundaries)[name]

    def weight_sum(self) -> int:
        return sum(w for _, w in self.decorations)


def make_spec(genus: int, boundaries: Iterable, decorations: Iterable) -> SurfaceSpec:
    """Build a spec from counts or (name, count) pairs.

    Bare integers are named ``0, 1, ...`` for boundaries and ``z0, z1, ...``
    for decorations.
    """
    bs = []
    for i, b in enumerate(boundaries):
        bs.append((str(i), int(b)) if isinstance(b, int) else (str(b[0]), int(b[1])))
    ds = []
    for i, d in enumerate(decorations):
        ds.append((f"z{i}", int(d)) if isinstance(d, int) else (str(d[0]), int(d[1])))
    return SurfaceSpec(int(genus), tuple(bs), tuple(ds))


def validate_spec(spec: SurfaceSpec) -> list[str]:
    """Return the violated signature constraints; empty means legal."""
    report = []
    if spec.genus < 0:
        report.append("negative genus")
    if not spec.decorations:
        report.append("empty decoration set")
    for name, k in spec.boundaries:
        if k < 1:
            report.append(f"boundary {name} has no marked point")
    for name, w in spec.decorations:
        if w < -1:
            report.append(f"decoration {name} has weight {w} < -1")
    names = [n for n, _ in spec.boundaries]
    if len(set(names)) != len(names):
        report.append("duplicate boundary name")
    names = [n for n, _ in spec.decorations]
    if len(set(names)) != len(names):
        report.append("duplicate decoration name")
    return report


def combform_holds(spec: SurfaceSpec) -> bool:
    m = spec.marked_points
    b = len(spec.boundaries)
    return spec.weight_sum() - (m + 2 * b) == 4 * spec.genus - 4


def real_blowup_spec(genus: int, orders: Iterable[int]) -> SurfaceSpec:
    """Signature of the real blow-up of a quadratic differential.

    Zeros and simple poles (order >= -1) become decorations; higher poles
    (order <= -3) become boundary components with ``|w| - 2`` marked points.
    """
    orders = list(orders)
    if any(w == -2 for w in orders):
        raise UnsupportedOrder("order -2 would give a boundary with no marked point")
    if sum(orders) != 4 * genus - 4:
        raise DegreeMismatch(f"orders sum to {sum(orders)}, expected {4 * genus - 4}")
    decs, bds = [], []
    for w in orders:
        if w >= -1:
            decs.append((f"z{len(decs)}", w))
        else:
            bds.append((str(len(bds)), abs(w) - 2))
    return SurfaceSpec(genus, tuple(bds), tuple(decs))


@dataclass(frozen=True)
class Polygon:
    dec: str
    sides: tuple

    def __len__(self) -> int:
        return len(self.sides)


class MarkedPoint(NamedTuple):
    corners: tuple  # chain of (polygon index, corner index)
    incoming: BoundarySegment  # boundary segment ending here
    outgoing: BoundarySegment  # boundary segment starting here


@dataclass(frozen=True)
class MixedAngulation:
    spec: SurfaceSpec
    polygons: tuple
    shifts: tuple = field(default=())  # sorted (arc, shift) pairs, zeros omitted

    # -- basic queries -------------------------------------------------
    @property
    def arcs(self) -> list[str]:
        seen = []
        for p in self.polygons:
            for s in p.sides:
                if isinstance(s, ArcSide) and s.arc not in seen:
                    seen.append(s.arc)
        return seen

    def shift(self, arc: str) -> int:
        return dict(self.shifts).get(arc, 0)

    def occurrence(self, arc: str, occ: int) -> tuple[int, int]:
        """(polygon index, side position) of one occurrence of an arc."""
        target = ArcSide(arc, occ)
        for i, p in enumerate(self.polygons):
            for j, s in enumerate(p.sides):
                if s == target:
                    return i, j
        raise KeyError(arc)

    def side_locations(self) -> dict:
        loc = {}
        for i, p in enumerate(self.polygons):
            for j, s in enumerate(p.sides):
                loc[s] = (i, j)
        return loc

    def across(self, pi: int, si: int):
        """The (polygon, position) glued to side ``si`` of polygon ``pi``."""
        s = self.polygons[pi].sides[si]
        if not isinstance(s, ArcSide):
            return None
        return self.occurrence(s.arc, 1 - s.occ)

    def polygon_of(self, dec: str) -> int:
        for i, p in enumerate(self.polygons):
            if p.dec == dec:
                return i
        raise KeyError(dec)

    # -- corner orbits -------------------------------------------------
    def marked_points(self) -> list[MarkedPoint]:
        """Corner orbits, each a chain from one boundary segment to the next."""
        loc = self.side_locations()
        pts = []
        for pi, p in enumerate(self.polygons):
            n = len(p.sides)
            for ci in range(n):
                if not isinstance(p.sides[ci], BoundarySegment):
                    continue
                chain = [(pi, ci)]
                cur = (pi, ci)
                for _ in range(4 * len(loc) + 4):
                    q = self.polygons[cur[0]]
                    nxt = q.sides[(cur[1] + 1) % len(q.sides)]
                    if isinstance(nxt, BoundarySegment):
                        pts.append(MarkedPoint(tuple(chain), p.sides[ci], nxt))
                        break
                    cur = loc[ArcSide(nxt.arc, 1 - nxt.occ)]
                    chain.append(cur)
                else:
                    raise GluingMismatch("corner traversal does not terminate")
        return pts

    def corner_point(self) -> dict:
        """Map (polygon, corner) to the index of its marked point."""
        out = {}
        for k, mp in enumerate(self.marked_points()):
            for c in mp.corners:
                out[c] = k
        return out

    def euler_count(self) -> int:
        return len(self.polygons) - len(self.arcs)

    def __repr__(self) -> str:
        body = "; ".join(f"{p.dec}:[{' '.join(s.token() for s in p.sides)}]" for p in self.polygons)
        return f"MixedAngulation({body})"


def weight_formula_check(A: MixedAngulation) -> bool:
    """Sum of weights minus (m + 2b) equals 4g - 4, with m, b derived."""
    m = len(A.marked_points())
    b = len(A.spec.boundaries)
    w = sum(A.spec.weight(p.dec) for p in A.polygons)
    return w - (m + 2 * b) == 4 * A.spec.genus - 4


def build_angulation(spec: SurfaceSpec, polygons: Iterable, shifts=None) -> MixedAngulation:
    """Validate and freeze a polygon complex.

    ``polygons`` holds ``(decoration, sides)`` pairs; sides may be Side
    objects or text tokens (``arc:a/first``, ``bseg:0.1``).
    """
    report = validate_spec(spec)
    if report:
        raise ValidationError("; ".join(report))
    raw = [(dec, [parse_side(s) if isinstance(s, str) else s for s in sides]) for dec, sides in polygons]
    polys = [Polygon(dec, least_rotation(sides)) for dec, sides in resolve_occurrences(raw)]
    shifts = dict(shifts or {})
    A = MixedAngulation(spec, tuple(polys), tuple(sorted((a, v) for a, v in shifts.items() if v)))
    check_angulation(A)
    unknown = set(shifts) - set(A.arcs)
    if unknown:
        raise UnknownName(f"shift for unknown arc {sorted(unknown)[0]}")
    return A


def least_rotation(sides) -> tuple:
    """Rotate a cyclic side list to start at its least token."""
    sides = tuple(sides)
    if not sides:
        return sides
    toks = [x.token() for x in sides]
    i = min(range(len(sides)), key=lambda k: toks[k:] + toks[:k])
    return sides[i:] + sides[:i]


def parse_side(tok: str) -> Side:
    if tok.startswith("arc:"):
        body = tok[4:]
        name, _, occ = body.partition("/")
        if occ in ("", "first", "0"):
            return ArcSide(name, 0) if occ else ArcSide(name, -1)
        if occ in ("second", "1"):
            return ArcSide(name, 1)
        raise ValueError(f"bad arc occurrence in {tok!r}")
    if tok.startswith("bseg:"):
        b, _, k = tok[5:].rpartition(".")
        return BoundarySegment(b, int(k))
    raise ValueError(f"bad side token {tok!r}")


def resolve_occurrences(polys: list) -> list:
    """Assign first/second to arc sides written without an occurrence."""
    count = {}
    out = []
    for dec, sides in polys:
        new = []
        for s in sides:
            if isinstance(s, ArcSide) and s.occ == -1:
                k = count.get(s.arc, 0)
                count[s.arc] = k + 1
                s = ArcSide(s.arc, k)
            new.append(s)
        out.append((dec, new))
    return out


def check_angulation(A: MixedAngulation) -> None:
    spec = A.spec
    decs = dict(spec.decorations)
    bds = dict(spec.boundaries)
    used = set()
    for p in A.polygons:
        if p.dec not in decs:
            raise UnknownName(f"unknown decoration {p.dec}")
        if p.dec in used:
            raise ValidationError(f"decoration {p.dec} used by two polygons")
        used.add(p.dec)
        if len(p.sides) != decs[p.dec] + 2:
            raise PolygonSizeMismatch(
                f"polygon {p.dec} has {len(p.sides)} sides, weight {decs[p.dec]} needs {decs[p.dec] + 2}")
    if used != set(decs):
        raise ValidationError(f"decorations without polygon: {sorted(set(decs) - used)}")
    occ = {}
    segs = set()
    for p in A.polygons:
        for s in p.sides:
            if isinstance(s, ArcSide):
                occ.setdefault(s.arc, []).append(s.occ)
            else:
                if s.boundary not in bds:
                    raise UnknownName(f"unknown boundary {s.boundary}")
                if not 0 <= s.index < bds[s.boundary]:
                    raise GluingMismatch(f"segment {s.token()} out of range")
                if s in segs:
                    raise DuplicateBoundarySegment(s.token())
                segs.add(s)
    for a, os in occ.items():
        if sorted(os) != [0, 1]:
            raise DanglingArc(f"arc {a} occurs {len(os)} times")
    for b, k in bds.items():
        for i in range(k):
            if BoundarySegment(b, i) not in segs:
                raise GluingMismatch(f"missing boundary segment {b}.{i}")
    # connectivity
    adj = {i: set() for i in range(len(A.polygons))}
    loc = A.side_locations()
    for i, p in enumerate(A.polygons):
        for s in p.sides:
            if isinstance(s, ArcSide):
                adj[i].add(loc[ArcSide(s.arc, 1 - s.occ)][0])
    seen, stack = {0}, [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != len(A.polygons):
        raise GluingMismatch("polygon complex is disconnected")
    # corners: every orbit must reach the boundary
    pts = A.marked_points()
    ncorners = sum(len(p.sides) for p in A.polygons)
    if sum(len(mp.corners) for mp in pts) != ncorners:
        raise GluingMismatch("some corner orbit is closed (an interior vertex)")
    succ = {mp.incoming: mp.outgoing for mp in pts}
    for s, t in succ.items():
        if t.boundary != s.boundary or t.index != (s.index + 1) % bds[s.boundary]:
            raise GluingMismatch(f"boundary order broken: {s.token()} is followed by {t.token()}")
    if A.euler_count() != 2 - 2 * spec.genus - len(bds):
        raise GluingMismatch(
            f"Euler count {A.euler_count()} differs from 2 - 2g - b = {2 - 2 * spec.genus - len(bds)}")
