"""Exchange graph of forward flips, with two notions of state identity.

Tracked mode remembers every open arc as a homotopy class in the surface,
relative to its endpoints.  A class is written against the initial
angulation A0 as the sequence of A0-arcs it crosses: a token
``(arc, occ)`` means crossing ``arc`` into the polygon holding copy
``occ``.  Paths may leave a marked point through any of its corners; each
is rewritten to leave through the first corner of the point's chain by
prepending the crossings between the two corners, and the token string is
then freely reduced.  Since the dual graph of A0 is a spine of the surface
this gives one normal form per class.

Canonical mode forgets the initial angulation and relabels arcs and
decorations by a walk anchored at the least boundary segment.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .flips import forward_flip
from .surface import ArcSide, BoundarySegment, MixedAngulation


def _inv(tok):
    return (tok[0], 1 - tok[1])


def _free_reduce(toks) -> tuple:
    out = []
    for t in toks:
        if out and out[-1] == _inv(t):
            out.pop()
        else:
            out.append(t)
    return tuple(out)


@dataclass(frozen=True)
class ArcClass:
    """Oriented homotopy class: marked point, crossings, marked point."""

    start: int
    crossings: tuple
    end: int

    def reverse(self) -> "ArcClass":
        return ArcClass(self.end, tuple(_inv(t) for t in reversed(self.crossings)), self.start)

    def then(self, other: "ArcClass") -> "ArcClass":
        if self.end != other.start:
            raise ValueError("paths do not meet")
        return ArcClass(self.start, _free_reduce(self.crossings + other.crossings), other.end)

    def unoriented(self) -> tuple:
        a, b = self, self.reverse()
        ka = (a.start, a.end, a.crossings)
        kb = (b.start, b.end, b.crossings)
        return min(ka, kb)


class Frame:
    """Normal forms of paths relative to an initial angulation."""

    def __init__(self, A0: MixedAngulation):
        self.A0 = A0
        self.point = {}
        self.prefix = {}
        for k, mp in enumerate(A0.marked_points()):
            toks = []
            for i, c in enumerate(mp.corners):
                self.point[c] = k
                self.prefix[c] = tuple(toks)
                if i + 1 < len(mp.corners):
                    pi, ci = c
                    p = A0.polygons[pi]
                    s = p.sides[(ci + 1) % len(p.sides)]
                    toks.append((s.arc, 1 - s.occ))

    def path(self, c_from, crossings, c_to) -> ArcClass:
        toks = self.prefix[c_from] + tuple(crossings) + tuple(
            _inv(t) for t in reversed(self.prefix[c_to]))
        return ArcClass(self.point[c_from], _free_reduce(toks), self.point[c_to])

    def side_class(self, pi: int, k: int) -> ArcClass:
        """Side k of polygon pi of A0, run from corner k-1 to corner k."""
        n = len(self.A0.polygons[pi].sides)
        return self.path((pi, (k - 1) % n), (), (pi, k))

    def initial(self) -> tuple[dict, dict]:
        arcs, bsegs = {}, {}
        for pi, p in enumerate(self.A0.polygons):
            for k, s in enumerate(p.sides):
                if isinstance(s, BoundarySegment):
                    bsegs[s] = self.side_class(pi, k)
                elif s.occ == 0:
                    arcs[s.arc] = self.side_class(pi, k)
        return arcs, bsegs


def _side(side, arcs, bsegs) -> ArcClass:
    if isinstance(side, BoundarySegment):
        return bsegs[side]
    r = arcs[side.arc]
    return r if side.occ == 0 else r.reverse()


def _slid(A: MixedAngulation, arc: str, arcs: dict, bsegs: dict) -> ArcClass:
    """Old class with both ends slid one corner counterclockwise.

    After a forward flip the side following each copy is the side that
    used to precede the other copy, so the new arc runs back along the
    one, through the old arc, and back along the other.
    """
    after = []
    for o in (0, 1):
        qi, qk = A.occurrence(arc, o)
        sides = A.polygons[qi].sides
        after.append(_side(sides[(qk + 1) % len(sides)], arcs, bsegs))
    return after[1].then(arcs[arc]).then(after[0].reverse())


def transport(A: MixedAngulation, arc: str, arcs: dict, bsegs: dict) -> ArcClass:
    """Class of ``arc`` after a forward flip, read off a polygon holding it.

    The arc is homotopic to the rest of the polygon boundary run backwards;
    every other side already has a known class.  When both copies lie in
    one polygon the other copy is not known yet, and the ends of the old
    class are slid instead.
    """
    occ = 0 if len(A.polygons[A.occurrence(arc, 0)[0]].sides) > 1 else 1
    pi, k = A.occurrence(arc, occ)
    if A.occurrence(arc, 1 - occ)[0] == pi:
        return _slid(A, arc, arcs, bsegs)
    sides = A.polygons[pi].sides
    n = len(sides)
    path = _side(sides[(k + 1) % n], arcs, bsegs)
    for j in range(2, n):
        path = path.then(_side(sides[(k + j) % n], arcs, bsegs))
    return path.reverse() if occ == 0 else path


def canonical_key(A: MixedAngulation, graded: bool = False) -> tuple:
    """Serialization after relabelling arcs and decorations by a walk.

    Boundary labels stay fixed.  The walk starts at the least boundary
    segment and reads each polygon from the side it was entered through.
    With ``graded`` each arc also carries its shift.
    """
    loc = A.side_locations()
    segs = sorted((s for s in loc if isinstance(s, BoundarySegment)), key=lambda s: s.token())
    start = loc[segs[0]] if segs else (0, 0)
    names, out, seen = {}, [], {start[0]}
    queue = deque([start])
    while queue:
        pi, k = queue.popleft()
        p = A.polygons[pi]
        n = len(p.sides)
        row = []
        for j in range(n):
            s = p.sides[(k + j) % n]
            if isinstance(s, BoundarySegment):
                row.append(s.token())
                continue
            if s.arc not in names:
                names[s.arc] = len(names)
            row.append((names[s.arc], A.shift(s.arc)) if graded else names[s.arc])
            qi, qk = loc[ArcSide(s.arc, 1 - s.occ)]
            if qi not in seen:
                seen.add(qi)
                queue.append((qi, qk))
        out.append((A.spec.weight(p.dec), tuple(row)))
    return tuple(out)


@dataclass
class ExchangeGraph:
    states: list = field(default_factory=list)  # MixedAngulation per vertex, BFS order
    edges: list = field(default_factory=list)  # (source, arc label, target)
    truncated: bool = False
    mode: str = "tracked"
    keys: list = field(default_factory=list)

    def out_degree(self, v: int) -> int:
        return sum(1 for s, _, _ in self.edges if s == v)

    def in_degree(self, v: int) -> int:
        return sum(1 for _, _, t in self.edges if t == v)


def tracked_key(A: MixedAngulation, arcs: dict, bsegs: dict) -> tuple:
    """Regions as (weight, cyclic side classes), as a sorted multiset.

    Decorations are forgotten, so an arc enclosing nothing but decorations
    is a trivial loop; the weights of the regions it bounds still tell
    such arcs apart.
    """
    regions = []
    for p in A.polygons:
        cls = [_side(s, arcs, bsegs) for s in p.sides]
        cyc = [(c.start, c.end, c.crossings) for c in cls]
        rots = [tuple(cyc[i:] + cyc[:i]) for i in range(len(cyc))]
        regions.append((A.spec.weight(p.dec), min(rots)))
    return tuple(sorted(regions))


def _expand(A: MixedAngulation, arcs: dict, bsegs: dict) -> list:
    out = []
    for a in A.arcs:
        B, rec = forward_flip(A, a)
        new = dict(arcs)
        new[a] = transport(B, a, arcs, bsegs)
        out.append((B, rec.label(), new))
    return out


def enumerate_graph(A0: MixedAngulation, max_nodes: int = 100, mode: str = "tracked",
                    workers: int = 0) -> ExchangeGraph:
    """Breadth-first search over forward flips.

    Arcs are flipped in serialization order.  Once ``max_nodes`` vertices
    exist, newly met states are dropped together with their edges and the
    graph is flagged as truncated.  With ``workers`` the flips of each BFS
    level are computed in a thread pool; merging stays sequential and in
    level order, so the graph is the same as without.
    """
    if mode not in ("tracked", "canonical"):
        raise ValueError(f"unknown mode {mode!r}")
    frame = Frame(A0)
    arcs0, bsegs = frame.initial()
    G = ExchangeGraph(mode=mode)
    index = {}

    def key_of(A, arcs):
        return tracked_key(A, arcs, bsegs) if mode == "tracked" else canonical_key(A)

    k0 = key_of(A0, arcs0)
    index[k0] = 0
    G.states.append(A0)
    G.keys.append(k0)
    level = [(0, A0, arcs0)]
    pool = ThreadPoolExecutor(workers) if workers else None
    try:
        while level:
            jobs = [(A, arcs, bsegs) for _, A, arcs in level]
            if pool:
                found = list(pool.map(lambda j: _expand(*j), jobs))
            else:
                found = [_expand(*j) for j in jobs]
            nxt = []
            for (v, _, _), succ in zip(level, found):
                for B, label, new in succ:
                    k = key_of(B, new)
                    if k not in index:
                        if len(G.states) >= max_nodes:
                            G.truncated = True
                            continue
                        index[k] = len(G.states)
                        G.states.append(B)
                        G.keys.append(k)
                        nxt.append((index[k], B, new))
                    G.edges.append((v, label, index[k]))
            level = nxt
    finally:
        if pool:
            pool.shutdown()
    return G


def export_dot(G: ExchangeGraph) -> str:
    lines = ["digraph EG {"]
    if G.truncated:
        lines.append('  label="truncated";')
    for i in range(len(G.states)):
        lines.append(f"  n{i};")
    for s, lab, t in sorted(G.edges, key=lambda e: (e[0], e[2], e[1])):
        lines.append(f'  n{s} -> n{t} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def adjacency(G: ExchangeGraph) -> str:
    return "".join(f"{s}: {lab} -> {t}\n" for s, lab, t in sorted(G.edges, key=lambda e: (e[0], e[1])))
