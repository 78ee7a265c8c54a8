"""Flips of mixed-angulations and the matching moves on dual S-graphs."""

from __future__ import annotations

from dataclasses import dataclass

from .arcs import (ClosedArcWord, SGraph, UnknownEdge, extend_start, reverse_word,
                   sort_germs, twist_start)
from .surface import (ArcSide, BoundarySegment, MixedAngulation, Polygon, WdmsError,
                      check_angulation, least_rotation)


class UnknownArc(WdmsError):
    pass


@dataclass(frozen=True)
class FlipRecord:
    arc: str
    case: str  # "usual" or "monogon"
    direction: str  # "forward" or "backward"
    routing: tuple  # (decoration, new side list) of each rewired polygon
    shift: int

    def label(self) -> str:
        return f"{self.arc}" if self.case == "usual" else f"{self.arc}*"


def _components_without(A: MixedAngulation, arc: str) -> list[set]:
    loc = A.side_locations()
    n = len(A.polygons)
    adj = {i: set() for i in range(n)}
    for i, p in enumerate(A.polygons):
        for s in p.sides:
            if isinstance(s, ArcSide) and s.arc != arc:
                adj[i].add(loc[ArcSide(s.arc, 1 - s.occ)][0])
    comps, seen = [], set()
    for i in range(n):
        if i in seen:
            continue
        comp, stack = {i}, [i]
        while stack:
            for j in adj[stack.pop()]:
                if j not in comp:
                    comp.add(j)
                    stack.append(j)
        seen |= comp
        comps.append(comp)
    return comps


def monogon_side(A: MixedAngulation, arc: str):
    """Occurrence of ``arc`` facing the enclosed disc, or None.

    Cut along the arc; the arc bounds a monogon when one piece carries a
    single copy of it, no boundary segment, and has Euler count one.
    """
    if arc not in A.arcs:
        raise UnknownArc(arc)
    for comp in _components_without(A, arc):
        copies, bseg, arcs_in = [], False, set()
        for i in comp:
            for s in A.polygons[i].sides:
                if isinstance(s, BoundarySegment):
                    bseg = True
                elif s.arc == arc:
                    copies.append(s.occ)
                else:
                    arcs_in.add(s.arc)
        if len(copies) == 1 and not bseg and len(comp) - len(arcs_in) == 1:
            return copies[0]
    return None


def is_monogon_arc(A: MixedAngulation, arc: str) -> bool:
    return monogon_side(A, arc) is not None


def _flip(A: MixedAngulation, arc: str, forward: bool):
    if arc not in A.arcs:
        raise UnknownArc(arc)
    disc = monogon_side(A, arc)
    occs = {o: A.occurrence(arc, o) for o in (0, 1)}
    step = -1 if forward else 1
    moved, insert = set(), {}
    for o in (0, 1):
        if o == disc:
            continue
        pi, k = occs[o]
        sides = A.polygons[pi].sides
        pos = (k + step) % len(sides)
        moved.add((pi, pos))
        # usual: the neighbour jumps to the other copy; monogon: it swaps
        # across the copy it already touches
        target = o if disc is not None else 1 - o
        insert[target] = sides[pos]
    touched = sorted({occs[o][0] for o in (0, 1)})
    polys = list(A.polygons)
    routing = []
    for pi in touched:
        out = []
        for j, s in enumerate(A.polygons[pi].sides):
            if (pi, j) in moved:
                continue
            if isinstance(s, ArcSide) and s.arc == arc and s.occ in insert:
                out.extend([s, insert[s.occ]] if forward else [insert[s.occ], s])
            else:
                out.append(s)
        new = Polygon(A.polygons[pi].dec, least_rotation(out))
        polys[pi] = new
        routing.append((new.dec, tuple(x.token() for x in new.sides)))
    shift = 1 if forward else -1
    sh = dict(A.shifts)
    sh[arc] = sh.get(arc, 0) + shift
    B = MixedAngulation(A.spec, tuple(polys), tuple(sorted((a, v) for a, v in sh.items() if v)))
    check_angulation(B)
    rec = FlipRecord(arc, "usual" if disc is None else "monogon",
                     "forward" if forward else "backward", tuple(routing), shift)
    return B, rec


def forward_flip(A: MixedAngulation, arc: str):
    """Move each end of the arc one corner counterclockwise.

    In a polygon the arc's predecessor side slides round to sit right
    after the other copy of the arc.  A monogon arc keeps its disc and
    slides its doubled end past the preceding side of the outer polygon.
    """
    return _flip(A, arc, True)


def backward_flip(A: MixedAngulation, arc: str):
    return _flip(A, arc, False)


# -- duality ---------------------------------------------------------------

def side_slot(s):
    return ("e", s.arc, s.occ) if isinstance(s, ArcSide) else ("b", s.token())


def dual_sgraph(A: MixedAngulation) -> SGraph:
    """One vertex per decoration, one edge per arc, stubs for boundary sides."""
    rotation = {p.dec: tuple(side_slot(s) for s in p.sides) for p in A.polygons}
    ends = {}
    for a in A.arcs:
        ends[a] = tuple(A.polygons[A.occurrence(a, o)[0]].dec for o in (0, 1))
    return SGraph(rotation, ends, dict(A.shifts))


def _disc_vertex(S: SGraph, eta: str):
    """Endpoint of eta on the side of a stub-free tree, if there is one."""
    u, v = S.ends[eta]
    if u == v:
        return None
    for root in (u, v):
        comp, stack = {root}, [root]
        while stack:
            x = stack.pop()
            for slot in S.rotation[x]:
                if slot[0] == "e" and slot[1] != eta:
                    y = S.far_end(slot)[0]
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
        if root in comp and (u in comp) and (v in comp):
            return None
        stubs = any(sl[0] == "b" for x in comp for sl in S.rotation[x])
        edges = {e for e, (a, b) in S.ends.items() if e != eta and a in comp}
        if not stubs and len(edges) == len(comp) - 1:
            return root
    return None


def twisted_words(S: SGraph, eta: str, forward: bool = True) -> dict:
    """Words over ``S`` for every edge and stub after flipping ``eta``.

    The end of a half-edge which is the nearest counterclockwise neighbour
    of ``eta`` is carried once round the twist (twice for a monogon),
    all other ends stay put.  Keys are edge names and stub tokens.
    """
    if eta not in S.ends:
        raise UnknownEdge(eta)
    disc = _disc_vertex(S, eta)
    power = (2 if disc is not None else 1) * (1 if forward else -1)
    triggers = {}
    for end, z in enumerate(S.ends[eta]):
        if z == disc:
            continue
        rot = S.rotation[z]
        i = rot.index(("e", eta, end))
        nb = rot[(i + (-1 if forward else 1)) % len(rot)]
        if nb[0] == "b" or nb[1] != eta:
            triggers[nb] = end

    def move(w):
        end = triggers.get(w.slots[0])
        if end is None:
            return w
        if abs(power) == 1:
            return extend_start(S, eta, end, w, power)
        return twist_start(S, eta, w, power)

    out = {}
    for e in S.ends:
        w = S.edge_word(e)
        if e != eta:
            w = reverse_word(S, move(reverse_word(S, move(w))))
        out[e] = w
    for z, rot in S.rotation.items():
        for slot in rot:
            if slot[0] == "b":
                out[slot[1]] = move(ClosedArcWord(z, (slot,), ()))
    return out


def graph_from_words(S: SGraph, words: dict, shifts: dict) -> SGraph:
    """Ribbon graph whose edges are the given words over ``S``."""
    germs = {v: [] for v in S.rotation}
    ends = {}
    for name, w in words.items():
        end = w.end(S)
        if end is None:
            germs[w.start].append((w, ("b", name)))
            continue
        r = reverse_word(S, w)
        ends[name] = (w.start, r.start)
        germs[w.start].append((w, ("e", name, 0)))
        germs[r.start].append((r, ("e", name, 1)))
    rotation = {}
    for v, lst in germs.items():
        by = {id(w): slot for w, slot in lst}
        rotation[v] = tuple(by[id(w)] for w in sort_germs(S, [w for w, _ in lst]))
    return SGraph(rotation, ends, {k: n for k, n in shifts.items() if n})


def sgraph_flip(S: SGraph, eta: str, forward: bool = True) -> SGraph:
    """Flip of an S-graph at ``eta``: twist the triggered ends, shift ``eta``."""
    words = twisted_words(S, eta, forward)
    sh = dict(S.shifts)
    sh[eta] = sh.get(eta, 0) + (1 if forward else -1)
    return graph_from_words(S, words, sh)


def commutes(A: MixedAngulation, arc: str, forward: bool = True) -> bool:
    """Dual of the flipped angulation agrees with the flipped dual."""
    B, _ = _flip(A, arc, forward)
    return dual_sgraph(B).same_as(sgraph_flip(dual_sgraph(A), arc, forward))
