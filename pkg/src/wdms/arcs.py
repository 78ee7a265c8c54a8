"""Graded closed arcs as reduced words over a ribbon graph.

A half-edge slot at a vertex is ``("e", edge, end)`` for an end of an
internal edge or ``("b", token)`` for an external half-edge (a boundary
stub).  Slots at a vertex are stored in clockwise order.

A word is a start vertex, the slot it leaves through at each visited
vertex, and the turn taken at every intermediate vertex.  A turn is the
signed number of clockwise slot steps from the arriving slot to the
leaving slot, so turns differing by the valency pass the vertex on
opposite sides.  A turn of 0 is a backtrack and never survives reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import ceil, floor

from .surface import WdmsError


class DistinctVertices(WdmsError):
    pass


class EndpointMismatch(WdmsError):
    pass


class DegenerateArc(WdmsError):
    pass


class NoSharedEndpoint(WdmsError):
    pass


class UnknownEdge(WdmsError):
    pass


@dataclass(frozen=True)
class SGraph:
    """Ribbon graph with graded edges.

    ``rotation`` maps a vertex to its clockwise tuple of slots, ``ends``
    maps an edge to its (end 0, end 1) vertices.
    """

    rotation: dict
    ends: dict
    shifts: dict = field(default_factory=dict)

    def valency(self, v: str) -> int:
        return len(self.rotation[v])

    def index_of(self, v: str, slot) -> int:
        return self.rotation[v].index(slot)

    def slot_at(self, v: str, i: int):
        rot = self.rotation[v]
        return rot[i % len(rot)]

    def far_end(self, slot):
        """(vertex, arriving slot) reached by leaving through ``slot``."""
        if slot[0] != "e":
            return None
        _, e, end = slot
        return self.ends[e][1 - end], ("e", e, 1 - end)

    def shift(self, e: str) -> int:
        return self.shifts.get(e, 0)

    def edge_word(self, e: str) -> "ClosedArcWord":
        if e not in self.ends:
            raise UnknownEdge(e)
        return ClosedArcWord(self.ends[e][0], (("e", e, 0),), (), self.shift(e))

    def key(self):
        """Hashable form; cyclic orders rotated to a canonical start."""
        rot = tuple(sorted((v, _min_rotation(s)) for v, s in self.rotation.items()))
        ends = tuple(sorted(self.ends.items()))
        sh = tuple(sorted((e, k) for e, k in self.shifts.items() if k))
        return rot, ends, sh

    def same_as(self, other: "SGraph") -> bool:
        return self.key() == other.key()


def _min_rotation(seq):
    seq = tuple(seq)
    if not seq:
        return seq
    rots = [seq[i:] + seq[:i] for i in range(len(seq))]
    return min(rots, key=lambda r: tuple(map(repr, r)))


@dataclass(frozen=True)
class ClosedArcWord:
    start: str
    slots: tuple
    turns: tuple
    grading: int = 0

    def __post_init__(self):
        if len(self.turns) != len(self.slots) - 1:
            raise ValueError("a word needs one turn between consecutive slots")

    def __len__(self) -> int:
        return len(self.slots)

    def end(self, S: SGraph):
        """(end vertex, arriving slot); None for a word ending in a stub."""
        return S.far_end(self.slots[-1])

    def shifted(self, n: int) -> "ClosedArcWord":
        return ClosedArcWord(self.start, self.slots, self.turns, self.grading + n)

    def text(self, S: SGraph) -> str:
        parts = []
        for i, s in enumerate(self.slots):
            tok = ("+" if s[2] == 0 else "-") + s[1] if s[0] == "e" else s[1]
            parts.append(tok if i == len(self.turns) else f"{tok}({self.turns[i]})")
        end = self.end(S)
        return f"{self.start} -{''.join(parts)}-> {end[0] if end else '|'} @{self.grading}"


def check_word(S: SGraph, w: ClosedArcWord) -> None:
    """Raise unless the slots and turns are consistent with the rotation."""
    v = w.start
    for i, s in enumerate(w.slots):
        if s not in S.rotation[v]:
            raise ValueError(f"slot {s} not at vertex {v}")
        if i == len(w.slots) - 1:
            break
        nxt = S.far_end(s)
        if nxt is None:
            raise ValueError("word continues after a stub")
        v, arr = nxt
        want = S.slot_at(v, S.index_of(v, arr) + w.turns[i])
        if want != w.slots[i + 1]:
            raise ValueError("turn does not reach the recorded slot")


def reduce_word(S: SGraph, w: ClosedArcWord) -> ClosedArcWord:
    """Cancel backtracks (a zero turn) until none remain.

    A backtrack at the very start rotates the initial germ, which is an
    isotopy fixing the endpoint; the grading is carried along unchanged.
    """
    start, slots, turns = w.start, list(w.slots), list(w.turns)
    changed = True
    while changed:
        changed = False
        for i, t in enumerate(turns):
            if t != 0:
                continue
            changed = True
            if len(slots) == 2:
                raise DegenerateArc("word reduces to a point")
            if i == 0:
                # e, 0, e-bar, t1, s2 ...  ->  start rotated by t1
                t1 = turns[1] if len(turns) > 1 else None
                if t1 is None:
                    raise DegenerateArc("word reduces to a point")
                slots = slots[2:]
                turns = turns[2:]
            elif i == len(turns) - 1:
                slots = slots[:-2]
                turns = turns[:-2]
            else:
                merged = turns[i - 1] + turns[i + 1]
                slots = slots[:i] + slots[i + 2:]
                turns = turns[:i - 1] + [merged] + turns[i + 2:]
            break
    return ClosedArcWord(start, tuple(slots), tuple(turns), w.grading)


def reverse_word(S: SGraph, w: ClosedArcWord) -> ClosedArcWord:
    end = w.end(S)
    if end is None:
        raise ValueError("cannot reverse a word ending in a stub")
    v, arr = end
    slots = [arr]
    cur = w.start
    path = [w.start]
    for s in w.slots[:-1]:
        cur = S.far_end(s)[0]
        path.append(cur)
    for s in reversed(w.slots[:-1]):
        slots.append(S.far_end(s)[1])
    return ClosedArcWord(v, tuple(slots), tuple(-t for t in reversed(w.turns)), w.grading)


def canonical_word(S: SGraph, w: ClosedArcWord) -> ClosedArcWord:
    """Orientation-free representative: the smaller of w and its reverse."""
    r = reverse_word(S, w)
    return min(w, r, key=lambda x: (x.start, tuple(map(repr, x.slots)), x.turns))


# -- germ order at a vertex -------------------------------------------------

def _turn_key(t):
    # further left (more counterclockwise at the start) sorts first
    return Fraction(0) if t is None else Fraction(-1, t)


def compare_germs(S: SGraph, a: ClosedArcWord, b: ClosedArcWord) -> int:
    """Clockwise order of two words leaving the same vertex.

    Returns -1 when ``a`` comes first going clockwise inside the common
    sector, 1 when ``b`` does and 0 for identical germs.  Words through
    the same slot are separated at the first vertex where they diverge:
    a smaller positive turn (or a larger negative one) stays further left.
    """
    if a.start != b.start:
        raise DistinctVertices(f"{a.start} != {b.start}")
    ia, ib = S.index_of(a.start, a.slots[0]), S.index_of(b.start, b.slots[0])
    if ia != ib:
        return -1 if ia < ib else 1
    n = max(len(a.turns), len(b.turns))
    for i in range(n):
        ta = a.turns[i] if i < len(a.turns) else None
        tb = b.turns[i] if i < len(b.turns) else None
        if ta == tb:
            continue
        ka, kb = _turn_key(ta), _turn_key(tb)
        return -1 if ka < kb else 1
    return 0


def sort_germs(S: SGraph, words: list) -> list:
    """Sort words leaving one vertex into clockwise order."""
    return sorted(words, key=cmp_to_key(lambda x, y: compare_germs(S, x, y)))


def sectors(S: SGraph, a: ClosedArcWord, b: ClosedArcWord) -> int:
    """Whole clockwise sectors swept from germ ``a`` to germ ``b``."""
    val = S.valency(a.start)
    ia, ib = S.index_of(a.start, a.slots[0]), S.index_of(b.start, b.slots[0])
    if ia != ib:
        return (ib - ia) % val
    c = compare_germs(S, a, b)
    return 0 if c < 0 else val


def corner_index(S: SGraph, v: str, slot1, slot2, shifts: dict | None = None) -> int:
    """Index from one edge end to another at a common vertex.

    Each clockwise step counts 1; the same slot is reached after a full
    turn, giving the valency.  Shifts enter as ind(a, b[n]) = ind(a, b) + n.
    """
    if slot1 not in S.rotation.get(v, ()) or slot2 not in S.rotation.get(v, ()):
        raise DistinctVertices("both ends must sit at the given vertex")
    val = S.valency(v)
    steps = (S.index_of(v, slot2) - S.index_of(v, slot1)) % val or val
    sh = S.shifts if shifts is None else shifts

    def lam(slot):
        return sh.get(slot[1], 0) if slot[0] == "e" else 0

    return steps + lam(slot2) - lam(slot1)


def dual_index(d: int) -> int:
    """Index of dual closed arcs from the index of open arcs."""
    return 1 - d


def oriented_from(S: SGraph, w: ClosedArcWord, z: str, at_end: bool = False) -> ClosedArcWord:
    """``w`` oriented to leave ``z`` (from its start, or its end if asked)."""
    if not at_end and w.start == z:
        return w
    r = reverse_word(S, w)
    if r.start == z:
        return r
    raise NoSharedEndpoint(f"word does not touch {z}")


def arc_index(S: SGraph, a: ClosedArcWord, b: ClosedArcWord) -> int:
    """Index at the common start vertex, germs compared as above."""
    return sectors(S, a, b) + b.grading - a.grading


def smooth(S: SGraph, a: ClosedArcWord, b: ClosedArcWord, z: str | None = None) -> ClosedArcWord:
    """Smoothing out: follow ``a`` into its end, turn clockwise onto ``b``.

    ``a`` must end where ``b`` starts.  The result carries the grading of
    ``a`` shifted by n = ind_z(a, b).
    """
    end = a.end(S)
    if end is None or (z is not None and end[0] != z) or end[0] != b.start:
        raise EndpointMismatch("first word must end where the second starts")
    z = end[0]
    ra = reverse_word(S, a)
    if compare_germs(S, ra, b) == 0:
        raise DegenerateArc("smoothing a word with its own reverse")
    turn = sectors(S, ra, b)
    n = arc_index(S, ra, b)
    w = ClosedArcWord(a.start, a.slots + b.slots, a.turns + (turn,) + b.turns, a.grading + n)
    return reduce_word(S, w)


# -- braid twists -----------------------------------------------------------

def braid_twist(S: SGraph, eta: str, w: ClosedArcWord, power: int = 1) -> ClosedArcWord:
    """Image of a word under the power of the braid twist along edge ``eta``.

    The positive twist rotates a disc around ``eta`` clockwise by a half
    turn, so an arc whose end is the nearest counterclockwise neighbour of
    ``eta`` is carried to ``w`` followed by ``eta``.  Gradings are carried
    along unchanged.
    """
    if power == 0:
        raise ValueError("power must be nonzero")
    u, v = S.ends[eta]
    if u == v:
        raise ValueError("braid twists need an edge between distinct vertices")
    if w.start not in (u, v) and (w.end(S) or (None,))[0] not in (u, v):
        raise NoSharedEndpoint(f"word does not touch {u} or {v}")
    for _ in range(abs(power)):
        w = _half_twist(S, eta, w, 1 if power > 0 else -1)
    return w


def extend_start(S: SGraph, eta: str, end: int, w: ClosedArcWord, sign: int) -> ClosedArcWord:
    """Slide the start of ``w`` along ``eta`` onto its other end.

    The start must sit next to end ``end`` of ``eta``; the new word runs
    along ``eta`` from the far end and turns one step onto ``w``.  This is
    the single half twist on that germ, and still makes sense when ``eta``
    is a loop.
    """
    e0, e1 = ("e", eta, 1 - end), ("e", eta, end)
    S.index_of(S.ends[eta][end], e1)
    out = ClosedArcWord(S.ends[eta][1 - end], (e0,) + w.slots, (-1 if sign > 0 else 1,) + w.turns,
                        w.grading)
    return reduce_word(S, out)


def twist_start(S: SGraph, eta: str, w: ClosedArcWord, power: int) -> ClosedArcWord:
    """Carry only the starting end of ``w`` through the twist.

    The germ is pushed along by the twist while the rest of the word, and
    its other end, stay where they are.
    """
    g = ClosedArcWord(w.start, w.slots[:1], ())
    for _ in range(abs(power)):
        g = _half_twist(S, eta, g, 1 if power > 0 else -1, open_end=True)
    out = ClosedArcWord(g.start, g.slots[:-1] + w.slots, g.turns + w.turns, w.grading)
    return reduce_word(S, out)


def _half_twist(S: SGraph, eta: str, w: ClosedArcWord, sign: int,
                open_end: bool = False) -> ClosedArcWord:
    u, v = S.ends[eta]
    eslot = {u: ("e", eta, 0), v: ("e", eta, 1)}
    other = {u: v, v: u}

    def pos(x, slot):
        val = S.valency(x)
        p = (S.index_of(x, slot) - S.index_of(x, eslot[x])) % val
        if sign < 0 and p == 0:
            p = val
        return p

    def tau(x, slot):
        # turn at x from the arriving eta slot to ``slot``
        return pos(x, slot) - S.valency(x) if sign > 0 else pos(x, slot)

    def junction(x, r, t):
        a, b = S.valency(x), S.valency(other[x])
        th = pos(x, r) + t
        if sign > 0:
            return b * floor(Fraction(th, a))
        return b * (ceil(Fraction(th, a)) - 1)

    slots, turns = [], []

    def germ(x, s):
        # image of the germ leaving x through s, appended to the output
        if x in eslot and s != eslot[x]:
            slots.append(eslot[other[x]])
            turns.append(tau(x, s))
        slots.append(eslot[other[x]] if x in eslot and s == eslot[x] else s)

    first = w.start
    start = other[first] if first in eslot else first
    germ(first, w.slots[0])
    cur, arr = S.far_end(w.slots[0]) if w.slots[0][0] == "e" else (None, None)
    for i, t in enumerate(w.turns):
        nxt = w.slots[i + 1]
        if cur in eslot:
            if arr != eslot[cur]:
                turns.append(-tau(cur, arr))
                slots.append(eslot[cur])
            turns.append(junction(cur, arr, t))
            if nxt != eslot[cur]:
                slots.append(eslot[other[cur]])
                turns.append(tau(cur, nxt))
                slots.append(nxt)
            else:
                slots.append(eslot[other[cur]])
        else:
            turns.append(t)
            slots.append(nxt)
        fe = S.far_end(nxt)
        cur, arr = fe if fe else (None, None)
    if not open_end and cur in eslot and arr != eslot[cur]:
        turns.append(-tau(cur, arr))
        slots.append(eslot[cur])
    out = ClosedArcWord(start, tuple(slots), tuple(turns), w.grading)
    return reduce_word(S, out)


def substitute(S_old: SGraph, S_new: SGraph, germs: dict, w: ClosedArcWord) -> ClosedArcWord:
    """Rewrite a word over ``S_new`` as a word over ``S_old``.

    ``germs`` gives, for every edge and stub of ``S_new``, a word over
    ``S_old`` running from its end 0 (stubs: from their vertex).  The germs
    leaving each vertex must sort into the rotation of ``S_new``; a turn
    at a vertex of ``S_new`` then becomes the turn between the two germs
    in ``S_old``, counting how often the sweep passes the origin slot.
    """
    rank, first = {}, {}
    for v, rot in S_new.rotation.items():
        lst = []
        for slot in rot:
            if slot[0] == "b":
                g = germs[slot[1]]
            else:
                g = germs[slot[1]]
                if slot[2] == 1:
                    g = reverse_word(S_old, g)
            lst.append((slot, g))
        order = sort_germs(S_old, [g for _, g in lst])
        pos = {id(g): i for i, g in enumerate(order)}
        ranks = [pos[id(g)] for _, g in lst]
        k = ranks.index(0)
        if ranks[k:] + ranks[:k] != list(range(len(ranks))):
            raise ValueError(f"germs at {v} do not follow the rotation")
        for (slot, g), r in zip(lst, ranks):
            rank[(v, slot)] = r
            first[(v, slot)] = g

    def leave(v, slot):
        return first[(v, slot)]

    cur = leave(w.start, w.slots[0])
    slots, turns = list(cur.slots), list(cur.turns)
    v = w.start
    for i, t in enumerate(w.turns):
        v, arr = S_new.far_end(w.slots[i])
        nxt = w.slots[i + 1]
        back, out = leave(v, arr), leave(v, nxt)
        n = S_new.valency(v)
        laps = (rank[(v, arr)] + t) // n
        T = (S_old.index_of(v, out.slots[0]) - S_old.index_of(v, back.slots[0])
             + S_old.valency(v) * laps)
        turns.append(T)
        slots.extend(out.slots)
        turns.extend(out.turns)
    return reduce_word(S_old, ClosedArcWord(w.start, tuple(slots), tuple(turns), w.grading))
