"""Collapsing a subsurface to a decorated disc, and lifting flips back.

A selection is a set of decorations.  Its polygons glue up to a
subsurface whose boundary walks ("frontier cycles") are read off polygon
by polygon; each frontier cycle made of arc sides becomes the boundary of
a new once-decorated polygon, while a cycle made of boundary segments is
an ambient boundary component swallowed whole.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arcs import ClosedArcWord, DegenerateArc, SGraph, reduce_word
from .flips import dual_sgraph, forward_flip, is_monogon_arc
from .surface import (ArcSide, BoundarySegment, MixedAngulation, Polygon, SurfaceSpec,
                      ValidationError, WdmsError, check_angulation, least_rotation)


class NonSimpleFrontier(WdmsError):
    pass


class DanglingBoundary(WdmsError):
    pass


class EmptySelection(WdmsError):
    pass


class NotCollapsedPolygon(WdmsError):
    pass


class NoValidRefinement(WdmsError):
    pass


class Vanished:
    """Image of an arc living entirely inside the collapsed part."""

    def __repr__(self) -> str:
        return "Vanished"

    def __eq__(self, other) -> bool:
        return isinstance(other, Vanished)

    def __hash__(self) -> int:
        return 0


VANISHED = Vanished()


@dataclass(frozen=True)
class Component:
    decorations: tuple
    arcs: tuple  # arcs with both sides inside
    cycles: tuple  # frontier cycles, each a tuple of arc sides
    enclosed: tuple  # ambient boundary names swallowed
    genus: int
    marked_points: int
    name: str


@dataclass(frozen=True)
class SubsurfaceSelection:
    decorations: frozenset
    arcs: frozenset
    components: tuple


def _walk_cycles(A: MixedAngulation, inside: set) -> list[tuple]:
    """Boundary walks of the selected region, as lists of sides."""
    loc = A.side_locations()
    seen, cycles = set(), []
    for pi in sorted(inside):
        p = A.polygons[pi]
        for k, s in enumerate(p.sides):
            if (pi, k) in seen or _crosses(A, loc, inside, s):
                continue
            cyc = []
            cur = (pi, k)
            while cur not in seen:
                seen.add(cur)
                cpi, ck = cur
                cyc.append(A.polygons[cpi].sides[ck])
                # next side after this one, crossing any internal arcs
                q, j = cpi, (ck + 1) % len(A.polygons[cpi].sides)
                while _crosses(A, loc, inside, A.polygons[q].sides[j]):
                    t = A.polygons[q].sides[j]
                    q, j = loc[ArcSide(t.arc, 1 - t.occ)]
                    j = (j + 1) % len(A.polygons[q].sides)
                cur = (q, j)
            cycles.append(tuple(cyc))
    return cycles


def _crosses(A, loc, inside, s) -> bool:
    return isinstance(s, ArcSide) and loc[ArcSide(s.arc, 1 - s.occ)][0] in inside


def component_name(decs) -> str:
    return "[" + "+".join(sorted(decs)) + "]"


def select_subsurface(A: MixedAngulation, decorations, strict: bool = True) -> SubsurfaceSelection:
    """Components, frontier cycles and swallowed boundaries of a selection.

    With ``strict`` off, a frontier may run along boundary segments; this
    is how a selection looks after flips have carried its arcs around and
    is only meant for re-collapsing such states.
    """
    D = frozenset(decorations)
    alld = {p.dec for p in A.polygons}
    if not D or D >= alld:
        raise EmptySelection("selection must be a nonempty proper subset of decorations")
    unknown = D - alld
    if unknown:
        raise ValidationError(f"unknown decorations {sorted(unknown)}")
    idx = {p.dec: i for i, p in enumerate(A.polygons)}
    inside = {idx[d] for d in D}
    loc = A.side_locations()
    sub_arcs = frozenset(a for a in A.arcs
                         if loc[ArcSide(a, 0)][0] in inside and loc[ArcSide(a, 1)][0] in inside)
    # components through internal arcs
    comps, left = [], set(inside)
    while left:
        root = min(left, key=lambda i: A.polygons[i].dec)
        comp, stack = {root}, [root]
        while stack:
            i = stack.pop()
            for s in A.polygons[i].sides:
                if isinstance(s, ArcSide) and s.arc in sub_arcs:
                    j = loc[ArcSide(s.arc, 1 - s.occ)][0]
                    if j not in comp:
                        comp.add(j)
                        stack.append(j)
        left -= comp
        comps.append(comp)
    records = []
    for comp in sorted(comps, key=lambda c: min(A.polygons[i].dec for i in c)):
        decs = tuple(sorted(A.polygons[i].dec for i in comp))
        arcs_in = tuple(sorted({s.arc for i in comp for s in A.polygons[i].sides
                                if isinstance(s, ArcSide) and s.arc in sub_arcs}))
        fronts, enclosed = [], []
        for cyc in _walk_cycles(A, comp):
            kinds = {isinstance(s, BoundarySegment) for s in cyc}
            if kinds == {True}:
                names = {s.boundary for s in cyc}
                full = {b for b, n in A.spec.boundaries if b in names and n == len(cyc)}
                if len(names) != 1 or not full:
                    raise DanglingBoundary(f"boundary walk {[s.token() for s in cyc]} is not a whole component")
                enclosed.append(names.pop())
            elif kinds == {False}:
                arcs_on = [s.arc for s in cyc]
                if not strict:
                    fronts.append(cyc)
                    continue
                if len(set(arcs_on)) != len(arcs_on):
                    raise NonSimpleFrontier(f"arc repeated on frontier {arcs_on}")
                fronts.append(cyc)
            elif not strict:
                fronts.append(cyc)
            else:
                raise DanglingBoundary(
                    f"frontier {[s.token() for s in cyc]} mixes arcs and boundary segments")
        if not fronts:
            raise NonSimpleFrontier(f"component {decs} has no frontier")
        nb = len(fronts) + len(enclosed)
        chi = len(comp) - len(arcs_in)
        genus, rem = divmod(2 - nb - chi, 2)
        if rem or genus < 0:
            raise NonSimpleFrontier(f"component {decs} has inconsistent Euler count")
        marks = sum(len(c) for c in fronts) + sum(dict(A.spec.boundaries)[b] for b in enclosed)
        records.append(Component(decs, arcs_in, tuple(fronts), tuple(sorted(enclosed)), genus,
                                 marks, component_name(decs)))
    return SubsurfaceSelection(D, sub_arcs, tuple(records))


@dataclass(frozen=True)
class CollapseContext:
    A: MixedAngulation  # the refinement, as selected
    selection: SubsurfaceSelection
    collapsed: MixedAngulation
    new_decorations: tuple  # (name, weight, component name)
    kept_arcs: tuple
    vanished_arcs: tuple
    interior: tuple = field(default=())  # (component name, its polygons)

    @property
    def spec(self) -> SurfaceSpec:
        return self.collapsed.spec


def collapse(A: MixedAngulation, sel: SubsurfaceSelection | None = None, decorations=None,
             strict: bool = True) -> CollapseContext:
    """Replace each frontier cycle by a once-decorated polygon."""
    if sel is None:
        sel = select_subsurface(A, decorations, strict)
    polys = [p for p in A.polygons if p.dec not in sel.decorations]
    new_decs, interior, dropped = [], [], set()
    for comp in sel.components:
        for k, cyc in enumerate(comp.cycles):
            name = comp.name if len(comp.cycles) == 1 else f"{comp.name}.{k}"
            polys.append(Polygon(name, least_rotation(cyc)))
            new_decs.append((name, len(cyc) - 2, comp.name))
        dropped |= set(comp.enclosed)
        interior.append((comp.name, tuple(p for p in A.polygons if p.dec in comp.decorations)))
    decs = tuple((d, w) for d, w in A.spec.decorations if d not in sel.decorations) + tuple(
        (n, w) for n, w, _ in new_decs)
    bds = tuple((b, n) for b, n in A.spec.boundaries if b not in dropped)
    chi = len(polys) - (len(A.arcs) - len(sel.arcs))
    genus, rem = divmod(2 - len(bds) - chi, 2)
    if rem or genus < 0:
        raise NonSimpleFrontier("collapsed surface has inconsistent Euler count")
    spec = SurfaceSpec(genus, bds, decs)
    shifts = tuple((a, v) for a, v in A.shifts if a not in sel.arcs)
    B = MixedAngulation(spec, tuple(polys), shifts)
    try:
        check_angulation(B)
    except ValidationError as exc:
        raise NonSimpleFrontier(f"collapse is not a valid angulation: {exc}") from exc
    kept = tuple(a for a in A.arcs if a not in sel.arcs)
    return CollapseContext(A, sel, B, tuple(new_decs), kept, tuple(sorted(sel.arcs)), tuple(interior))


def recollapse(ctx: CollapseContext, A2: MixedAngulation) -> MixedAngulation:
    """Collapse another angulation along the same decorations."""
    return collapse(A2, decorations=ctx.selection.decorations, strict=False).collapsed


# -- arcs through the collapsed part ----------------------------------------

def _lin(S: SGraph, v: str, slot, origin) -> int:
    return (S.index_of(v, slot) - S.index_of(v, origin)) % S.valency(v)


def _visits(S: SGraph, w: ClosedArcWord):
    """(vertex, in slot or None, turn or None, out slot or None) per visit."""
    out = [(w.start, None, None, w.slots[0])]
    for i, s in enumerate(w.slots):
        fe = S.far_end(s)
        if fe is None:
            break
        v, arr = fe
        if i + 1 < len(w.slots):
            out.append((v, arr, w.turns[i], w.slots[i + 1]))
        else:
            out.append((v, arr, None, None))
    return out


def _from_visits(visits, grading) -> ClosedArcWord | None:
    slots = [visits[0][3]]
    turns = []
    for v, r, t, s in visits[1:]:
        if s is None:
            break
        turns.append(t)
        slots.append(s)
    return ClosedArcWord(visits[0][0], tuple(slots), tuple(turns), grading)


def contract_edge(S: SGraph, e: str, words: list):
    """Contract a non-loop edge; returns the new graph and rewritten words.

    Words running only along ``e`` become None.
    """
    u, v = S.ends[e]
    if u == v:
        raise ValueError("cannot contract a loop")
    eu, ev = ("e", e, 0), ("e", e, 1)
    ru, rv = S.rotation[u], S.rotation[v]
    iu, iv = ru.index(eu), rv.index(ev)
    a = ru[iu + 1:] + ru[:iu]
    b = rv[iv + 1:] + rv[:iv]
    merged = a + b
    n = len(merged)
    pos = {x: i for i, x in enumerate(merged)}
    rotation = {x: r for x, r in S.rotation.items() if x not in (u, v)}
    rotation[u] = merged
    ends = {}
    for f, (x, y) in S.ends.items():
        if f == e:
            continue
        ends[f] = (u if x == v else x, u if y == v else y)
    T = SGraph(rotation, ends, {f: k for f, k in S.shifts.items() if f != e})

    p, q = len(a), len(b)
    # Lifted merged coordinates, doubled so the two sides of the contracted
    # edge sit on odd numbers: 2p - 1 between a and b, -1 between b and a.
    off = {u: 0, v: 2 * p}
    size = {u: p, v: q}

    def place(x, ell):
        val = size[x] + 1
        j, r = divmod(ell, val)
        return off[x] + 2 * (r - 1) + 2 * n * j

    def sweep(x, start, t, s, gap):
        """Doubled merged displacement for a turn ``t`` at ``x``."""
        val = size[x] + 1
        e_end = eu if x == u else ev
        if start == e_end:
            # leaving along the edge: the side is fixed by the direction
            ell0 = 0 if t > 0 else val
            pos0 = off[x] - 1 if t > 0 else off[x] + 2 * size[x] - 1
            if gap is not None and (pos0 - gap) % (2 * n):
                # the path crosses over to the other side of the edge;
                # take the counterclockwise way round
                pos0 = gap - ((gap - pos0) % (2 * n))
            elif gap is not None:
                pos0 = gap
        else:
            ell0 = _lin(S, x, start, e_end)
            pos0 = None
        ell1 = ell0 + t
        if s == e_end:
            end = (off[x] + 2 * size[x] - 1 if t > 0 else off[x] - 1)
            j = (ell1 - 1) // val if t > 0 else ell1 // val
            end += 2 * n * j
        else:
            end = place(x, ell1)
        begin = place(x, ell0) if pos0 is None else None
        if pos0 is not None:
            # express the end relative to the chosen start side
            base = off[x] - 1 if t > 0 else off[x] + 2 * size[x] - 1
            return pos0, end - base + pos0
        return begin, end

    new_words = []
    for w in words:
        if w is None:
            new_words.append(None)
            continue
        vis = _visits(S, w)
        out = []
        i = 0
        while i < len(vis):
            x, r, t, s = vis[i]
            if x not in (u, v):
                out.append((x, r, t, s))
                i += 1
                continue
            # gather the run of visits joined through e
            run = [vis[i]]
            while run[-1][3] in (eu, ev) and i + 1 < len(vis):
                i += 1
                run.append(vis[i])
            i += 1
            r0, s1 = run[0][1], run[-1][3]
            if r0 is None and s1 is None:
                out.append((u, None, None, None))
                continue
            if r0 is None or s1 is None:
                out.append((u, r0, None, s1))
                continue
            gap = None
            first = None
            for (x1, rr, tt, ss) in run:
                begin, gap = sweep(x1, rr, tt, ss, gap)
                if first is None:
                    first = begin
            turn = (gap - first) // 2
            out.append((u, r0, turn, s1))
        new_words.append(_rebuild(T, out, w.grading))
    return T, new_words


def _rebuild(T: SGraph, visits, grading):
    if visits[0][3] is None:
        return None
    slots = [visits[0][3]]
    turns = []
    for x, r, t, s in visits[1:]:
        if s is None:
            break
        turns.append(t)
        slots.append(s)
    try:
        return reduce_word(T, ClosedArcWord(visits[0][0], tuple(slots), tuple(turns), grading))
    except DegenerateArc:
        # homotopic into the collapsed part
        return None


def prune_vertex(S: SGraph, w0: str, loops: list, stubs: set, words: list):
    """Remove loops and stubs at ``w0``, keeping only the other slots.

    Sweeps are measured by how many kept slots they pass.  A path running
    round a loop is pulled across the side of the loop holding no kept
    slot, which is the side that closes up into a disc once the removed
    stubs are filled in; when both sides hold kept slots the clockwise
    side is used.
    """
    rot = S.rotation[w0]
    val = len(rot)
    gone = set(stubs) | {("e", f, k) for f in loops for k in (0, 1)}
    keep = tuple(x for x in rot if x not in gone)
    surv = [x not in gone for x in rot]
    rotation = dict(S.rotation)
    rotation[w0] = keep
    T = SGraph(rotation, {g: e for g, e in S.ends.items() if g not in loops},
               {g: k for g, k in S.shifts.items() if g not in loops})

    def F(p):
        # kept slots in the lifted interval [0, p), up to a constant
        q, r = divmod(p, val)
        return q * len(keep) + sum(surv[:r])

    def jump(x, y):
        # lifted displacement from loop end x to loop end y
        ix, iy = rot.index(x), rot.index(y)
        cw = (iy - ix) % val
        if not any(surv[(ix + k) % val] for k in range(1, cw)):
            return cw
        if not any(surv[(iy + k) % val] for k in range(1, val - cw)):
            return cw - val
        return cw

    new_words = []
    for w in words:
        if w is None or (w.slots[-1] in stubs and w.end(S) is None):
            new_words.append(None)
            continue
        vis = _visits(S, w)
        out = []
        i = 0
        while i < len(vis):
            v, r, t, s = vis[i]
            if v != w0:
                out.append((v, r, t, s))
                i += 1
                continue
            run = [vis[i]]
            while run[-1][3] in gone and i + 1 < len(vis):
                i += 1
                run.append(vis[i])
            i += 1
            r0, s1 = run[0][1], run[-1][3]
            if s1 in gone:
                s1 = None
            if r0 is None or s1 is None:
                out.append((w0, r0, None, s1))
                continue
            p = start = rot.index(r0)
            for k, (_, rr, tt, ss) in enumerate(run):
                p += tt
                if k + 1 < len(run):
                    p += jump(ss, run[k + 1][1])
            out.append((w0, r0, F(p + 1) - F(start + 1), s1))
        new_words.append(_rebuild(T, out, w.grading))
    return T, new_words


def _spanning_tree(S: SGraph, comp: Component) -> list:
    root = comp.decorations[0]
    tree, seen, order = [], {root}, [root]
    while order:
        x = order.pop(0)
        for slot in S.rotation[x]:
            if slot[0] == "e" and slot[1] in comp.arcs:
                y = S.far_end(slot)[0]
                if y not in seen:
                    seen.add(y)
                    tree.append(slot[1])
                    order.append(y)
    return tree


def _contract_component(S: SGraph, comp: Component, words: list):
    tree = _spanning_tree(S, comp)
    for e in tree:
        S, words = contract_edge(S, e, words)
    (rep,) = [d for d in comp.decorations if d in S.rotation]
    # leftover internal arcs are loops; stubs of swallowed boundaries go
    # too, and arcs ending on them vanish
    loops = [f for f in comp.arcs if f not in tree]
    stubs = {sl for sl in S.rotation[rep]
             if sl[0] == "b" and sl[1].split(":")[1].split(".")[0] in comp.enclosed}
    if loops or stubs:
        S, words = prune_vertex(S, rep, loops, stubs, words)
    S = _rename(S, rep, comp.name)
    words = [None if w is None else _rename_word(w, rep, comp.name) for w in words]
    return S, words


def collapse_words(ctx: CollapseContext, words: list) -> list:
    """Images of words over the refinement's dual graph, or ``VANISHED``.

    Each component is contracted along a spanning tree of its internal
    arcs; any internal arcs left over are loops and get deleted.
    """
    _, out = _contracted(ctx, list(words))
    return [VANISHED if w is None else w for w in out]


def collapse_arc(ctx: CollapseContext, w: ClosedArcWord):
    return collapse_words(ctx, [w])[0]


def collapsed_graph(ctx: CollapseContext) -> SGraph:
    """The refinement's dual graph with every component contracted."""
    return _contracted(ctx, [])[0]


def _contracted(ctx: CollapseContext, words: list):
    S = dual_sgraph(ctx.A)
    for comp in ctx.selection.components:
        if len(comp.cycles) != 1:
            raise NonSimpleFrontier("arc collapse needs one frontier cycle per component")
    for comp in ctx.selection.components:
        S, words = _contract_component(S, comp, words)
    return S, words


def _rename(S: SGraph, old: str, new: str) -> SGraph:
    rot = {(new if v == old else v): r for v, r in S.rotation.items()}
    ends = {e: tuple(new if x == old else x for x in xy) for e, xy in S.ends.items()}
    return SGraph(rot, ends, dict(S.shifts))


def _rename_word(w: ClosedArcWord, old: str, new: str) -> ClosedArcWord:
    return ClosedArcWord(new if w.start == old else w.start, w.slots, w.turns, w.grading)


# -- lifting flips ----------------------------------------------------------

def same_state(A: MixedAngulation, B: MixedAngulation, graded: bool = False) -> bool:
    """Equal up to renaming arcs and decorations; shifts too if ``graded``."""
    from .exchange import canonical_key
    return canonical_key(A, graded) == canonical_key(B, graded)


def same_angulation(A: MixedAngulation, B: MixedAngulation) -> bool:
    """Equal up to the order polygons and decorations are listed in."""
    def norm(X):
        spec = (X.spec.genus, tuple(sorted(X.spec.boundaries)), tuple(sorted(X.spec.decorations)))
        return spec, tuple(sorted((p.dec, p.sides) for p in X.polygons)), tuple(sorted(X.shifts))
    return norm(A) == norm(B)


def _collapsed_polygon(ctx: CollapseContext, arc: str):
    """(polygon, component) of a new decoration with ``arc`` on its boundary."""
    if arc not in ctx.collapsed.arcs:
        raise UnknownArcError(arc)
    comps = {n: c for n, _, c in ctx.new_decorations}
    byname = {c.name: c for c in ctx.selection.components}
    for p in ctx.collapsed.polygons:
        if p.dec in comps and any(isinstance(s, ArcSide) and s.arc == arc for s in p.sides):
            return p, byname[comps[p.dec]]
    return None, None


class UnknownArcError(WdmsError):
    pass


def classify_flip_type(ctx: CollapseContext, arc: str) -> str:
    """"I", "II", "III", "IV", or "plain" when no collapsed polygon is met."""
    P, comp = _collapsed_polygon(ctx, arc)
    if P is None:
        return "plain"
    N = len(P.sides)
    if N >= 3:
        return "I"
    if N == 2:
        ws = [ctx.A.spec.weight(d) for d in comp.decorations]
        return "II" if all(w == 0 for w in ws) else "I"
    return "III" if comp.enclosed else "IV"


def _inner_side(A: MixedAngulation, sel: SubsurfaceSelection, arc: str):
    """(polygon index, position) of the copy of ``arc`` facing the selection."""
    for o in (0, 1):
        pi, k = A.occurrence(arc, o)
        if A.polygons[pi].dec in sel.decorations:
            return pi, k
    raise NotCollapsedPolygon(f"{arc} does not touch the selection")


def _chain(A: MixedAngulation, sel: SubsurfaceSelection, arc: str) -> list:
    """Internal arcs met walking a strip of bigons away from ``arc``."""
    out = []
    pi, k = _inner_side(A, sel, arc)
    loc = A.side_locations()
    while True:
        p = A.polygons[pi]
        if len(p.sides) != 2:
            raise NoValidRefinement(f"{p.dec} is not a bigon")
        nxt = p.sides[1 - k]
        if nxt.arc not in sel.arcs:
            return out
        out.append(nxt.arc)
        pi, k = loc[ArcSide(nxt.arc, 1 - nxt.occ)]


def _outer_side(A: MixedAngulation, sel: SubsurfaceSelection, arc: str):
    for o in (0, 1):
        pi, k = A.occurrence(arc, o)
        if A.polygons[pi].dec not in sel.decorations:
            return pi, k
    raise NotCollapsedPolygon(f"{arc} has no side outside the selection")


def _half_token(s):
    """A side as the half-edge it puts at the corner it ends in."""
    return ("b", s.token()) if isinstance(s, BoundarySegment) else (s.arc, 1 - s.occ)


def half_edges_at(A: MixedAngulation, corner) -> list:
    """Half-edges at the marked point of ``corner``, clockwise.

    Arc half-edges are ``(arc, occ)`` for the copy of the arc leaving the
    point; boundary segments appear as ``("b", token)`` at the two ends.
    """
    for mp in A.marked_points():
        if corner in mp.corners:
            ccw = [("b", mp.incoming.token())]
            for pi, ci in mp.corners[:-1]:
                p = A.polygons[pi]
                s = p.sides[(ci + 1) % len(p.sides)]
                ccw.append((s.arc, s.occ))
            ccw.append(("b", mp.outgoing.token()))
            return ccw[::-1]
    raise ValueError(f"corner {corner} not found")


@dataclass(frozen=True)
class Lift:
    kind: str
    refinement: MixedAngulation
    flips: tuple
    half_edges: tuple = ()  # arc half-edges at A before each type IV flip, then at the end
    preparation: tuple = ()  # internal flips taking the given refinement to ``refinement``


def _type_iv(A: MixedAngulation, sel: SubsurfaceSelection, arc: str):
    """Iterated flips pushing every half-edge at A over to B.

    Half-edges at A are read clockwise with the side through which the
    arc leaves A (towards B) put last.  From a non-monogon arc the next
    arc is the one owning the half-edge right after its left half-edge;
    after a monogon arc, the previously flipped arc comes back.
    """
    qi, k = _outer_side(A, sel, arc)
    Q = A.polygons[qi]
    corner = (qi, (k - 1) % len(Q.sides))
    e_A = _half_token(Q.sides[(k - 1) % len(Q.sides)])

    def order(X):
        # locate A again through the side that stays put at it
        for mp in X.marked_points():
            hs = None
            for pi, ci in mp.corners:
                p = X.polygons[pi]
                if _half_token(p.sides[ci]) == e_A:
                    hs = half_edges_at(X, (pi, ci))
                    break
            if hs is not None:
                i = hs.index(e_A)
                hs = hs[i + 1:] + hs[:i]
                return [h for h in hs if h[0] != "b"]
        raise NoValidRefinement("lost track of the marked point A")

    hs = order(A)
    cur = arc
    L = next(h for h in hs if h[0] == arc)
    prev, flips, counts = None, [], []
    for _ in range(8 * len(A.arcs) + 8):
        hs = order(A)
        counts.append(len(hs))
        nxt = nL = None
        if flips and is_monogon_arc(A, cur):
            nxt = prev
        else:
            i = hs.index(L)
            if i + 1 < len(hs):
                nL = hs[i + 1]
                nxt = nL[0]
                R = [j for j, h in enumerate(hs) if h[0] == cur and h != L]
                if R and R[0] < i + 1:
                    raise NoValidRefinement(f"half-edge order broken at {cur}")
        A, _ = forward_flip(A, cur)
        flips.append(cur)
        if nxt is None:
            break
        prev, cur = cur, nxt
        if nL is None:
            mine = [h for h in order(A) if h[0] == cur]
            if not mine:
                break
            L = mine[0]
        else:
            L = nL
    else:
        raise NoValidRefinement("type IV procedure did not stop")
    counts.append(len(order(A)))
    return tuple(flips), tuple(counts)


def _sequence(ctx: CollapseContext, A: MixedAngulation, arc: str, kind: str):
    sel = ctx.selection
    if kind in ("plain", "I"):
        if kind == "I":
            pi, k = _inner_side(A, sel, arc)
            p = A.polygons[pi]
            before = p.sides[(k - 1) % len(p.sides)]
            if isinstance(before, ArcSide) and before.arc in sel.arcs:
                raise NoValidRefinement("angle before the arc is not a frontier angle")
        return (arc,), ()
    if kind == "II":
        return (arc,) + tuple(_chain(A, sel, arc)), ()
    if kind == "III":
        # the internal arcs to the inner marked point, nearest first
        pi, k = _inner_side(A, sel, arc)
        p = A.polygons[pi]
        n = len(p.sides)
        out = []
        for j in range(1, n):
            s = p.sides[(k - j) % n]
            if not (isinstance(s, ArcSide) and s.arc in sel.arcs):
                break
            if s.arc not in out:
                out.append(s.arc)
        if not out or len(out) > 2:
            raise NoValidRefinement("no arcs to the inner marked point next to the lifted arc")
        return (arc,) + tuple(out), ()
    return _type_iv(A, sel, arc)


def _verify(ctx: CollapseContext, A: MixedAngulation, flips, arc: str) -> bool:
    B = A
    try:
        for f in flips:
            B, _ = forward_flip(B, f)
        image = collapse(B, decorations=ctx.selection.decorations, strict=False).collapsed
    except WdmsError:
        return False
    return same_state(image, forward_flip(ctx.collapsed, arc)[0], graded=False)


def refine(ctx: CollapseContext, arc: str, kind: str | None = None, depth: int = 4) -> MixedAngulation:
    """A refinement of the collapsed angulation suited to lifting ``arc``.

    The stored one is tried first; otherwise internal arcs are flipped,
    breadth first, which leaves the collapse untouched.
    """
    return _refine(ctx, arc, kind, depth)[0]


def _refine(ctx, arc, kind=None, depth=4):
    kind = kind or classify_flip_type(ctx, arc)
    frontier = [(ctx.A, ())]
    seen = {_plain_key(ctx.A)}
    while frontier:
        A, path = frontier.pop(0)
        try:
            flips, _ = _sequence(ctx, A, arc, kind)
            if _verify(ctx, A, flips, arc):
                return A, path
        except NoValidRefinement:
            pass
        if len(path) == depth:
            continue
        for a in sorted(ctx.selection.arcs):
            B, _ = forward_flip(A, a)
            key = _plain_key(B)
            if key not in seen:
                seen.add(key)
                frontier.append((B, path + (a,)))
    raise NoValidRefinement(f"no refinement lifts a flip of {arc}")


def _plain_key(A: MixedAngulation):
    return tuple(sorted((p.dec, p.sides) for p in A.polygons))


def lift_flip(ctx: CollapseContext, arc: str) -> Lift:
    """Forward flips on a refinement realising the flip of ``arc`` below."""
    kind = classify_flip_type(ctx, arc)
    A, prep = _refine(ctx, arc, kind)
    flips, counts = _sequence(ctx, A, arc, kind)
    return Lift(kind, A, flips, counts, prep)


def apply_lift(lift: Lift) -> MixedAngulation:
    A = lift.refinement
    for f in lift.flips:
        A, _ = forward_flip(A, f)
    return A
