"""Ribbon graphs for the perverse-schober side.

Only the half-edge combinatorics is modelled here.  Stalk categories and
the functors between them are opaque labels carried by ``sod_record``.

Half-edges are plain string tokens.  Each vertex lists its half-edges
clockwise; ``twin`` pairs the half-edges of internal edges, and anything
unpaired is external (a leg running off to the boundary).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .surface import MixedAngulation, WdmsError


class GraphError(WdmsError):
    pass


class NotInduced(GraphError):
    pass


class Disconnected(GraphError):
    pass


class ShapeMismatch(GraphError):
    pass


def _cyclic_min(seq) -> tuple:
    seq = tuple(seq)
    if not seq:
        return seq
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


@dataclass(frozen=True)
class RibbonGraph:
    rotation: dict  # vertex -> clockwise tuple of half-edge tokens
    twin: dict  # half-edge -> half-edge, an involution on internal ones

    def __post_init__(self):
        owner = {}
        for v, hs in self.rotation.items():
            for h in hs:
                if h in owner:
                    raise GraphError(f"half-edge {h} appears twice")
                owner[h] = v
        for h, k in self.twin.items():
            if h == k or self.twin.get(k) != h:
                raise GraphError(f"twin of {h} is not an involution")
            if h not in owner:
                raise GraphError(f"unknown half-edge {h}")
        object.__setattr__(self, "_owner", owner)

    @property
    def vertices(self) -> list:
        return list(self.rotation)

    def vertex_of(self, h: str) -> str:
        return self._owner[h]

    def half_edges(self) -> list:
        return [h for hs in self.rotation.values() for h in hs]

    def external(self) -> list:
        return [h for h in self.half_edges() if h not in self.twin]

    def edges(self) -> list:
        """Internal edges as sorted token pairs."""
        return sorted({tuple(sorted((h, k))) for h, k in self.twin.items()})

    def euler_characteristic(self) -> int:
        return len(self.rotation) - len(self.edges())

    def components(self) -> list:
        seen, comps = set(), []
        for v in self.rotation:
            if v in seen:
                continue
            comp, queue = {v}, deque([v])
            seen.add(v)
            while queue:
                x = queue.popleft()
                for h in self.rotation[x]:
                    if h in self.twin:
                        y = self.vertex_of(self.twin[h])
                        if y not in seen:
                            seen.add(y)
                            comp.add(y)
                            queue.append(y)
            comps.append(comp)
        return comps

    def key(self):
        rot = tuple(sorted((v, _cyclic_min(hs)) for v, hs in self.rotation.items()))
        return rot, tuple(self.edges())

    def same_as(self, other: "RibbonGraph") -> bool:
        return self.key() == other.key()

    # -- text ----------------------------------------------------------
    def text(self) -> str:
        lines = [f"vertex {v}: {' '.join(hs)}" for v, hs in self.rotation.items()]
        lines += [f"edge {a} = {b}" for a, b in self.edges()]
        return "\n".join(lines) + "\n"

    def dot(self) -> str:
        lines = ["graph G {"]
        for v in self.rotation:
            lines.append(f'  "{v}";')
        for a, b in self.edges():
            lines.append(f'  "{self.vertex_of(a)}" -- "{self.vertex_of(b)}" [label="{a}={b}"];')
        for h in sorted(self.external()):
            lines.append(f'  "{h}" [shape=point];')
            lines.append(f'  "{self.vertex_of(h)}" -- "{h}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


_VERTEX = re.compile(r"^vertex\s+(\S+?)\s*:\s*(.*)$")
_EDGE = re.compile(r"^edge\s+(\S+)\s*=\s*(\S+)$")


def parse_graph(text: str) -> RibbonGraph:
    from .io import ParseError

    rotation, twin = {}, {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _VERTEX.match(line)
        if m:
            if m.group(1) in rotation:
                raise ParseError(n, 1, f"vertex {m.group(1)} declared twice")
            rotation[m.group(1)] = tuple(m.group(2).split())
            continue
        m = _EDGE.match(line)
        if m:
            a, b = m.groups()
            if a in twin or b in twin:
                raise ParseError(n, 1, "half-edge paired twice")
            twin[a], twin[b] = b, a
            continue
        raise ParseError(n, 1, f"cannot read {line!r}")
    return RibbonGraph(rotation, twin)


def from_sgraph(S) -> RibbonGraph:
    """The ribbon graph underlying an S-graph; boundary stubs become legs."""

    def tok(slot):
        return f"{slot[1]}.{slot[2]}" if slot[0] == "e" else slot[1].replace("bseg:", "b")

    rotation = {v: tuple(tok(s) for s in rot) for v, rot in S.rotation.items()}
    twin = {}
    for e in S.ends:
        twin[f"{e}.0"], twin[f"{e}.1"] = f"{e}.1", f"{e}.0"
    return RibbonGraph(rotation, twin)


def spider(n: int, centre: str = "v") -> RibbonGraph:
    return RibbonGraph({centre: tuple(f"e{i}" for i in range(1, n + 1))}, {})


# -- exit paths ------------------------------------------------------------

@dataclass(frozen=True)
class ExitPathCategory:
    objects: tuple  # vertices, then edges (internal pairs and legs)
    morphisms: tuple  # (half-edge, vertex, edge) generators

    def hom(self, a, b) -> list:
        if a == b:
            return ["id"]
        return [h for h, v, e in self.morphisms if v == a and e == b]


def exit_paths(G: RibbonGraph) -> ExitPathCategory:
    """Vertices and edges as objects, one generator per half-edge."""
    edge_of = {}
    for a, b in G.edges():
        edge_of[a] = edge_of[b] = f"{a}={b}"
    for h in G.external():
        edge_of[h] = h
    edges = sorted(set(edge_of.values()))
    gens = tuple((h, G.vertex_of(h), edge_of[h]) for h in G.half_edges())
    return ExitPathCategory(tuple(G.vertices) + tuple(edges), gens)


def is_spanning(G, A: MixedAngulation) -> bool:
    """Euler characteristic and connectivity match the surface of ``A``."""
    if not isinstance(G, RibbonGraph):
        G = from_sgraph(G)
    if len(G.components()) != 1:
        return False
    chi = 2 - 2 * A.spec.genus - len(A.spec.boundaries)
    return G.euler_characteristic() == chi


# -- collapse --------------------------------------------------------------

@dataclass(frozen=True)
class CollapseBookkeeping:
    sub: tuple  # collapsed vertices
    vertex: str  # the new vertex
    phi: dict  # new label -> original external half-edge
    psi: dict  # internal half-edge -> its twin inside the subgraph
    arity: int
    cycles: tuple = field(default=())  # boundary traversal, one tuple per cycle

    @property
    def labels(self) -> tuple:
        return tuple(self.phi)


def _check_sub(G: RibbonGraph, sub, edges):
    sub = list(dict.fromkeys(sub))
    if not sub:
        raise Disconnected("empty subgraph")
    unknown = [v for v in sub if v not in G.rotation]
    if unknown:
        raise GraphError(f"unknown vertex {unknown[0]}")
    inside = set(sub)
    full = {e for e in G.edges() if G.vertex_of(e[0]) in inside and G.vertex_of(e[1]) in inside}
    if edges is not None:
        given = {tuple(sorted(e)) for e in edges}
        if given - full:
            raise NotInduced("edge outside the subgraph's vertices")
        if given != full:
            raise NotInduced("subgraph misses an edge between its vertices")
    H = RibbonGraph({v: G.rotation[v] for v in sub},
                    {h: k for a, b in full for h, k in ((a, b), (b, a))})
    if len(H.components()) != 1:
        raise Disconnected("subgraph is not connected")
    return sub, full


def boundary_cycles(G: RibbonGraph, sub) -> list:
    """Boundary walk of a thickened subgraph, as cycles of outgoing half-edges.

    Walking along the boundary with the region on the right, each step
    moves to the next half-edge clockwise; internal half-edges are crossed
    to their twins.  Every half-edge of the region leaving it appears on
    exactly one cycle.
    """
    inside = set(sub)

    def internal(h):
        return h in G.twin and G.vertex_of(G.twin[h]) in inside

    def step(h):
        v = G.vertex_of(h)
        rot = G.rotation[v]
        return rot[(rot.index(h) + 1) % len(rot)]

    corners = [h for v in sub for h in G.rotation[v]]
    seen, cycles = set(), []
    for h0 in corners:
        if h0 in seen:
            continue
        cyc, h = [], h0
        while h not in seen:
            seen.add(h)
            if internal(h):
                h = step(G.twin[h])
            else:
                cyc.append(h)
                h = step(h)
        cycles.append(tuple(cyc))
    return cycles


def collapse_graph(G: RibbonGraph, sub, edges=None, name: str | None = None, prefix: str = "ebar"):
    """Contract an induced connected subgraph to one vertex.

    The new vertex keeps the half-edges leaving the subgraph in the order
    met along the boundary of the thickened subgraph, and they are
    relabelled ``ebar1, ebar2, ...``.  A region with several boundary
    cycles lists them one after another, each starting from its least
    token and the cycles ordered by that token.
    """
    sub, full = _check_sub(G, sub, edges)
    inside = set(sub)
    name = name or "[" + "+".join(sub) + "]"
    cycles = [c for c in boundary_cycles(G, sub) if c]
    ordered = []
    for c in sorted(cycles, key=min):
        i = c.index(min(c))
        ordered.extend(c[i:] + c[:i])
    phi = {f"{prefix}{i}": h for i, h in enumerate(ordered, 1)}
    new = {h: lab for lab, h in phi.items()}
    rotation = {}
    for v, hs in G.rotation.items():
        if v in inside:
            continue
        rotation[v] = tuple(new.get(h, h) for h in hs)
    rotation[name] = tuple(phi)
    twin = {}
    for h, k in G.twin.items():
        if G.vertex_of(h) in inside and G.vertex_of(k) in inside:
            continue
        twin[new.get(h, h)] = new.get(k, k)
    psi = {a: b for x, y in full for a, b in ((x, y), (y, x))}
    bk = CollapseBookkeeping(tuple(sub), name, phi, psi, len(phi), tuple(cycles))
    return RibbonGraph(rotation, twin), bk


def contract_pairwise(G: RibbonGraph, sub, order=None, name: str | None = None):
    """Contract a spanning tree of ``sub`` one edge at a time, then drop loops.

    ``order`` lists the tree edges; by default a breadth-first tree is
    used.  Returns the graph only, with original half-edge names.
    """
    sub, full = _check_sub(G, sub, None)
    if order is None:
        order, seen, queue = [], {sub[0]}, deque([sub[0]])
        while queue:
            x = queue.popleft()
            for h in G.rotation[x]:
                if h in G.twin and G.vertex_of(G.twin[h]) in set(sub) - seen:
                    y = G.vertex_of(G.twin[h])
                    seen.add(y)
                    order.append(tuple(sorted((h, G.twin[h]))))
                    queue.append(y)
    rotation = dict(G.rotation)
    owner = {h: v for v, hs in rotation.items() for h in hs}
    alias = {}

    def find(x):
        while x in alias:
            x = alias[x]
        return x

    for a, b in order:
        u, v = owner[a], owner[b]
        if u == v:
            raise GraphError("spanning-tree order closes a cycle")
        ru, rv = rotation[u], rotation[v]
        iu, iv = ru.index(a), rv.index(b)
        merged = ru[iu + 1:] + ru[:iu] + rv[iv + 1:] + rv[:iv]
        del rotation[v]
        alias[v] = u
        rotation[u] = merged
        for h in merged:
            owner[h] = u
    rep = find(sub[0])
    gone = {h for e in full for h in e}
    rotation[rep] = tuple(h for h in rotation[rep] if h not in gone)
    name = name or "[" + "+".join(sub) + "]"
    rotation = {(name if v == rep else v): hs for v, hs in rotation.items()}
    twin = {h: k for h, k in G.twin.items() if h not in gone}
    return RibbonGraph(rotation, twin)


# -- SOD record ------------------------------------------------------------

FAMILIES = ("F0", "G", "Fbar")


@dataclass(frozen=True)
class SODRecord:
    objects: tuple
    rows: dict  # family -> tuple of labels in object order
    inclusions: tuple = (("F0", "G"), ("G", "Fbar"))

    def text(self) -> str:
        width = max([len(o) for o in self.objects] + [len(x) for r in self.rows.values() for x in r] + [4])
        head = " " * 6 + " ".join(o.ljust(width) for o in self.objects)
        lines = [head]
        for fam in FAMILIES:
            lines.append(fam.ljust(6) + " ".join(x.ljust(width) for x in self.rows[fam]).rstrip())
            if fam != FAMILIES[-1]:
                lines.append(" " * 6 + " ".join("|".ljust(width) for _ in self.objects).rstrip())
        return "\n".join(lines) + "\n"


def sod_record(G: RibbonGraph, labels: dict, vertex: str | None = None) -> SODRecord:
    """Arrange stalk labels of three families over the exit paths of ``G``.

    ``labels`` maps each of F0, G and Fbar to a dict from exit-path object
    to an opaque label.  F0 vanishes on the legs at ``vertex`` (the
    collapsed vertex, by default the only one); labels given there must be
    "0" and missing ones are filled in.
    """
    cat = exit_paths(G)
    objs = cat.objects
    if vertex is None:
        if len(G.rotation) != 1:
            raise ShapeMismatch("name the collapsed vertex")
        vertex = G.vertices[0]
    legs = {h for h in G.rotation[vertex] if h not in G.twin}
    rows = {}
    for fam in FAMILIES:
        table = dict(labels.get(fam, {}))
        extra = set(table) - set(objs)
        if extra:
            raise ShapeMismatch(f"{fam}: no exit-path object {sorted(extra)[0]}")
        if fam == "F0":
            for h in legs:
                if table.setdefault(h, "0") != "0":
                    raise ShapeMismatch(f"F0 must vanish on {h}")
        missing = [o for o in objs if o not in table]
        if missing:
            raise ShapeMismatch(f"{fam}: no label for {missing[0]}")
        rows[fam] = tuple(str(table[o]) for o in objs)
    return SODRecord(objs, rows)
