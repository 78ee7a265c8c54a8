"""Simple tilting replayed on labels.

A heart is recorded by its simples, one per arc of the current
angulation.  Each simple carries the graded closed arc dual to its arc,
written as a word over the dual graph of the angulation the heart
started from (the frame), so simples of different hearts compare
directly.  Boundary stubs ride along the same way; they are not simples
but they are needed to rewrite words after the next tilt.  Nothing here
computes morphisms: a tilt is read off the matching flip.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arcs import ClosedArcWord, SGraph, canonical_word, substitute
from .collapse import CollapseContext, VANISHED, collapse_words, collapsed_graph, recollapse
from .flips import backward_flip, dual_sgraph, forward_flip, twisted_words
from .surface import MixedAngulation, WdmsError


class UnknownSimple(WdmsError):
    pass


class IncompatibleContext(WdmsError):
    pass


@dataclass(frozen=True)
class FormalHeart:
    angulation: MixedAngulation
    frame: SGraph  # dual graph the words are written over
    simples: dict  # arc name -> ClosedArcWord over ``frame``
    stubs: dict = field(default_factory=dict)  # stub token -> word over ``frame``

    def labels(self) -> set:
        """Simples as unnamed, orientation-free graded words."""
        return {canonical_word(self.frame, w) for w in self.simples.values()}

    def ungraded(self) -> set:
        return {canonical_word(self.frame, w.shifted(-w.grading)) for w in self.simples.values()}

    def text(self, name: str) -> str:
        return self.simples[name].text(self.frame)


@dataclass(frozen=True)
class TiltStep:
    simple: str
    direction: str
    outcomes: dict  # simple name -> "shift" | "triangle" | "unchanged"
    triangles: tuple = field(default=())  # (tilted simple, new object, old object)


def heart_of(A: MixedAngulation) -> FormalHeart:
    S = dual_sgraph(A)
    stubs = {slot[1]: ClosedArcWord(z, (slot,), ())
             for z, rot in S.rotation.items() for slot in rot if slot[0] == "b"}
    return FormalHeart(A, S, {e: S.edge_word(e) for e in S.ends}, stubs)


def tilt(H: FormalHeart, simple: str, direction: str = "forward"):
    """Tilt at a simple; returns the new heart and the step record.

    The tilted simple shifts by one; simples whose dual arcs get twisted
    by the flip sit in a triangle with it; all others stay.
    """
    if simple not in H.simples:
        raise UnknownSimple(simple)
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    forward = direction == "forward"
    cur = dual_sgraph(H.angulation)
    words = twisted_words(cur, simple, forward)
    B, _ = (forward_flip if forward else backward_flip)(H.angulation, simple)
    germs = dict(H.simples)
    germs.update(H.stubs)
    step = 1 if forward else -1
    simples, stubs, outcomes, triangles = {}, {}, {}, []
    for e in cur.ends:
        w = words[e]
        new = substitute(H.frame, cur, germs, w)
        g = H.simples[e].grading + (step if e == simple else 0)
        simples[e] = ClosedArcWord(new.start, new.slots, new.turns, g)
        if e == simple:
            outcomes[e] = "shift"
        elif w != cur.edge_word(e):
            outcomes[e] = "triangle"
            triangles.append((simple, e, simples[e], H.simples[e]))
        else:
            outcomes[e] = "unchanged"
    for tok in H.stubs:
        stubs[tok] = substitute(H.frame, cur, germs, words[tok])
    return FormalHeart(B, H.frame, simples, stubs), TiltStep(simple, direction, outcomes, tuple(triangles))


def run_tilt_script(H: FormalHeart, script) -> tuple:
    """Tilt along ``(simple, direction)`` pairs; returns the last heart and the steps."""
    steps = []
    for item in script:
        simple, direction = (item, "forward") if isinstance(item, str) else item
        H, st = tilt(H, simple, direction)
        steps.append(st)
    return H, steps


def quotient_heart(H: FormalHeart, ctx: CollapseContext) -> FormalHeart:
    """Forget simples supported in the collapsed part; map the rest down.

    The heart must be written over the dual graph of the context's
    refinement.  The result is written over the collapsed dual graph.
    """
    if not H.frame.same_as(dual_sgraph(ctx.A)):
        raise IncompatibleContext("heart is not written over the refinement's dual graph")
    names = sorted(H.simples)
    images = collapse_words(ctx, [H.simples[n] for n in names])
    simples = {n: w for n, w in zip(names, images) if w != VANISHED}
    toks = sorted(H.stubs)
    stub_images = collapse_words(ctx, [H.stubs[t] for t in toks])
    stubs = {t: w for t, w in zip(toks, stub_images) if w != VANISHED}
    below = recollapse(ctx, H.angulation)
    return FormalHeart(below, collapsed_graph(ctx), simples, stubs)


def transcript_table(H0: FormalHeart, steps: list, rows: list | None = None) -> str:
    """Rows are simples, columns are steps; cells name the outcome class."""
    rows = rows or sorted(H0.simples)
    head = ["initial"] + [f"after {st.simple}" for st in steps]
    lines = [" | ".join(["simple"] + head)]
    for r in rows:
        cells = [r] + ["-"] + [st.outcomes.get(r, "") for st in steps]
        lines.append(" | ".join(cells))
    return "\n".join(lines) + "\n"
