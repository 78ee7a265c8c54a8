"""Constructions shared by the collapse tests and the acceptance run."""

from wdms.arcs import ClosedArcWord, DegenerateArc, oriented_from, reverse_word, sectors, smooth
from wdms.collapse import VANISHED, collapse_arc
from wdms.flips import dual_sgraph
from wdms.surface import WdmsError


def arc_pairs(ctx, rng, wanted: int, tries: int = 4000) -> list:
    """Pairs (w, w') where w' is w smoothed with an internal arc at its end.

    The internal arc is graded so the smoothing corner has index zero,
    which makes both words have the same image after collapse.  Only
    words ending inside the selection with a surviving image are used,
    and distinct pairs are returned.
    """
    S = dual_sgraph(ctx.A)
    inside = ctx.selection.decorations
    internal = ctx.selection.arcs

    def usable(w):
        end = w.end(S)
        return end is not None and end[0] in inside and collapse_arc(ctx, w) != VANISHED

    pool = []
    for e in sorted(S.ends):
        w = S.edge_word(e)
        pool += [x for x in (w, reverse_word(S, w)) if usable(x)]
    out, seen = [], set()
    for _ in range(tries):
        if len(out) == wanted or not pool:
            break
        w = rng.choice(pool)
        z = w.end(S)[0]
        cands = sorted(e for e in internal if z in S.ends[e])
        if not cands:
            continue
        b = oriented_from(S, S.edge_word(rng.choice(cands)), z)
        ra = reverse_word(S, w)
        try:
            b = ClosedArcWord(b.start, b.slots, b.turns, ra.grading - sectors(S, ra, b))
            w2 = smooth(S, w, b)
        except (DegenerateArc, WdmsError):
            continue
        if (w, w2) in seen:
            continue
        seen.add((w, w2))
        out.append((w, w2))
        if w2.end(S) is not None and w2.end(S)[0] in inside:
            pool.append(w2)
    return out
