"""Random valid angulations for property tests.

A draw picks a small signature, finds one angulation of it by shuffled
gluing, and then takes a random walk of forward and backward flips so the
shapes vary.  Everything is driven by the ``random.Random`` passed in.
"""

from __future__ import annotations

import random
from functools import lru_cache

from .flips import backward_flip, forward_flip
from .surface import MixedAngulation, SurfaceSpec, build_angulation, make_spec

# (genus, boundaries, weights) chosen to satisfy the weight formula
SIGNATURES = (
    (0, (5,), (1, 1, 1)),
    (0, (2,), (-1, 1)),
    (0, (2, 1), (1, 1, 1)),
    (0, (2, 1), (2, 0, 1)),
    (1, (1,), (1, 1, 1)),
    (0, (3,), (-1, 1, 1)),
    (0, (4,), (-1, -1, 2, 2)),
    (0, (3, 1), (-1, 2, 3)),
    (1, (2,), (0, 2, 2)),
    (0, (6,), (1, 1, 1, 1)),
    (0, (1, 1), (1, 1)),
    (0, (4,), (1, 1)),
)


def spec_of(sig) -> SurfaceSpec:
    g, bs, ws = sig
    return make_spec(g, [(str(i), k) for i, k in enumerate(bs)], [(f"z{i}", w) for i, w in enumerate(ws)])


def glue(spec: SurfaceSpec, rng: random.Random, tries: int = 20000) -> MixedAngulation | None:
    """Shuffle sides into polygons until the complex validates."""
    sizes = [(d, w + 2) for d, w in spec.decorations]
    bsegs = [f"bseg:{b}.{k}" for b, n in spec.boundaries for k in range(n)]
    narcs = (sum(n for _, n in sizes) - len(bsegs)) // 2
    toks = [f"arc:a{i}" for i in range(narcs) for _ in (0, 1)] + bsegs
    for _ in range(tries):
        rng.shuffle(toks)
        polys, i = [], 0
        for d, n in sizes:
            polys.append((d, toks[i:i + n]))
            i += n
        try:
            return build_angulation(spec, polys)
        except Exception:
            continue
    return None


@lru_cache(maxsize=None)
def seed_angulation(k: int) -> MixedAngulation:
    A = glue(spec_of(SIGNATURES[k]), random.Random(k))
    if A is None:
        raise RuntimeError(f"no angulation found for signature {SIGNATURES[k]}")
    return A


def random_walk(A: MixedAngulation, rng: random.Random, steps: int) -> tuple:
    """Apply ``steps`` random flips; returns the end state and the script."""
    script = []
    for _ in range(steps):
        arc = rng.choice(A.arcs)
        forward = rng.random() < 0.5
        A, _ = (forward_flip if forward else backward_flip)(A, arc)
        script.append((arc, "forward" if forward else "backward"))
    return A, script


def random_angulation(rng: random.Random, max_steps: int = 12) -> MixedAngulation:
    A = seed_angulation(rng.randrange(len(SIGNATURES)))
    return random_walk(A, rng, rng.randrange(max_steps + 1))[0]
