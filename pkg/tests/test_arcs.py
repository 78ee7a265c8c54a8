import random

import pytest

from conftest import load_fixture, random_word
from wdms.arcs import (ClosedArcWord, DegenerateArc, EndpointMismatch, braid_twist, canonical_word,
                       check_word, corner_index, dual_index, reduce_word, reverse_word, smooth)
from wdms.flips import dual_sgraph
from wdms.generate import random_angulation


def _reduce_randomly(w, rng):
    """Cancel backtracks in random order; the rules mirror reduce_word."""
    slots, turns = list(w.slots), list(w.turns)
    while 0 in turns:
        i = rng.choice([k for k, t in enumerate(turns) if t == 0])
        if len(slots) == 2 or (i == 0 and len(turns) == 1):
            raise DegenerateArc("point")
        if i == 0:
            slots, turns = slots[2:], turns[2:]
        elif i == len(turns) - 1:
            slots, turns = slots[:-2], turns[:-2]
        else:
            turns = turns[:i - 1] + [turns[i - 1] + turns[i + 1]] + turns[i + 2:]
            slots = slots[:i] + slots[i + 2:]
    return ClosedArcWord(w.start, tuple(slots), tuple(turns), w.grading)


def _corpus(n, seed, zero_rate=0.0):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        S = dual_sgraph(random_angulation(rng))
        if S.ends:
            out.append((S, random_word(S, rng, rng.randint(1, 8), zero_rate)))
    return out


def test_reduction_confluent():
    rng = random.Random(7)
    checked = 0
    for S, w in _corpus(1000, 1, zero_rate=0.3):
        check_word(S, w)
        try:
            a = reduce_word(S, w)
        except DegenerateArc:
            with pytest.raises(DegenerateArc):
                _reduce_randomly(w, rng)
            continue
        for _ in range(3):
            assert _reduce_randomly(w, rng) == a
        check_word(S, a)
        checked += 1
    assert checked > 300


def test_reverse_is_involution():
    for S, w in _corpus(300, 2):
        if w.end(S) is None:
            continue
        assert reverse_word(S, reverse_word(S, w)) == w
        assert canonical_word(S, w) == canonical_word(S, reverse_word(S, w))


def test_corner_index_examples():
    _, A = load_fixture("pentagon.wdms")
    S = dual_sgraph(A)
    z2 = S.ends["a13"][1] if S.ends["a13"][1] == S.ends["a14"][0] else S.ends["a13"][0]
    ends = [s for s in S.rotation[z2] if s[0] == "e"]
    a, b = ends
    steps = (S.index_of(z2, b) - S.index_of(z2, a)) % S.valency(z2)
    assert corner_index(S, z2, a, b, shifts={}) == steps
    assert corner_index(S, z2, a, a, shifts={}) == S.valency(z2)
    assert corner_index(S, z2, a, b, shifts={b[1]: 1}) == steps + 1


def test_corner_index_additive_on_cyclic_triples():
    for name in ["pentagon.wdms", "type4.wdms", "type2_m3.wdms"]:
        _, A = load_fixture(name)
        S = dual_sgraph(A)
        sh = {"g": 2, "o": -1, "h2": 1}
        for v, rot in S.rotation.items():
            n = len(rot)
            for i in range(n):
                for j in range(1, n):
                    for k in range(j + 1, n):
                        a, b, c = rot[i], rot[(i + j) % n], rot[(i + k) % n]
                        assert corner_index(S, v, a, c, sh) == \
                            corner_index(S, v, a, b, sh) + corner_index(S, v, b, c, sh)


def test_full_turn_is_weight_plus_two():
    _, A = load_fixture("type4.wdms")
    S = dual_sgraph(A)
    for v, rot in S.rotation.items():
        w = A.spec.weight(v)
        assert corner_index(S, v, rot[0], rot[0], {}) == w + 2


def test_dual_index():
    assert [dual_index(d) for d in (0, 1, -2)] == [1, 0, 3]


def test_smoothing_examples():
    _, A = load_fixture("pentagon.wdms")
    S = dual_sgraph(A)
    a, b = S.edge_word("a13"), S.edge_word("a14")
    mid = set(S.ends["a13"]) & set(S.ends["a14"])
    (z,) = mid
    a = a if a.end(S)[0] == z else reverse_word(S, a)
    b = b if b.start == z else reverse_word(S, b)
    ab = smooth(S, a, b)
    assert len(ab) == 2 and ab.start == a.start
    with pytest.raises(DegenerateArc):
        smooth(S, a, reverse_word(S, a))
    with pytest.raises(EndpointMismatch):
        smooth(S, b, b)


def test_braid_twist_inverse():
    rng = random.Random(3)
    done = 0
    for S, w in _corpus(600, 4):
        if w.end(S) is None:
            continue
        try:
            w = reduce_word(S, w)
        except DegenerateArc:
            continue
        eta = rng.choice(sorted(S.ends))
        u, v = S.ends[eta]
        if u == v or not ({w.start, w.end(S)[0]} & {u, v}):
            continue
        for p in (1, 2):
            assert braid_twist(S, eta, braid_twist(S, eta, w, p), -p) == w
        done += 1
    assert done > 100


def test_braid_twist_fixes_core():
    _, A = load_fixture("pentagon.wdms")
    S = dual_sgraph(A)
    eta = S.edge_word("a13")
    assert canonical_word(S, braid_twist(S, "a13", eta)) == canonical_word(S, eta)
