import random

import pytest

from conftest import load_fixture
from tables import NAMES_ONE_ARC, NAMES_TWO_ARCS, TYPE_THREE_ONE_ARC, TYPE_THREE_TWO_ARCS, decode, type_two_names, type_two_table
from wdms.collapse import collapse, lift_flip
from wdms.flips import dual_sgraph, graph_from_words
from wdms.generate import random_angulation
from wdms.hearts import UnknownSimple, heart_of, quotient_heart, run_tilt_script, tilt, transcript_table


def lifted_run(name, arc="g"):
    doc, A = load_fixture(name)
    ctx = collapse(A, decorations=doc.selection)
    L = lift_flip(ctx, arc)
    ctx = collapse(L.refinement, decorations=doc.selection)
    H0 = heart_of(L.refinement)
    H, steps = run_tilt_script(H0, L.flips)
    return ctx, H0, H, steps


def test_heart_has_one_simple_per_arc():
    for name in ("pentagon.wdms", "type4.wdms", "annulus.wdms"):
        _, A = load_fixture(name)
        H = heart_of(A)
        assert set(H.simples) == set(A.arcs)
        assert all(w.grading == 0 for w in H.simples.values())


def test_tilt_follows_the_dual_flip():
    rng = random.Random(4)
    for _ in range(40):
        H = heart_of(random_angulation(rng))
        for _ in range(6):
            e = rng.choice(sorted(H.simples))
            H, _ = tilt(H, e, rng.choice(["forward", "backward"]))
            words = dict(H.simples)
            words.update(H.stubs)
            grades = {k: w.grading for k, w in H.simples.items()}
            assert graph_from_words(H.frame, words, grades).same_as(dual_sgraph(H.angulation))


def test_backward_tilt_undoes_forward():
    _, A = load_fixture("type2_m3.wdms")
    H0 = heart_of(A)
    for e in sorted(H0.simples):
        H1, st = tilt(H0, e)
        assert st.outcomes[e] == "shift"
        assert H1.simples[e].grading == 1
        H2, _ = tilt(H1, e, "backward")
        assert H2.labels() == H0.labels()
        assert H2.angulation == H0.angulation


def test_empty_script_and_unknown_simple():
    _, A = load_fixture("pentagon.wdms")
    H = heart_of(A)
    assert run_tilt_script(H, []) == (H, [])
    with pytest.raises(UnknownSimple):
        tilt(H, "zz")


@pytest.mark.parametrize("m", [1, 3])
def test_type_two_table(m):
    _, _, _, steps = lifted_run(f"type2_m{m}.wdms")
    names = type_two_names(m)
    expected = [{names[r]: c for r, c in col.items()} for col in decode(type_two_table(m))]
    assert [st.outcomes for st in steps] == expected


@pytest.mark.parametrize("name,table,names", [("type3_two.wdms", TYPE_THREE_TWO_ARCS, NAMES_TWO_ARCS),
                                              ("type3_one.wdms", TYPE_THREE_ONE_ARC, NAMES_ONE_ARC)])
def test_type_three_tables(name, table, names):
    _, _, _, steps = lifted_run(name)
    expected = [{names[r]: c for r, c in col.items()} for col in decode(table)]
    assert [st.outcomes for st in steps] == expected


def test_table_reader():
    cols = decode(TYPE_THREE_TWO_ARCS)
    assert cols[2] == {"S": "unchanged", "S1": "triangle", "S2": "shift", "X": "triangle"}
    assert len(decode(type_two_table(4))) == 5


@pytest.mark.parametrize("name", ["type2_m1.wdms", "type2_m3.wdms", "type3_one.wdms", "type3_two.wdms"])
def test_quotient_square_graded(name):
    ctx, H0, H, _ = lifted_run(name)
    below, _ = tilt(quotient_heart(H0, ctx), "g")
    assert quotient_heart(H, ctx).labels() == below.labels()


def test_quotient_square_type_four_ungraded():
    ctx, H0, H, _ = lifted_run("type4.wdms")
    below, _ = tilt(quotient_heart(H0, ctx), "g")
    assert quotient_heart(H, ctx).ungraded() == below.ungraded()


def test_quotient_drops_inner_simples():
    ctx, H0, _, _ = lifted_run("type2_m3.wdms")
    Q = quotient_heart(H0, ctx)
    assert set(Q.simples) == set(ctx.collapsed.arcs)


def test_transcript_table_shape():
    _, H0, _, steps = lifted_run("type3_one.wdms")
    lines = transcript_table(H0, steps).splitlines()
    assert len(lines) == 1 + len(H0.simples)
    assert lines[0].count("|") == len(steps) + 1
