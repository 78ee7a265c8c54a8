import pytest
from click.testing import CliRunner

from conftest import fixture_path, load_fixture
from wdms.cli import main, parse_script
from wdms.collapse import collapse, same_state
from wdms.exchange import canonical_key
from wdms.flips import forward_flip
from wdms.io import parse


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_validate():
    r = run("validate", fixture_path("pentagon.wdms"))
    assert r.exit_code == 0 and r.output.startswith("ok:")


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.wdms"
    bad.write_text("surface genus=0\nnonsense\n")
    r = run("validate", bad)
    assert r.exit_code == 2 and "line 2" in r.output
    wrong = tmp_path / "wrong.wdms"
    wrong.write_text("surface genus=0\nboundary 0 marked=3\ndecoration z weight=0\n"
                     "polygon z : bseg:0.0 bseg:0.1 bseg:0.2\n")
    assert run("validate", wrong).exit_code == 1
    assert run("flip", fixture_path("pentagon.wdms"), "--arc", "nope").exit_code == 1
    assert run("flip", tmp_path / "missing.wdms", "--arc", "a").exit_code == 2


def test_flip_and_backward(tmp_path):
    out = tmp_path / "b.wdms"
    assert run("flip", fixture_path("pentagon.wdms"), "--arc", "a13", "--out", out).exit_code == 0
    _, A = load_fixture("pentagon.wdms")
    assert parse(out.read_text()).angulation() == forward_flip(A, "a13")[0]
    r = run("flip", out, "--arc", "a13", "--backward")
    assert parse(r.output).angulation() == A


def test_apply_pentagon_cycle():
    r = run("apply", fixture_path("pentagon.wdms"), "--script", fixture_path("pentagon_cycle.script"))
    assert r.exit_code == 0
    _, A = load_fixture("pentagon.wdms")
    assert canonical_key(parse(r.output).angulation()) == canonical_key(A)


def test_eg_formats():
    dot = run("eg", fixture_path("pentagon.wdms"))
    assert dot.exit_code == 0 and dot.output.startswith("digraph")
    assert dot.output == run("eg", fixture_path("pentagon.wdms")).output
    adj = run("eg", fixture_path("pentagon.wdms"), "--format", "adjacency")
    assert len([ln for ln in adj.output.splitlines() if ln.strip()]) >= 5


def test_lift_apply_collapse(tmp_path):
    """The printed lift replayed on the input collapses to the flip below."""
    for name, arc in [("type2_m3.wdms", "g"), ("type4.wdms", "g"), ("type1.wdms", "p")]:
        script = tmp_path / f"{name}.script"
        assert run("lift", fixture_path(name), "--arc", arc, "--out", script).exit_code == 0
        top = tmp_path / f"top-{name}"
        assert run("apply", fixture_path(name), "--script", script, "--out", top).exit_code == 0
        doc, A = load_fixture(name)
        up = parse(top.read_text()).angulation()
        below = collapse(up, decorations=doc.selection, strict=False).collapsed
        want = forward_flip(collapse(A, decorations=doc.selection).collapsed, arc)[0]
        assert same_state(below, want)
        assert parse_script(script.read_text())


def test_collapse_and_dual():
    r = run("collapse", fixture_path("annulus.wdms"))
    assert r.exit_code == 0
    assert "weight=-1" in r.output
    d = run("dual", fixture_path("pentagon.wdms"))
    assert d.exit_code == 0 and "vertex z2" in d.output
    assert run("collapse", fixture_path("pentagon.wdms")).exit_code == 1


def test_tilt_transcript(tmp_path):
    script = tmp_path / "s"
    script.write_text("g\nh1\n")
    r = run("tilt", fixture_path("type2_m1.wdms"), "--script", script, "--select", "c0", "--select", "c1")
    assert r.exit_code == 0
    assert "after g" in r.output and "quotient:" in r.output


def test_graph_commands():
    r = run("graph-collapse", fixture_path("fig47.graph"), "--sub", "v", "--sub", "w")
    assert r.exit_code == 0 and "# arity 4" in r.output
    assert run("export-dot", fixture_path("fig47.graph")).output.startswith("graph")
    assert run("export-dot", fixture_path("pentagon.wdms")).exit_code == 0


@pytest.mark.parametrize("line", ["forward a b", "sideways a"])
def test_bad_script(line):
    from wdms.io import ParseError
    with pytest.raises(ParseError):
        parse_script(line)


def test_eg_parallel_is_identical():
    a = run("eg", fixture_path("annulus_twist.wdms"), "--max-nodes", "30")
    b = run("eg", fixture_path("annulus_twist.wdms"), "--max-nodes", "30", "--parallel", "3")
    assert a.exit_code == b.exit_code == 0 and a.output == b.output


def test_pentagon_eg_has_five_nodes():
    r = run("eg", fixture_path("pentagon.wdms"), "--max-nodes", "100", "--mode", "tracked")
    assert r.output.count(";\n") - r.output.count("->") == 5


def test_annulus_lift_example(tmp_path):
    """Replay the printed lift, collapse it, and compare with the flip of the collapse."""
    fx = fixture_path("annulus.wdms")
    script, top, bottom = tmp_path / "lift.script", tmp_path / "top.wdms", tmp_path / "bottom.wdms"
    assert run("lift", fx, "--select", "inner", "--arc", "gbar", "--out", script).exit_code == 0
    assert run("apply", fx, "--script", script, "--out", top).exit_code == 0
    replayed = run("collapse", top)
    assert replayed.exit_code == 0
    bottom.write_text(run("collapse", fx).output)
    flipped = run("flip", bottom, "--arc", "gbar")
    assert flipped.exit_code == 0
    assert same_state(parse(replayed.output).angulation(), parse(flipped.output).angulation())


def test_lenient_collapse_after_type_one_lift(tmp_path):
    fx = fixture_path("type1.wdms")
    script, top = tmp_path / "lift.script", tmp_path / "top.wdms"
    run("lift", fx, "--arc", "p", "--out", script)
    run("apply", fx, "--script", script, "--out", top)
    assert run("collapse", top).exit_code == 1
    assert run("collapse", top, "--lenient").exit_code == 0
