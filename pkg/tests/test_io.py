import pytest

from conftest import ANGULATIONS, fixture_path
from wdms.flips import forward_flip
from wdms.io import ParseError, document_of, parse, serialize
from wdms.surface import ValidationError

SMALL = """surface genus=0
boundary 0 marked=3
decoration z weight=1
polygon z : bseg:0.0 bseg:0.1 bseg:0.2
"""


@pytest.mark.parametrize("name", ANGULATIONS)
def test_fixtures_round_trip_byte_for_byte(name):
    text = fixture_path(name).read_text()
    assert serialize(parse(text)) == text


def test_round_trip_after_flip_keeps_shift():
    doc = parse(fixture_path("pentagon.wdms").read_text())
    B, _ = forward_flip(doc.angulation(), "a13")
    text = serialize(document_of(B, doc.selection, doc.header))
    assert "shift a13=1" in text
    assert parse(text).angulation() == B


def test_comments_and_blank_lines():
    doc = parse("# about\n\n" + SMALL.replace("weight=1", "weight=1   # trailing"))
    assert doc.header == ("# about",)
    assert doc.angulation().spec.weight("z") == 1


def test_explicit_occurrence_tags():
    text = SMALL.replace("marked=3", "marked=2").replace(
        "bseg:0.0 bseg:0.1 bseg:0.2", "arc:a bseg:0.0 bseg:0.1").replace(
        "decoration z weight=1", "decoration z weight=1\ndecoration y weight=-1") + "polygon y : arc:a/second\n"
    A = parse(text).angulation()
    pi, _ = A.occurrence("a", 1)
    assert A.polygons[pi].dec == "y"


@pytest.mark.parametrize("text,line,col", [
    ("surface genus=0\nfoo bar\n", 2, 1),
    ("surface genus=x\n", 1, 1),
    ("surface genus=0\n  boundary 0 marked\n", 2, 3),
    ("surface genus=0\npolygon z : arc:a side:b\n", 2, 19),
    ("surface genus=0\npolygon z :\n", 2, 1),
    ("boundary 0 marked=1\n", 1, 1),
    ("surface genus=0\nsurface genus=1\n", 2, 1),
])
def test_parse_errors_locate(text, line, col):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.col) == (line, col)


def test_invalid_complex_is_not_a_parse_error():
    doc = parse(SMALL.replace("bseg:0.2", "arc:q"))
    with pytest.raises(ValidationError):
        doc.angulation()


def test_arc_used_three_times():
    from wdms.surface import DanglingArc
    text = "surface genus=0\nboundary 0 marked=1\ndecoration z weight=2\npolygon z : arc:a arc:a arc:a bseg:0.0\n"
    with pytest.raises(DanglingArc):
        parse(text).angulation()
