import random
from pathlib import Path

import pytest

from wdms.arcs import ClosedArcWord
from wdms.io import load

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ANGULATIONS = sorted(p.name for p in FIXTURES.glob("*.wdms"))


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_fixture(name: str):
    doc = load(FIXTURES / name)
    return doc, doc.angulation()


def random_word(S, rng: random.Random, length: int, zero_rate: float = 0.0):
    """A random edge path with turns; zero turns (backtracks) at ``zero_rate``."""
    v = rng.choice([x for x, r in S.rotation.items() if any(s[0] == "e" for s in r)])
    slot = rng.choice([s for s in S.rotation[v] if s[0] == "e"])
    slots, turns = [slot], []
    for _ in range(length - 1):
        far = S.far_end(slots[-1])
        if far is None:
            break
        u, arr = far
        val = S.valency(u)
        if rng.random() < zero_rate:
            t = 0
        else:
            t = rng.choice([k for k in range(-val - 1, val + 2) if k != 0])
        nxt = S.slot_at(u, S.index_of(u, arr) + t)
        if nxt[0] != "e":
            break
        slots.append(nxt)
        turns.append(t)
    return ClosedArcWord(v, tuple(slots), tuple(turns))


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
