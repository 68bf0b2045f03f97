from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from q2tors.mqfield import MQElem, make_tower

GEN_POOL = (-1, 2, 3, -2, 5, 7, -3, 17, 6, 10)
SQUAREFREE = (-1, 1, 2, 3, 5, 6, 7, -2, -3, -5, -6, 10, 11, 13, -7, 15, 17, -15, 21, 30, -30, 105)


@st.composite
def towers(draw, max_gens=3):
    gens = draw(st.lists(st.sampled_from(GEN_POOL), max_size=max_gens, unique=True))
    return make_tower(gens)


def rationals(height=50):
    return st.fractions(min_value=-height, max_value=height, max_denominator=12)


@st.composite
def elements(draw, tower=None, nonzero=False, height=50):
    K = tower if tower is not None else draw(towers())
    coords = draw(st.lists(rationals(height), min_size=K.degree, max_size=K.degree))
    s = MQElem.from_coords(K, coords)
    if nonzero and s.is_zero():
        s = MQElem.from_coords(K, [Fraction(1)] + coords[1:])
    return s


# acceptance summary --------------------------------------------------------------

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion; printed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def log(n: int, name: str, ok: bool, detail: str = ""):
        line = f"criterion {n} {name}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
