import itertools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from uhgraphs.ccd import EDGE_CHANGE, SYMMETRIZE, UNSYMMETRIZE, VERTEX_CHANGE, Ccd, ColorMove, oriented

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@st.composite
def ccds(draw, max_n=6, max_vcolors=2, max_ecolors=3):
    n = draw(st.integers(1, max_n))
    chi = draw(st.lists(st.integers(0, max_vcolors - 1), min_size=n, max_size=n))
    flat = []
    for u in range(n):
        for v in range(n):
            flat.append(-1 if u == v else draw(st.integers(0, max_ecolors - 1)))
    return Ccd(n, chi, flat)


@st.composite
def oriented_graphs(draw, max_n=6, max_vcolors=2, min_n=1):
    n = draw(st.integers(min_n, max_n))
    arcs = []
    for u, v in itertools.combinations(range(n), 2):
        s = draw(st.integers(0, 2))
        if s == 1:
            arcs.append((u, v))
        elif s == 2:
            arcs.append((v, u))
    chi = draw(st.lists(st.integers(0, max_vcolors - 1), min_size=n, max_size=n))
    return oriented(n, arcs, chi)


@st.composite
def permutations(draw, n):
    return tuple(draw(st.permutations(range(n))))


@pytest.fixture
def rng():
    import random

    return random.Random(12345)


@st.composite
def moves_for(draw, g):
    kind = draw(st.sampled_from([VERTEX_CHANGE, EDGE_CHANGE, SYMMETRIZE, UNSYMMETRIZE]))
    if kind == VERTEX_CHANGE:
        return ColorMove(kind, tuple(draw(st.permutations(range(g.num_vertex_colors)))))
    if kind == EDGE_CHANGE:
        return ColorMove(kind, tuple(draw(st.permutations(range(g.num_edge_colors)))))
    c, d = draw(st.permutations(range(max(g.num_edge_colors, 2))))[:2]
    r, b = draw(st.permutations(range(max(g.num_vertex_colors, 2))))[:2]
    return ColorMove(kind, (c, d, r, b))


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
