import itertools

import pytest
from hypothesis import given

from conftest import oriented_graphs
from uhgraphs.autiso import automorphism_group, is_uh_bruteforce, is_ultrahomogeneous
from uhgraphs.ccd import Ccd, color_disjoint_union, induced_subgraph, oriented
from uhgraphs.equivalence import equivalent
from uhgraphs.families import (
    c3_en,
    directed_cycle,
    empty_graph,
    en_c3,
    gen,
    gen_figure4,
    h0,
    matching_chain,
    triangle_chain,
)
from uhgraphs.perm import BlockSystem, all_block_systems, inverse, mul
from uhgraphs.theory import (
    BlowupSpec,
    blow_up,
    blowup_decompositions,
    check_general_extension,
    is_easygoing,
    is_uh_partition_system,
    minimal_extension,
    neighborhood_partition,
    partition_orbit,
)

UH_MONO = [directed_cycle(3), directed_cycle(4), h0(), en_c3(2), c3_en(2), en_c3(3), c3_en(3), empty_graph(5)]


def sym3_cayley():
    """Aut is Sym(3) acting regularly; its blocks of size 2 are not easygoing."""
    els = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(els)}
    return Ccd.from_function(6, [0] * 6, lambda u, v: idx[mul(inverse(els[u]), els[v])])


# ---------------------------------------------------------------------------
# neighborhood partitions


def test_neighborhood_partition_oriented_order():
    g = oriented(4, [(3, 0), (1, 3)], [0, 0, 0, 1])
    assert neighborhood_partition(g, [0, 1, 2], 3) == (frozenset({0}), frozenset({1}), frozenset({2}))
    g = gen_figure4("left")
    assert neighborhood_partition(g, range(4), 4) == (frozenset({0, 2}), frozenset({1, 3}))
    with pytest.raises(ValueError):
        neighborhood_partition(g, range(4), 0)


def test_partition_orbits():
    c4 = directed_cycle(4)
    assert len(partition_orbit(c4, [{0, 2}, {1, 3}])) == 2
    orb = partition_orbit(c4, [{0}, {1, 2, 3}])
    assert len(orb) == 4
    assert (frozenset({2}), frozenset({0, 1, 3})) in orb
    with pytest.raises(ValueError):
        partition_orbit(c4, [{0}, {1}])


def test_uh_partition_systems():
    c4 = directed_cycle(4)
    assert is_uh_partition_system(c4, [{0, 2}, {1, 3}]) == (True, None)
    ok, bad = is_uh_partition_system(c4, [{0}, {1, 2, 3}])
    assert not ok and bad
    assert is_uh_partition_system(empty_graph(4), [{0}, {1, 2, 3}])[0]


# ---------------------------------------------------------------------------
# easygoing


@pytest.mark.parametrize("H", UH_MONO, ids=lambda H: f"n{H.n}")
def test_uh_block_systems_are_easygoing(H):
    A = automorphism_group(H)
    for bs in all_block_systems(A):
        if not bs.is_trivial():
            assert is_easygoing(H, bs, A) == (True, None)


def test_not_easygoing():
    g = sym3_cayley()
    A = automorphism_group(g)
    assert A.order() == 6
    systems = [bs for bs in all_block_systems(A) if bs.block_size == 2]
    assert systems
    for bs in systems:
        ok, bad = is_easygoing(g, bs, A)
        assert not ok and bad == (0,)


def test_easygoing_rejects_non_blocks():
    with pytest.raises(ValueError):
        is_easygoing(directed_cycle(4), BlockSystem.from_blocks([(0, 1), (2, 3)]))


@pytest.mark.parametrize("H", UH_MONO, ids=lambda H: f"n{H.n}")
def test_blocks_induce_uh(H):
    A = automorphism_group(H)
    for bs in all_block_systems(A):
        for b in bs.blocks:
            sub, _ = induced_subgraph(H, b)
            assert is_ultrahomogeneous(sub).is_uh


# ---------------------------------------------------------------------------
# extension conditions


@pytest.mark.parametrize("which", ["left", "right"])
def test_figure4_satisfies_all_conditions(which):
    g = gen_figure4(which)
    rep = check_general_extension(g, range(4), range(4, g.n))
    assert rep.conditions == [True] * 5 and rep.holds
    assert is_ultrahomogeneous(g).is_uh


def test_c4_with_pendant():
    g = oriented(5, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0)], [0] * 4 + [1])
    rep = check_general_extension(g, range(4), [4])
    assert rep.conditions == [True, False, True, False, True]
    assert not is_ultrahomogeneous(g).is_uh
    data = rep.to_json()
    assert data["holds"] is False and data["conditions"][1]["witness"] is not None


def test_condition3_fails_without_block_system():
    # blue C4, two red vertices; the red neighborhoods split blue into {0,1},{2,3}
    arcs = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (5, 2), (5, 3)]
    g = oriented(6, arcs, [1] * 4 + [0] * 2)
    rep = check_general_extension(g, [4, 5], range(4))
    assert rep.conditions[2] is False
    assert not is_ultrahomogeneous(g).is_uh


def test_extension_input_validation():
    with pytest.raises(ValueError):
        check_general_extension(directed_cycle(4), [0, 1], [2, 3])


@given(oriented_graphs(max_n=6, max_vcolors=2, min_n=2))
def test_extension_conditions_match_uh(g):
    classes = g.color_classes()
    if len(classes) != 2:
        return
    rep = check_general_extension(g, classes[0], classes[1])
    assert rep.holds == is_uh_bruteforce(g)


# ---------------------------------------------------------------------------
# minimal extensions


def test_minimal_extension_c4():
    m = minimal_extension(directed_cycle(4), [{0, 2}, {1, 3}])
    assert m.n == 6
    assert equivalent(m, gen_figure4("left"))
    assert is_ultrahomogeneous(m).is_uh


def test_minimal_extension_preconditions():
    with pytest.raises(ValueError, match="block system"):
        minimal_extension(directed_cycle(4), [{0, 1}, {2, 3}])
    with pytest.raises(ValueError, match="ultrahomogeneous system"):
        minimal_extension(directed_cycle(4), [{0}, {1, 2, 3}], strict=False)
    with pytest.raises(ValueError):
        minimal_extension(gen_figure4("left"), [{0, 2}, {1, 3}, {4, 5}])


def test_minimal_extension_non_strict():
    m = minimal_extension(empty_graph(3), [{0}, {1, 2}], strict=False)
    assert m.n == 6
    assert is_ultrahomogeneous(m).is_uh


# ---------------------------------------------------------------------------
# blow-ups


@pytest.mark.parametrize(
    "g, expected",
    [(gen("C4"), 1), (h0(), 0), (en_c3(2), 1), (c3_en(2), 1), (empty_graph(6), 0), (gen_figure4("right"), 2)],
    ids=["C4", "H0", "EnC3", "C3En", "E6", "fig4-right"],
)
def test_blowup_decompositions(g, expected):
    decs = blowup_decompositions(g)
    assert len(decs) == expected
    for d in decs:
        m = d.quotient.n - len(d.blocks)
        tau = tuple(m + i for i in range(len(d.blocks)))
        rebuilt = blow_up(BlowupSpec(d.quotient, tau, d.filler, d.blocks, tau))
        assert equivalent(rebuilt.graph, g)


def test_blow_up_c3_by_c3en():
    host = directed_cycle(3)
    filler = c3_en(2)
    bs = BlockSystem.from_blocks([(0, 1), (2, 3), (4, 5)])
    b = blow_up(BlowupSpec(host, (0, 1, 2), filler, bs, (0, 1, 2)))
    assert b.easygoing
    assert b.graph.n == 6
    assert is_ultrahomogeneous(b.graph).is_uh


def test_blow_up_requires_permutational_isomorphism():
    host = directed_cycle(4)
    bs = BlockSystem.from_blocks([(0, 4), (1, 5), (2, 6), (3, 7)])
    with pytest.raises(ValueError, match="permutational"):
        blow_up(BlowupSpec(host, (0, 1, 2, 3), h0(), bs, (0, 1, 2, 3)))
    with pytest.raises(ValueError, match="bijection"):
        blow_up(BlowupSpec(host, (0, 1, 2, 3), h0(), bs, (0, 1, 2, 2)))


@pytest.mark.parametrize(
    "host, filler, blocks",
    [
        (triangle_chain(2), c3_en(2), [(0, 1), (2, 3), (4, 5)]),
        (matching_chain(2, 2), en_c3(2), [(0, 1, 2), (3, 4, 5)]),
    ],
    ids=["C3-by-C3En", "E2-by-EnC3"],
)
def test_easygoing_blowup_of_bichromatic_is_uh(host, filler, blocks):
    assert is_ultrahomogeneous(host).is_uh
    R = host.color_classes()[0]
    b = blow_up(BlowupSpec(host, tuple(R), filler, BlockSystem.from_blocks(blocks), tuple(R)))
    assert b.easygoing
    assert b.graph.n == host.n - len(R) + filler.n
    assert is_ultrahomogeneous(b.graph).is_uh


# ---------------------------------------------------------------------------
# unions


@given(oriented_graphs(max_n=4, max_vcolors=1), oriented_graphs(max_n=4, max_vcolors=1))
def test_union_uh_iff_factors_uh(g, h):
    u = color_disjoint_union(g, h)
    assert is_ultrahomogeneous(u).is_uh == (is_uh_bruteforce(g) and is_uh_bruteforce(h))
