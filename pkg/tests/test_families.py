import random

import pytest

from uhgraphs.autiso import automorphism_group, is_ultrahomogeneous
from uhgraphs.equivalence import equivalent
from uhgraphs.families import (
    SpecError,
    atom_specs,
    check_spec,
    enumerate_specs,
    format_spec,
    gen,
    gen_figure4,
    parse_spec,
    random_spec,
    spec_size,
)


@pytest.mark.parametrize(
    "text, canon",
    [
        ("E3", "E(n=3)"),
        ("C4", "C(k=4)"),
        ("C(k=3)", "C(k=3)"),
        ("H0", "H0"),
        ("EnC3(n=2)", "EnC3(n=2)"),
        ("chain(n=2, t=3)", "chain(E;n=2,t=3)"),
        ("chain(E;n=2,t=2;blow=C4@2)", "chain(E;n=2,t=2;blow=C4@2)"),
        ("tri(t=2;blow=C3En:2@1)", "tri(t=2;blow=C3En:2@1)"),
        ("union(E1, union(C3, H0))", "union(E(n=1), C(k=3), H0)"),
        ("fig4(left)", "fig4(left)"),
    ],
)
def test_parse_format(text, canon):
    spec = parse_spec(text)
    assert format_spec(spec) == canon
    assert parse_spec(canon) == spec


@pytest.mark.parametrize(
    "text, message",
    [
        ("C5", "3- and 4-cycles"),
        ("E0", "n >= 1"),
        ("chain(n=1,t=2;blow=EnC3@1)", "n > 1"),
        ("chain(n=3,t=2;blow=C4@1)", "n = 2"),
        ("chain(n=2,t=2;blow=C4@3)", "out of range"),
        ("chain(n=2,t=2;blow=C4@1;blow=EnC3@1)", "twice"),
        ("tri(t=2;blow=C3En:1@1)", "m > 1"),
        ("tri(t=1)", "t >= 2"),
        ("chain(n=2)", "needs"),
        ("E(n=2,t=3)", "does not take"),
        ("fig4(top)", "left or right"),
        ("union(E2)", "at least two"),
        ("bogus(n=1)", "unknown family"),
        ("", "empty"),
    ],
)
def test_illegal_specs(text, message):
    with pytest.raises(SpecError, match=message):
        parse_spec(text)


def test_check_spec_rejects_nested_union():
    from uhgraphs.families import FamilySpec

    inner = FamilySpec("union", parts=(parse_spec("E1"), parse_spec("E2")))
    with pytest.raises(SpecError, match="flat"):
        check_spec(FamilySpec("union", parts=(inner, parse_spec("C3"))))


@pytest.mark.parametrize(
    "text, size, aut",
    [
        ("E4", 4, 24),
        ("C3", 3, 3),
        ("H0", 8, 24),
        ("EnC3(n=2)", 6, 18),
        ("C3En(n=2)", 6, 24),
        ("chain(n=2,t=3)", 6, 2),
        ("tri(t=2)", 6, 3),
        ("chain(n=2,t=2;blow=C4@1)", 6, 4),
        ("chain(n=2,t=2;blow=EnC3@1)", 8, 18),
        ("tri(t=2;blow=C3En:2@1)", 9, 24),
        ("fig4(right)", 8, 8),
    ],
)
def test_sizes_and_groups(text, size, aut):
    spec = parse_spec(text)
    g = gen(spec)
    assert spec_size(spec) == g.n == size
    assert automorphism_group(g).order() == aut


@pytest.mark.parametrize("spec", list(enumerate_specs(8)), ids=str)
def test_every_spec_is_uh(spec):
    g = gen(spec)
    assert g.is_oriented()
    assert g.num_vertex_colors == max(1, _classes(spec))
    assert is_ultrahomogeneous(g).is_uh


def _classes(spec):
    if spec.kind == "union":
        return sum(_classes(p) for p in spec.parts)
    if spec.kind in ("chain", "tri"):
        return spec.t
    if spec.kind == "fig4":
        return 2
    return 1


@pytest.mark.parametrize("bound, count", [(1, 1), (2, 3), (3, 7), (4, 15), (6, 51)])
def test_enumeration_counts(bound, count):
    assert len(list(enumerate_specs(bound))) == count


def test_enumeration_is_pairwise_inequivalent():
    graphs = [gen(s) for s in enumerate_specs(6)]
    for i, g in enumerate(graphs):
        for h in graphs[i + 1:]:
            if g.n == h.n:
                assert not equivalent(g, h)


def test_atoms_sorted_and_bounded():
    atoms = atom_specs(7)
    sizes = [spec_size(a) for a in atoms]
    assert sizes == sorted(sizes) and max(sizes) <= 7
    assert all(a.kind != "union" for a in atoms)


def test_figure4_aliases():
    assert gen("fig4(left)") == gen_figure4("left")
    assert equivalent(gen("fig4(right)"), gen("chain(n=2,t=2;blow=C4@1;blow=C4@2)"))
    assert equivalent(gen("fig4(left)"), gen("chain(n=2,t=2;blow=C4@1)"))
    with pytest.raises(SpecError):
        gen_figure4("middle")


def test_random_specs_round_trip():
    rng = random.Random(5)
    for _ in range(100):
        spec = random_spec(rng, 12)
        assert spec_size(spec) <= 12
        assert parse_spec(format_spec(spec)) == spec
