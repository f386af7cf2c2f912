"""Acceptance criteria, each run at its stated bound.

Every test records one PASS/FAIL line; the lines are printed in the
terminal summary of the pytest run.
"""

import contextlib
import itertools
import random
import time

import pytest

from conftest import ACCEPTANCE
from uhgraphs import autiso
from uhgraphs.autiso import automorphism_group, is_uh_bruteforce, is_ultrahomogeneous
from uhgraphs.ccd import Ccd, ColorMove, apply_move, color_disjoint_union, induced_subgraph, oriented
from uhgraphs.ccd import EDGE_CHANGE, SYMMETRIZE, UNSYMMETRIZE, VERTEX_CHANGE
from uhgraphs.classifier import (
    ClassificationCertificate,
    _mono_atoms,
    classify,
    verify_bichromatic,
    verify_extension_equivalence,
    verify_lachlan,
)
from uhgraphs.equivalence import equivalent
from uhgraphs.families import FamilySpec, atom_specs, format_spec, gen, gen_figure4, random_spec
from uhgraphs.perm import (
    BlockSystem,
    all_block_systems,
    cyclic_group,
    induced_action,
    is_alt4,
    recognize,
    symmetric_group,
    trivial_group,
    wreath,
)
from uhgraphs.theory import BlowupSpec, blow_up, blowup_decompositions, is_easygoing, minimal_extension


@contextlib.contextmanager
def criterion(label, limit):
    """Time the block, enforce the time limit, record one result line."""
    autiso._AUT_CACHE.clear()
    start = time.perf_counter()
    detail = {}
    try:
        yield detail
        elapsed = time.perf_counter() - start
        assert elapsed <= limit, f"took {elapsed:.1f}s, limit {limit}s"
    except BaseException as exc:
        line = f"FAIL  {label}: {exc}".splitlines()[0]
        ACCEPTANCE.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - start
    extra = f" ({detail['note']})" if "note" in detail else ""
    line = f"PASS  {label} in {elapsed:.2f}s (limit {limit}s){extra}"
    ACCEPTANCE.append(line)
    print(line)


def names(*specs):
    return sorted(format_spec(FamilySpec(*s) if isinstance(s, tuple) else s) for s in specs)


# ---------------------------------------------------------------------------
# 1. monochromatic enumeration


def test_c1_lachlan_five():
    with criterion("C1a  Lachlan list on <= 5 vertices", 60) as d:
        rep = verify_lachlan(5)
        expected = names(*[("E", k) for k in range(1, 6)], ("C", 3), ("C", 4))
        assert sorted(rep.uh_names) == expected, rep.uh_names
        assert rep.ok and not rep.unexpected
        d["note"] = f"{rep.scanned} labeled graphs, {rep.distinct} survivors"


def test_c1_lachlan_six():
    with criterion("C1b  Lachlan list on <= 6 vertices", 15 * 60) as d:
        rep = verify_lachlan(6)
        new = sorted(set(rep.uh_names) - set(verify_lachlan(5).uh_names))
        assert new == names(("E", 6), ("EnC3", 2), ("C3En", 2)), new
        assert rep.ok and not rep.unexpected
        d["note"] = f"{rep.scanned} labeled graphs"


# ---------------------------------------------------------------------------
# 2. automorphism groups


@pytest.mark.parametrize(
    "text, order, name",
    [("E4", 24, "Sym(4)"), ("C4", 4, "Z4"), ("EnC3(n=2)", 18, None), ("C3En(n=2)", 24, None)],
)
def test_c2_group_orders(text, order, name):
    with criterion(f"C2   |Aut({text})| = {order}", 1):
        A = automorphism_group(gen(text))
        assert A.order() == order
        if name:
            assert recognize(A) == name


def test_c2_h0_block_system():
    with criterion("C2   Aut(H0): order 24, one block system, induced Alt(4)", 1):
        A = automorphism_group(gen("H0"))
        assert A.order() == 24
        systems = [bs for bs in all_block_systems(A) if not bs.is_trivial()]
        assert len(systems) == 1
        [bs] = systems
        assert len(bs) == 4 and bs.block_size == 2
        top, _ = induced_action(A, bs)
        assert top.order() == 12
        assert is_alt4(top) and recognize(top) == "Alt(4)"


# ---------------------------------------------------------------------------
# 3. extension conditions against exact testing


def test_c3_extension_equivalence():
    with criterion("C3   extension conditions == UH on |R|,|B| <= 3 plus 500 random", 10 * 60) as d:
        rep = verify_extension_equivalence(seed=0, random_count=500, max_class=3)
        assert rep.randomized == 500
        assert rep.mismatches == [], f"{len(rep.mismatches)} mismatches"
        d["note"] = f"{rep.total} graphs, {rep.uh} UH, 0 mismatches"


# ---------------------------------------------------------------------------
# 4. minimal extension


def test_c4_minimal_extension():
    with criterion("C4   minimal extension of C4 by its diagonals ~ fig4(left)", 1):
        m = minimal_extension(gen("C4"), [{0, 2}, {1, 3}])
        assert equivalent(m, gen_figure4("left"))


# ---------------------------------------------------------------------------
# 5. blow-up decompositions of the monochromatic graphs


def test_c5_blowup_uniqueness():
    with criterion("C5   blow-up decompositions of monochromatic UH graphs <= 12", 120) as d:
        seen = 0
        for spec in _mono_atoms(12):
            g = gen(spec)
            decs = blowup_decompositions(g)
            got = sorted((x.filler.n, x.quotient.n) for x in decs)
            kind = spec.kind
            if kind == "C" and spec.n == 4:
                assert len(decs) == 1 and equivalent(decs[0].quotient, gen("E2"))
            elif kind == "C3En":
                assert len(decs) == 1 and equivalent(decs[0].quotient, gen("C3"))
            elif kind == "EnC3":
                assert len(decs) == 1 and equivalent(decs[0].quotient, gen(f"E{spec.n}"))
            else:
                assert decs == [], (format_spec(spec), got)
            for dec in decs:
                assert equivalent(dec.filler, g)
            seen += 1
        d["note"] = f"{seen} graphs"


# ---------------------------------------------------------------------------
# 6. bichromatic enumeration


def test_c6_bichromatic():
    with criterion("C6   bichromatic list on <= 6 vertices plus 8-vertex checks", 30 * 60) as d:
        rep = verify_bichromatic(6)
        assert rep.ok, rep.summary()
        assert not rep.missing and not rep.unexpected
        assert "chain(E;n=2,t=2;blow=C4@1)" in rep.uh_names
        assert any(equivalent(gen("fig4(left)"), gen(n)) for n in rep.uh_names)
        targeted = dict(rep.targeted)
        assert targeted and all(targeted.values())
        assert any(equivalent(gen("fig4(right)"), gen(n)) for n in targeted)
        d["note"] = f"{len(rep.uh)} UH forms, {len(targeted)} targeted"


# ---------------------------------------------------------------------------
# 7. property suites


def _random_ccd(rng, max_n=5, max_vcolors=2, max_ecolors=3):
    n = rng.randint(1, max_n)
    chi = [rng.randrange(max_vcolors) for _ in range(n)]
    k = rng.randint(1, max_ecolors)
    return Ccd.from_function(n, chi, lambda u, v: rng.randrange(k))


def _random_oriented(rng, max_n, vcolors=1):
    n = rng.randint(1, max_n)
    arcs = []
    for u, v in itertools.combinations(range(n), 2):
        r = rng.randrange(3)
        if r:
            arcs.append((u, v) if r == 1 else (v, u))
    return oriented(n, arcs, [rng.randrange(vcolors) for _ in range(n)])


def _random_move(rng, g):
    kind = rng.choice([VERTEX_CHANGE, EDGE_CHANGE, SYMMETRIZE, UNSYMMETRIZE])
    if kind == VERTEX_CHANGE:
        return ColorMove(kind, tuple(rng.sample(range(g.num_vertex_colors), g.num_vertex_colors)))
    if kind == EDGE_CHANGE:
        return ColorMove(kind, tuple(rng.sample(range(g.num_edge_colors), g.num_edge_colors)))
    c, d = rng.sample(range(max(g.num_edge_colors, 2)), 2)
    r, b = rng.sample(range(max(g.num_vertex_colors, 2)), 2)
    return ColorMove(kind, (c, d, r, b))


def test_c7_property_suites():
    with criterion("C7   property suites and the 29-vertex composite graph", 5 * 60) as d:
        rng = random.Random(2024)
        counts = {}

        # blocks of UH graphs induce UH graphs
        uh_graphs = [gen(s) for s in _mono_atoms(12)]
        uh_graphs += [induced_subgraph(gen(s), R)[0] for s in atom_specs(9) for R in gen(s).color_classes()]
        for g in uh_graphs:
            A = automorphism_group(g, budget=None)
            for bs in all_block_systems(A):
                for b in bs.blocks:
                    assert is_ultrahomogeneous(induced_subgraph(g, b)[0]).is_uh
        counts["blocks"] = len(uh_graphs)

        # color-disjoint union is UH iff both factors are
        for _ in range(300):
            g, h = _random_oriented(rng, 4), _random_oriented(rng, 4)
            u = color_disjoint_union(g, h)
            assert is_ultrahomogeneous(u).is_uh == (is_uh_bruteforce(g) and is_uh_bruteforce(h))
        counts["union"] = 300

        # the color equivalence preserves Aut
        applied = 0
        for _ in range(300):
            g = _random_ccd(rng)
            try:
                h = apply_move(g, _random_move(rng, g))
            except ValueError:
                continue
            applied += 1
            A, B = automorphism_group(g), automorphism_group(h)
            assert A.order() == B.order() and all(p in B for p in A.generators)
        counts["moves"] = applied

        # every blow-up used by the families is easygoing and yields a UH graph
        blown = 0
        for spec in atom_specs(12):
            if spec.blows:
                assert is_ultrahomogeneous(gen(spec), budget=None).is_uh
                blown += 1
        for host, filler, blocks in [
            (gen("tri(t=2)"), gen("C3En(n=2)"), [(0, 1), (2, 3), (4, 5)]),
            (gen("chain(n=2,t=2)"), gen("EnC3(n=2)"), [(0, 1, 2), (3, 4, 5)]),
            (gen("chain(n=2,t=3)"), gen("C4"), [(0, 2), (1, 3)]),
        ]:
            R = tuple(host.color_classes()[0])
            b = blow_up(BlowupSpec(host, R, filler, BlockSystem.from_blocks(blocks), R))
            assert b.easygoing and is_easygoing(filler, BlockSystem.from_blocks(blocks))[0]
            assert is_ultrahomogeneous(b.graph, budget=None).is_uh
            blown += 1
        counts["blow-ups"] = blown

        # wreath order law
        groups = [trivial_group(1), cyclic_group(2), cyclic_group(3), symmetric_group(3), cyclic_group(4)]
        for top, fiber in itertools.product(groups, repeat=2):
            assert wreath(top, fiber).order() == fiber.order() ** top.degree * top.order()
        counts["wreath"] = len(groups) ** 2

        # the 29-vertex composite of H0, a matching chain and a triangle chain
        g = gen("union(H0, chain(n=3,t=4), tri(t=3))")
        assert g.n == 8 + 12 + 9
        assert is_ultrahomogeneous(g, budget=None).is_uh
        d["note"] = ", ".join(f"{k} {v}" for k, v in counts.items())


# ---------------------------------------------------------------------------
# classification round trip


def test_classify_gen_round_trip():
    with criterion("RT   classify(gen(spec)) on 200 random specs <= 12 vertices", 10 * 60) as d:
        rng = random.Random(6)
        bad = []
        for _ in range(200):
            spec = random_spec(rng, 12)
            g = gen(spec)
            p = list(range(g.n))
            rng.shuffle(p)
            g = g.relabel(tuple(p))
            cert = classify(g, budget=None)
            ok = isinstance(cert, ClassificationCertificate) and cert.verify(g) and equivalent(gen(cert.spec), g)
            if not ok:
                bad.append(format_spec(spec))
        assert bad == [], bad
        d["note"] = "0 mismatches"
