"""Automorphisms, isomorphisms, canonical forms and ultrahomogeneity.

Everything here runs on one individualization-refinement engine.  A node of
the search is an equitable ordered partition, stored as a list giving the
cell index of each vertex.  Refinement splits cells by the multiset of
(cell, out-color, in-color) triples and orders the new cells by signature,
so the whole search tree is isomorphism-invariant.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .ccd import Ccd
from .errors import BudgetExceeded, InvalidPartialIso
from .perm import Perm, PermGroup, identity, inverse, mul

AUT_BUDGET = 16
UH_BUDGET = 12


# ---------------------------------------------------------------------------
# refinement engine


def _renumber(keys: Sequence) -> list:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def refine(g: Ccd, cells: Sequence[int]) -> tuple:
    """Equitable refinement of ``cells``; returns (cells, trace)."""
    n, z = g.n, g.zeta
    cells = list(cells)
    trace = []
    k = len(set(cells))
    while True:
        sigs = []
        for v in range(n):
            row = v * n
            cnt = Counter((cells[w], z[row + w], z[w * n + v]) for w in range(n) if w != v)
            sigs.append((cells[v], tuple(sorted(cnt.items()))))
        new = _renumber(sigs)
        k2 = max(new) + 1
        trace.append(hash(tuple(sorted(Counter(sigs).items()))))
        cells = new
        if k2 == k:
            break
        k = k2
    return cells, hash(tuple(trace))


def individualize(cells: Sequence[int], v: int) -> list:
    c = cells[v]
    return [2 * x + (1 if (x == c and w != v) else 0) + (1 if x > c else 0) for w, x in enumerate(cells)]


def target_cell(cells: Sequence[int]) -> list:
    """Vertices of the first smallest non-singleton cell (empty if discrete)."""
    members = {}
    for v, c in enumerate(cells):
        members.setdefault(c, []).append(v)
    best = None
    for c in sorted(members):
        if len(members[c]) > 1 and (best is None or len(members[c]) < len(members[best])):
            best = c
    return members[best] if best is not None else []


def _initial(g: Ccd, marks: Sequence[int] = ()) -> list:
    cells = _renumber(g.chi)
    for v in marks:
        cells = _renumber(individualize(cells, v))
    return cells


def _leaf_map(c1: Sequence[int], c2: Sequence[int]) -> Perm:
    pos = [0] * len(c2)
    for v, c in enumerate(c2):
        pos[c] = v
    return tuple(pos[c] for c in c1)


def is_isomorphism(g: Ccd, h: Ccd, p: Sequence[int]) -> bool:
    if g.n != h.n or len(p) != g.n:
        return False
    n = g.n
    if any(g.chi[v] != h.chi[p[v]] for v in range(n)):
        return False
    gz, hz = g.zeta, h.zeta
    for u in range(n):
        pu = p[u] * n
        row = u * n
        for v in range(n):
            if gz[row + v] != hz[pu + p[v]]:
                return False
    return True


def _search_iso(g: Ccd, c1: list, h: Ccd, c2: list):
    """An isomorphism g -> h mapping the cells of c1 onto those of c2, or None."""
    c1, t1 = refine(g, c1)
    c2, t2 = refine(h, c2)
    return _search_refined(g, c1, t1, h, c2, t2)


def _search_refined(g, c1, t1, h, c2, t2):
    if t1 != t2 or sorted(c1) != sorted(c2):
        return None
    cell = target_cell(c1)
    if not cell:
        p = _leaf_map(c1, c2)
        return p if is_isomorphism(g, h, p) else None
    v = cell[0]
    idx = c1[v]
    n1, s1 = refine(g, individualize(c1, v))
    for w in range(h.n):
        if c2[w] != idx:
            continue
        n2, s2 = refine(h, individualize(c2, w))
        p = _search_refined(g, n1, s1, h, n2, s2)
        if p is not None:
            return p
    return None


def _check_budget(g: Ccd, budget: int | None, what: str):
    if budget is not None and g.n > budget:
        raise BudgetExceeded(f"{what} on {g.n} vertices", budget)


# ---------------------------------------------------------------------------
# automorphism groups


_AUT_CACHE: dict = {}
_AUT_CACHE_SIZE = 4096


def automorphism_group(g: Ccd, budget: int | None = AUT_BUDGET) -> PermGroup:
    """Aut(g) as a group with a strong generating set from the first path."""
    _check_budget(g, budget, "automorphism search")
    group = _AUT_CACHE.get(g)
    if group is None:
        if len(_AUT_CACHE) >= _AUT_CACHE_SIZE:
            _AUT_CACHE.clear()
        group = _AUT_CACHE[g] = _automorphism_group(g)
    return group


def _automorphism_group(g: Ccd) -> PermGroup:
    n = g.n
    path = []
    cells, trace = refine(g, _initial(g))
    nodes = [(cells, trace)]
    while True:
        cell = target_cell(cells)
        if not cell:
            break
        path.append(cell[0])
        cells, trace = refine(g, individualize(cells, cell[0]))
        nodes.append((cells, trace))
    gens = []
    for level in range(len(path) - 1, -1, -1):
        base_cells, _ = nodes[level]
        v = path[level]
        a, ta = nodes[level + 1]
        orbit = _orbit(v, gens, n)
        for w in target_cell(base_cells):
            if w in orbit:
                continue
            b, tb = refine(g, individualize(base_cells, w))
            p = _search_refined(g, a, ta, g, b, tb)
            if p is not None:
                gens.append(p)
                orbit = _orbit(v, gens, n)
    return PermGroup(n, gens)


def _orbit(x: int, gens, n: int) -> set:
    seen = {x}
    stack = [x]
    while stack:
        y = stack.pop()
        for p in gens:
            z = p[y]
            if z not in seen:
                seen.add(z)
                stack.append(z)
    return seen


def automorphisms_bruteforce(g: Ccd) -> list:
    """All automorphisms by filtering all n! permutations (test oracle)."""
    import itertools

    return [p for p in itertools.permutations(range(g.n)) if is_isomorphism(g, g, p)]


# ---------------------------------------------------------------------------
# isomorphism and canonical forms


def isomorphic(g: Ccd, h: Ccd, budget: int | None = AUT_BUDGET) -> Perm | None:
    """An isomorphism p with h == g.relabel(p), or None."""
    if g.n != h.n or sorted(g.chi) != sorted(h.chi) or sorted(g.zeta) != sorted(h.zeta):
        return None
    _check_budget(g, budget, "isomorphism search")
    return _search_iso(g, _initial(g), h, _initial(h))


def canonical_form(g: Ccd, aut: PermGroup | None = None, budget: int | None = AUT_BUDGET) -> tuple:
    """(canonical graph, relabeling p) with g.relabel(p) canonical.

    The search explores the refinement tree, pruning children equivalent
    under the pointwise stabilizer of the individualized prefix.
    """
    _check_budget(g, budget, "canonical labeling")
    if aut is None:
        aut = automorphism_group(g, budget=None)
    stabs = {}

    def stab_orbit_reps(prefix, cell):
        key = tuple(prefix)
        if key not in stabs:
            stabs[key] = aut.pointwise_stabilizer(prefix).generators
        gens = stabs[key]
        reps, seen = [], set()
        for w in cell:
            if w not in seen:
                reps.append(w)
                seen |= _orbit(w, gens, g.n)
        return reps

    best = [None, None]

    def visit(cells, prefix):
        cell = target_cell(cells)
        if not cell:
            lab = tuple(cells)
            cand = g.relabel(lab)
            key = (cand.chi, cand.zeta)
            if best[0] is None or key < best[0]:
                best[0], best[1] = key, (cand, lab)
            return
        for w in stab_orbit_reps(prefix, cell):
            nxt, _ = refine(g, individualize(cells, w))
            visit(nxt, prefix + [w])

    start, _ = refine(g, _initial(g))
    visit(start, [])
    return best[1]


def iso_type_key(g: Ccd) -> bytes:
    """Isomorphism-type key: canonical JSON bytes."""
    canon, _ = canonical_form(g, budget=None)
    return canon.dumps().encode()


# ---------------------------------------------------------------------------
# partial isomorphisms


@dataclass(frozen=True)
class PartialIso:
    domain: tuple
    images: tuple

    @classmethod
    def make(cls, domain: Iterable[int], images: Iterable[int]) -> "PartialIso":
        return cls(tuple(domain), tuple(images))

    def __len__(self):
        return len(self.domain)

    def to_json(self) -> dict:
        return {"domain": list(self.domain), "images": list(self.images)}

    def extended(self, x: int, y: int) -> "PartialIso":
        return PartialIso(self.domain + (x,), self.images + (y,))


def validate_partial_iso(g: Ccd, phi: PartialIso) -> None:
    """Raise InvalidPartialIso unless phi is a partial isomorphism of g."""
    d, im = phi.domain, phi.images
    if len(d) != len(im):
        raise InvalidPartialIso("shape", None, "domain and image lists differ in length")
    for seq in (d, im):
        for x in seq:
            if not 0 <= x < g.n:
                raise InvalidPartialIso("shape", (x,), f"vertex {x} out of range")
        if len(set(seq)) != len(seq):
            raise InvalidPartialIso("shape", None, "map is not injective")
    for x, y in zip(d, im):
        if g.chi[x] != g.chi[y]:
            raise InvalidPartialIso(
                "vertex-color", (x,), f"vertex {x} has color {g.chi[x]} but its image {y} has color {g.chi[y]}"
            )
    for i, (x, y) in enumerate(zip(d, im)):
        for j, (x2, y2) in enumerate(zip(d, im)):
            if i != j and g.color(x, x2) != g.color(y, y2):
                raise InvalidPartialIso(
                    "edge-color",
                    (x, x2),
                    f"pair ({x}, {x2}) has color {g.color(x, x2)} but its image ({y}, {y2}) has {g.color(y, y2)}",
                )


def is_partial_iso(g: Ccd, phi: PartialIso) -> bool:
    try:
        validate_partial_iso(g, phi)
    except InvalidPartialIso:
        return False
    return True


def extend_partial_iso(g: Ccd, phi: PartialIso, budget: int | None = AUT_BUDGET) -> Perm | None:
    """An automorphism extending phi, or None if none exists."""
    validate_partial_iso(g, phi)
    if not phi.domain:
        return identity(g.n)
    _check_budget(g, budget, "extension search")
    return _search_iso(g, _initial(g, phi.domain), g, _initial(g, phi.images))


def one_point_extensions(g: Ccd, phi: PartialIso, x: int) -> list:
    """Images y such that phi + (x -> y) is still a partial isomorphism."""
    out = []
    used = set(phi.images)
    for y in range(g.n):
        if y in used or g.chi[y] != g.chi[x]:
            continue
        if all(g.color(a, x) == g.color(b, y) and g.color(x, a) == g.color(y, b) for a, b in zip(phi.domain, phi.images)):
            out.append(y)
    return out


# ---------------------------------------------------------------------------
# ultrahomogeneity


@dataclass
class UhVerdict:
    is_uh: bool
    aut: PermGroup | None  # None when a class splits under refinement
    witness: PartialIso | None = None
    stuck_vertex: int | None = None
    nodes: int = 0

    def to_json(self) -> dict:
        out = {"is_uh": self.is_uh, "nodes": self.nodes}
        if self.aut is not None:
            out["aut"] = self.aut.to_json()
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["stuck_vertex"] = self.stuck_vertex
        return out


def _type_over(g: Ccd, prefix: Sequence[int], x: int) -> tuple:
    return (g.chi[x],) + tuple((g.color(s, x), g.color(x, s)) for s in prefix)


def is_ultrahomogeneous(g: Ccd, budget: int | None = UH_BUDGET, aut: PermGroup | None = None) -> UhVerdict:
    """Decide ultrahomogeneity by the one-point extension property.

    For a tuple S, every partial isomorphism S + x -> S + y extends iff x and
    y share an orbit of the pointwise stabilizer of S.  So g is UH iff, for
    every S, the stabilizer orbits on the rest coincide with the classes of
    equal type over S.  Both sides depend only on the set S, so sets are
    visited once each, and children are taken up to the stabilizer action.
    Points fixed by the stabilizer are never added: for such x the check at
    S + x + U follows from the check at S + U, so a minimal failing set
    contains none of them.
    """
    _check_budget(g, budget, "ultrahomogeneity check")
    if aut is None:
        # a class split by refinement is not one orbit, so Aut is not needed
        cells, _ = refine(g, _initial(g))
        first = {}
        for x, c in enumerate(cells):
            y = first.setdefault(g.chi[x], x)
            if cells[y] != c:
                witness, stuck = _stuck_extension(g, PartialIso((y,), (x,)))
                return UhVerdict(False, None, witness, stuck, 1)
        aut = automorphism_group(g, budget=None)
    n = g.n
    nodes = 0
    visited = set()

    def check(prefix, group):
        nonlocal nodes
        key = frozenset(prefix)
        if key in visited:
            return None
        visited.add(key)
        nodes += 1
        rest = [v for v in range(n) if v not in prefix]
        types = {}
        for x in rest:
            types.setdefault(_type_over(g, prefix, x), []).append(x)
        gens = group.generators
        reps = []
        seen = set()
        for x in rest:
            if x in seen:
                continue
            orb = _orbit(x, gens, n)
            cls = types[_type_over(g, prefix, x)]
            if set(cls) != orb:
                y = next(y for y in cls if y not in orb)
                return PartialIso.make(list(prefix) + [x], list(prefix) + [y])
            seen |= orb
            if len(orb) > 1:
                reps.append(x)
        for x in reps:
            bad = check(prefix + [x], group.pointwise_stabilizer([x]))
            if bad is not None:
                return bad
        return None

    bad = check([], aut)
    if bad is None:
        return UhVerdict(True, aut, nodes=nodes)
    witness, stuck = _stuck_extension(g, bad)
    return UhVerdict(False, aut, witness, stuck, nodes)


def _stuck_extension(g: Ccd, phi: PartialIso) -> tuple:
    """Greedily extend a non-extendable phi until some vertex has no image."""
    while True:
        x = next(v for v in range(g.n) if v not in phi.domain)
        ys = one_point_extensions(g, phi, x)
        if not ys:
            return phi, x
        phi = phi.extended(x, ys[0])


def is_uh_bruteforce(g: Ccd) -> bool:
    """UH by checking every partial isomorphism against all automorphisms (oracle)."""
    import itertools

    auts = automorphisms_bruteforce(g)
    n = g.n
    for k in range(1, n + 1):
        for dom in itertools.permutations(range(n), k):
            if list(dom) != sorted(dom):
                continue
            for im in itertools.permutations(range(n), k):
                phi = PartialIso(dom, im)
                if is_partial_iso(g, phi) and not any(all(a[x] == y for x, y in zip(dom, im)) for a in auts):
                    return False
    return True


def random_partial_iso(g: Ccd, size: int, rng: random.Random) -> PartialIso | None:
    """A random partial isomorphism of the given size, grown point by point."""
    dom = rng.sample(range(g.n), size)
    phi = PartialIso((), ())
    for x in dom:
        ys = one_point_extensions(g, phi, x)
        if not ys:
            return None
        phi = phi.extended(x, rng.choice(ys))
    return phi
