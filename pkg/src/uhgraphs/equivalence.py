"""Equivalence up to color changes and bichromatic symmetrization.

Partial isomorphisms preserve vertex colors, so they only ever compare pairs
inside one *slot*: the ordered pairs within one vertex class, or the pairs
between two classes.  Two CCDs are treated as equivalent when a vertex
bijection maps classes to classes and, slot by slot, the pair colors match up
to a bijective renaming: single edge colors inside a class, color tuples
(zeta(x, y), zeta(y, x)) between classes.  This is the relation generated by
the color moves together with renaming of colors inside each slot, and it
preserves automorphism groups and ultrahomogeneity.

The decision procedure is an isomorphism search whose refinement only uses
relabeling-invariant data (how often a color occurs in its slot).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .ccd import Ccd
from .autiso import _renumber, individualize, target_cell


def _pair_label(g: Ccd, u: int, v: int):
    """Label of (u, v) within its slot, before renaming."""
    if g.chi[u] == g.chi[v]:
        return g.color(u, v)
    return (g.color(u, v), g.color(v, u))


def label_invariants(g: Ccd) -> list:
    """Flat n*n table of relabeling-invariant labels of ordered pairs."""
    n = g.n
    counts = Counter()
    for u, v in g.pairs():
        counts[(g.chi[u], g.chi[v], _pair_label(g, u, v))] += 1
    tuples = Counter((g.chi[u], g.color(u, v), g.color(v, u)) for u, v in g.pairs() if g.chi[u] == g.chi[v])
    inv = [None] * (n * n)
    for u, v in g.pairs():
        cu, cv = g.chi[u], g.chi[v]
        own = counts[(cu, cv, _pair_label(g, u, v))]
        if cu == cv:
            back = counts[(cu, cv, _pair_label(g, v, u))]
            both = tuples[(cu, g.color(u, v), g.color(v, u))]
            inv[u * n + v] = (0, own, back, both, g.color(u, v) == g.color(v, u))
        else:
            inv[u * n + v] = (1, own)
    return inv


def _initial_cells(g: Ccd, inv: list) -> list:
    n = g.n
    classes = g.color_classes()
    keys = []
    for cls in classes:
        intra = sorted(inv[u * n + v] for u in cls for v in cls if u != v)
        keys.append((len(cls), tuple(intra)))
    return _renumber([keys[g.chi[v]] for v in range(n)])


def _refine(g: Ccd, inv: list, cells: Sequence[int]) -> tuple:
    n = g.n
    cells = list(cells)
    k = len(set(cells))
    trace = []
    while True:
        sigs = []
        for v in range(n):
            cnt = Counter((cells[w], inv[v * n + w], inv[w * n + v]) for w in range(n) if w != v)
            sigs.append((cells[v], tuple(sorted(cnt.items()))))
        cells = _renumber(sigs)
        trace.append(tuple(sorted(Counter(sigs).items())))
        k2 = max(cells) + 1
        if k2 == k:
            break
        k = k2
    return cells, hash(tuple(trace))


def structural_invariant(g: Ccd) -> int:
    """Hash that agrees on equivalent graphs (a fast necessary condition)."""
    inv = label_invariants(g)
    cells, trace = _refine(g, inv, _initial_cells(g, inv))
    return hash((g.n, trace))


@dataclass
class EquivalenceWitness:
    """Vertex bijection plus the per-slot color renamings it induces.

    ``iso[v]`` is the image of vertex v; ``vertex_colors`` maps vertex color
    ids; ``slot_maps`` is keyed by (class, class) of the source graph, with the
    first class not larger than the second.
    """

    iso: tuple
    vertex_colors: dict
    slot_maps: dict = field(default_factory=dict)

    def replay(self, g: Ccd) -> Ccd:
        """Rebuild the target graph from g; equals it bit for bit."""
        n = g.n
        chi = [0] * n
        for v in range(n):
            chi[self.iso[v]] = self.vertex_colors[g.chi[v]]
        flat = [-1] * (n * n)
        for u, v in g.pairs():
            cu, cv = g.chi[u], g.chi[v]
            if cu == cv:
                flat[self.iso[u] * n + self.iso[v]] = self.slot_maps[(cu, cv)][g.color(u, v)]
            elif cu < cv:
                a, b = self.slot_maps[(cu, cv)][(g.color(u, v), g.color(v, u))]
                flat[self.iso[u] * n + self.iso[v]] = a
                flat[self.iso[v] * n + self.iso[u]] = b
        return Ccd(n, chi, flat)

    def to_json(self) -> dict:
        return {
            "iso": list(self.iso),
            "vertex_colors": {str(k): v for k, v in sorted(self.vertex_colors.items())},
            "slot_maps": [
                {"slot": list(k), "map": sorted([_jsonable(a), _jsonable(b)] for a, b in m.items())}
                for k, m in sorted(self.slot_maps.items())
            ],
        }


def _jsonable(x):
    return list(x) if isinstance(x, tuple) else x


class _Maps:
    """Incrementally built slot maps with undo, checking bijectivity."""

    def __init__(self, g: Ccd, h: Ccd):
        self.g, self.h = g, h
        self.fwd = {}
        self.bwd = {}
        self.vfwd = {}
        self.vbwd = {}
        self.log = []

    def _bind(self, table, key, val):
        cur = table.get(key)
        if cur is None:
            table[key] = val
            self.log.append((table, key))
            return True
        return cur == val

    def bind_pair(self, u, v, pu, pv) -> bool:
        g, h = self.g, self.h
        cu, cv = g.chi[u], g.chi[v]
        if cu > cv:
            u, v, pu, pv, cu, cv = v, u, pv, pu, cv, cu
        slot = (cu, cv)
        if cu == cv:
            pairs = [((slot, g.color(u, v)), (h.color(pu, pv))), ((slot, g.color(v, u)), (h.color(pv, pu)))]
        else:
            pairs = [((slot, (g.color(u, v), g.color(v, u))), (h.color(pu, pv), h.color(pv, pu)))]
        for key, val in pairs:
            if not self._bind(self.fwd, key, val):
                return False
            if not self._bind(self.bwd, (slot, val), key[1]):
                return False
        return True

    def bind_vertex(self, u, pu) -> bool:
        a, b = self.g.chi[u], self.h.chi[pu]
        return self._bind(self.vfwd, a, b) and self._bind(self.vbwd, b, a)

    def mark(self):
        return len(self.log)

    def undo(self, mark):
        while len(self.log) > mark:
            table, key = self.log.pop()
            del table[key]


def equivalent_up_to_colors(g: Ccd, h: Ccd) -> EquivalenceWitness | None:
    """A witness that g and h are equivalent, or None."""
    if g.n != h.n or sorted(Counter(g.chi).values()) != sorted(Counter(h.chi).values()):
        return None
    ig, ih = label_invariants(g), label_invariants(h)
    c1, t1 = _refine(g, ig, _initial_cells(g, ig))
    c2, t2 = _refine(h, ih, _initial_cells(h, ih))
    maps = _Maps(g, h)
    iso = _search(g, ig, c1, t1, h, ih, c2, t2, maps, {})
    if iso is None:
        return None
    slot_maps = {}
    for (slot, key), val in maps.fwd.items():
        slot_maps.setdefault(slot, {})[key] = val
    return EquivalenceWitness(iso, dict(maps.vfwd), slot_maps)


def _search(g, ig, c1, t1, h, ih, c2, t2, maps, assigned):
    if t1 != t2 or sorted(c1) != sorted(c2):
        return None
    # extend the partial map by singleton cells
    where2 = {}
    for w, c in enumerate(c2):
        where2.setdefault(c, []).append(w)
    mark = maps.mark()
    new = []
    for v, c in enumerate(c1):
        if len(where2[c]) == 1 and v not in assigned:
            new.append((v, where2[c][0]))
    ok = True
    local = dict(assigned)
    for v, w in new:
        if not maps.bind_vertex(v, w):
            ok = False
            break
        for u, pu in local.items():
            if not maps.bind_pair(u, v, pu, w):
                ok = False
                break
        if not ok:
            break
        local[v] = w
    if ok:
        cell = target_cell(c1)
        if not cell:
            return tuple(local[v] for v in range(g.n))
        v = cell[0]
        n1, s1 = _refine(g, ig, individualize(c1, v))
        for w in where2[c1[v]]:
            n2, s2 = _refine(h, ih, individualize(c2, w))
            res = _search(g, ig, n1, s1, h, ih, n2, s2, maps, local)
            if res is not None:
                return res
    maps.undo(mark)
    return None


def equivalent(g: Ccd, h: Ccd) -> bool:
    return equivalent_up_to_colors(g, h) is not None
