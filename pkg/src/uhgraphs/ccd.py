"""Complete colored digraphs (CCDs) and the graph operations on them.

A CCD on vertices 0..n-1 carries a vertex coloring ``chi`` and an edge
coloring ``zeta`` on all ordered pairs of distinct vertices.  Color ids are
kept dense: whatever labels are passed in are renamed, in sorted order, to
0..k-1.  Vertex-colored oriented graphs embed with non-arcs as edge color 0
and arcs as edge color 1.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .perm import Perm


def _sort_key(x):
    return (type(x).__name__, x)


def _dense(values: Sequence) -> tuple:
    names = sorted(set(values), key=_sort_key)
    index = {v: i for i, v in enumerate(names)}
    return tuple(index[v] for v in values)


class Ccd:
    """Immutable complete colored digraph.

    ``zeta`` is stored flat: the color of (u, v) is ``zeta[u * n + v]``; the
    diagonal holds -1.
    """

    __slots__ = ("n", "chi", "zeta", "_hash")

    def __init__(self, n: int, chi: Sequence, zeta: Sequence):
        if n < 1:
            raise ValueError("a CCD needs at least one vertex")
        if len(chi) != n:
            raise ValueError(f"expected {n} vertex colors, got {len(chi)}")
        if len(zeta) != n * n:
            raise ValueError(f"expected {n * n} flat edge entries, got {len(zeta)}")
        off = [zeta[u * n + v] for u in range(n) for v in range(n) if u != v]
        if any(c is None for c in off):
            raise ValueError("edge coloring must be total on ordered pairs")
        dense = iter(_dense(off))
        flat = [-1] * (n * n)
        for u in range(n):
            for v in range(n):
                if u != v:
                    flat[u * n + v] = next(dense)
        self.n = n
        self.chi = _dense(list(chi))
        self.zeta = tuple(flat)
        self._hash = None

    @classmethod
    def from_function(cls, n: int, chi: Sequence, color: Callable[[int, int], object]) -> "Ccd":
        flat = [-1] * (n * n)
        for u in range(n):
            for v in range(n):
                if u != v:
                    flat[u * n + v] = color(u, v)
        return cls(n, chi, flat)

    @classmethod
    def from_edges(cls, n: int, chi: Sequence, edges: Iterable, default=0) -> "Ccd":
        """Build from ``(u, v, color)`` triples; unlisted pairs get ``default``."""
        flat = [default] * (n * n)
        for u, v, c in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            flat[u * n + v] = c
        for i in range(n):
            flat[i * n + i] = -1
        return cls(n, chi, flat)

    def color(self, u: int, v: int) -> int:
        return self.zeta[u * self.n + v]

    def __eq__(self, other):
        return isinstance(other, Ccd) and self.n == other.n and self.chi == other.chi and self.zeta == other.zeta

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.chi, self.zeta))
        return self._hash

    def __repr__(self):
        return f"Ccd(n={self.n}, vcolors={self.num_vertex_colors}, ecolors={self.num_edge_colors})"

    @property
    def num_vertex_colors(self) -> int:
        return max(self.chi) + 1

    @property
    def num_edge_colors(self) -> int:
        return max(self.zeta) + 1 if self.n > 1 else 0

    def vertices(self) -> range:
        return range(self.n)

    def color_classes(self) -> list:
        """Vertex color classes as sorted tuples, indexed by color id."""
        classes = [[] for _ in range(self.num_vertex_colors)]
        for v, c in enumerate(self.chi):
            classes[c].append(v)
        return [tuple(c) for c in classes]

    def pairs(self):
        n = self.n
        for u in range(n):
            for v in range(n):
                if u != v:
                    yield u, v

    def edge_colors(self) -> set:
        return {c for c in self.zeta if c >= 0}

    def matrix(self) -> list:
        n = self.n
        return [list(self.zeta[u * n:(u + 1) * n]) for u in range(n)]

    def relabel(self, p: Perm) -> "Ccd":
        """The isomorphic copy in which vertex i is renamed p[i]."""
        n = self.n
        inv = [0] * n
        for i, x in enumerate(p):
            inv[x] = i
        chi = [self.chi[inv[i]] for i in range(n)]
        flat = [-1] * (n * n)
        for u in range(n):
            for v in range(n):
                if u != v:
                    flat[p[u] * n + p[v]] = self.zeta[u * n + v]
        return Ccd(n, chi, flat)

    def is_oriented(self, arc_color: int = 1) -> bool:
        """True if the colors are {non-arc 0, arc ``arc_color``} and arcs are asymmetric."""
        if not self.edge_colors() <= {0, arc_color}:
            return False
        return all(not (self.color(u, v) == arc_color and self.color(v, u) == arc_color) for u, v in self.pairs())

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        n = self.n
        edges = [[u, v, self.zeta[u * n + v]] for u, v in self.pairs() if self.zeta[u * n + v] != 0]
        return {"edges": edges, "n": n, "vcolors": list(self.chi)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict) -> "Ccd":
        try:
            n = int(data["n"])
            chi = [int(c) for c in data.get("vcolors", [0] * n)]
            edges = [(int(u), int(v), int(c)) for u, v, c in data.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed graph JSON: {exc}") from exc
        for u, v, _ in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        return cls.from_edges(n, chi, edges)

    @classmethod
    def loads(cls, text: str) -> "Ccd":
        return cls.from_json(json.loads(text))

    def to_dot(self, arc_color: int | None = None) -> str:
        """DOT text: one directed edge per arc-colored pair.

        With ``arc_color=None`` an oriented graph uses color 1 as arcs; any
        other CCD emits every nonzero pair with a ``label`` attribute.
        """
        if arc_color is None and self.is_oriented():
            arc_color = 1
        lines = ["digraph G {"]
        for v in range(self.n):
            lines.append(f'  {v} [style=filled, colorscheme=set312, fillcolor={self.chi[v] % 12 + 1}, vcolor={self.chi[v]}];')
        for u, v in self.pairs():
            c = self.color(u, v)
            if arc_color is not None:
                if c == arc_color:
                    lines.append(f"  {u} -> {v};")
            elif c != 0:
                lines.append(f"  {u} -> {v} [label={c}];")
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dot(cls, text: str) -> "Ccd":
        """Parse the DOT dialect produced by :meth:`to_dot`."""
        nodes = {}
        edges = []
        for m in re.finditer(r"^\s*(\d+)\s*\[[^\]]*vcolor=(\d+)[^\]]*\];", text, re.M):
            nodes[int(m.group(1))] = int(m.group(2))
        for m in re.finditer(r"^\s*(\d+)\s*->\s*(\d+)\s*(?:\[label=(\d+)\])?;", text, re.M):
            edges.append((int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)))
        if not nodes:
            raise ValueError("no vertices found in DOT input")
        n = max(nodes) + 1
        return cls.from_edges(n, [nodes.get(v, 0) for v in range(n)], edges)


# ---------------------------------------------------------------------------
# oriented graphs


@dataclass(frozen=True)
class OrientedGraph:
    n: int
    arcs: frozenset
    vcolors: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one vertex")
        if len(self.vcolors) != self.n:
            raise ValueError("vcolors length must equal n")
        for u, v in self.arcs:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u}, {v}) out of range")
            if (v, u) in self.arcs:
                raise ValueError(f"symmetric arc pair ({min(u, v)}, {max(u, v)})")

    @classmethod
    def make(cls, n: int, arcs: Iterable, vcolors: Sequence | None = None) -> "OrientedGraph":
        return cls(n, frozenset(tuple(a) for a in arcs), tuple(vcolors) if vcolors is not None else (0,) * n)


def from_oriented(g: OrientedGraph) -> Ccd:
    return Ccd.from_edges(g.n, g.vcolors, ((u, v, 1) for u, v in g.arcs))


def to_oriented(g: Ccd, arc_color: int = 1) -> OrientedGraph:
    arcs = set()
    for u, v in g.pairs():
        if g.color(u, v) == arc_color:
            if g.color(v, u) == arc_color:
                raise ValueError(f"arc color {arc_color} is symmetric on pair ({min(u, v)}, {max(u, v)})")
            arcs.add((u, v))
    return OrientedGraph(g.n, frozenset(arcs), g.chi)


def oriented(n: int, arcs: Iterable, vcolors: Sequence | None = None) -> Ccd:
    """Shortcut: the CCD of an oriented graph given by its arc list."""
    return from_oriented(OrientedGraph.make(n, arcs, vcolors))


# ---------------------------------------------------------------------------
# constructions


def induced_subgraph(g: Ccd, vertices: Iterable[int]) -> tuple:
    """Return ``(g[U], verts)`` where new vertex i is old vertex ``verts[i]``."""
    verts = tuple(sorted(set(vertices)))
    if not verts:
        raise ValueError("induced subgraph needs a nonempty vertex set")
    n = g.n
    k = len(verts)
    flat = [-1] * (k * k)
    for i, u in enumerate(verts):
        for j, v in enumerate(verts):
            if i != j:
                flat[i * k + j] = g.zeta[u * n + v]
    return Ccd(k, [g.chi[u] for u in verts], flat), verts


def wreath_product(d: Ccd, dp: Ccd, disjoint: bool = True) -> Ccd:
    """Lexicographic product d·dp; vertex (u, u') is numbered u*|dp| + u'.

    With ``disjoint`` the edge colors of the two factors are kept apart;
    without it they are shared, which is the oriented-graph reading.
    """
    m = dp.n

    def color(x, y):
        u, up = divmod(x, m)
        v, vp = divmod(y, m)
        if u == v:
            c = dp.color(up, vp)
            return (1, c) if disjoint else c
        c = d.color(u, v)
        return (0, c) if disjoint else c

    chi = [(d.chi[x // m], dp.chi[x % m]) for x in range(d.n * m)]
    return Ccd.from_function(d.n * m, chi, color)


def color_disjoint_union(g: Ccd, h: Ccd, oriented: bool = False) -> Ccd:
    """Vertices of h follow those of g; h's vertex colors are shifted past g's.

    Cross pairs get one fresh edge color.  With ``oriented`` the factors share
    the arc/non-arc colors and cross pairs are non-arcs, so two oriented
    graphs give an oriented graph.
    """
    n = g.n + h.n
    chi = list(g.chi) + [c + g.num_vertex_colors for c in h.chi]

    def color(u, v):
        if u < g.n and v < g.n:
            c = g.color(u, v)
            return c if oriented else (0, c)
        if u >= g.n and v >= g.n:
            c = h.color(u - g.n, v - g.n)
            return c if oriented else (1, c)
        return 0 if oriented else (2, 0)

    return Ccd.from_function(n, chi, color)


def union_all(graphs: Sequence[Ccd], oriented: bool = False) -> Ccd:
    out = graphs[0]
    for h in graphs[1:]:
        out = color_disjoint_union(out, h, oriented=oriented)
    return out


# ---------------------------------------------------------------------------
# color moves

VERTEX_CHANGE = "vertex-color-change"
EDGE_CHANGE = "edge-color-change"
SYMMETRIZE = "bichromatic-symmetrization"
UNSYMMETRIZE = "inverse-bichromatic-symmetrization"
MOVE_KINDS = (VERTEX_CHANGE, EDGE_CHANGE, SYMMETRIZE, UNSYMMETRIZE)


@dataclass(frozen=True)
class ColorMove:
    """One step of the color equivalence.

    Color changes carry a bijection ``f`` as a tuple (old id i -> f[i]).
    Symmetrizations carry ``(c, d, r, b)``: edge colors c != d and vertex
    colors r != b.  Symmetrization rewrites every pair (u, v) with
    chi(u)=b, chi(v)=r, zeta(v,u)=c, zeta(u,v)=d to zeta(u,v)=c; the inverse
    move rewrites every such pair with zeta(u,v)=zeta(v,u)=c back to d.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise ValueError(f"unknown move kind {self.kind!r}")

    def inverse(self) -> "ColorMove":
        if self.kind in (VERTEX_CHANGE, EDGE_CHANGE):
            inv = [0] * len(self.params)
            for i, x in enumerate(self.params):
                inv[x] = i
            return ColorMove(self.kind, tuple(inv))
        other = UNSYMMETRIZE if self.kind == SYMMETRIZE else SYMMETRIZE
        return ColorMove(other, self.params)

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}

    @classmethod
    def from_json(cls, data: dict) -> "ColorMove":
        return cls(data["kind"], tuple(data["params"]))


def _check_bijection(f, k, what):
    if sorted(f) != list(range(k)):
        raise ValueError(f"{what} change must be a bijection on 0..{k - 1}, got {f}")


def apply_move(g: Ccd, m: ColorMove) -> Ccd:
    n = g.n
    if m.kind == VERTEX_CHANGE:
        _check_bijection(m.params, g.num_vertex_colors, "vertex color")
        return Ccd(n, [m.params[c] for c in g.chi], g.zeta)
    if m.kind == EDGE_CHANGE:
        _check_bijection(m.params, g.num_edge_colors, "edge color")
        return Ccd(n, g.chi, [m.params[c] if c >= 0 else -1 for c in g.zeta])

    c, d, r, b = m.params
    if c == d or r == b:
        raise ValueError("symmetrization needs two distinct edge colors and two distinct vertex colors")
    for col in (c, d):
        if not 0 <= col < g.num_edge_colors:
            raise ValueError(f"edge color {col} does not occur in the graph")
    for col in (r, b):
        if not 0 <= col < g.num_vertex_colors:
            raise ValueError(f"vertex color {col} does not occur in the graph")
    src, dst = (d, c) if m.kind == SYMMETRIZE else (c, d)
    flat = list(g.zeta)
    blues = [u for u in range(n) if g.chi[u] == b]
    reds = [v for v in range(n) if g.chi[v] == r]
    for u in blues:
        for v in reds:
            if g.zeta[v * n + u] != c:
                continue
            here = g.zeta[u * n + v]
            if here == dst:
                raise ValueError(
                    f"move is not injective: pair ({u}, {v}) already carries ({dst}, {c})"
                )
            if here == src:
                flat[u * n + v] = dst
    remaining = set(x for x in flat if x >= 0)
    if remaining != g.edge_colors():
        lost = sorted(g.edge_colors() - remaining)
        raise ValueError(f"move would eliminate edge color(s) {lost}; it would not be invertible")
    return Ccd(n, g.chi, flat)


def apply_moves(g: Ccd, moves: Iterable[ColorMove]) -> Ccd:
    for m in moves:
        g = apply_move(g, m)
    return g


# ---------------------------------------------------------------------------
# connectivity and partitions

HOMOGENEOUS = "homogeneous"
MATCHING = "matching"
OTHER = "other"


def connectivity_type(g: Ccd, R: Iterable[int], B: Iterable[int]) -> tuple:
    """Classify how R and B are joined: ``(kind, alpha)``.

    ``alpha`` is a dict R -> B witnessing a matching connection, else None.
    """
    R, B = sorted(set(R)), sorted(set(B))
    if not R or not B:
        raise ValueError("R and B must be nonempty")
    if set(R) & set(B):
        raise ValueError("R and B must be disjoint")
    types = {}
    for r in R:
        for b in B:
            types.setdefault((g.color(r, b), g.color(b, r)), []).append((r, b))
    if len(types) == 1:
        return HOMOGENEOUS, None
    if len(types) != 2 or len(R) != len(B):
        return OTHER, None
    # with |R| = 2 both types form matchings; prefer the non-(0,0) one
    for t in sorted(types, key=lambda t: (len(types[t]), -t[0], -t[1])):
        pairs = types[t]
        if len(pairs) != len(R):
            continue
        alpha = dict(pairs)
        if len(alpha) == len(R) and len(set(alpha.values())) == len(B):
            return MATCHING, alpha
    return OTHER, None


def ordered_partition(parts: Iterable[Iterable[int]], n: int | None = None, allow_empty: bool = False) -> tuple:
    """Validate and freeze an ordered partition (tuple of frozensets)."""
    out = tuple(frozenset(p) for p in parts)
    seen = set()
    for p in out:
        if not p and not allow_empty:
            raise ValueError("ordered partitions have nonempty parts")
        if seen & p:
            raise ValueError("parts must be disjoint")
        seen |= p
    if n is not None and seen != set(range(n)):
        raise ValueError(f"partition does not cover 0..{n - 1}")
    return out


def map_partition(p: Perm, A: tuple) -> tuple:
    return tuple(frozenset(p[x] for x in part) for part in A)


def refine_coloring(g: Ccd, partitions: Sequence[tuple]) -> Ccd:
    """Recolor v by (chi(v), index of v's part in each partition)."""
    n = g.n
    index = []
    for A in partitions:
        where = {}
        for i, part in enumerate(A):
            for x in part:
                where[x] = i
        if set(where) != set(range(n)):
            raise ValueError("partition does not cover the vertex set")
        index.append(where)
    chi = [(g.chi[v],) + tuple(w[v] for w in index) for v in range(n)]
    return Ccd(n, chi, g.zeta)


def partition_from_labels(labels: Sequence) -> tuple:
    """Ordered partition grouping equal labels, parts ordered by label."""
    groups = {}
    for v, lab in enumerate(labels):
        groups.setdefault(lab, set()).add(v)
    return tuple(frozenset(groups[k]) for k in sorted(groups, key=_sort_key))
