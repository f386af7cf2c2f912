"""Partition systems, extension conditions, easygoing block systems and blow-ups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .autiso import (
    PartialIso,
    automorphism_group,
    canonical_form,
    is_ultrahomogeneous,
    iso_type_key,
)
from .ccd import Ccd, induced_subgraph, map_partition, ordered_partition, refine_coloring
from .errors import BudgetExceeded
from .perm import BlockSystem, Perm, PermGroup, induced_action, inverse, is_permutational_isomorphism, mul

SUBSET_CAP = 12


# ---------------------------------------------------------------------------
# neighborhood partitions and partition orbits


def _connection_labels(g: Ccd, R: Sequence[int], others: Iterable[int]) -> list:
    return sorted({(g.color(b, r), g.color(r, b)) for b in others for r in R})


def _labeled_partition(g: Ccd, R: Sequence[int], b: int, labels: Sequence) -> tuple:
    """Parts of R (as local indices) by connection label, empty parts kept."""
    index = {lab: i for i, lab in enumerate(labels)}
    parts = [set() for _ in labels]
    for i, r in enumerate(R):
        parts[index[(g.color(b, r), g.color(r, b))]].add(i)
    return tuple(frozenset(p) for p in parts)


def neighborhood_partition(g: Ccd, R: Iterable[int], b: int) -> tuple:
    """A(b): R split by how b connects to it, as an ordered partition of R.

    For oriented graphs the parts are (out-neighbors, in-neighbors, rest);
    otherwise one part per color pair (zeta(b, r), zeta(r, b)) in increasing
    order.  Empty parts are dropped.
    """
    R = sorted(set(R))
    if b in R:
        raise ValueError(f"vertex {b} lies in R")
    labels = _connection_labels(g, R, [b])
    if g.is_oriented():
        rank = {(1, 0): 0, (0, 1): 1, (0, 0): 2}
        labels.sort(key=rank.__getitem__)
    parts = []
    for lab in labels:
        parts.append(frozenset(r for r in R if (g.color(b, r), g.color(r, b)) == lab))
    return tuple(p for p in parts if p)


@dataclass(frozen=True)
class PartitionOrbit:
    base: tuple
    members: tuple

    def __len__(self):
        return len(self.members)

    def __contains__(self, A):
        return A in self.members


def _orbit_of_partition(A: tuple, gens: Sequence[Perm]) -> list:
    seen = {A: None}
    queue = [A]
    for X in queue:
        for p in gens:
            Y = map_partition(p, X)
            if Y not in seen:
                seen[Y] = None
                queue.append(Y)
    return queue


def partition_orbit(g: Ccd, A: Sequence, aut: PermGroup | None = None) -> PartitionOrbit:
    """The orbit of the ordered partition A under Aut(g)."""
    A = ordered_partition(A, allow_empty=True)
    covered = set().union(*A) if A else set()
    if covered != set(range(g.n)):
        raise ValueError("partition does not cover the vertex set")
    if aut is None:
        aut = automorphism_group(g)
    return PartitionOrbit(A, tuple(_orbit_of_partition(A, aut.generators)))


def _mask_reps(k: int, perms: Sequence[Perm], cap: int = SUBSET_CAP):
    """Nonempty subsets of range(k), as bitmasks, one per orbit of the perms."""
    if k > cap:
        raise BudgetExceeded(f"subset enumeration over {k} items", cap)
    seen = set()
    for mask in range(1, 1 << k):
        if mask in seen:
            continue
        orbit = {mask}
        queue = [mask]
        for m in queue:
            for p in perms:
                img = 0
                for i in range(k):
                    if m >> i & 1:
                        img |= 1 << p[i]
                if img not in orbit:
                    orbit.add(img)
                    queue.append(img)
        seen |= orbit
        yield mask


def _action_on(members: Sequence, gens: Sequence[Perm]) -> list:
    """Permutations of member indices induced by gens (None if not closed)."""
    index = {A: i for i, A in enumerate(members)}
    out = []
    for p in gens:
        img = []
        for A in members:
            j = index.get(map_partition(p, A))
            if j is None:
                return None
            img.append(j)
        out.append(tuple(img))
    return out


def is_uh_partition_system(g: Ccd, A: Sequence, aut: PermGroup | None = None, members: Sequence | None = None) -> tuple:
    """(verdict, failing subset or None) for the orbit system of A.

    Every nonempty subset of the orbit is tried, up to the action of Aut(g);
    the refined coloring only depends on the subset used.
    """
    if aut is None:
        aut = automorphism_group(g)
    if members is None:
        members = partition_orbit(g, A, aut).members
    action = _action_on(members, aut.generators)
    for mask in _mask_reps(len(members), action):
        subset = [members[i] for i in range(len(members)) if mask >> i & 1]
        if not is_ultrahomogeneous(refine_coloring(g, subset)).is_uh:
            return False, tuple(subset)
    return True, None


# ---------------------------------------------------------------------------
# easygoing block systems


def is_easygoing(H: Ccd, blocks: BlockSystem, aut: PermGroup | None = None) -> tuple:
    """(verdict, first violating set of block indices or None)."""
    if aut is None:
        aut = automorphism_group(H)
    if not blocks.is_invariant(aut.generators):
        raise ValueError("block system is not invariant under Aut(H)")
    top, _ = induced_action(aut, blocks)
    k = len(blocks)
    for mask in _mask_reps(k, top.generators):
        chosen = [i for i in range(k) if mask >> i & 1]
        pts = [x for i in chosen for x in blocks.blocks[i]]
        left, _ = induced_action(aut.pointwise_stabilizer(pts), blocks)
        right = top.pointwise_stabilizer(chosen)
        if left.order() != right.order():
            return False, tuple(chosen)
    return True, None


def easygoing_adjust(H: Ccd, blocks: BlockSystem, psi: Perm, phi: Perm, chosen: Sequence[int], aut: PermGroup | None = None) -> Perm:
    """tau in Aut(H) acting like psi on blocks and like phi on the chosen blocks."""
    if aut is None:
        aut = automorphism_group(H)
    pts = [x for i in chosen for x in blocks.blocks[i]]
    want = blocks.project(mul(inverse(phi), psi))
    for rho in aut.pointwise_stabilizer(pts).elements():
        if blocks.project(rho) == want:
            return mul(phi, rho)
    raise ValueError("no adjustment exists; H is not easygoing here or psi, phi disagree on the chosen blocks")


# ---------------------------------------------------------------------------
# the general extension conditions

CONDITION_NAMES = (
    "induced graphs ultrahomogeneous",
    "neighborhood partitions form an ultrahomogeneous system",
    "blue classes form a block system",
    "block actions agree",
    "blue graph easygoing",
)


@dataclass
class ExtensionReport:
    conditions: list
    witnesses: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.conditions)

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "conditions": [
                {"name": name, "value": val, "witness": _json_witness(self.witnesses.get(i + 1))}
                for i, (name, val) in enumerate(zip(CONDITION_NAMES, self.conditions))
            ],
        }


def _json_witness(w):
    if w is None:
        return None
    if isinstance(w, PartialIso):
        return w.to_json()
    if isinstance(w, (tuple, list)):
        return [_json_witness(x) for x in w]
    if isinstance(w, frozenset):
        return sorted(w)
    if isinstance(w, dict):
        return {str(k): _json_witness(v) for k, v in w.items()}
    return w


def _globalize(phi: PartialIso, verts: Sequence[int]) -> PartialIso:
    return PartialIso(tuple(verts[x] for x in phi.domain), tuple(verts[x] for x in phi.images))


def check_general_extension(g: Ccd, R: Iterable[int], B: Iterable[int], short_circuit: bool = False) -> ExtensionReport:
    """Evaluate the five conditions for the bichromatic graph g = R + B."""
    R, B = sorted(set(R)), sorted(set(B))
    if len(g.color_classes()) != 2 or set(R) | set(B) != set(range(g.n)):
        raise ValueError("check_general_extension needs a bichromatic graph split as R and B")
    if len({g.chi[v] for v in R}) != 1 or len({g.chi[v] for v in B}) != 1 or g.chi[R[0]] == g.chi[B[0]]:
        raise ValueError("R and B must be the two vertex color classes")
    conds = [None] * 5
    wit = {}
    GR, _ = induced_subgraph(g, R)
    GB, _ = induced_subgraph(g, B)
    autR = automorphism_group(GR)
    autB = automorphism_group(GB)

    vR = is_ultrahomogeneous(GR, aut=autR)
    vB = is_ultrahomogeneous(GB, aut=autB)
    conds[0] = vR.is_uh and vB.is_uh
    if not vR.is_uh:
        wit[1] = _globalize(vR.witness, R)
    elif not vB.is_uh:
        wit[1] = _globalize(vB.witness, B)
    if short_circuit and not conds[0]:
        return ExtensionReport([c if c is not None else False for c in conds], wit)

    labels = _connection_labels(g, R, B)
    part_of = [_labeled_partition(g, R, b, labels) for b in B]
    members = sorted(set(part_of), key=lambda A: tuple(sorted(p) for p in A))
    index = {A: i for i, A in enumerate(members)}
    orbit = _orbit_of_partition(members[0], autR.generators)
    if set(orbit) != set(members):
        conds[1] = False
        wit[2] = {"not_an_orbit": [[sorted(R[x] for x in p) for p in A] for A in members]}
    else:
        ok, bad = is_uh_partition_system(GR, members[0], autR, members)
        conds[1] = ok
        if not ok:
            wit[2] = {"subset": [[sorted(R[x] for x in p) for p in A] for A in bad]}
    if short_circuit and not conds[1]:
        return ExtensionReport([c if c is not None else False for c in conds], wit)

    # X(A) as blocks of G[B] (local indices)
    block_of = [index[A] for A in part_of]
    blocks = BlockSystem.from_blocks(
        [i for i in range(len(B)) if block_of[i] == k] for k in range(len(members))
    ) if len(set(map(len, _groups(block_of)))) == 1 else None
    if blocks is None:
        conds[2] = False
        wit[3] = {"unequal_blocks": [[B[i] for i in grp] for grp in _groups(block_of)]}
    else:
        bad = next((p for p in autB.generators if not blocks.is_invariant([p])), None)
        conds[2] = bad is None
        if bad is not None:
            wit[3] = {"automorphism": [B[bad[i]] for i in range(len(B))]}
    if short_circuit and not conds[2]:
        return ExtensionReport([c if c is not None else False for c in conds], wit)

    # condition 4: compare the two actions on member indices
    actR = _action_on(members, autR.generators)
    if not conds[2] or actR is None:
        conds[3] = False
        wit[4] = {"undefined": "block action not well defined"}
    else:
        k = len(members)
        hat = PermGroup(k, actR)
        grp = _groups(block_of)
        onB = PermGroup(k, [tuple(block_of[p[grp[i][0]]] for i in range(k)) for p in autB.generators])
        missing = next((h for h in onB.generators if h not in hat), None)
        extra = next((h for h in hat.generators if h not in onB), None)
        conds[3] = missing is None and extra is None
        if not conds[3]:
            wit[4] = {"element": list(missing if missing is not None else extra)}
    if short_circuit and not conds[3]:
        return ExtensionReport([c if c is not None else False for c in conds], wit)

    if not conds[2]:
        conds[4] = False
        wit[5] = {"undefined": "no block system"}
    else:
        ok, bad = is_easygoing(GB, blocks, autB)
        conds[4] = ok
        if not ok:
            wit[5] = {"blocks": [[B[i] for i in blocks.blocks[j]] for j in bad]}
    return ExtensionReport(conds, wit)


def _groups(labels: Sequence[int]) -> list:
    out = {}
    for i, lab in enumerate(labels):
        out.setdefault(lab, []).append(i)
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# minimal extension


def _tau(A: tuple, A2: tuple) -> tuple:
    return tuple(A2.index(part) for part in A)


def minimal_extension(g: Ccd, A: Sequence, strict: bool = True) -> Ccd:
    """Add one blue vertex per member of the orbit of A (red graph g).

    With ``strict`` A must be a block system of Aut(g).  Without it the
    construction is still carried out (the part-translation cross-check is
    skipped when parts do not correspond), as for A = ({v}, rest) on E_n.
    """
    if g.num_vertex_colors != 1:
        raise ValueError("minimal_extension expects a monochromatic graph")
    A = ordered_partition(A, g.n)
    aut = automorphism_group(g)
    unordered = BlockSystem.from_blocks(A) if len({len(p) for p in A}) == 1 else None
    is_block = unordered is not None and unordered.is_invariant(aut.generators)
    if strict and not is_block:
        raise ValueError("precondition failed: A is not a block system of Aut(G)")
    members = sorted(partition_orbit(g, A, aut).members, key=lambda X: tuple(tuple(sorted(p)) for p in X))
    ok, bad = is_uh_partition_system(g, A, aut, members)
    if not ok:
        raise ValueError("precondition failed: the orbit of A is not an ultrahomogeneous system of partitions")
    n, k = g.n, len(members)
    part_index = [{x: i for i, p in enumerate(M) for x in p} for M in members]
    keys = {}
    for i, j in itertools.permutations(range(k), 2):
        keys[(i, j)] = iso_type_key(refine_coloring(g, (members[i], members[j])))
    # the Iso-Type classes must coincide with the part-translation classes
    taus = {(i, j): _tau(members[i], members[j]) for i, j in keys} if is_block else {}
    for p, q in itertools.combinations(taus, 2):
        if (keys[p] == keys[q]) != (taus[p] == taus[q]):
            raise AssertionError(f"Iso-Type and part translation disagree on pairs {p} and {q}")

    def color(u, v):
        if u < n and v < n:
            return (0, g.color(u, v), b"")
        if u >= n and v >= n:
            return (2, 0, keys[(u - n, v - n)])
        r, b = (u, v - n) if u < n else (v, u - n)
        return (1, part_index[b][r], b"")

    return Ccd.from_function(n + k, [0] * n + [1] * k, color)


# ---------------------------------------------------------------------------
# blow-ups


@dataclass(frozen=True)
class BlowupSpec:
    """Blow up the class R of ``host`` by ``filler`` along ``blocks``.

    ``tau[i]`` is the vertex of R that block i replaces.
    """

    host: Ccd
    R: tuple
    filler: Ccd
    blocks: BlockSystem
    tau: tuple


@dataclass
class Blowup:
    graph: Ccd
    easygoing: bool
    origin: tuple  # origin[v] = host vertex that v maps to


def blow_up(spec: BlowupSpec, disjoint: bool = True, check: bool = True) -> Blowup:
    g, H, blocks = spec.host, spec.filler, spec.blocks
    R = tuple(sorted(spec.R))
    if len(spec.tau) != len(blocks) or sorted(spec.tau) != list(R):
        raise ValueError("tau must be a bijection from blocks onto R")
    if blocks.degree != H.n:
        raise ValueError("block system does not match the filler")
    autH = automorphism_group(H)
    if check:
        GR, _ = induced_subgraph(g, R)
        top, _ = induced_action(autH, blocks)
        local = {r: i for i, r in enumerate(R)}
        rho = tuple(local[r] for r in spec.tau)
        if not is_permutational_isomorphism(rho, top, automorphism_group(GR)):
            raise ValueError("tau is not a permutational isomorphism onto Aut(G[R])")
    rest = [v for v in range(g.n) if v not in set(R)]
    bo = blocks.block_of
    origin = tuple(rest) + tuple(spec.tau[bo[x]] for x in range(H.n))
    m = len(rest)

    def color(u, v):
        if u >= m and v >= m:
            c = H.color(u - m, v - m)
            return (1, c) if disjoint else c
        c = g.color(origin[u], origin[v])
        return (0, c) if disjoint else c

    graph = Ccd.from_function(m + H.n, [g.chi[o] for o in origin], color)
    easy, _ = is_easygoing(H, blocks, autH)
    return Blowup(graph, easy, origin)


@dataclass
class Decomposition:
    """g is the blow-up of ``quotient`` at the class ``color`` by g[R]."""

    color: int
    R: tuple
    filler: Ccd
    blocks: BlockSystem  # on local indices of R
    quotient: Ccd
    quotient_vertex: tuple  # vertex of quotient for each vertex of g

    def to_json(self) -> dict:
        return {
            "color": self.color,
            "class": list(self.R),
            "blocks": [[self.R[x] for x in b] for b in self.blocks.blocks],
            "filler": self.filler.to_json(),
            "quotient": self.quotient.to_json(),
        }


def _pair_type(H: Ccd, X: Sequence[int], Y: Sequence[int]) -> bytes:
    sub, verts = induced_subgraph(H, list(X) + list(Y))
    xs = set(X)
    marked = Ccd(sub.n, [0 if v in xs else 1 for v in verts], sub.zeta)
    return canonical_form(marked)[0].dumps().encode()


def _type_quotient(H: Ccd, blocks: BlockSystem) -> Ccd:
    k = len(blocks)
    types = {}
    for i, j in itertools.permutations(range(k), 2):
        types[(i, j)] = _pair_type(H, blocks.blocks[i], blocks.blocks[j])
    return Ccd.from_function(k, [0] * k, lambda i, j: types[(i, j)])


def blowup_decompositions(g: Ccd, only_color: int | None = None) -> list:
    """All ways in which g is a non-trivial blow-up at one of its classes."""
    from .perm import all_block_systems

    out = []
    for col, R in enumerate(g.color_classes()):
        if only_color is not None and col != only_color:
            continue
        if len(R) < 4:
            continue
        H, _ = induced_subgraph(g, R)
        autH = automorphism_group(H)
        rest = [v for v in range(g.n) if g.chi[v] != col]
        for bs in all_block_systems(autH):
            if bs.is_trivial():
                continue
            if any(len({(g.color(R[x], w), g.color(w, R[x])) for x in b}) != 1 for b in bs.blocks for w in rest):
                continue
            Q = _type_quotient(H, bs)
            top, _ = induced_action(autH, bs)
            if automorphism_group(Q) != top:
                continue
            out.append(_assemble(g, col, R, H, bs, Q, rest))
    return out


def _assemble(g, col, R, H, bs, Q, rest) -> Decomposition:
    """The quotient host: other classes untouched, R replaced by Q."""
    m = len(rest)
    k = len(bs)
    rep = [R[b[0]] for b in bs.blocks]
    vert = [None] * g.n
    for i, v in enumerate(rest):
        vert[v] = i
    bo = bs.block_of
    for x, v in enumerate(R):
        vert[v] = m + bo[x]

    def color(u, v):
        if u >= m and v >= m:
            return (1, Q.color(u - m, v - m))
        a = rest[u] if u < m else rep[u - m]
        b = rest[v] if v < m else rep[v - m]
        return (0, g.color(a, b))

    chi = [g.chi[v] for v in rest] + [col] * k
    host = Ccd.from_function(m + k, chi, color)
    return Decomposition(col, tuple(R), H, bs, host, tuple(vert))
