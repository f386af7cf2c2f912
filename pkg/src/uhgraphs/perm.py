"""Permutation groups on 0..n-1.

Permutations are plain tuples of images, ``p[i]`` being the image of ``i``.
Products follow function composition: ``mul(p, q)`` applies ``q`` first.

A :class:`PermGroup` is given by generators.  Orders, membership and point
stabilizers come from a Schreier-Sims base and strong generating set, so they
work for groups such as Sym(12) whose elements are far too many to list.
Element enumeration (:meth:`PermGroup.elements`) is available on demand and
guarded by a cap.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import BudgetExceeded, GroupTooLarge

Perm = tuple

DEFAULT_CAP = 10**7


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_identity(p: Sequence[int]) -> bool:
    return all(i == x for i, x in enumerate(p))


def mul(p: Perm, q: Perm) -> Perm:
    """Composition p∘q (apply q, then p)."""
    return tuple(p[x] for x in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def power(p: Perm, k: int) -> Perm:
    if k < 0:
        return power(inverse(p), -k)
    out = identity(len(p))
    base = p
    while k:
        if k & 1:
            out = mul(base, out)
        base = mul(base, base)
        k >>= 1
    return out


def perm_order(p: Perm) -> int:
    seen = [False] * len(p)
    out = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        out = out * length // math.gcd(out, length)
    return out


def check_perm(p: Sequence[int]) -> Perm:
    p = tuple(p)
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"not a permutation: {p}")
    return p


def cycle(n: int, *points: int) -> Perm:
    """The cycle (points[0] points[1] ...) on n points."""
    img = list(range(n))
    for a, b in zip(points, points[1:] + points[:1]):
        img[a] = b
    return tuple(img)


def fmt_perm(p: Perm) -> str:
    """Cycle notation, e.g. ``(0 1)(2 3)``; the identity is ``()``."""
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


# ---------------------------------------------------------------------------
# Schreier-Sims


def _transversal(point: int, gens: Sequence[Perm], n: int) -> dict:
    """Map each orbit point y to a group element sending ``point`` to y."""
    trans = {point: identity(n)}
    queue = [point]
    for y in queue:
        u = trans[y]
        for g in gens:
            z = g[y]
            if z not in trans:
                trans[z] = mul(g, u)
                queue.append(z)
    return trans


class _Chain:
    """Base and strong generating set built by deterministic Schreier-Sims."""

    def __init__(self, n: int, gens: Sequence[Perm], base_prefix: Sequence[int] = ()):
        self.n = n
        gens = [g for g in gens if not is_identity(g)]
        base = list(base_prefix)
        for g in gens:
            if all(g[b] == b for b in base):
                base.append(next(i for i in range(n) if g[i] != i))
        self.base = base
        self.strong = list(gens)
        self.trans = [None] * len(base)
        for i in range(len(base)):
            self._recompute(i)
        self._complete()

    def level_gens(self, i: int) -> list:
        fixed = self.base[:i]
        return [s for s in self.strong if all(s[b] == b for b in fixed)]

    def _recompute(self, i: int) -> None:
        self.trans[i] = _transversal(self.base[i], self.level_gens(i), self.n)

    def sift(self, h: Perm, start: int = 0):
        for j in range(start, len(self.base)):
            y = h[self.base[j]]
            u = self.trans[j].get(y)
            if u is None:
                return h, j
            h = mul(inverse(u), h)
        return h, len(self.base)

    def _complete(self) -> None:
        i = len(self.base) - 1
        while i >= 0:
            i = self._process_level(i)

    def _process_level(self, i: int) -> int:
        b = self.base[i]
        trans = self.trans[i]
        for y in list(trans):
            u = trans[y]
            for s in self.level_gens(i):
                t = mul(s, u)
                sg = mul(inverse(trans[t[b]]), t)
                if is_identity(sg):
                    continue
                h, j = self.sift(sg, i + 1)
                if j < len(self.base) or not is_identity(h):
                    self.strong.append(h)
                    if j == len(self.base):
                        self.base.append(next(x for x in range(self.n) if h[x] != x))
                        self.trans.append(None)
                    for level in range(i + 1, j + 1):
                        self._recompute(level)
                    return j
        return i - 1

    def order(self) -> int:
        return math.prod(len(t) for t in self.trans)

    def contains(self, p: Perm) -> bool:
        h, j = self.sift(p)
        return j == len(self.base) and is_identity(h)


# ---------------------------------------------------------------------------


class PermGroup:
    """A permutation group of the given degree, presented by generators.

    The chain and the element closure are computed lazily and cached; both
    caches are idempotent, so a group may be shared once populated.
    """

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = (), *, cap: int = DEFAULT_CAP):
        gens = {check_perm(g) for g in generators}
        for g in gens:
            if len(g) != degree:
                raise ValueError(f"generator {g} has degree {len(g)}, expected {degree}")
        self.degree = degree
        self.generators = tuple(sorted(g for g in gens if not is_identity(g)))
        self.cap = cap
        self._chain = None
        self._elements = None

    def __repr__(self):
        gens = ", ".join(fmt_perm(g) for g in self.generators)
        return f"PermGroup(degree={self.degree}, gens=[{gens}])"

    @property
    def chain(self) -> _Chain:
        if self._chain is None:
            self._chain = _Chain(self.degree, self.generators)
        return self._chain

    def order(self) -> int:
        return self.chain.order()

    def __len__(self):
        return self.order()

    def __contains__(self, p) -> bool:
        p = tuple(p)
        return len(p) == self.degree and self.chain.contains(p)

    def __eq__(self, other):
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.degree == other.degree and self.is_subgroup_of(other) and other.is_subgroup_of(self)

    def __hash__(self):
        return hash((self.degree, self.order()))

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(g in other for g in self.generators)

    def is_trivial(self) -> bool:
        return not self.generators

    def is_abelian(self) -> bool:
        return all(mul(a, b) == mul(b, a) for a, b in itertools.combinations(self.generators, 2))

    def elements(self) -> frozenset:
        """All group elements, by closure under the generators."""
        if self._elements is None:
            if self.order() > self.cap:
                raise GroupTooLarge(self.cap)
            elems = {identity(self.degree)}
            frontier = list(elems)
            while frontier:
                nxt = []
                for x in frontier:
                    for g in self.generators:
                        y = mul(g, x)
                        if y not in elems:
                            elems.add(y)
                            nxt.append(y)
                frontier = nxt
            self._elements = frozenset(elems)
        return self._elements

    def orbit(self, x: int) -> frozenset:
        return frozenset(_transversal(x, self.generators, self.degree))

    def orbits(self) -> list:
        """Orbits as sorted tuples, ordered by smallest point."""
        return orbit_partition(self.degree, self.generators)

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbit(0)) == self.degree

    def pointwise_stabilizer(self, points: Iterable[int]) -> "PermGroup":
        points = sorted(set(points))
        if not points:
            return self
        ch = _Chain(self.degree, self.generators, points)
        return PermGroup(self.degree, ch.level_gens(len(points)), cap=self.cap)

    def setwise_stabilizer(self, points: Iterable[int]) -> "PermGroup":
        """Setwise stabilizer by filtering the element closure."""
        s = frozenset(points)
        keep = [g for g in self.elements() if all(g[x] in s for x in s)]
        return PermGroup(self.degree, keep, cap=self.cap)

    def subgroup_from_elements(self, elems: Iterable[Perm]) -> "PermGroup":
        return PermGroup(self.degree, elems, cap=self.cap)

    def order_spectrum(self) -> Counter:
        """Counter mapping element order to the number of elements of that order."""
        return Counter(perm_order(g) for g in self.elements())

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [list(g) for g in self.generators], "order": self.order()}


def orbit_partition(n: int, gens: Sequence[Perm]) -> list:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i in range(n):
            a, b = find(i), find(g[i])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(tuple(v) for v in groups.values())


def closure(gens: Iterable[Sequence[int]], degree: int | None = None, cap: int = DEFAULT_CAP) -> PermGroup:
    """Group generated by ``gens``; raises GroupTooLarge past ``cap`` elements."""
    gens = [tuple(g) for g in gens]
    if degree is None:
        if not gens:
            raise ValueError("degree required when there are no generators")
        degree = len(gens[0])
    group = PermGroup(degree, gens, cap=cap)
    group.elements()
    return group


def symmetric_group(n: int) -> PermGroup:
    gens = []
    if n >= 2:
        gens.append(cycle(n, 0, 1))
    if n >= 3:
        gens.append(cycle(n, *range(n)))
    return PermGroup(n, gens)


def alternating_group(n: int) -> PermGroup:
    gens = [cycle(n, 0, 1, k) for k in range(2, n)]
    return PermGroup(n, gens)


def cyclic_group(n: int) -> PermGroup:
    return PermGroup(n, [cycle(n, *range(n))] if n > 1 else [])


def trivial_group(n: int) -> PermGroup:
    return PermGroup(n, [])


# ---------------------------------------------------------------------------
# block systems


@dataclass(frozen=True)
class BlockSystem:
    """An unordered partition of 0..n-1 into equal-size blocks."""

    blocks: tuple

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "BlockSystem":
        bl = sorted(tuple(sorted(b)) for b in blocks)
        sizes = {len(b) for b in bl}
        if len(sizes) > 1 or any(len(b) == 0 for b in bl):
            raise ValueError(f"blocks must be nonempty and of equal size: {bl}")
        flat = sorted(x for b in bl for x in b)
        if flat != list(range(len(flat))):
            raise ValueError("blocks must partition 0..n-1")
        return cls(tuple(bl))

    @property
    def degree(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    @property
    def block_of(self) -> tuple:
        out = [0] * self.degree
        for i, b in enumerate(self.blocks):
            for x in b:
                out[x] = i
        return tuple(out)

    def __len__(self):
        return len(self.blocks)

    def is_trivial(self) -> bool:
        return len(self.blocks) == 1 or self.block_size == 1

    def is_invariant(self, gens: Iterable[Perm]) -> bool:
        bset = {frozenset(b) for b in self.blocks}
        return all(frozenset(g[x] for x in b) in bset for g in gens for b in self.blocks)

    def project(self, p: Perm) -> Perm:
        """The permutation of block indices induced by ``p``."""
        bo = self.block_of
        return tuple(bo[p[b[0]]] for b in self.blocks)

    def to_json(self) -> list:
        return [list(b) for b in self.blocks]


def _pair_closure(n: int, gens: Sequence[Perm], a: int, b: int) -> tuple:
    """Finest invariant partition in which a and b share a class."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        x, y = find(x), find(y)
        if x == y:
            return False
        parent[max(x, y)] = min(x, y)
        return True

    union(a, b)
    queue = [(a, b)]
    while queue:
        x, y = queue.pop()
        for g in gens:
            gx, gy = g[x], g[y]
            if find(gx) != find(gy):
                union(gx, gy)
                queue.append((gx, gy))
    classes = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return tuple(sorted(tuple(c) for c in classes.values()))


def _join(p: tuple, q: tuple, n: int) -> tuple:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (p, q):
        for block in part:
            for x in block[1:]:
                a, c = find(block[0]), find(x)
                if a != c:
                    parent[max(a, c)] = min(a, c)
    classes = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return tuple(sorted(tuple(c) for c in classes.values()))


def minimal_block_systems(group: PermGroup) -> list:
    """Inclusion-minimal non-discrete block systems of a transitive group."""
    n = group.degree
    cands = {_pair_closure(n, group.generators, 0, x) for x in range(1, n)}

    def finer(p, q):
        return p != q and all(any(set(a) <= set(b) for b in q) for a in p)

    mins = [p for p in cands if not any(finer(q, p) for q in cands)]
    return sorted((BlockSystem(p) for p in mins), key=lambda b: (b.block_size, b.blocks))


def all_block_systems(group: PermGroup, max_degree: int = 14) -> list:
    """Every block system of a transitive group, trivial ones included.

    Pair closures of {0, x} are joined until closed; every block system is a
    join of pair closures, so the result is complete.
    """
    n = group.degree
    if n > max_degree:
        raise BudgetExceeded("block-system enumeration degree", max_degree)
    if not group.is_transitive():
        raise ValueError("block systems are defined for transitive groups only")
    found = {tuple((i,) for i in range(n)), (tuple(range(n)),)}
    found |= {_pair_closure(n, group.generators, 0, x) for x in range(1, n)}
    changed = True
    while changed:
        changed = False
        for p, q in itertools.combinations(sorted(found), 2):
            j = _join(p, q, n)
            if j not in found:
                found.add(j)
                changed = True
    systems = [BlockSystem(p) for p in found]
    return sorted(systems, key=lambda b: (b.block_size, b.blocks))


def set_partitions_equal_blocks(n: int, size: int):
    """All partitions of 0..n-1 into blocks of the given size."""
    if n % size:
        return

    def rec(rest):
        if not rest:
            yield ()
            return
        first, others = rest[0], rest[1:]
        for combo in itertools.combinations(others, size - 1):
            block = (first,) + combo
            remaining = tuple(x for x in others if x not in combo)
            for tail in rec(remaining):
                yield (block,) + tail

    yield from rec(tuple(range(n)))


def block_systems_bruteforce(group: PermGroup) -> list:
    """Oracle: filter every equal-block partition for invariance."""
    n = group.degree
    out = []
    for size in range(1, n + 1):
        for part in set_partitions_equal_blocks(n, size):
            bs = BlockSystem(tuple(sorted(part)))
            if bs.is_invariant(group.generators):
                out.append(bs)
    return sorted(out, key=lambda b: (b.block_size, b.blocks))


def induced_action(group: PermGroup, system: BlockSystem) -> tuple:
    """Action on blocks: (group on block indices, projection map)."""
    if not system.is_invariant(group.generators):
        raise ValueError("block system is not invariant under the group")
    gens = [system.project(g) for g in group.generators]
    return PermGroup(len(system), gens, cap=group.cap), system.project


# ---------------------------------------------------------------------------
# wreath products


def wreath(top: PermGroup, fiber: PermGroup, cap: int = DEFAULT_CAP) -> PermGroup:
    """Wreath product on V×W, point (v, w) numbered v*|W| + w.

    ``top`` permutes the fibers, an independent copy of ``fiber`` acts inside
    each fiber; the order is |fiber|^|V| * |top|.
    """
    nv, nw = top.degree, fiber.degree
    if nv * nw > cap:
        raise BudgetExceeded("wreath product degree", cap)
    gens = []
    for g in top.generators:
        gens.append(tuple(g[v] * nw + w for v in range(nv) for w in range(nw)))
    for v0 in range(nv):
        for h in fiber.generators:
            gens.append(tuple(v * nw + (h[w] if v == v0 else w) for v in range(nv) for w in range(nw)))
    return PermGroup(nv * nw, gens, cap=cap)


# ---------------------------------------------------------------------------
# permutational isomorphism


def conjugate(p: Perm, rho: Perm) -> Perm:
    """rho p rho^-1."""
    return mul(rho, mul(p, inverse(rho)))


def is_permutational_isomorphism(rho: Perm, g: PermGroup, h: PermGroup) -> bool:
    if g.order() != h.order():
        return False
    return all(conjugate(x, rho) in h for x in g.generators)


def _orbit_sizes(n: int, gens) -> tuple:
    sizes = [0] * n
    for orb in orbit_partition(n, gens):
        for x in orb:
            sizes[x] = len(orb)
    return tuple(sizes)


def permutational_isomorphism(g: PermGroup, h: PermGroup, max_degree: int = 12) -> Perm | None:
    """A bijection rho with h = {rho x rho^-1 : x in g}, or None.

    Backtracks over images point by point; a candidate image must match
    orbit sizes of the corresponding point stabilizers.
    """
    n = g.degree
    if h.degree != n:
        return None
    if n > max_degree:
        raise BudgetExceeded("permutational isomorphism degree", max_degree)
    if g.order() != h.order():
        return None
    if sorted(map(len, g.orbits())) != sorted(map(len, h.orbits())):
        return None

    def search(xs, ys, g_gens, h_gens):
        k = len(xs)
        if k == n:
            rho = [0] * n
            for x, y in zip(xs, ys):
                rho[x] = y
            rho = tuple(rho)
            return rho if is_permutational_isomorphism(rho, g, h) else None
        gs = _orbit_sizes(n, g_gens)
        hs = _orbit_sizes(n, h_gens)
        if sorted(gs[i] for i in range(n) if i not in xs) != sorted(hs[i] for i in range(n) if i not in ys):
            return None
        x = next(i for i in range(n) if i not in xs)
        used = set(ys)
        for y in range(n):
            if y in used or hs[y] != gs[x]:
                continue
            nxs, nys = xs + [x], ys + [y]
            g_next = _Chain(n, g.generators, nxs).level_gens(len(nxs)) if g_gens else []
            h_next = _Chain(n, h.generators, nys).level_gens(len(nys)) if h_gens else []
            res = search(nxs, nys, g_next, h_next)
            if res is not None:
                return res
        return None

    return search([], [], list(g.generators), list(h.generators))


# ---------------------------------------------------------------------------
# named groups


def _sym_spectrum(n: int, even_only: bool = False) -> Counter:
    spec = Counter()

    def parts(rem, maxp):
        if rem == 0:
            yield ()
            return
        for p in range(min(rem, maxp), 0, -1):
            for tail in parts(rem - p, p):
                yield (p,) + tail

    for shape in parts(n, n):
        if even_only and sum(p - 1 for p in shape) % 2:
            continue
        count = math.factorial(n)
        for p, mult in Counter(shape).items():
            count //= p**mult * math.factorial(mult)
        order = 1
        for p in shape:
            order = order * p // math.gcd(order, p)
        spec[order] += count
    return spec


SL23_SPECTRUM = Counter({1: 1, 2: 1, 3: 8, 4: 6, 6: 8})


def squares_subgroup(group: PermGroup) -> PermGroup:
    return group.subgroup_from_elements(mul(x, x) for x in group.elements())


def is_cyclic_group(group: PermGroup) -> bool:
    n = group.order()
    return any(perm_order(x) == n for x in group.elements())


def is_symmetric_abstract(group: PermGroup, k: int) -> bool:
    return group.order() == math.factorial(k) and group.order_spectrum() == _sym_spectrum(k)


def is_alternating_abstract(group: PermGroup, k: int) -> bool:
    if group.order() != max(1, math.factorial(k) // 2):
        return False
    return group.order_spectrum() == _sym_spectrum(k, even_only=True)


def is_alt4(group: PermGroup) -> bool:
    """Order 12 with no subgroup of index 2 (squares generate) and Alt(4)'s spectrum."""
    if group.order() != 12:
        return False
    return squares_subgroup(group).order() == 12 and is_alternating_abstract(group, 4)


def is_sl23(group: PermGroup) -> bool:
    """Order 24 with SL(2,3)'s element-order spectrum (one involution, no Sym(4))."""
    return group.order() == 24 and group.order_spectrum() == SL23_SPECTRUM


def recognize(group: PermGroup) -> str:
    """Best-effort name for small groups appearing in the classification."""
    n = group.order()
    if n == 1:
        return "1"
    if n <= 10**5 and group.is_abelian() and is_cyclic_group(group):
        return f"Z{n}"
    for k in range(2, 13):
        f = math.factorial(k)
        if f == n and n <= 10**5 and is_symmetric_abstract(group, k):
            return f"Sym({k})"
        if f // 2 == n and k >= 4 and n <= 10**5 and is_alternating_abstract(group, k):
            return f"Alt({k})"
    if n == 24 and is_sl23(group):
        return "SL(2,3)"
    return f"order {n}"


def perms_from_json(items: Iterable[Sequence[int]]) -> list:
    return [check_perm(p) for p in items]


def orbit_of(x, gens: Sequence[Callable]):
    """Orbit of an arbitrary hashable under maps given as callables."""
    seen = {x}
    queue = [x]
    for y in queue:
        for f in gens:
            z = f(y)
            if z not in seen:
                seen.add(z)
                queue.append(z)
    return seen
