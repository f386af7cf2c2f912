"""The classified graphs and a small text grammar for naming them.

Grammar (whitespace ignored)::

    spec   := union | atom
    union  := "union(" spec ("," spec)+ ")"
    atom   := "E(n=N)" | "C(k=3|4)" | "H0" | "EnC3(n=N)" | "C3En(n=N)"
            | "chain(" ["E;"] "n=N,t=T" (";blow=" BLOW)* ")"
            | "tri(" "t=T" (";blow=" BLOW)* ")"
            | "fig4(left)" | "fig4(right)"
    BLOW   := ("EnC3" | "C4" | "C3En:M") "@" CLASS      (CLASS is 1-based)

``E3``, ``C4`` and friends are accepted as shorthands for the monochromatic
atoms.  Realizations are vertex-colored oriented graphs (arc color 1).
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Iterator

from .ccd import Ccd, color_disjoint_union, oriented, wreath_product
from .perm import BlockSystem

H0_ARCS = (
    (1, 2), (2, 5), (5, 6), (6, 1), (3, 4), (4, 7), (7, 8), (8, 3),
    (1, 8), (8, 5), (5, 4), (4, 1), (3, 2), (2, 7), (7, 6), (6, 3),
    (2, 8), (8, 6), (6, 4), (4, 2), (7, 1), (1, 3), (3, 5), (5, 7),
)

MONO_KINDS = ("E", "C", "H0", "EnC3", "C3En")
KINDS = MONO_KINDS + ("chain", "tri", "fig4", "union")


class SpecError(ValueError):
    """Malformed or illegal family spec."""


@dataclass(frozen=True)
class Blow:
    cls: int  # 0-based class index
    kind: str  # "EnC3", "C4" or "C3En"
    size: int = 0  # m for C3En

    def text(self) -> str:
        body = f"C3En:{self.size}" if self.kind == "C3En" else self.kind
        return f"{body}@{self.cls + 1}"


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    n: int = 0
    t: int = 0
    which: str = ""
    blows: tuple = ()
    parts: tuple = ()

    def __str__(self) -> str:
        return format_spec(self)

    @property
    def num_vertices(self) -> int:
        return spec_size(self)


# ---------------------------------------------------------------------------
# constructors


def empty_graph(n: int) -> Ccd:
    return oriented(n, [])


def directed_cycle(k: int) -> Ccd:
    return oriented(k, [(i, (i + 1) % k) for i in range(k)])


def h0() -> Ccd:
    return oriented(8, [(a - 1, b - 1) for a, b in H0_ARCS])


def en_c3(n: int) -> Ccd:
    return wreath_product(empty_graph(n), directed_cycle(3), disjoint=False)


def c3_en(n: int) -> Ccd:
    return wreath_product(directed_cycle(3), empty_graph(n), disjoint=False)


def matching_chain(n: int, t: int) -> Ccd:
    """n disjoint transitive tournaments on t vertices, colored by position.

    Vertex (i, j) (copy i, position j) is numbered j*n + i.
    """
    arcs = [(j * n + i, j2 * n + i) for i in range(n) for j in range(t) for j2 in range(j + 1, t)]
    return oriented(n * t, arcs, [v // n for v in range(n * t)])


def triangle_chain(t: int) -> Ccd:
    """t directed triangles, pairwise joined by a directed 6-cycle.

    Vertex (i, a) is numbered 3i + a.
    """
    arcs = []
    for i in range(t):
        arcs += [(3 * i + a, 3 * i + (a + 1) % 3) for a in range(3)]
        for j in range(i + 1, t):
            for a in range(3):
                arcs.append((3 * i + a, 3 * j + (a + 1) % 3))
                arcs.append((3 * j + a, 3 * i + a))
    return oriented(3 * t, arcs, [v // 3 for v in range(3 * t)])


def gen_figure4(which: str) -> Ccd:
    """The two bichromatic graphs over a red C4."""
    if which == "left":
        arcs = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 2), (5, 1), (5, 3)]
        return oriented(6, arcs, [0] * 4 + [1] * 2)
    if which == "right":
        arcs = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)]
        arcs += [(4, 0), (4, 2), (6, 0), (6, 2), (5, 1), (5, 3), (7, 1), (7, 3)]
        return oriented(8, arcs, [0] * 4 + [1] * 4)
    raise SpecError(f"fig4 takes left or right, not {which!r}")


def _filler(blow: Blow, n: int) -> tuple:
    """(H, block system, block -> position in the class) for a blow-up."""
    if blow.kind == "EnC3":
        H = en_c3(n)
        blocks = BlockSystem.from_blocks([range(3 * u, 3 * u + 3) for u in range(n)])
        return H, blocks, list(range(n))
    if blow.kind == "C4":
        return directed_cycle(4), BlockSystem.from_blocks([(0, 2), (1, 3)]), [0, 1]
    if blow.kind == "C3En":
        m = blow.size
        H = c3_en(m)
        blocks = BlockSystem.from_blocks([range(a * m, a * m + m) for a in range(3)])
        return H, blocks, [0, 1, 2]
    raise SpecError(f"unknown blow-up kind {blow.kind!r}")


def apply_blowups(base: Ccd, blows, n: int) -> Ccd:
    """Blow up classes of ``base`` one after another via the blow-up operation."""
    from .theory import BlowupSpec, blow_up

    g = base
    for blow in sorted(blows, key=lambda b: b.cls):
        R = tuple(v for v in range(g.n) if g.chi[v] == blow.cls)
        H, blocks, pos = _filler(blow, n)
        tau = tuple(R[p] for p in pos)
        g = blow_up(BlowupSpec(g, R, H, blocks, tau), disjoint=False, check=False).graph
    return g


# ---------------------------------------------------------------------------
# legality, size, realization


def check_spec(spec: FamilySpec) -> None:
    """Raise SpecError naming the violated condition if spec is illegal."""
    k = spec.kind
    if k not in KINDS:
        raise SpecError(f"unknown family kind {k!r}")
    if k in ("E", "EnC3", "C3En") and spec.n < 1:
        raise SpecError(f"{k} needs n >= 1")
    if k == "C" and spec.n not in (3, 4):
        raise SpecError("only the directed 3- and 4-cycles are ultrahomogeneous (Lachlan's list)")
    if k == "fig4" and spec.which not in ("left", "right"):
        raise SpecError("fig4 takes left or right")
    if k == "union":
        if len(spec.parts) < 2:
            raise SpecError("a union needs at least two parts")
        for p in spec.parts:
            if p.kind == "union":
                raise SpecError("unions are flat")
            check_spec(p)
    if k == "chain":
        if spec.n < 1 or spec.t < 2:
            raise SpecError("a matching chain needs n >= 1 and t >= 2")
    if k == "tri" and spec.t < 2:
        raise SpecError("a triangle chain needs t >= 2")
    if spec.blows and k not in ("chain", "tri"):
        raise SpecError(f"{k} takes no blow-up annotations")
    seen = set()
    for b in spec.blows:
        if not 0 <= b.cls < spec.t:
            raise SpecError(f"blow-up class {b.cls + 1} out of range 1..{spec.t}")
        if b.cls in seen:
            raise SpecError(f"class {b.cls + 1} blown up twice")
        seen.add(b.cls)
        if k == "chain":
            if b.kind == "EnC3" and spec.n < 2:
                raise SpecError("EnC3 blow-up of a matching chain needs n > 1")
            if b.kind == "C4" and spec.n != 2:
                raise SpecError("C4 blow-up only on matching chains with n = 2")
            if b.kind not in ("EnC3", "C4"):
                raise SpecError(f"matching chains blow up to EnC3 or C4, not {b.kind}")
        if k == "tri":
            if b.kind != "C3En":
                raise SpecError(f"triangle chains blow up to C3En, not {b.kind}")
            if b.size < 2:
                raise SpecError("C3En blow-up of a triangle chain needs m > 1")


def spec_size(spec: FamilySpec) -> int:
    k = spec.kind
    if k == "E":
        return spec.n
    if k == "C":
        return spec.n
    if k == "H0":
        return 8
    if k in ("EnC3", "C3En"):
        return 3 * spec.n
    if k == "fig4":
        return 6 if spec.which == "left" else 8
    if k == "union":
        return sum(spec_size(p) for p in spec.parts)
    if k == "chain":
        extra = sum(2 * spec.n if b.kind == "EnC3" else 2 for b in spec.blows)
        return spec.n * spec.t + extra
    if k == "tri":
        return 3 * spec.t + sum(3 * (b.size - 1) for b in spec.blows)
    raise SpecError(f"unknown family kind {k!r}")


def gen(spec: FamilySpec) -> Ccd:
    """Realize a legal spec as a vertex-colored oriented graph."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    check_spec(spec)
    k = spec.kind
    if k == "E":
        return empty_graph(spec.n)
    if k == "C":
        return directed_cycle(spec.n)
    if k == "H0":
        return h0()
    if k == "EnC3":
        return en_c3(spec.n)
    if k == "C3En":
        return c3_en(spec.n)
    if k == "fig4":
        return gen_figure4(spec.which)
    if k == "chain":
        return apply_blowups(matching_chain(spec.n, spec.t), spec.blows, spec.n)
    if k == "tri":
        return apply_blowups(triangle_chain(spec.t), spec.blows, 0)
    out = gen(spec.parts[0])
    for p in spec.parts[1:]:
        out = color_disjoint_union(out, gen(p), oriented=True)
    return out


# ---------------------------------------------------------------------------
# text syntax

_SHORT = re.compile(r"^(E|C|EnC3|C3En)(\d+)$")
_BLOW = re.compile(r"^(EnC3|C4|C3En:(\d+))@(\d+)$")


def _split_top(text: str, sep: str) -> list:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise SpecError("unbalanced parentheses")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise SpecError("unbalanced parentheses")
    out.append("".join(cur))
    return out


def _params(text: str) -> dict:
    out = {}
    for item in text.split(","):
        if not item:
            continue
        if "=" not in item:
            raise SpecError(f"expected name=value, got {item!r}")
        key, val = item.split("=", 1)
        if not val.isdigit():
            raise SpecError(f"parameter {key} must be a positive integer, got {val!r}")
        out[key] = int(val)
    return out


def parse_spec(text: str) -> FamilySpec:
    """Parse and legality-check the text syntax."""
    spec = _parse(re.sub(r"\s+", "", text))
    check_spec(spec)
    return spec


def _parse(text: str) -> FamilySpec:
    if not text:
        raise SpecError("empty spec")
    m = _SHORT.match(text)
    if m:
        kind, n = m.group(1), int(m.group(2))
        return FamilySpec(kind, n=n)
    if text == "H0":
        return FamilySpec("H0")
    m = re.match(r"^(\w+)\((.*)\)$", text)
    if not m:
        raise SpecError(f"cannot parse {text!r}")
    name, body = m.group(1), m.group(2)
    if name == "union":
        parts = []
        for piece in _split_top(body, ","):
            p = _parse(piece)
            parts.extend(p.parts if p.kind == "union" else [p])
        return FamilySpec("union", parts=tuple(parts))
    if name == "fig4":
        return FamilySpec("fig4", which=body)
    sections = body.split(";")
    if name == "chain" and sections and sections[0] == "E":
        sections = sections[1:]
    params = _params(sections[0]) if sections else {}
    blows = []
    for sec in sections[1:]:
        if not sec.startswith("blow="):
            raise SpecError(f"unknown section {sec!r}")
        bm = _BLOW.match(sec[5:])
        if not bm:
            raise SpecError(f"malformed blow-up {sec[5:]!r}")
        kind = "C3En" if bm.group(2) else bm.group(1)
        blows.append(Blow(int(bm.group(3)) - 1, kind, int(bm.group(2) or 0)))
    allowed = {"E": {"n"}, "C": {"k"}, "EnC3": {"n"}, "C3En": {"n"}, "chain": {"n", "t"}, "tri": {"t"}}
    if name not in allowed:
        raise SpecError(f"unknown family {name!r}")
    extra = set(params) - allowed[name]
    if extra:
        raise SpecError(f"{name} does not take {sorted(extra)}")
    missing = allowed[name] - set(params)
    if missing:
        raise SpecError(f"{name} needs {sorted(missing)}")
    if name == "C":
        return FamilySpec("C", n=params["k"])
    return FamilySpec(name, n=params.get("n", 0), t=params.get("t", 0), blows=tuple(sorted(blows, key=lambda b: b.cls)))


def format_spec(spec: FamilySpec) -> str:
    k = spec.kind
    if k == "H0":
        return "H0"
    if k == "C":
        return f"C(k={spec.n})"
    if k in ("E", "EnC3", "C3En"):
        return f"{k}(n={spec.n})"
    if k == "fig4":
        return f"fig4({spec.which})"
    if k == "union":
        return "union(" + ", ".join(format_spec(p) for p in spec.parts) + ")"
    blows = "".join(f";blow={b.text()}" for b in spec.blows)
    if k == "chain":
        return f"chain(E;n={spec.n},t={spec.t}{blows})"
    return f"tri(t={spec.t}{blows})"


def union_of(parts) -> FamilySpec:
    parts = [q for p in parts for q in (p.parts if p.kind == "union" else [p])]
    if len(parts) == 1:
        return parts[0]
    return FamilySpec("union", parts=tuple(sorted(parts, key=_spec_order)))


def _spec_order(spec: FamilySpec):
    return (spec_size(spec), format_spec(spec))


# ---------------------------------------------------------------------------
# enumeration


def atom_specs(max_vertices: int) -> list:
    """All legal non-union specs up to the size bound, in canonical order."""
    out = []
    N = max_vertices
    for n in range(1, N + 1):
        out.append(FamilySpec("E", n=n))
    for k in (3, 4):
        out.append(FamilySpec("C", n=k))
    out.append(FamilySpec("H0"))
    for n in range(2, N // 3 + 1):
        out += [FamilySpec("EnC3", n=n), FamilySpec("C3En", n=n)]
    for n in range(1, N + 1):
        for t in range(2, N // n + 1):
            kinds = [None] + (["EnC3"] if n >= 2 else []) + (["C4"] if n == 2 else [])
            for choice in itertools.product(kinds, repeat=t):
                blows = tuple(Blow(i, c) for i, c in enumerate(choice) if c)
                out.append(FamilySpec("chain", n=n, t=t, blows=blows))
    for t in range(2, N // 3 + 1):
        sizes = [1] + list(range(2, N + 1))
        for choice in itertools.product(sizes, repeat=t):
            if 3 * sum(choice) > N:
                continue
            blows = tuple(Blow(i, "C3En", m) for i, m in enumerate(choice) if m > 1)
            out.append(FamilySpec("tri", t=t, blows=blows))
    out = [s for s in out if spec_size(s) <= N]
    return sorted(out, key=_spec_order)


def _dedup(specs: Iterator[FamilySpec]) -> Iterator[FamilySpec]:
    from .equivalence import equivalent, structural_invariant

    buckets = {}
    for s in specs:
        g = gen(s)
        key = structural_invariant(g)
        bucket = buckets.setdefault(key, [])
        if any(equivalent(g, h) for h in bucket):
            continue
        bucket.append(g)
        yield s


def enumerate_specs(max_vertices: int) -> Iterator[FamilySpec]:
    """Legal specs (unions included) up to the size bound, one per ~_c class."""
    if max_vertices < 1:
        raise ValueError("max_vertices must be at least 1")
    atoms = atom_specs(max_vertices)

    def multisets(start, budget):
        for i in range(start, len(atoms)):
            s = spec_size(atoms[i])
            if s > budget:
                continue
            yield [atoms[i]]
            for rest in multisets(i, budget - s):
                yield [atoms[i]] + rest

    candidates = sorted({union_of(ms) for ms in multisets(0, max_vertices)}, key=_spec_order)
    yield from _dedup(iter(candidates))


def random_spec(rng: random.Random, max_vertices: int, max_parts: int = 3) -> FamilySpec:
    """A random legal spec whose realization has at most max_vertices vertices."""
    atoms = atom_specs(max_vertices)
    parts = []
    budget = max_vertices
    for _ in range(rng.randint(1, max_parts)):
        fits = [a for a in atoms if spec_size(a) <= budget]
        if not fits:
            break
        a = rng.choice(fits)
        parts.append(a)
        budget -= spec_size(a)
    return union_of(parts)
