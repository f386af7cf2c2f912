"""Classification of UH vertex-colored oriented graphs and the verification harness.

``classify`` turns an ultrahomogeneous input into a family spec plus a
replayable equivalence witness.  The ``verify_*`` functions re-derive the
classification results by exhaustive enumeration at desk scale and report
any disagreement as an alarm.
"""

from __future__ import annotations

import functools
import itertools
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .autiso import (
    UH_BUDGET,
    PartialIso,
    automorphism_group,
    canonical_form,
    is_ultrahomogeneous,
)
from .ccd import HOMOGENEOUS, MATCHING, Ccd, connectivity_type, induced_subgraph, oriented
from .equivalence import EquivalenceWitness, equivalent, equivalent_up_to_colors, structural_invariant
from .errors import BudgetExceeded, ClassificationViolation
from .families import (
    MONO_KINDS,
    Blow,
    FamilySpec,
    atom_specs,
    c3_en,
    directed_cycle,
    empty_graph,
    en_c3,
    enumerate_specs,
    format_spec,
    gen,
    random_spec,
    spec_size,
    union_of,
)
from .theory import CONDITION_NAMES, blowup_decompositions, check_general_extension

LACHLAN_MAX_N = 6
BICHROMATIC_MAX_TOTAL = 7
TARGETED_SIZE = 8


# ---------------------------------------------------------------------------
# outcomes


@dataclass
class NotUh:
    """The input is not ultrahomogeneous; ``witness`` does not extend."""

    witness: PartialIso
    stuck_vertex: int | None = None

    def to_json(self) -> dict:
        return {"outcome": "not-ultrahomogeneous", "witness": self.witness.to_json(), "stuck_vertex": self.stuck_vertex}


@dataclass
class OutOfScope:
    """UH input outside the oriented families this package can generate."""

    reason: str
    colors: tuple = ()

    def to_json(self) -> dict:
        return {"outcome": "out-of-scope", "reason": self.reason, "colors": list(self.colors)}


@dataclass
class ClassificationCertificate:
    """g is equivalent to ``gen(spec)``; ``witness`` rebuilds g from it.

    ``components`` pairs the input vertex colors of each component with the
    spec describing it.
    """

    spec: FamilySpec
    components: list
    witness: EquivalenceWitness

    def realize(self) -> Ccd:
        return self.witness.replay(gen(self.spec))

    def verify(self, g: Ccd) -> bool:
        return self.realize() == g

    def to_json(self) -> dict:
        return {
            "outcome": "classified",
            "spec": format_spec(self.spec),
            "components": [{"colors": list(cols), "spec": format_spec(s)} for cols, s in self.components],
            "witness": self.witness.to_json(),
        }


# ---------------------------------------------------------------------------
# classify


def oriented_obstruction(g: Ccd) -> str | None:
    """Why g is not equivalent to an oriented graph, or None if it is.

    Inside a class at most one color may be symmetric, and asymmetric pairs
    must use a single color against it.  Between classes at most three color
    tuples may occur (non-arc and the two arc directions).
    """
    classes = g.color_classes()
    for col, R in enumerate(classes):
        sym, asym = set(), set()
        for u, v in itertools.permutations(R, 2):
            a, b = g.color(u, v), g.color(v, u)
            (sym if a == b else asym).add((a, b))
        if len(sym) > 1:
            return f"class {col} has {len(sym)} symmetric edge colors"
        colors = {c for t in asym for c in t}
        if len(colors) > 2:
            return f"class {col} has more than one arc color"
        if sym and asym:
            (s, _), = sym
            if any(s not in t for t in asym):
                return f"class {col} mixes a symmetric color with an unrelated asymmetric pair"
    for i, j in itertools.combinations(range(len(classes)), 2):
        tuples = {(g.color(u, v), g.color(v, u)) for u in classes[i] for v in classes[j]}
        if len(tuples) > 3:
            return f"classes {i} and {j} are joined by {len(tuples)} color tuples"
    return None


def components_of(g: Ccd) -> list:
    """Color ids grouped by non-homogeneous connectivity, sorted."""
    classes = g.color_classes()
    k = len(classes)
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in itertools.combinations(range(k), 2):
        if connectivity_type(g, classes[i], classes[j])[0] != HOMOGENEOUS:
            parent[find(i)] = find(j)
    groups = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return sorted(tuple(v) for v in groups.values())


def _mono_candidates(n: int) -> list:
    out = [FamilySpec("E", n=n)]
    if n in (3, 4):
        out.append(FamilySpec("C", n=n))
    if n == 8:
        out.append(FamilySpec("H0"))
    if n % 3 == 0 and n >= 6:
        out += [FamilySpec("EnC3", n=n // 3), FamilySpec("C3En", n=n // 3)]
    return out


def _identify_mono(h: Ccd) -> FamilySpec | None:
    for cand in _mono_candidates(h.n):
        if equivalent(gen(cand), h):
            return cand
    return None


def _filler_kind(H: Ccd, num_blocks: int) -> tuple | None:
    """(kind, size) of the graph filling a blown-up class."""
    size = H.n // num_blocks
    if H.n == 4 and num_blocks == 2 and equivalent(H, directed_cycle(4)):
        return ("C4", 0)
    if size == 3 and equivalent(H, en_c3(num_blocks)):
        return ("EnC3", 0)
    if num_blocks == 3 and size >= 2 and equivalent(H, c3_en(size)):
        return ("C3En", size)
    return None


def _class_graph(g: Ccd, col: int) -> Ccd:
    return induced_subgraph(g, g.color_classes()[col])[0]


def identify_component(h: Ccd) -> FamilySpec | None:
    """Family spec equivalent to the single component h, if any."""
    k = h.num_vertex_colors
    if k == 1:
        return _identify_mono(h)
    core = h
    fillers = []
    for col in range(k):
        decs = blowup_decompositions(core, only_color=col)
        if not decs:
            continue
        d = decs[0]
        kind = _filler_kind(d.filler, len(d.blocks))
        if kind is None:
            return None
        fillers.append(kind)
        core = d.quotient
    parts = [_class_graph(core, col) for col in range(k)]
    sizes = {p.n for p in parts}
    if len(sizes) != 1:
        return None
    m = sizes.pop()
    if all(equivalent(p, empty_graph(m)) for p in parts):
        if any(kind == "C3En" for kind, _ in fillers):
            return None
        blows = tuple(Blow(i, kind) for i, (kind, _) in enumerate(sorted(fillers)))
        spec = FamilySpec("chain", n=m, t=k, blows=blows)
    elif m == 3 and all(equivalent(p, directed_cycle(3)) for p in parts):
        if any(kind != "C3En" for kind, _ in fillers):
            return None
        blows = tuple(Blow(i, kind, size) for i, (kind, size) in enumerate(sorted(fillers)))
        spec = FamilySpec("tri", t=k, blows=blows)
    else:
        return None
    try:
        realized = gen(spec)
    except ValueError:
        return None
    return spec if equivalent(realized, h) else None


def _undirected_case(h: Ccd) -> bool:
    """All classes independent and every non-trivial connection a matching."""
    classes = h.color_classes()
    for R in classes:
        if len({h.color(u, v) for u, v in itertools.permutations(R, 2)}) > 1:
            return False
    for i, j in itertools.combinations(range(len(classes)), 2):
        kind, _ = connectivity_type(h, classes[i], classes[j])
        if kind not in (HOMOGENEOUS, MATCHING):
            return False
    return True


def classify(g: Ccd, budget: int | None = UH_BUDGET):
    """ClassificationCertificate, NotUh or OutOfScope for g.

    Raises ClassificationViolation for a UH oriented input that matches no
    classified form.
    """
    verdict = is_ultrahomogeneous(g, budget=budget)
    if not verdict.is_uh:
        return NotUh(verdict.witness, verdict.stuck_vertex)
    reason = oriented_obstruction(g)
    if reason is not None:
        return OutOfScope(f"not equivalent to an oriented graph: {reason}")
    classes = g.color_classes()
    found = []
    for comp in components_of(g):
        verts = sorted(v for c in comp for v in classes[c])
        h, _ = induced_subgraph(g, verts)
        spec = identify_component(h)
        if spec is None:
            if _undirected_case(h):
                return OutOfScope(
                    "independent classes joined only by matchings: reduces to undirected graphs, "
                    "whose classification is not reproduced here",
                    comp,
                )
            raise ClassificationViolation(
                f"UH component on colors {list(comp)} matches no classified form", h.to_json()
            )
        found.append((comp, spec))
    spec = union_of([s for _, s in found])
    witness = equivalent_up_to_colors(gen(spec), g)
    if witness is None:
        raise ClassificationViolation("components classified but their union is not equivalent", g.to_json())
    found.sort(key=lambda cs: (spec_size(cs[1]), format_spec(cs[1]), cs[0]))
    return ClassificationCertificate(spec, found, witness)


# ---------------------------------------------------------------------------
# reports and workers


@dataclass
class EnumerationReport:
    """Outcome of an exhaustive enumeration against the predicted UH list."""

    kind: str
    parameters: dict
    scanned: int = 0
    pruned: int = 0
    distinct: int = 0
    uh: list = field(default_factory=list)  # (name, canonical JSON)
    expected: list = field(default_factory=list)
    missing: list = field(default_factory=list)
    unexpected: list = field(default_factory=list)
    targeted: list = field(default_factory=list)  # (name, passed)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.missing and not self.unexpected and all(ok for _, ok in self.targeted)

    @property
    def uh_names(self) -> list:
        return [name for name, _ in self.uh]

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "parameters": self.parameters,
            "scanned": self.scanned,
            "pruned": self.pruned,
            "distinct": self.distinct,
            "uh": [{"name": name, "graph": canon} for name, canon in self.uh],
            "expected": self.expected,
            "missing": self.missing,
            "unexpected": self.unexpected,
            "targeted": [{"name": name, "passed": ok} for name, ok in self.targeted],
            "ok": self.ok,
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out

    def summary(self) -> str:
        lines = [
            f"{self.kind} {json.dumps(self.parameters, sort_keys=True)}",
            f"  scanned {self.scanned}, pruned {self.pruned}, distinct {self.distinct}, UH {len(self.uh)}",
            f"  UH: {', '.join(self.uh_names)}",
        ]
        for name, ok in self.targeted:
            lines.append(f"  targeted {name}: {'ok' if ok else 'FAILED'}")
        if self.missing:
            lines.append(f"  missing: {', '.join(self.missing)}")
        if self.unexpected:
            lines.append(f"  unexpected: {len(self.unexpected)} graph(s)")
        lines.append(f"  {'ok' if self.ok else 'ALARM'} in {self.seconds:.1f}s")
        return "\n".join(lines)


def _run_tasks(fn: Callable, tasks: Sequence, jobs: int = 1, on_done: Callable | None = None) -> list:
    """Results of fn over tasks, in task order whatever the worker count."""
    results = [None] * len(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        for i, t in enumerate(tasks):
            results[i] = fn(t)
            if on_done:
                on_done(i, results[i])
        return results
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futures = {ex.submit(fn, t): i for i, t in enumerate(tasks)}
        for fut in as_completed(futures):
            i = futures[fut]
            results[i] = fut.result()
            if on_done:
                on_done(i, results[i])
    return results


def _canon(g: Ccd) -> str:
    return canonical_form(g, budget=None)[0].dumps()


# ---------------------------------------------------------------------------
# monochromatic (Lachlan) verification


def _lachlan_task(task) -> tuple:
    """Labeled oriented graphs on n vertices with in = out = d everywhere.

    Pair states: 0 none, 1 u -> v, 2 v -> u.  Returns (degree-regular count,
    survivors of the neighborhood test, sorted canonical forms).
    """
    n, d, prefix = task
    pairs = list(itertools.combinations(range(n), 2))
    out = [0] * n
    inn = [0] * n
    left = [n - 1] * n
    state = [0] * len(pairs)
    regular = 0
    survivors = 0
    forms = set()

    def assign(i, s, sign):
        u, v = pairs[i]
        left[u] -= sign
        left[v] -= sign
        if s == 1:
            out[u] += sign
            inn[v] += sign
        elif s == 2:
            out[v] += sign
            inn[u] += sign

    def feasible(u):
        return out[u] <= d and inn[u] <= d and (d - out[u]) + (d - inn[u]) <= left[u]

    def leaf():
        nonlocal regular, survivors
        regular += 1
        arcs = []
        for (u, v), s in zip(pairs, state):
            if s == 1:
                arcs.append((u, v))
            elif s == 2:
                arcs.append((v, u))
        g = oriented(n, arcs)
        if not _neighborhoods_uniform(g):
            return
        survivors += 1
        forms.add(_canon(g))

    def rec(i):
        if i == len(pairs):
            leaf()
            return
        u, v = pairs[i]
        for s in (0, 1, 2):
            state[i] = s
            assign(i, s, 1)
            if feasible(u) and feasible(v):
                rec(i + 1)
            assign(i, s, -1)

    ok = True
    for i, s in enumerate(prefix):
        state[i] = s
        assign(i, s, 1)
        u, v = pairs[i]
        ok = ok and feasible(u) and feasible(v)
    if ok:
        rec(len(prefix))
    return regular, survivors, sorted(forms)


def _neighborhoods_uniform(g: Ccd) -> bool:
    """Vertex transitivity test: out- and in-neighborhoods look alike everywhere."""
    n = g.n
    keys = set()
    for v in range(n):
        outs = [w for w in range(n) if w != v and g.color(v, w) == 1]
        ins = [w for w in range(n) if w != v and g.color(w, v) == 1]
        key = []
        for nb in (outs, ins):
            key.append(tuple(sorted(sum(g.color(a, b) == 1 for b in nb if b != a) for a in nb)))
        keys.add(tuple(key))
        if len(keys) > 1:
            return False
    return True


def lachlan_necessary(g: Ccd) -> bool:
    """Necessary conditions used to prune the monochromatic enumeration."""
    n = g.n
    outs = {sum(g.color(v, w) == 1 for w in range(n) if w != v) for v in range(n)}
    ins = {sum(g.color(w, v) == 1 for w in range(n) if w != v) for v in range(n)}
    return len(outs) == 1 and outs == ins and _neighborhoods_uniform(g)


def _mono_atoms(max_n: int) -> list:
    return [s for s in atom_specs(max_n) if s.kind in MONO_KINDS]


def _lachlan_tasks(max_n: int) -> list:
    tasks = []
    for n in range(1, max_n + 1):
        m = n * (n - 1) // 2
        depth = min(m, 4)
        for d in range((n - 1) // 2 + 1):
            for prefix in itertools.product((0, 1, 2), repeat=depth):
                tasks.append((n, d, prefix))
    return tasks


def _task_key(task) -> str:
    return json.dumps(task)


def _load_checkpoint(path: str | None, params: dict) -> dict:
    if not path or not os.path.exists(path):
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if data.get("parameters") != params:
        raise ValueError(f"checkpoint {path} was written for different parameters")
    return data.get("done", {})


def _save_checkpoint(path: str, params: dict, done: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump({"parameters": params, "done": done}, fh, sort_keys=True)
    os.replace(tmp, path)


def verify_lachlan(max_n: int, jobs: int = 1, checkpoint: str | None = None, limit: int = LACHLAN_MAX_N) -> EnumerationReport:
    """Re-derive the UH monochromatic oriented graphs on at most max_n vertices.

    All labeled graphs are covered: a degree-regularity backtracking prunes
    whole subtrees, a neighborhood test prunes leaves, survivors are deduplicated
    by canonical form and tested exactly.  ``checkpoint`` names a JSON file
    holding finished tasks, so an interrupted run can resume.
    """
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    if limit is not None and max_n > limit:
        raise BudgetExceeded(f"monochromatic enumeration on {max_n} vertices", limit)
    start = time.time()
    params = {"max_n": max_n}
    tasks = _lachlan_tasks(max_n)
    done = _load_checkpoint(checkpoint, params)
    todo = [t for t in tasks if _task_key(t) not in done]

    def on_done(i, res):
        done[_task_key(todo[i])] = list(res)
        if checkpoint:
            _save_checkpoint(checkpoint, params, done)

    _run_tasks(_lachlan_task, todo, jobs, on_done)
    total = sum(3 ** (n * (n - 1) // 2) for n in range(1, max_n + 1))
    survivors = 0
    forms = set()
    for t in tasks:
        _, surv, fs = done[_task_key(t)]
        survivors += surv
        forms.update(fs)
    names = {_canon(gen(s)): format_spec(s) for s in _mono_atoms(max_n)}
    uh = []
    unexpected = []
    for canon in sorted(forms):
        g = Ccd.loads(canon)
        if is_ultrahomogeneous(g, budget=None).is_uh:
            if canon in names:
                uh.append((names[canon], canon))
            else:
                unexpected.append(json.loads(canon))
    uh.sort(key=lambda nc: (Ccd.loads(nc[1]).n, nc[0]))
    expected = sorted(names.values(), key=lambda s: _name_order(s, names))
    found = {name for name, _ in uh}
    report = EnumerationReport(
        "lachlan",
        params,
        scanned=total,
        pruned=total - survivors,
        distinct=len(forms),
        uh=uh,
        expected=expected,
        missing=[s for s in expected if s not in found],
        unexpected=unexpected,
    )
    report.seconds = time.time() - start
    return report


def _name_order(name: str, names: dict):
    canon = next(c for c, s in names.items() if s == name)
    return (Ccd.loads(canon).n, name)


# ---------------------------------------------------------------------------
# bichromatic verification


def _row_orbit_reps(aut_elems: list, r: int) -> list:
    """Orbit representatives (lex smallest) with their orbits, rows in {0,1,2}^r."""
    seen = set()
    out = []
    for row in itertools.product((0, 1, 2), repeat=r):
        if row in seen:
            continue
        orbit = sorted({tuple(row[p_inv[x]] for x in range(r)) for p_inv in aut_elems})
        seen.update(orbit)
        out.append((row, orbit))
    return out


def _compose(GR: Ccd, GB: Ccd, rows: Sequence[tuple]) -> Ccd:
    """Red vertices first; rows[b][x] is the state of the pair (red x, blue b)."""
    r, b = GR.n, GB.n
    arcs = [(u, v) for u in range(r) for v in range(r) if u != v and GR.color(u, v) == 1]
    arcs += [(r + u, r + v) for u in range(b) for v in range(b) if u != v and GB.color(u, v) == 1]
    for j, row in enumerate(rows):
        for x, s in enumerate(row):
            if s == 1:
                arcs.append((x, r + j))
            elif s == 2:
                arcs.append((r + j, x))
    return oriented(r + b, arcs, [0] * r + [1] * b)


def _bichromatic_task(task) -> tuple:
    """All candidate graphs over fixed class graphs whose rows share one orbit."""
    red_spec, blue_spec = task
    GR, GB = gen(red_spec), gen(blue_spec)
    elems = [tuple(p) for p in automorphism_group(GR, budget=None).elements()]
    r, b = GR.n, GB.n
    count = 0
    survivors = 0
    forms = set()
    for _, orbit in _row_orbit_reps(elems, r):
        for rows in itertools.product(orbit, repeat=b):
            count += 1
            cols = {tuple(sorted(row[x] for row in rows)) for x in range(r)}
            if len(cols) != 1:
                continue
            survivors += 1
            forms.add(_canon(_compose(GR, GB, rows)))
    return count, survivors, sorted(forms)


def _two_color_specs(max_total: int) -> list:
    out = []
    for s in enumerate_specs(max_total):
        if gen(s).num_vertex_colors == 2:
            out.append(s)
    return out


def _match_classes(graphs: list, specs: list) -> tuple:
    """Group graphs by equivalence and match the groups against specs.

    Returns (names per graph or None, specs with no graph).
    """
    realized = [(s, gen(s)) for s in specs]
    keys = [structural_invariant(h) for _, h in realized]
    names = []
    hit = set()
    for g in graphs:
        key = structural_invariant(g)
        name = None
        for (s, h), k in zip(realized, keys):
            if k == key and equivalent(g, h):
                name = format_spec(s)
                hit.add(name)
                break
        names.append(name)
    missing = [format_spec(s) for s in specs if format_spec(s) not in hit]
    return names, missing


def verify_bichromatic(max_total: int, jobs: int = 1, targeted: bool = True, limit: int = BICHROMATIC_MAX_TOTAL) -> EnumerationReport:
    """Re-derive the UH bichromatic oriented graphs with at most max_total vertices.

    Each class is one of the monochromatic UH graphs (the first extension
    condition).  Since Aut(G) is transitive on each class, the
    rows of blue vertices lie in one orbit of Aut(G[R]) and red columns all
    carry the same multiset; the remaining graphs are deduplicated and tested.
    """
    if max_total < 2:
        raise ValueError("max_total must be at least 2")
    if limit is not None and max_total > limit:
        raise BudgetExceeded(f"bichromatic enumeration on {max_total} vertices", limit)
    start = time.time()
    params = {"max_total": max_total, "targeted": targeted}
    atoms = _mono_atoms(max_total)
    tasks = []
    for r in range(1, max_total):
        for b in range(1, min(r, max_total - r) + 1):
            for sr in (a for a in atoms if spec_size(a) == r):
                for sb in (a for a in atoms if spec_size(a) == b):
                    tasks.append((sr, sb))
    results = _run_tasks(_bichromatic_task, tasks, jobs)
    scanned = sum(
        3 ** (spec_size(sr) * spec_size(sb)) for sr, sb in tasks
    )
    survivors = sum(res[1] for res in results)
    forms = sorted({f for res in results for f in res[2]})
    uh_graphs = [g for g in map(Ccd.loads, forms) if is_ultrahomogeneous(g, budget=None).is_uh]
    reps = []
    for g in uh_graphs:
        if not any(structural_invariant(g) == structural_invariant(h) and equivalent(g, h) for h in reps):
            reps.append(g)
    specs = _two_color_specs(max_total)
    names, missing = _match_classes(reps, specs)
    uh = [(name, g.dumps()) for name, g in zip(names, reps) if name is not None]
    unexpected = [g.to_json() for name, g in zip(names, reps) if name is None]
    uh.sort(key=lambda nc: (Ccd.loads(nc[1]).n, nc[0]))
    report = EnumerationReport(
        "bichromatic",
        params,
        scanned=scanned,
        pruned=scanned - survivors,
        distinct=len(forms),
        uh=uh,
        expected=[format_spec(s) for s in specs],
        missing=missing,
        unexpected=unexpected,
    )
    if targeted:
        report.targeted = targeted_bichromatic_checks(max_total)
    report.seconds = time.time() - start
    return report


def targeted_bichromatic_checks(max_total: int, size: int = TARGETED_SIZE) -> list:
    """Bichromatic forms above the enumeration bound: UH and classified back."""
    out = []
    for s in _two_color_specs(size):
        if spec_size(s) <= max_total:
            continue
        g = gen(s)
        ok = is_ultrahomogeneous(g, budget=None).is_uh
        if ok:
            cert = classify(g, budget=None)
            ok = isinstance(cert, ClassificationCertificate) and cert.verify(g) and equivalent(gen(cert.spec), g)
        out.append((format_spec(s), ok))
    return out


# ---------------------------------------------------------------------------
# extension condition verification


@dataclass
class ExtensionCorpusReport:
    parameters: dict
    total: int = 0
    exhaustive: int = 0
    randomized: int = 0
    uh: int = 0
    first_failure: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "kind": "extension",
            "parameters": self.parameters,
            "total": self.total,
            "exhaustive": self.exhaustive,
            "randomized": self.randomized,
            "uh": self.uh,
            "first_failure": self.first_failure,
            "mismatches": self.mismatches,
            "ok": self.ok,
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out

    def summary(self) -> str:
        lines = [
            f"extension {json.dumps(self.parameters, sort_keys=True)}",
            f"  {self.total} graphs ({self.exhaustive} exhaustive, {self.randomized} random), {self.uh} UH",
        ]
        for name, cnt in self.first_failure.items():
            lines.append(f"  first failing condition '{name}': {cnt}")
        lines.append(f"  mismatches: {len(self.mismatches)}")
        lines.append(f"  {'ok' if self.ok else 'ALARM'} in {self.seconds:.1f}s")
        return "\n".join(lines)


@functools.lru_cache(maxsize=None)
def oriented_types(k: int) -> tuple:
    """One representative per isomorphism type of oriented graph on k vertices."""
    pairs = list(itertools.combinations(range(k), 2))
    seen = {}
    for states in itertools.product((0, 1, 2), repeat=len(pairs)):
        arcs = [(u, v) if s == 1 else (v, u) for (u, v), s in zip(pairs, states) if s]
        g = oriented(k, arcs)
        seen.setdefault(_canon(g), g)
    return tuple(seen[c] for c in sorted(seen))


def _cross_orbit_reps(GR: Ccd, GB: Ccd) -> list:
    """Cross assignments up to Aut(G[R]) x Aut(G[B]), as row tuples."""
    import numpy as np

    r, b = GR.n, GB.n
    m = r * b
    autR = [tuple(p) for p in automorphism_group(GR, budget=None).elements()]
    autB = [tuple(p) for p in automorphism_group(GB, budget=None).elements()]
    codes = np.arange(3**m, dtype=np.int64)
    digits = np.stack([(codes // 3**i) % 3 for i in range(m)], axis=1)  # cell j*r + x
    weights = 3 ** np.arange(m, dtype=np.int64)
    best = codes.copy()
    for p in autR:
        for q in autB:
            # image assignment: cell (q[j], p[x]) takes the value of cell (j, x)
            perm = np.empty(m, dtype=np.int64)
            for j in range(b):
                for x in range(r):
                    perm[q[j] * r + p[x]] = j * r + x
            best = np.minimum(best, digits[:, perm] @ weights)
    reps = np.nonzero(best == codes)[0]
    out = []
    for c in reps.tolist():
        rows = tuple(tuple((c // 3 ** (j * r + x)) % 3 for x in range(r)) for j in range(b))
        out.append(rows)
    return out


def _extension_verdicts(graphs: Sequence[Ccd]) -> list:
    out = []
    for g in graphs:
        classes = g.color_classes()
        rep = check_general_extension(g, classes[0], classes[1], short_circuit=True)
        uh = is_ultrahomogeneous(g, budget=None).is_uh
        first = next((i for i, c in enumerate(rep.conditions) if not c), None)
        out.append((rep.holds, uh, first))
    return out


def _extension_task(task) -> list:
    kind, payload = task
    if kind == "small":
        r, b, i, j = payload
        GR, GB = oriented_types(r)[i], oriented_types(b)[j]
        graphs = [_compose(GR, GB, rows) for rows in _cross_orbit_reps(GR, GB)]
    else:
        graphs = [Ccd.loads(s) for s in payload]
    return [(g.dumps(), *v) for g, v in zip(graphs, _extension_verdicts(graphs))]


def random_bichromatic(rng: random.Random, max_vertices: int = 10) -> Ccd:
    """A random bichromatic oriented graph; a mix of UH forms and near misses."""
    mode = rng.randrange(4)
    if mode == 0:
        specs = _two_color_specs_cached(max_vertices)
        g = gen(rng.choice(specs))
        return g.relabel(tuple(rng.sample(range(g.n), g.n)))
    total = rng.randint(2, max_vertices)
    r = rng.randint(1, total - 1)
    b = total - r
    atoms = _mono_atoms(max_vertices)
    GR = gen(rng.choice([a for a in atoms if spec_size(a) == r]))
    GB = gen(rng.choice([a for a in atoms if spec_size(a) == b]))
    if mode == 1:
        rows = [tuple(rng.randrange(3) for _ in range(r)) for _ in range(b)]
    else:
        elems = [tuple(p) for p in automorphism_group(GR, budget=None).elements()]
        row = tuple(rng.randrange(3) for _ in range(r))
        orbit = sorted({tuple(row[p[x]] for x in range(r)) for p in elems})
        rows = [rng.choice(orbit) for _ in range(b)]
        if mode == 3 and b > 1:
            # all blue vertices of one orbit element per block of equal size
            k = len(orbit)
            if b % k == 0:
                rows = [orbit[j % k] for j in range(b)]
    g = _compose(GR, GB, rows)
    if g.num_vertex_colors != 2:
        return random_bichromatic(rng, max_vertices)
    return g


_SPEC_CACHE: dict = {}


def _two_color_specs_cached(n: int) -> list:
    if n not in _SPEC_CACHE:
        _SPEC_CACHE[n] = _two_color_specs(n)
    return _SPEC_CACHE[n]


def verify_extension_equivalence(
    seed: int = 0,
    random_count: int = 500,
    max_class: int = 3,
    max_vertices: int = 10,
    jobs: int = 1,
) -> ExtensionCorpusReport:
    """Compare the five extension conditions with exact UH testing.

    The corpus holds every bichromatic oriented graph with both classes of
    size at most ``max_class`` (up to isomorphism) plus seeded random ones.
    """
    start = time.time()
    params = {"seed": seed, "random_count": random_count, "max_class": max_class, "max_vertices": max_vertices}
    tasks = []
    for r in range(1, max_class + 1):
        for b in range(1, max_class + 1):
            for i in range(len(oriented_types(r))):
                for j in range(len(oriented_types(b))):
                    tasks.append(("small", (r, b, i, j)))
    rng = random.Random(seed)
    rand = [random_bichromatic(rng, max_vertices).dumps() for _ in range(random_count)]
    chunk = 25
    tasks += [("random", tuple(rand[i : i + chunk])) for i in range(0, len(rand), chunk)]
    results = _run_tasks(_extension_task, tasks, jobs)
    report = ExtensionCorpusReport(params)
    counts = {name: 0 for name in CONDITION_NAMES}
    for (kind, _), res in zip(tasks, results):
        for dumped, holds, uh, first in res:
            report.total += 1
            if kind == "small":
                report.exhaustive += 1
            else:
                report.randomized += 1
            report.uh += uh
            if first is not None:
                counts[CONDITION_NAMES[first]] += 1
            if holds != uh:
                report.mismatches.append({"graph": json.loads(dumped), "conditions": holds, "uh": uh})
    report.first_failure = counts
    report.seconds = time.time() - start
    return report


def verify_extension_graph(g: Ccd) -> tuple:
    """(conditions hold, g is UH) for one bichromatic graph."""
    holds, uh, _ = _extension_verdicts([g])[0]
    return holds, uh
