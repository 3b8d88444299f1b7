"""Exhaustive search for complexes with a prescribed ground-state language.

Instead of enumerating graphs, the search enumerates *occupation columns*: for
every ancilla, the set of words whose ground state excites it.  Ports have
their columns fixed by the language.  Given the columns, the most constrained
graph is the *saturated* one, with an edge between every pair of atoms that
are never excited together.  Any feasible complex keeps its detunings when
its graph is saturated this way (adding such edges only removes competing
configurations), so a language has an N-atom realization iff some set of
N - n columns has a feasible saturated graph.

Columns that are empty, full, or copies of another atom's column are never
needed: the atom can be deleted or merged with its twin.  What remains is
searched by branching on

* the first ground state that is not maximal (some atom is neither excited
  nor blockaded by an excited atom), trying every column that would blockade
  it; and
* at closed nodes whose linear program is infeasible, the columns that can
  invalidate the node's Farkas certificate (positive price).  Adding only
  non-positive-price columns keeps the certificate valid, so one of the
  branches must contain every feasible superset.

Nodes are deduplicated up to the language's port-permutation symmetries.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .core import BlockadeGraph, Complex, Language, Port
from .errors import ResourceLimitError, ValidationError
from .exact_lp import LinearSystem, check_certificate, check_point, solve
from .gsm import maximal_independent_sets, realizes_language

DEFAULT_MAX_ATOMS = 11


def default_labels(n: int) -> list[str]:
    if n <= 2:
        return ["A", "Q"][:n] if n == 2 else ["A"]
    inputs = "ABCDEFGHIJKLMNOP"[: n - 1]
    return list(inputs) + ["Q"]


@dataclass
class Solution:
    columns: tuple
    complex: Complex
    detunings: tuple


@dataclass
class SearchResult:
    language: Language
    n_atoms: int
    feasible: bool | None
    solutions: list = field(default_factory=list)
    complete: bool = True
    nodes: int = 0
    closed_nodes: int = 0
    certificates: int = 0
    pruned_by_bound: int = 0
    elapsed: float = 0.0
    note: str = ""

    @property
    def certified_infeasible(self) -> bool:
        return self.feasible is False and self.complete

    def summary(self) -> dict:
        return {
            "word_length": self.language.word_length,
            "n_atoms": self.n_atoms,
            "feasible": self.feasible,
            "complete": self.complete,
            "solutions": len(self.solutions),
            "nodes": self.nodes,
            "closed_nodes": self.closed_nodes,
            "verified_certificates": self.certificates,
            "pruned_by_bound": self.pruned_by_bound,
            "elapsed_s": round(self.elapsed, 3),
            "note": self.note,
        }


class _Problem:
    def __init__(self, language: Language):
        self.language = language
        self.words = language.sorted_words()
        self.m = len(self.words)
        self.n = language.word_length
        self.full = (1 << self.m) - 1
        self.port_cols = tuple(
            sum(1 << k for k, w in enumerate(self.words) if w[p]) for p in range(self.n)
        )
        self.valid = [
            c for c in range(1, self.full) if c not in self.port_cols
        ]
        self.valid_set = set(self.valid)
        perms = language.symmetries()
        index = {w: k for k, w in enumerate(self.words)}
        self.col_maps = []
        for perm in perms:
            word_map = [index[tuple(w[perm[i]] for i in range(self.n))] for w in self.words]
            table = [0] * (self.full + 1)
            for c in range(self.full + 1):
                img = 0
                for k in range(self.m):
                    if c >> k & 1:
                        img |= 1 << word_map[k]
                table[c] = img
            self.col_maps.append(table)

    def canonical(self, cols: tuple) -> tuple:
        return min(tuple(sorted(t[c] for c in cols)) for t in self.col_maps)

    def candidates(self, x: int, forbid: int, chosen: set) -> list[int]:
        free = self.full & ~forbid & ~(1 << x)
        out = []
        sub = free
        while True:
            c = sub | (1 << x)
            if c in self.valid_set and c not in chosen:
                out.append(c)
            if sub == 0:
                break
            sub = (sub - 1) & free
        return out

    def unsatisfied(self, cols: tuple) -> list[tuple[int, int]]:
        allc = self.port_cols + cols
        reqs = []
        for v in allc:
            for x in range(self.m):
                if v >> x & 1:
                    continue
                if not any((u >> x & 1) and not (u & v) for u in allc):
                    reqs.append((x, v))
        return reqs

    def system(self, cols: tuple):
        """Linear system for the saturated graph of ``cols``; variables w_v then E."""
        allc = self.port_cols + cols
        nv = len(allc)
        edges = [(i, j) for i in range(nv) for j in range(i + 1, nv) if not allc[i] & allc[j]]
        graph = BlockadeGraph.from_edges(nv, edges)
        ground = [sum(1 << v for v in range(nv) if allc[v] >> x & 1) for x in range(self.m)]
        return graph, ground, _feasibility_system(graph, ground)


def _feasibility_system(graph: BlockadeGraph, ground: list[int]):
    nv = graph.n_vertices
    e_var = nv
    sys_ = LinearSystem(nv + 1)
    for g in ground:
        coeffs = {v: 1 for v in range(nv) if g >> v & 1}
        coeffs[e_var] = -1
        sys_.add_eq(coeffs, 0)
    gset = set(ground)
    for t in maximal_independent_sets(graph):
        if t in gset:
            continue
        coeffs = {v: -1 for v in range(nv) if t >> v & 1}
        coeffs[e_var] = 1
        sys_.add_ge(coeffs, 1)
    for v in range(nv):
        sys_.add_ge({v: 1}, 1)
    return sys_


def _witness(sys_: LinearSystem, nv: int):
    res = solve(sys_, objective={v: 1 for v in range(nv)})
    if not res.feasible or not check_point(sys_, res.point):
        raise RuntimeError("feasible node lost its witness")
    w = res.point[:nv]
    scale = 1
    for d in w:
        scale = scale * d.denominator // math.gcd(scale, d.denominator)
    ints = [int(d * scale) for d in w]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return tuple(Fraction(v, g) for v in ints)


def search_minimal(
    language: Language,
    n_atoms: int,
    *,
    find_all: bool = False,
    max_atoms: int = DEFAULT_MAX_ATOMS,
    time_budget: float | None = None,
    max_nodes: int | None = None,
    port_labels=None,
    exact_size: bool = False,
) -> SearchResult:
    """Decide whether ``language`` has a realization with at most ``n_atoms`` atoms.

    With ``find_all`` every feasible column set (up to symmetry) of at most
    ``n_atoms`` atoms is reported; ``exact_size`` keeps only those using all of
    them.  ``feasible`` is None when a budget ran out first.
    """
    n = language.word_length
    if n_atoms < n:
        raise ValidationError("fewer atoms than ports")
    if n_atoms > max_atoms:
        raise ResourceLimitError(f"{n_atoms} atoms exceeds the search bound {max_atoms}")
    labels = list(port_labels) if port_labels else default_labels(n)
    prob = _Problem(language)
    budget = n_atoms - n
    start = time.perf_counter()
    result = SearchResult(language, n_atoms, False)
    seen = set()
    stack = [()]
    while stack:
        if time_budget is not None and time.perf_counter() - start > time_budget:
            result.complete = False
            result.note = f"time budget of {time_budget}s exhausted"
            break
        if max_nodes is not None and result.nodes >= max_nodes:
            result.complete = False
            result.note = f"node budget of {max_nodes} exhausted"
            break
        cols = stack.pop()
        key = prob.canonical(cols)
        if key in seen:
            continue
        seen.add(key)
        result.nodes += 1
        remaining = budget - len(cols)
        chosen = set(cols)
        reqs = prob.unsatisfied(cols)
        if reqs:
            if remaining == 0:
                continue
            if _lower_bound(reqs) > remaining:
                result.pruned_by_bound += 1
                continue
            best = None
            for x, forbid in reqs:
                cand = prob.candidates(x, forbid, chosen)
                if best is None or len(cand) < len(best):
                    best = cand
                    if not cand:
                        break
            for c in best:
                stack.append(tuple(sorted(cols + (c,))))
            continue
        result.closed_nodes += 1
        graph, ground, sys_ = prob.system(cols)
        lp = solve(sys_)
        if lp.feasible:
            if not exact_size or remaining == 0:
                det = _witness(sys_, graph.n_vertices)
                cplx = Complex(det, graph, tuple(Port(labels[p], p) for p in range(n)))
                result.solutions.append(Solution(cols, cplx, det))
                result.feasible = True
            if not find_all:
                break
            if remaining:
                for c in prob.valid:
                    if c not in chosen:
                        stack.append(tuple(sorted(cols + (c,))))
            continue
        if not check_certificate(sys_, lp.ge_multipliers, lp.eq_multipliers):
            raise RuntimeError("unverifiable infeasibility certificate")
        result.certificates += 1
        if remaining == 0:
            continue
        z = lp.eq_multipliers
        for c in prob.valid:
            if c in chosen:
                continue
            price = sum(z[x] for x in range(prob.m) if c >> x & 1)
            if price > 0:
                stack.append(tuple(sorted(cols + (c,))))
    if not result.complete and result.feasible is False:
        result.feasible = None
    result.elapsed = time.perf_counter() - start
    return result


def _lower_bound(reqs) -> int:
    """Size of a greedy family of requirements no single column can serve together."""
    picked = []
    for x, forbid in sorted(reqs, key=lambda r: bin(r[1]).count("1"), reverse=True):
        if all((forbid >> px & 1) or (pf >> x & 1) for px, pf in picked):
            picked.append((x, forbid))
    return len(picked)


# ------------------------------------------------------------ graph variants


def graph_is_feasible(graph: BlockadeGraph, ground: list[int]):
    """Solve the feasibility system of a fixed graph and ground-state assignment."""
    for g in ground:
        if not graph.is_independent_mask(g):
            return None
        for v in range(graph.n_vertices):
            if not g >> v & 1 and not graph.neighbor_masks[v] & g:
                return None
    sys_ = _feasibility_system(graph, ground)
    lp = solve(sys_)
    if not lp.feasible:
        return None
    return _witness(sys_, graph.n_vertices)


def feasible_subgraphs(solution: Solution, language: Language, max_edges: int = 16) -> list[Complex]:
    """All feasible graphs obtained by deleting edges from a saturated solution."""
    cplx = solution.complex
    words = language.sorted_words()
    ground = []
    allc = _Problem(language).port_cols + solution.columns
    for x in range(len(words)):
        ground.append(sum(1 << v for v in range(len(allc)) if allc[v] >> x & 1))
    edges = cplx.graph.sorted_edges()
    if len(edges) > max_edges:
        raise ResourceLimitError(f"{len(edges)} edges is too many for subgraph enumeration")
    out = []
    for r in range(len(edges) + 1):
        for drop in itertools.combinations(range(len(edges)), r):
            kept = [e for k, e in enumerate(edges) if k not in drop]
            g = BlockadeGraph.from_edges(cplx.n_atoms, kept)
            det = graph_is_feasible(g, ground)
            if det is not None:
                out.append(Complex(det, g, cplx.ports))
    return out


def canonical_graph_key(cplx: Complex, symmetries=None) -> tuple:
    """Isomorphism key for a port-labelled graph (ports may be permuted by ``symmetries``)."""
    ports = list(cplx.port_indices)
    anc = list(cplx.ancillas)
    sym = symmetries or [tuple(range(len(ports)))]
    best = None
    for perm in sym:
        port_order = [ports[perm[k]] for k in range(len(ports))]
        for anc_order in itertools.permutations(anc):
            order = port_order + list(anc_order)
            pos = {v: k for k, v in enumerate(order)}
            key = tuple(sorted(tuple(sorted((pos[i], pos[j]))) for i, j in cplx.graph.edges))
            if best is None or key < best:
                best = key
    return best


def distinct_graphs(complexes, language: Language) -> list[Complex]:
    sym = language.symmetries()
    seen = {}
    for c in complexes:
        k = canonical_graph_key(c, sym)
        seen.setdefault(k, c)
    return list(seen.values())


def verify_solution(solution: Solution, language: Language) -> bool:
    return realizes_language(solution.complex, language).ok


# ------------------------------------------------------------ unit-disk check


@dataclass
class UnitDiskVerdict:
    status: str  # "embedded", "unknown" or "refuted"
    positions: list | None = None
    robustness: float | None = None
    reason: str = ""


def independent_star(graph: BlockadeGraph, size: int = 6):
    """A vertex with ``size`` pairwise non-adjacent neighbours, or None.

    Six points within unit distance of a centre always contain two at
    distance below one, so such a star has no unit-disk realization.
    """
    nbr = graph.neighbor_masks
    for v in range(graph.n_vertices):
        verts = [u for u in range(graph.n_vertices) if nbr[v] >> u & 1]
        if len(verts) < size:
            continue
        for combo in itertools.combinations(verts, size):
            if all(not (nbr[a] >> b & 1) for a, b in itertools.combinations(combo, 2)):
                return v, combo
    return None


def check_unit_disk(
    graph: BlockadeGraph,
    *,
    restarts: int = 8,
    max_iterations: int = 300,
    seed: int = 0,
    start=None,
) -> UnitDiskVerdict:
    """Best-effort unit-disk realization of ``graph``.

    ``refuted`` is only returned with an independent 6-star certificate; a
    failed optimization gives ``unknown``.
    """
    from .optimizer import AnnealConfig, optimize_geometry

    star = independent_star(graph)
    if star is not None:
        v, leaves = star
        return UnitDiskVerdict("refuted", reason=f"vertex {v} has independent neighbours {list(leaves)}")
    if not graph.edges or graph.n_vertices < 2:
        side = 2.0
        pts = [(side * k, 0.0) for k in range(graph.n_vertices)]
        return UnitDiskVerdict("embedded", pts, 1.0, "no edges" if graph.n_vertices > 1 else "single atom")
    probe = Complex([1] * graph.n_vertices, graph)
    cfg = AnnealConfig(max_iterations=max_iterations, restarts=restarts, seed=seed)
    res = optimize_geometry(probe, config=cfg, start=start)
    xi = -res.objective
    if xi > 0:
        return UnitDiskVerdict("embedded", [tuple(p) for p in res.positions.tolist()], xi)
    return UnitDiskVerdict("unknown", robustness=xi, reason=f"best robustness {xi:.4g} after {restarts} restarts")
