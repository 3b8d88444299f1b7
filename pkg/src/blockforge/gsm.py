"""Ground-state manifolds of the blockade Hamiltonian H = -sum_i detuning_i n_i.

Two exact strategies are available:

``"mis"``
    Lists every maximal independent set (Bron-Kerbosch on bitmasks).  With
    strictly positive detunings every ground state is maximal, and the best
    non-ground configuration is either another maximal set or a ground state
    with one atom removed.

``"elimination"``
    Variable elimination over the max-plus semiring, keeping the two best
    distinct values per table entry.  Cost is exponential only in the induced
    width of the elimination order, so long sparse complexes (compiled
    circuits, tessellations) with hundreds of atoms are cheap.  Ground states
    are recovered by an all-ties traceback.

All arithmetic is done on integers after scaling the detunings by the least
common multiple of their denominators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .core import BlockadeGraph, Complex, Configuration, Language, Port, format_word
from .errors import ResourceLimitError, ValidationError

DEFAULT_MAX_ATOMS = 40
DEFAULT_MAX_WIDTH = 20
DEFAULT_MAX_STATES = 1 << 16
MIS_STRATEGY_LIMIT = 24

_NEG = -(1 << 60)


@dataclass(frozen=True)
class GroundManifold:
    n_atoms: int
    masks: tuple  # sorted occupation bitmasks of the ground states
    ground_energy: Fraction
    gap: object  # Fraction, or math.inf when nothing else is admissible
    width: Fraction = Fraction(0)
    strategy: str = ""

    @property
    def configurations(self) -> tuple:
        return tuple(Configuration.from_mask(m, self.n_atoms) for m in self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def project(self, port_indices) -> list:
        return [tuple(m >> i & 1 for i in port_indices) for m in self.masks]


@dataclass
class Verdict:
    ok: bool
    reason: str = ""
    counterexample: tuple | None = None
    manifold: GroundManifold | None = None
    ancilla_map: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def integer_weights(detunings) -> tuple[list[int], int]:
    """Scale rational detunings to integers; returns (weights, scale)."""
    scale = 1
    for d in detunings:
        scale = scale * d.denominator // math.gcd(scale, d.denominator)
    return [int(d * scale) for d in detunings], scale


def energy(complex_: Complex, mask: int) -> Fraction:
    return -sum((d for i, d in enumerate(complex_.detunings) if mask >> i & 1), Fraction(0))


# ---------------------------------------------------------------- maximal sets


def maximal_independent_sets(graph: BlockadeGraph):
    """Yield every maximal independent set as a bitmask."""
    n = graph.n_vertices
    full = (1 << n) - 1
    comp = [full & ~graph.neighbor_masks[v] & ~(1 << v) for v in range(n)]

    stack = [(0, full, 0)]
    while stack:
        r, p, x = stack.pop()
        if not p:
            if not x:
                yield r
            continue
        pu = p | x
        best, pivot = -1, 0
        while pu:
            low = pu & -pu
            u = low.bit_length() - 1
            c = bin(p & comp[u]).count("1")
            if c > best:
                best, pivot = c, u
            pu ^= low
        cand = p & ~comp[pivot]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            stack.append((r | low, p & comp[v], x & comp[v]))
            p &= ~low
            x |= low
            cand ^= low


def _gsm_by_mis(graph: BlockadeGraph, weights: list[int], max_states: int):
    best = None
    ground: list[int] = []
    other_best = None
    for m in maximal_independent_sets(graph):
        w = 0
        mm = m
        while mm:
            low = mm & -mm
            w += weights[low.bit_length() - 1]
            mm ^= low
        if best is None or w > best:
            if best is not None:
                other_best = best if other_best is None else max(other_best, best)
            best, ground = w, [m]
        elif w == best:
            ground.append(m)
            if len(ground) > max_states:
                raise ResourceLimitError(f"more than {max_states} ground states")
        else:
            other_best = w if other_best is None else max(other_best, w)
    drop = min(min(weights[i] for i in range(graph.n_vertices) if g >> i & 1) for g in ground)
    second = best - drop
    if other_best is not None:
        second = max(second, other_best)
    return best, second, sorted(ground)


# ----------------------------------------------------------------- elimination


def elimination_order(graph: BlockadeGraph) -> tuple[list[int], int]:
    """Greedy min-fill order; returns (order, induced width)."""
    adj = {v: set(graph.neighbors(v)) for v in range(graph.n_vertices)}
    order = []
    width = 0
    remaining = set(adj)
    while remaining:
        best_v, best_key = None, None
        for v in remaining:
            nb = adj[v]
            fill = 0
            nbl = list(nb)
            for a in range(len(nbl)):
                na = adj[nbl[a]]
                for b in range(a + 1, len(nbl)):
                    if nbl[b] not in na:
                        fill += 1
            key = (fill, len(nb), v)
            if best_key is None or key < best_key:
                best_v, best_key = v, key
        v = best_v
        nb = adj[v]
        width = max(width, len(nb))
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        del adj[v]
        remaining.discard(v)
        order.append(v)
    return order, width


def _expand(scope, arr, target):
    shape = [2 if v in scope else 1 for v in target]
    return arr.reshape(shape)


def _combine(factors, target):
    t1 = np.zeros([1] * len(target), dtype=np.int64)
    t2 = np.full([1] * len(target), _NEG, dtype=np.int64)
    for scope, a1, a2 in factors:
        b1 = _expand(scope, a1, target)
        b2 = _expand(scope, a2, target)
        n1 = np.maximum(t1 + b1, _NEG)
        n2 = np.maximum(np.maximum(t1 + b2, t2 + b1), _NEG)
        t1, t2 = n1, n2
    shape = [2] * len(target)
    return np.broadcast_to(t1, shape).copy(), np.broadcast_to(t2, shape).copy()


def _max_out(t1, t2, axis):
    a1, b1 = np.take(t1, 0, axis=axis), np.take(t1, 1, axis=axis)
    a2, b2 = np.take(t2, 0, axis=axis), np.take(t2, 1, axis=axis)
    n1 = np.maximum(a1, b1)
    n2 = np.where(a1 > b1, np.maximum(a2, b1), np.where(b1 > a1, np.maximum(b2, a1), np.maximum(a2, b2)))
    return n1, n2


def _gsm_by_elimination(graph: BlockadeGraph, weights: list[int], max_width: int, max_states: int):
    n = graph.n_vertices
    order, width = elimination_order(graph)
    if width > max_width:
        raise ResourceLimitError(f"induced width {width} exceeds the bound {max_width}")
    edge_1 = np.array([[0, 0], [0, _NEG]], dtype=np.int64)
    edge_2 = np.full((2, 2), _NEG, dtype=np.int64)
    scalars = []
    position = {v: k for k, v in enumerate(order)}
    # factors are filed under their earliest-eliminated variable
    pool = {v: [] for v in range(n)}
    for v in range(n):
        pool[v].append(((v,), np.array([0, weights[v]], dtype=np.int64), np.full(2, _NEG, dtype=np.int64)))
    for i, j in graph.edges:
        first = i if position[i] < position[j] else j
        pool[first].append(((i, j), edge_1, edge_2))

    tables = {}
    for v in order:
        factors = pool[v]
        scope = sorted({u for s, _, _ in factors for u in s})
        t1, t2 = _combine(factors, scope)
        axis = scope.index(v)
        tables[v] = (scope, t1)
        m1, m2 = _max_out(t1, t2, axis)
        rest = tuple(u for u in scope if u != v)
        if not rest:
            scalars.append((int(m1), int(m2)))
            continue
        first = min(rest, key=position.__getitem__)
        pool[first].append((rest, m1, m2))

    best, second = 0, _NEG
    for s1, s2 in scalars:
        best, second = best + s1, max(best + s2, second + s1, _NEG)

    ground = []
    assignment = {}
    rev = order[::-1]

    def walk(k):
        if k == len(rev):
            ground.append(sum(1 << u for u, b in assignment.items() if b))
            if len(ground) > max_states:
                raise ResourceLimitError(f"more than {max_states} ground states")
            return
        v = rev[k]
        scope, t1 = tables[v]
        idx = [assignment[u] if u != v else slice(None) for u in scope]
        vals = t1[tuple(idx)]
        top = vals.max()
        for b in (0, 1):
            if vals[b] == top:
                assignment[v] = b
                walk(k + 1)
        del assignment[v]

    import sys

    limit = sys.getrecursionlimit()
    if limit < n + 100:
        sys.setrecursionlimit(n + 100)
    try:
        walk(0)
    finally:
        sys.setrecursionlimit(limit)
    return best, second, sorted(ground)


# -------------------------------------------------------------------- public API


def enumerate_gsm(
    complex_: Complex,
    *,
    max_atoms: int | None = DEFAULT_MAX_ATOMS,
    strategy: str = "auto",
    max_width: int = DEFAULT_MAX_WIDTH,
    max_states: int = DEFAULT_MAX_STATES,
) -> GroundManifold:
    """Exact ground-state manifold, ground energy and gap of a complex."""
    n = complex_.n_atoms
    if max_atoms is not None and n > max_atoms:
        raise ResourceLimitError(f"{n} atoms exceeds the enumeration bound {max_atoms}")
    if any(d <= 0 for d in complex_.detunings):
        raise ValidationError("ground-state enumeration requires positive detunings")
    weights, scale = integer_weights(complex_.detunings)
    if strategy == "auto":
        strategy = "mis" if n <= MIS_STRATEGY_LIMIT else "elimination"
    if strategy == "mis":
        best, second, ground = _gsm_by_mis(complex_.graph, weights, max_states)
    elif strategy == "elimination":
        best, second, ground = _gsm_by_elimination(complex_.graph, weights, max_width, max_states)
    else:
        raise ValidationError(f"unknown strategy {strategy!r}")
    gap = math.inf if second <= _NEG // 2 else Fraction(best - second, scale)
    return GroundManifold(n, tuple(ground), Fraction(-best, scale), gap, Fraction(0), strategy)


def brute_force_gsm(complex_: Complex, max_atoms: int = 20) -> GroundManifold:
    """Reference oracle: scan all 2^N occupations."""
    n = complex_.n_atoms
    if n > max_atoms:
        raise ResourceLimitError(f"{n} atoms is too many for brute force")
    weights, scale = integer_weights(complex_.detunings)
    g = complex_.graph
    vals = {}
    for m in range(1 << n):
        if g.is_independent_mask(m):
            vals[m] = sum(weights[i] for i in range(n) if m >> i & 1)
    best = max(vals.values())
    ground = sorted(m for m, w in vals.items() if w == best)
    rest = [w for w in vals.values() if w != best]
    gap = Fraction(best - max(rest), scale) if rest else math.inf
    return GroundManifold(n, tuple(ground), Fraction(-best, scale), gap, Fraction(0), "brute")


def realizes_language(complex_: Complex, language: Language, **gsm_options) -> Verdict:
    """Check that the ground states project bijectively onto ``language``.

    Each word must have exactly one ground state (a unique ancilla completion)
    and every ground state must project onto a word of the language.
    """
    if len(complex_.ports) != language.word_length:
        raise ValidationError(
            f"complex has {len(complex_.ports)} ports but words have length {language.word_length}"
        )
    gsm = enumerate_gsm(complex_, **gsm_options)
    ports = complex_.port_indices
    seen: dict = {}
    for m in gsm.masks:
        w = tuple(m >> i & 1 for i in ports)
        if w in seen:
            return Verdict(False, f"word {format_word(w)} has several ancilla completions", w, gsm)
        seen[w] = m
    for w in seen:
        if w not in language.words:
            return Verdict(False, f"ground state projects onto {format_word(w)}, not in the language", w, gsm)
    for w in language.sorted_words():
        if w not in seen:
            return Verdict(False, f"word {format_word(w)} is missing from the ground-state manifold", w, gsm)
    anc = complex_.ancillas
    amap = {w: tuple(m >> i & 1 for i in anc) for w, m in seen.items()}
    return Verdict(True, "", None, gsm, amap)


def ground_language(complex_: Complex, **gsm_options) -> Language:
    """Port projections of the ground-state manifold."""
    gsm = enumerate_gsm(complex_, **gsm_options)
    return Language(len(complex_.ports), frozenset(gsm.project(complex_.port_indices)))


def fix_port(complex_: Complex, label: str) -> Complex:
    """Delete port ``label`` together with every atom blockaded by it.

    This is the complex that realizes the language restricted to words with a
    1 at that port (letter removed).  Its ground energy is shifted by the
    removed port's detuning.
    """
    p = complex_.port(label)
    drop = {p.index} | set(complex_.graph.neighbors(p.index))
    keep = [i for i in range(complex_.n_atoms) if i not in drop]
    if not keep:
        raise ValidationError("fixing this port removes every atom")
    index = {v: k for k, v in enumerate(keep)}
    lost = [q.label for q in complex_.ports if q.index in drop and q.index != p.index]
    if lost:
        raise ValidationError(f"ports {lost} are blockaded by {label!r}; fixing would delete them")
    ports = tuple(Port(q.label, index[q.index]) for q in complex_.ports if q.index != p.index)
    positions = None if complex_.positions is None else tuple(complex_.positions[i] for i in keep)
    return Complex(
        tuple(complex_.detunings[i] for i in keep),
        complex_.graph.induced(keep),
        ports,
        positions,
        complex_.blockade_radius,
        f"{complex_.name}|{label}=1" if complex_.name else "",
    )


# --------------------------------------------------------------- van der Waals


def vdw_energies(positions, detunings, c6: float, max_atoms: int = 20) -> np.ndarray:
    """Classical energies of all 2^N occupations with C6/r^6 interactions.

    ``E = -sum_i detuning_i n_i + sum_{i<j} c6 / d_ij^6 n_i n_j``, indexed by
    occupation bitmask.  Coincident occupied atoms give +inf.
    """
    xy = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(xy)
    if n > max_atoms:
        raise ResourceLimitError(f"{n} atoms is too many for a full spectrum")
    det = np.array([float(d) for d in detunings])
    masks = np.arange(1 << n, dtype=np.int64)
    occ = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    e = -occ @ det
    with np.errstate(divide="ignore"):
        for i, j in combinations(range(n), 2):
            d = float(np.hypot(*(xy[i] - xy[j])))
            v = math.inf if d == 0 else c6 / d**6
            both = occ[:, i] * occ[:, j]
            e = e + np.where(both > 0, v, 0.0)
    return e


def vdw_quality(positions, detunings, c6: float, logical_masks) -> tuple[float, float, float]:
    """Return (width, gap, width/gap) of the logical manifold under vdW interactions.

    ``width`` is the spread of energies over the logical configurations and
    ``gap`` the distance from the highest logical level to the lowest
    non-logical level.
    """
    e = vdw_energies(positions, detunings, c6)
    logical = np.zeros(len(e), dtype=bool)
    logical[list(logical_masks)] = True
    le = e[logical]
    width = float(le.max() - le.min())
    gap = float(e[~logical].min() - le.max())
    ratio = width / gap if gap > 0 else math.inf
    return width, gap, ratio
