"""Languages: truth tables, gamma-intersections and lattice constraint languages."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import boolexpr
from .core import Language, format_word, word
from .errors import ResourceLimitError, ValidationError


# ------------------------------------------------------------------ functions


@dataclass(frozen=True)
class BooleanFunction:
    """A Boolean function given by its table; ``expr`` keeps a parsed formula if any.

    ``table[k]`` is the output on the input whose bits, read as a binary number
    with ``x1`` most significant, equal ``k``.
    """

    n_inputs: int
    table: tuple
    expr: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_inputs < 1:
            raise ValidationError("a Boolean function needs at least one input")
        table = tuple(int(v) for v in self.table)
        if len(table) != 1 << self.n_inputs or any(v not in (0, 1) for v in table):
            raise ValidationError("table must list 2^g binary outputs")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(cls, fn: Callable, n_inputs: int) -> "BooleanFunction":
        rows = itertools.product((0, 1), repeat=n_inputs)
        return cls(n_inputs, tuple(int(bool(fn(*bits))) for bits in rows))

    @classmethod
    def from_expression(cls, text: str, n_inputs: int | None = None) -> "BooleanFunction":
        node = boolexpr.parse(text)
        used = boolexpr.variables(node)
        need = max(used) + 1 if used else 1
        if n_inputs is None:
            n_inputs = need
        elif n_inputs < need:
            raise ValidationError(f"expression uses x{need} but only {n_inputs} inputs were declared")
        rows = itertools.product((0, 1), repeat=n_inputs)
        return cls(n_inputs, tuple(boolexpr.evaluate(node, bits) for bits in rows), node)

    @classmethod
    def from_index(cls, n_inputs: int, index: int) -> "BooleanFunction":
        """The function whose table, read as a binary number (row 0 lowest), is ``index``."""
        return cls(n_inputs, tuple(index >> k & 1 for k in range(1 << n_inputs)))

    def __call__(self, *bits) -> int:
        if len(bits) == 1 and isinstance(bits[0], (tuple, list)):
            bits = tuple(bits[0])
        k = 0
        for b in bits:
            k = (k << 1) | int(b)
        return self.table[k]

    def rows(self):
        for k, bits in enumerate(itertools.product((0, 1), repeat=self.n_inputs)):
            yield bits, self.table[k]

    @property
    def is_constant(self) -> bool:
        return len(set(self.table)) == 1


def truth_table_language(f) -> Language:
    """Words ``inputs ++ [f(inputs)]`` over all input assignments."""
    if not isinstance(f, BooleanFunction):
        raise ValidationError("expected a BooleanFunction")
    return Language(f.n_inputs + 1, frozenset(bits + (out,) for bits, out in f.rows()))


def named_language(name: str) -> Language:
    """Languages of the standard primitives by name."""
    key = name.upper()
    gates = {
        "NOT": ("!x1", None),
        "LNK": ("x1", None),
        "AND": ("x1 & x2", None),
        "OR": ("x1 | x2", None),
        "NOR": ("x1 nor x2", None),
        "NAND": ("x1 nand x2", None),
        "XOR": ("x1 ^ x2", None),
        "XNOR": ("x1 == x2", None),
    }
    if key in gates:
        return truth_table_language(BooleanFunction.from_expression(gates[key][0]))
    if key == "CPY":
        return Language.from_strings(["000", "111"])
    if key == "CRS":
        return Language(4, frozenset((a, b, a, b) for a in (0, 1) for b in (0, 1)))
    if key == "ICRS":
        return Language(4, frozenset((a, b, 1 - b, 1 - a) for a in (0, 1) for b in (0, 1)))
    if key == "SCU":
        return Language(4, frozenset(w for w in itertools.product((0, 1), repeat=4) if not sum(w) % 2))
    if key in ("FIB", "FIB_SITE"):
        return Language(3, frozenset(w for w in itertools.product((0, 1), repeat=3) if fib_check(w)))
    raise ValidationError(f"no named language {name!r}")


# ---------------------------------------------------------- gamma-intersection


@dataclass(frozen=True)
class GammaMap:
    """Pairs (position in first language, position in second), 0-based."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        firsts = [a for a, _ in pairs]
        seconds = [b for _, b in pairs]
        if len(set(firsts)) != len(firsts) or len(set(seconds)) != len(seconds):
            raise ValidationError("gamma must be a partial bijection")
        if any(a < 0 or b < 0 for a, b in pairs):
            raise ValidationError("positions must be non-negative")
        object.__setattr__(self, "pairs", pairs)

    def check(self, n1: int, n2: int) -> None:
        for a, b in self.pairs:
            if a >= n1 or b >= n2:
                raise ValidationError(f"pair ({a}, {b}) is out of range for word lengths {n1}, {n2}")


def gamma_intersection(l1: Language, l2: Language, gamma, reduced: bool = False) -> Language:
    """Concatenations of words agreeing on the identified letters.

    Non-reduced: the whole first word followed by the second word with its
    identified letters removed.  Reduced: identified letters removed from both.
    """
    if not isinstance(gamma, GammaMap):
        gamma = GammaMap(tuple(gamma))
    gamma.check(l1.word_length, l2.word_length)
    g1 = {a for a, _ in gamma.pairs}
    g2 = {b for _, b in gamma.pairs}
    keep1 = [k for k in range(l1.word_length) if not reduced or k not in g1]
    keep2 = [k for k in range(l2.word_length) if k not in g2]
    length = len(keep1) + len(keep2)
    if length == 0:
        raise ValidationError("every letter is identified; the result has empty words")
    by_key: dict = {}
    for y in l2.words:
        by_key.setdefault(tuple(y[b] for _, b in gamma.pairs), []).append(y)
    out = set()
    for x in l1.words:
        for y in by_key.get(tuple(x[a] for a, _ in gamma.pairs), ()):
            out.add(tuple(x[k] for k in keep1) + tuple(y[k] for k in keep2))
    return Language(length, frozenset(out))


# ------------------------------------------------------------ check functions


def parity_check(bits) -> bool:
    """Even number of ones (the loop / Z2 constraint)."""
    return sum(bits) % 2 == 0


def z2_check(bits) -> bool:
    return parity_check(bits)


def fib_check(bits) -> bool:
    """Fibonacci string-net rule on a trivalent vertex: no string may end there."""
    x1, x2, x3 = bits
    return ((x1 ^ x2) == x3) or bool(x1 and x2 and x3)


# ------------------------------------------------------------------- lattices


@dataclass(frozen=True)
class LatticeSpec:
    kind: str  # "square" or "honeycomb"
    dimensions: tuple
    boundary: str = "periodic"  # "open-rough", or "open-smooth" (square: smooth left/right sides)
    bits_per_edge: int = 1

    def __post_init__(self):
        if self.kind not in ("square", "honeycomb"):
            raise ValidationError(f"unknown lattice kind {self.kind!r}")
        if self.boundary not in ("periodic", "open-rough", "open-smooth"):
            raise ValidationError(f"unknown boundary {self.boundary!r}")
        if self.boundary == "open-smooth" and self.kind != "square":
            raise ValidationError("smooth sides are only defined for the square lattice")
        lx, ly = (int(v) for v in self.dimensions)
        if lx < 1 or ly < 1:
            raise ValidationError("lattice dimensions must be at least 1")
        if self.bits_per_edge < 1:
            raise ValidationError("need at least one bit per edge")
        object.__setattr__(self, "dimensions", (lx, ly))


@dataclass
class Lattice:
    """Sites, edges and the ordered edge list seen by each site.

    ``edges[e]`` is a pair of site keys; the second entry is ``None`` for a
    dangling edge of an open boundary.  ``site_edges[s]`` follows the
    projector convention: (north, east, south, west) on the square lattice,
    counterclockwise from the vertical edge on the honeycomb lattice.  On
    smooth sides the missing edge is ``None``.
    """

    spec: LatticeSpec
    sites: list
    edges: list
    edge_keys: list
    site_edges: dict

    @property
    def n_bits(self) -> int:
        return len(self.edges) * self.spec.bits_per_edge


def build_lattice(spec: LatticeSpec) -> Lattice:
    if spec.kind == "square":
        return _square(spec)
    return _honeycomb(spec)


def _square(spec: LatticeSpec) -> Lattice:
    lx, ly = spec.dimensions
    periodic = spec.boundary == "periodic"
    if periodic and (lx == 1 or ly == 1):
        raise ValidationError("a periodic square lattice of width 1 closes edges onto their own site")
    sites = [(i, j) for j in range(ly) for i in range(lx)]
    keys, ends = [], []
    index = {}

    def add(key, a, b):
        index[key] = len(keys)
        keys.append(key)
        ends.append((a, b))

    if periodic:
        for j in range(ly):
            for i in range(lx):
                add(("h", i, j), (i, j), ((i + 1) % lx, j))
                add(("v", i, j), (i, j), (i, (j + 1) % ly))
    else:
        smooth = spec.boundary == "open-smooth"
        for j in range(ly):
            for i in range(-1, lx):
                if smooth and (i < 0 or i + 1 >= lx):
                    continue
                a = (i, j) if i >= 0 else (i + 1, j)
                b = (i + 1, j) if 0 <= i and i + 1 < lx else None
                add(("h", i, j), a, b)
        for i in range(lx):
            for j in range(-1, ly):
                a = (i, j) if j >= 0 else (i, j + 1)
                b = (i, j + 1) if 0 <= j and j + 1 < ly else None
                add(("v", i, j), a, b)

    def key_h(i, j):
        return ("h", i % lx, j) if periodic else ("h", i, j)

    def key_v(i, j):
        return ("v", i, j % ly) if periodic else ("v", i, j)

    site_edges = {}
    for i, j in sites:
        north = index[key_v(i, j)]
        east = index.get(key_h(i, j))
        south = index[key_v(i, j - 1)]
        west = index.get(key_h(i - 1, j))
        site_edges[(i, j)] = (north, east, south, west)
    return Lattice(spec, sites, ends, keys, site_edges)


def _honeycomb(spec: LatticeSpec) -> Lattice:
    lx, ly = spec.dimensions
    periodic = spec.boundary == "periodic"
    sites = [(kind, i, j) for j in range(ly) for i in range(lx) for kind in ("A", "B")]
    keys, ends = [], []
    index = {}

    def inside(i, j):
        return 0 <= i < lx and 0 <= j < ly

    def wrap(i, j):
        return (i % lx, j % ly) if periodic else (i, j)

    def add(key, a, b):
        index[key] = len(keys)
        keys.append(key)
        ends.append((a, b))

    # A(i,j) sits above B(i,j); its upper edges reach B(i,j+1) and B(i-1,j+1)
    for j in range(ly):
        for i in range(lx):
            add(("v", i, j), ("A", i, j), ("B", i, j))
            for tag, (bi, bj) in (("r", (i, j + 1)), ("l", (i - 1, j + 1))):
                bi, bj = wrap(bi, bj)
                add((tag, i, j), ("A", i, j), ("B", bi, bj) if inside(bi, bj) else None)
    if not periodic:
        # dangling lower edges of B sites without an A partner below
        for j in range(ly):
            for i in range(lx):
                for tag, (ai, aj) in (("r", (i, j - 1)), ("l", (i + 1, j - 1))):
                    if not inside(ai, aj):
                        add((tag, ai, aj), ("B", i, j), None)

    site_edges = {}
    for j in range(ly):
        for i in range(lx):
            site_edges[("A", i, j)] = (index[("v", i, j)], index[("r", i, j)], index[("l", i, j)])
            ri, rj = wrap(i, j - 1)
            li, lj = wrap(i + 1, j - 1)
            site_edges[("B", i, j)] = (index[("v", i, j)], index[("r", ri, rj)], index[("l", li, lj)])
    return Lattice(spec, sites, ends, keys, site_edges)


def tessellated_language(
    spec: LatticeSpec,
    check: Callable[[Sequence[int]], bool],
    *,
    max_bits: int = 32,
    max_words: int = 1 << 22,
) -> Language:
    """All edge-bit assignments accepted by ``check`` at every site.

    Bits are ordered edge by edge (``Lattice.edge_keys``), ``bits_per_edge``
    consecutive bits per edge; each site sees its edges in projector order.
    """
    lattice = build_lattice(spec)
    k = spec.bits_per_edge
    n_bits = lattice.n_bits
    if n_bits > max_bits:
        raise ResourceLimitError(f"{n_bits} edge bits exceeds the budget of {max_bits}")
    site_bits = {
        s: [e * k + b for e in edges if e is not None for b in range(k)]
        for s, edges in lattice.site_edges.items()
    }
    # a site is checked as soon as its last bit has been assigned
    ready: dict[int, list] = {}
    for s, bits in site_bits.items():
        ready.setdefault(max(bits), []).append(bits)
    assignment = [0] * n_bits
    out = []

    def rec(pos):
        if pos == n_bits:
            out.append(tuple(assignment))
            if len(out) > max_words:
                raise ResourceLimitError(f"more than {max_words} words")
            return
        for b in (0, 1):
            assignment[pos] = b
            if all(check([assignment[t] for t in bits]) for bits in ready.get(pos, ())):
                rec(pos + 1)
        assignment[pos] = 0

    rec(0)
    return Language(n_bits, frozenset(out))


def language_summary(language: Language, limit: int = 64) -> str:
    words = language.strings()
    head = ", ".join(words[:limit])
    more = "" if len(words) <= limit else f", ... ({len(words) - limit} more)"
    return f"{len(words)} words of length {language.word_length}: {head}{more}"


__all__ = [
    "BooleanFunction",
    "GammaMap",
    "Lattice",
    "LatticeSpec",
    "build_lattice",
    "fib_check",
    "format_word",
    "gamma_intersection",
    "named_language",
    "parity_check",
    "tessellated_language",
    "truth_table_language",
    "word",
    "z2_check",
]
