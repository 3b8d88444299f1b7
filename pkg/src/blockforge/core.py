"""Core data model: words, languages, geometries, blockade graphs and complexes.

Detunings are exact rationals (``fractions.Fraction``) in units of a reference
detuning.  Positions are floats in units of the blockade radius.  A complex
either carries a geometry (and its blockade graph is derived from it) or is
abstract (blockade graph and detunings only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ValidationError

Word = tuple  # tuple[int, ...] of 0/1 letters


def word(bits) -> Word:
    """Build a word from a string like ``"010"`` or an iterable of 0/1."""
    if isinstance(bits, str):
        if not bits or any(ch not in "01" for ch in bits):
            raise ValidationError(f"not a binary word: {bits!r}")
        return tuple(int(ch) for ch in bits)
    out = tuple(int(b) for b in bits)
    if not out or any(b not in (0, 1) for b in out):
        raise ValidationError(f"not a binary word: {bits!r}")
    return out


def format_word(w: Word) -> str:
    return "".join(str(b) for b in w)


def to_fraction(value) -> Fraction:
    """Parse ``"3/2"``, ints, Fractions or (exactly representable) floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError("booleans are not detunings")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"non-finite value {value}")
        return Fraction(value).limit_denominator(10**9)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse rational {value!r}") from exc
    raise ValidationError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True)
class Language:
    """A uniform set of binary words."""

    word_length: int
    words: frozenset

    def __post_init__(self):
        if self.word_length < 1:
            raise ValidationError("word length must be positive")
        clean = frozenset(word(w) for w in self.words)
        for w in clean:
            if len(w) != self.word_length:
                raise ValidationError(
                    f"word {format_word(w)} has length {len(w)}, expected {self.word_length}"
                )
        object.__setattr__(self, "words", clean)

    @classmethod
    def from_strings(cls, strings: Iterable[str], word_length: int | None = None) -> "Language":
        items = [word(s) for s in strings]
        if word_length is None:
            if not items:
                raise ValidationError("cannot infer the word length of an empty language")
            word_length = len(items[0])
        return cls(word_length, frozenset(items))

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.sorted_words())

    def __contains__(self, item) -> bool:
        return word(item) in self.words

    def sorted_words(self) -> list:
        return sorted(self.words)

    def strings(self) -> list[str]:
        return [format_word(w) for w in self.sorted_words()]

    def project(self, positions: Sequence[int]) -> "Language":
        """Keep only the letters at ``positions`` (in that order)."""
        return Language(len(positions), frozenset(tuple(w[p] for p in positions) for w in self.words))

    def restrict(self, position: int, value: int = 1) -> "Language":
        """Words with letter ``value`` at ``position``, that letter deleted."""
        if not 0 <= position < self.word_length:
            raise ValidationError(f"position {position} out of range")
        if self.word_length == 1:
            raise ValidationError("cannot delete the only letter of a word")
        kept = frozenset(w[:position] + w[position + 1:] for w in self.words if w[position] == value)
        return Language(self.word_length - 1, kept)

    def permute(self, order: Sequence[int]) -> "Language":
        """Reorder letters: new letter ``k`` is old letter ``order[k]``."""
        if sorted(order) != list(range(self.word_length)):
            raise ValidationError("not a permutation of the letter positions")
        return self.project(order)

    def symmetries(self) -> list[tuple[int, ...]]:
        """Letter permutations mapping the language onto itself."""
        from itertools import permutations

        return [p for p in permutations(range(self.word_length)) if self.permute(p).words == self.words]

    def __repr__(self) -> str:
        return f"Language({self.word_length}, {{{', '.join(self.strings())}}})"


@dataclass(frozen=True)
class BlockadeGraph:
    n_vertices: int
    edges: frozenset

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValidationError("a blockade graph needs at least one vertex")
        clean = set()
        for e in self.edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise ValidationError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices):
                raise ValidationError(f"edge ({i}, {j}) out of range")
            clean.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable) -> "BlockadeGraph":
        return cls(n_vertices, frozenset(tuple(e) for e in edges))

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n_vertices
        for i, j in self.edges:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return tuple(masks)

    def neighbors(self, v: int) -> frozenset:
        m = self.neighbor_masks[v]
        return frozenset(i for i in range(self.n_vertices) if m >> i & 1)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.neighbor_masks[i] >> j & 1)

    def is_independent(self, occupied: Iterable[int]) -> bool:
        mask = 0
        for v in occupied:
            mask |= 1 << v
        return self.is_independent_mask(mask)

    def is_independent_mask(self, mask: int) -> bool:
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if self.neighbor_masks[v] & mask:
                return False
            m ^= low
        return True

    def non_edges(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.n_vertices)
            for j in range(i + 1, self.n_vertices)
            if (i, j) not in self.edges
        ]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        g.add_edges_from(self.edges)
        return g

    def induced(self, keep: Sequence[int]) -> "BlockadeGraph":
        """Subgraph on ``keep``; vertex ``keep[k]`` becomes vertex ``k``."""
        index = {v: k for k, v in enumerate(keep)}
        return BlockadeGraph(
            len(keep),
            frozenset((index[i], index[j]) for i, j in self.edges if i in index and j in index),
        )


def blockade_graph_of(positions, radius: float = 1.0) -> BlockadeGraph:
    """Edge (i, j) iff the two atoms are strictly closer than ``radius``."""
    if not radius > 0:
        raise ValidationError("blockade radius must be positive")
    xy = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(xy)
    diff = xy[:, None, :] - xy[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    ii, jj = np.nonzero(np.triu(dist < radius, k=1))
    return BlockadeGraph(n, frozenset(zip(ii.tolist(), jj.tolist())))


@dataclass(frozen=True)
class Structure:
    positions: tuple
    detunings: tuple

    def __post_init__(self):
        pos = tuple((float(x), float(y)) for x, y in self.positions)
        det = tuple(to_fraction(d) for d in self.detunings)
        if not pos:
            raise ValidationError("a structure needs at least one atom")
        if len(pos) != len(det):
            raise ValidationError("positions and detunings differ in length")
        if any(not (math.isfinite(x) and math.isfinite(y)) for x, y in pos):
            raise ValidationError("positions must be finite")
        if any(d <= 0 for d in det):
            raise ValidationError("detunings must be strictly positive")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "detunings", det)

    @property
    def xy(self) -> np.ndarray:
        return np.array(self.positions, dtype=float)

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class Port:
    label: str
    index: int


@dataclass(frozen=True)
class Configuration:
    """Occupation numbers, one bit per atom."""

    occupation: tuple

    @classmethod
    def from_mask(cls, mask: int, n_atoms: int) -> "Configuration":
        return cls(tuple(mask >> i & 1 for i in range(n_atoms)))

    @property
    def mask(self) -> int:
        return sum(1 << i for i, b in enumerate(self.occupation) if b)

    @property
    def occupied(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.occupation) if b)

    def is_admissible(self, graph: BlockadeGraph) -> bool:
        return graph.is_independent_mask(self.mask)

    def __str__(self) -> str:
        return format_word(self.occupation)


@dataclass(frozen=True)
class Complex:
    """Atoms with detunings, a blockade graph, an optional geometry and labelled ports.

    When ``positions`` is given and ``graph`` is omitted, the blockade graph is
    derived from the geometry at ``blockade_radius``.
    """

    detunings: tuple
    graph: BlockadeGraph | None = None
    ports: tuple = ()
    positions: tuple | None = None
    blockade_radius: float = 1.0
    name: str = ""
    metadata: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        det = tuple(to_fraction(d) for d in self.detunings)
        if not det:
            raise ValidationError("a complex needs at least one atom")
        if any(d <= 0 for d in det):
            raise ValidationError("detunings must be strictly positive")
        object.__setattr__(self, "detunings", det)
        if not self.blockade_radius > 0:
            raise ValidationError("blockade radius must be positive")
        if self.positions is not None:
            pos = tuple((float(x), float(y)) for x, y in self.positions)
            if len(pos) != len(det):
                raise ValidationError("positions and detunings differ in length")
            object.__setattr__(self, "positions", pos)
            if self.graph is None:
                object.__setattr__(self, "graph", blockade_graph_of(pos, self.blockade_radius))
        if self.graph is None:
            raise ValidationError("an abstract complex needs an explicit blockade graph")
        if self.graph.n_vertices != len(det):
            raise ValidationError("blockade graph size differs from the atom count")
        ports = tuple(p if isinstance(p, Port) else Port(str(p[0]), int(p[1])) for p in self.ports)
        idx = [p.index for p in ports]
        labels = [p.label for p in ports]
        if len(set(idx)) != len(idx):
            raise ValidationError("port indices must be distinct")
        if len(set(labels)) != len(labels):
            raise ValidationError("port labels must be distinct")
        if any(not 0 <= i < len(det) for i in idx):
            raise ValidationError("port index out of range")
        object.__setattr__(self, "ports", ports)

    @property
    def n_atoms(self) -> int:
        return len(self.detunings)

    @property
    def port_indices(self) -> tuple[int, ...]:
        return tuple(p.index for p in self.ports)

    @property
    def port_labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.ports)

    @property
    def ancillas(self) -> tuple[int, ...]:
        ports = set(self.port_indices)
        return tuple(i for i in range(self.n_atoms) if i not in ports)

    @property
    def is_abstract(self) -> bool:
        return self.positions is None

    @property
    def structure(self) -> Structure | None:
        if self.positions is None:
            return None
        return Structure(self.positions, self.detunings)

    def port(self, label: str) -> Port:
        for p in self.ports:
            if p.label == label:
                return p
        raise ValidationError(f"unknown port label {label!r}; ports are {list(self.port_labels)}")

    def port_position(self, label: str) -> int:
        for k, p in enumerate(self.ports):
            if p.label == label:
                return k
        raise ValidationError(f"unknown port label {label!r}; ports are {list(self.port_labels)}")

    def project(self, config_mask: int) -> Word:
        return tuple(config_mask >> i & 1 for i in self.port_indices)

    def geometry_consistent(self) -> bool:
        """True when the stored graph equals the unit-disk graph of the positions."""
        if self.positions is None:
            return True
        return blockade_graph_of(self.positions, self.blockade_radius) == self.graph

    def with_geometry(self, positions) -> "Complex":
        return Complex(
            self.detunings, None, self.ports, tuple(map(tuple, positions)), self.blockade_radius, self.name,
            dict(self.metadata),
        )

    def abstract(self) -> "Complex":
        return Complex(self.detunings, self.graph, self.ports, None, self.blockade_radius, self.name, dict(self.metadata))

    def relabel(self, mapping: dict) -> "Complex":
        ports = tuple(Port(mapping.get(p.label, p.label), p.index) for p in self.ports)
        return Complex(self.detunings, self.graph, ports, self.positions, self.blockade_radius, self.name,
                       dict(self.metadata))

    def with_ports(self, ports) -> "Complex":
        return Complex(self.detunings, self.graph, tuple(ports), self.positions, self.blockade_radius, self.name,
                       dict(self.metadata))

    def scaled_detunings(self, factor) -> "Complex":
        f = to_fraction(factor)
        return Complex(tuple(d * f for d in self.detunings), self.graph, self.ports, self.positions,
                       self.blockade_radius, self.name, dict(self.metadata))
