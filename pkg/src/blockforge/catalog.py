"""Built-in verified complexes.

Each design is stored here as an abstract blockade graph with detunings; the
shipped geometry (normalized and robustness-optimized) lives in
``data/catalog.json``, which ``scripts/build_catalog.py`` regenerates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .core import BlockadeGraph, Complex, Language, Port
from .errors import ValidationError
from .gsm import enumerate_gsm, realizes_language
from .languages import named_language
from .metrics import robustness_and_flag, spread

GATE_PORTS = ("A", "B", "Q")


@dataclass(frozen=True)
class Design:
    edges: tuple
    detunings: tuple
    ports: tuple  # (label, index) pairs
    language: str
    minimal_atom_count: int
    minimality: str  # how the count is backed: "search", "search+geometry" or "heuristic"
    description: str


def _gate(edges, det, minimal, minimality, description, language=None, ports=GATE_PORTS):
    return lambda name: Design(
        tuple(map(tuple, edges)), tuple(det), tuple(zip(ports, range(len(ports)))),
        language or name, minimal, minimality, description,
    )


_ICRS_EDGES = [(0, 4), (0, 5), (1, 4), (1, 6), (2, 5), (2, 7), (3, 6), (3, 7),
               (4, 5), (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]

_DESIGNS = {
    "NOT": _gate([(0, 1)], [1, 1], 2, "search", "two blockaded atoms", ports=("A", "Q")),
    "LNK": _gate([(0, 2), (1, 2)], [1, 1, 2], 3, "search",
                 "wire segment; the middle ancilla inverts twice", ports=("A", "Q")),
    "CPY": _gate([(0, 3), (1, 3), (2, 3)], [1, 1, 1, 3], 4, "search",
                 "fan-out: one ancilla blockading three ports", ports=("A", "Q", "R")),
    "NOR_ring": _gate([(0, 2), (0, 3), (1, 2), (1, 4), (3, 4)], [1, 2, 1, 1, 2], 5, "search",
                      "NOR with a ring of ancillas", language="NOR"),
    "NOR_triangle": _gate([(0, 2), (0, 3), (1, 2), (1, 4), (2, 3), (2, 4), (3, 4)], [1, 1, 2, 1, 1], 5,
                          "search", "NOR with a triangle of ancillas", language="NOR"),
    "AND": _gate([(0, 3), (0, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (4, 5)], [1, 1, 1, 1, 2, 2], 6,
                 "search", "AND gate"),
    "OR": _gate([(0, 3), (0, 4), (1, 3), (1, 5), (2, 3), (4, 5)], [1, 2, 1, 2, 1, 2], 6, "search",
                "OR gate"),
    "XNOR": _gate([(0, 3), (0, 4), (1, 3), (1, 5), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)],
                  [1, 1, 1, 2, 2, 2], 6, "search", "XNOR gate; its 6-atom blockade graph is unique"),
    "NAND": _gate([(0, 3), (0, 4), (1, 5), (2, 6), (3, 4), (3, 6), (4, 5), (4, 6), (5, 6)],
                  [1, 1, 1, 1, 2, 2, 2], 7, "search", "NAND gate"),
    "XOR": _gate([(0, 3), (0, 4), (1, 3), (1, 5), (2, 6), (3, 4), (3, 5), (4, 5), (4, 6), (5, 6)],
                 [1, 1, 1, 2, 2, 2, 2], 7, "search", "XOR gate"),
    "ICRS": _gate(_ICRS_EDGES, [1, 1, 1, 1, 3, 3, 3, 3], 8, "heuristic",
                  "inverting crossing: Q = not B, R = not A, four ancillas in a clique",
                  ports=("A", "B", "Q", "R")),
    "CRS": lambda name: Design(
        tuple(_ICRS_EDGES) + ((2, 8), (3, 9)), (1, 1, 2, 2, 3, 3, 3, 3, 1, 1),
        (("A", 0), ("B", 1), ("Q", 9), ("R", 8)), "CRS", 10, "heuristic",
        "crossing: the inverting crossing followed by a NOT on each output",
    ),
    "SCU": lambda name: Design(
        ((0, 3), (0, 4), (1, 3), (1, 5), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5),
         (2, 9), (2, 10), (6, 8), (6, 9), (7, 8), (7, 10), (8, 9), (8, 10), (9, 10)),
        (1, 1, 2, 2, 2, 2, 1, 1, 2, 2, 2),
        (("A", 0), ("B", 1), ("C", 6), ("D", 7)), "SCU", 11, "search+geometry",
        "surface-code vertex: two XNOR gates glued at their outputs; ports A, B, C, D sit north, east, south, west",
    ),
    "FIB_SITE": lambda name: Design(
        ((0, 3), (0, 4), (1, 3), (1, 5), (2, 3), (2, 6), (3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)),
        (1, 1, 1, 3, 1, 1, 1),
        (("v", 0), ("r", 1), ("l", 2)), "FIB_SITE", 7, "search",
        "Fibonacci vertex: hub ancilla plus a triangle; ports (v, r, l) counterclockwise from vertical",
    ),
}
NAMES = tuple(list(_DESIGNS) + ["FMU"])


def available() -> tuple[str, ...]:
    return NAMES


def design(name: str) -> Design:
    if name not in _DESIGNS:
        raise ValidationError(f"no catalog design {name!r}; available: {', '.join(_DESIGNS)}")
    return _DESIGNS[name](name)


def abstract_complex(name: str) -> Complex:
    """The catalog complex without geometry, straight from its design."""
    if name == "FMU":
        from .tessellation import fibonacci_unit_cell

        return fibonacci_unit_cell(abstract_complex("FIB_SITE"))
    d = design(name)
    graph = BlockadeGraph.from_edges(len(d.detunings), d.edges)
    return Complex(d.detunings, graph, tuple(Port(lbl, i) for lbl, i in d.ports), name=name,
                   metadata={"description": d.description})


def language_of(name: str) -> Language:
    if name == "FMU":
        from .languages import fib_check

        # ports V, A1, A2, B1, B2: both sites see (V, first, second)
        words = [
            w for w in _words(5)
            if fib_check((w[0], w[1], w[2])) and fib_check((w[0], w[3], w[4]))
        ]
        return Language(5, frozenset(words))
    return named_language(design(name).language)


def _words(n):
    import itertools

    return itertools.product((0, 1), repeat=n)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    complex: Complex
    language: Language
    minimal_atom_count: int
    minimality: str
    description: str
    verification: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        from .io import complex_to_dict

        return {
            "name": self.name,
            "description": self.description,
            "minimal_atom_count": self.minimal_atom_count,
            "minimality": self.minimality,
            "language": sorted("".join(map(str, w)) for w in self.language.words),
            "verification": self.verification,
            "complex": complex_to_dict(self.complex),
        }


def verification_record(cplx: Complex, language: Language) -> dict:
    """GSM, gap, robustness and spread of a complex against its language."""
    gsm = enumerate_gsm(cplx, max_atoms=None)
    verdict = realizes_language(cplx, language)
    s = spread(cplx.detunings)
    record = {
        "realizes": bool(verdict),
        "ground_states": len(gsm.masks),
        "ground_energy": str(gsm.ground_energy),
        "gap": str(gsm.gap),
        "spread": s,
    }
    if cplx.positions is not None:
        xi, _ = robustness_and_flag(cplx.positions, cplx.graph)
        record["robustness"] = xi
        record["valid"] = bool(s < xi)
        record["geometry_consistent"] = cplx.geometry_consistent()
    return record


def _data() -> dict:
    try:
        text = resources.files("blockforge").joinpath("data/catalog.json").read_text()
    except FileNotFoundError:
        return {}
    return json.loads(text)


@lru_cache(maxsize=None)
def catalog(name: str) -> CatalogEntry:
    """Shipped catalog entry with its geometry and verification record."""
    if name not in NAMES:
        raise ValidationError(f"unknown catalog entry {name!r}; available: {', '.join(NAMES)}")
    from .io import complex_from_dict

    stored = _data().get(name)
    if stored is not None:
        cplx = complex_from_dict(stored["complex"])
        record = stored.get("verification", {})
    else:
        cplx = abstract_complex(name)
        record = {}
    if name == "FMU":
        minimal, minimality, description = 13, "composite", "two Fibonacci sites sharing their vertical edge"
    else:
        d = design(name)
        minimal, minimality, description = d.minimal_atom_count, d.minimality, d.description
    return CatalogEntry(name, cplx, language_of(name), minimal, minimality, description, record)
