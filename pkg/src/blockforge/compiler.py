"""Boolean check function -> NOR/CPY circuit -> planar circuit -> complex.

Circuits are DAGs of typed vertices joined by wires.  Every wire runs from an
output slot of one vertex to an input slot of another:

========  =========  ==========  ==========================================
kind      in slots   out slots   value
========  =========  ==========  ==========================================
input     0          1           the input bit
output    1          0           the function value
nor       2          1           not (a or b)
not       1          1           not a
cpy       1          2           a, a
crs       2          2           b, a (the two wires swap sides)
sink      1          0           swallows an input the function ignores
========  =========  ==========  ==========================================

``planarize`` draws the circuit as left-to-right strands and replaces every
swap of neighbouring strands by a crossing (a ``crs`` vertex, or its gate-level
expansion into three XOR sub-circuits), which makes the drawing planar by
construction.  ``circuit_to_complex`` glues one catalog complex per vertex.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from .amalgamation import compose
from .core import Complex
from .errors import GeometryError, NotRealizableError, ValidationError
from .gsm import enumerate_gsm, fix_port, realizes_language
from .languages import BooleanFunction, truth_table_language

ARITY = {
    "input": (0, 1), "output": (1, 0), "nor": (2, 1), "not": (1, 1),
    "cpy": (1, 2), "crs": (2, 2), "sink": (1, 0),
}


@dataclass(frozen=True)
class Wire:
    src: int
    src_slot: int
    dst: int
    dst_slot: int


@dataclass
class CircuitGraph:
    """Typed vertices and wires; ``inputs[i]`` is the vertex of ``x{i+1}``."""

    kinds: dict = field(default_factory=dict)
    wires: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    output: int | None = None
    planar: bool = False
    positions: dict = field(default_factory=dict)  # vertex -> (x, y) of a planar drawing
    crossings: int = 0

    # -- construction ------------------------------------------------------
    def add(self, kind: str) -> int:
        if kind not in ARITY:
            raise ValidationError(f"unknown vertex kind {kind!r}")
        v = len(self.kinds)
        while v in self.kinds:
            v += 1
        self.kinds[v] = kind
        return v

    def connect(self, src: int, src_slot: int, dst: int, dst_slot: int) -> Wire:
        w = Wire(src, src_slot, dst, dst_slot)
        self.wires.append(w)
        return w

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    def count(self, kind: str) -> int:
        return sum(k == kind for k in self.kinds.values())

    def in_wires(self, v: int) -> list[Wire]:
        return sorted((w for w in self.wires if w.dst == v), key=lambda w: w.dst_slot)

    def out_wires(self, v: int) -> list[Wire]:
        return sorted((w for w in self.wires if w.src == v), key=lambda w: w.src_slot)

    # -- checks ------------------------------------------------------------
    def validate(self) -> None:
        ins, outs = defaultdict(set), defaultdict(set)
        for w in self.wires:
            if w.dst_slot in ins[w.dst] or w.src_slot in outs[w.src]:
                raise ValidationError(f"slot used twice by wire {w}")
            ins[w.dst].add(w.dst_slot)
            outs[w.src].add(w.src_slot)
        for v, kind in self.kinds.items():
            n_in, n_out = ARITY[kind]
            if ins[v] != set(range(n_in)) or outs[v] != set(range(n_out)):
                raise ValidationError(f"vertex {v} ({kind}) has wrong degree")
        if self.output is None or self.kinds.get(self.output) != "output":
            raise ValidationError("circuit has no output vertex")
        if [self.kinds[v] for v in self.inputs] != ["input"] * len(self.inputs):
            raise ValidationError("input list does not point at input vertices")
        self.topological_order()

    def topological_order(self) -> list[int]:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.kinds)
        g.add_edges_from((w.src, w.dst) for w in self.wires)
        try:
            return list(nx.lexicographical_topological_sort(g))
        except nx.NetworkXUnfeasible as exc:
            raise ValidationError("circuit has a cycle") from exc

    # -- semantics ---------------------------------------------------------
    def evaluate(self, bits) -> int:
        value: dict = {}
        for v in self.topological_order():
            kind = self.kinds[v]
            args = [value[(w.src, w.src_slot)] for w in self.in_wires(v)]
            if kind == "input":
                out = (int(bits[self.inputs.index(v)]),)
            elif kind == "nor":
                out = (1 - (args[0] | args[1]),)
            elif kind == "not":
                out = (1 - args[0],)
            elif kind == "cpy":
                out = (args[0], args[0])
            elif kind == "crs":
                out = (args[1], args[0])
            elif kind == "output":
                return_value = args[0]
                out = ()
            else:
                out = ()
            for slot, val in enumerate(out):
                value[(v, slot)] = val
        return return_value

    def truth_table(self) -> BooleanFunction:
        return BooleanFunction(
            self.n_inputs, tuple(self.evaluate(bits) for bits in itertools.product((0, 1), repeat=self.n_inputs))
        )

    def computes(self, f: BooleanFunction) -> bool:
        return self.n_inputs == f.n_inputs and self.truth_table().table == f.table

    # -- structure ---------------------------------------------------------
    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        for v, kind in self.kinds.items():
            g.add_node(v, kind=kind)
        for w in self.wires:
            g.add_edge(w.src, w.dst, src_slot=w.src_slot, dst_slot=w.dst_slot)
        return g

    def is_planar_with_terminals_outside(self) -> bool:
        """Planar with all inputs and the output on one face (tested with an apex vertex)."""
        g = nx.Graph(self.to_networkx().to_undirected())
        apex = ("apex",)
        g.add_edges_from((apex, v) for v in list(self.inputs) + [self.output])
        return nx.check_planarity(g)[0]

    def stats(self) -> dict:
        return {k: self.count(k) for k in ARITY if self.count(k)} | {
            "wires": len(self.wires), "crossings": self.crossings, "planar": self.planar,
        }

    def copy(self) -> "CircuitGraph":
        return CircuitGraph(dict(self.kinds), list(self.wires), list(self.inputs), self.output, self.planar,
                            dict(self.positions), self.crossings)


# ------------------------------------------------------------- decomposition
#
# Signals form a hash-consed DAG: ("var", i), ("const", b), ("not", s), ("nor", s, t).


class _Signals:
    def __init__(self, inverters: bool):
        self.inverters = inverters

    def var(self, i):
        return ("var", i)

    def const(self, b):
        # NOR(x1, not x1) is always 0
        zero = self.nor(("var", 0), self.neg(("var", 0)))
        return zero if b == 0 else self.neg(zero)

    def neg(self, s):
        if s[0] == "not":
            return s[1]
        return ("not", s) if self.inverters else ("nor", s, s)

    def nor(self, a, b):
        return ("nor",) + tuple(sorted((a, b), key=repr))

    def or_(self, a, b):
        return self.neg(self.nor(a, b))

    def and_(self, a, b):
        return self.nor(self.neg(a), self.neg(b))

    def xnor(self, a, b):
        n = self.nor(a, b)
        return self.nor(self.nor(a, n), self.nor(b, n))

    def fold(self, op, items):
        items = list(items)
        acc = items[0]
        for s in items[1:]:
            acc = op(acc, s)
        return acc


def _from_ast(sig: _Signals, node):
    kind = node[0]
    if kind == "var":
        return sig.var(node[1])
    if kind == "const":
        return sig.const(node[1])
    if kind == "not":
        return sig.neg(_from_ast(sig, node[1]))
    a, b = _from_ast(sig, node[1]), _from_ast(sig, node[2])
    if kind == "nor":
        return sig.nor(a, b)
    if kind == "or":
        return sig.or_(a, b)
    if kind == "and":
        return sig.and_(a, b)
    if kind == "nand":
        return sig.neg(sig.and_(a, b))
    if kind == "eq":
        return sig.xnor(a, b)
    if kind == "xor":
        return sig.neg(sig.xnor(a, b))
    raise ValidationError(f"unknown operator {kind!r}")


def _two_level(sig: _Signals, f: BooleanFunction):
    """Sum of minterms or product of maxterms, whichever has fewer terms."""
    rows = list(f.rows())
    ones = [bits for bits, out in rows if out]
    zeros = [bits for bits, out in rows if not out]
    if not ones:
        return sig.const(0)
    if not zeros:
        return sig.const(1)

    def literal(i, positive):
        return sig.var(i) if positive else sig.neg(sig.var(i))

    if len(ones) <= len(zeros):
        terms = [sig.fold(sig.and_, [literal(i, b) for i, b in enumerate(bits)]) for bits in ones]
        return sig.fold(sig.or_, terms)
    clauses = [sig.fold(sig.or_, [literal(i, not b) for i, b in enumerate(bits)]) for bits in zeros]
    return sig.fold(sig.and_, clauses)


def _signals_to_circuit(root, n_inputs: int) -> CircuitGraph:
    c = CircuitGraph()
    c.inputs = [c.add("input") for _ in range(n_inputs)]
    uses: dict = defaultdict(int)
    seen = set()

    def count(s):
        if s in seen:
            return
        seen.add(s)
        for child in s[1:] if s[0] in ("not", "nor") else ():
            uses[child] += 1
            count(child)

    uses[root] += 1
    count(root)
    vertex: dict = {}
    # available output slots per signal; fan-out grows CPY chains on demand
    taps: dict = {}

    def build(s):
        if s in vertex:
            return
        if s[0] == "var":
            v = c.inputs[s[1]]
        elif s[0] == "not":
            build(s[1])
            v = c.add("not")
            c.connect(*tap(s[1]), v, 0)
        elif s[0] == "nor":
            build(s[1])
            build(s[2])
            v = c.add("nor")
            c.connect(*tap(s[1]), v, 0)
            c.connect(*tap(s[2]), v, 1)
        else:
            raise ValidationError(f"unexpected signal {s!r}")
        vertex[s] = v
        taps[s] = [(v, 0)]
        left = uses[s]
        # a chain of left-1 copies gives exactly left taps
        while left > 1:
            src = taps[s].pop()
            cp = c.add("cpy")
            c.connect(*src, cp, 0)
            taps[s] += [(cp, 1), (cp, 0)]
            left -= 1

    def tap(s):
        return taps[s].pop()

    build(root)
    c.output = c.add("output")
    c.connect(*tap(root), c.output, 0)
    for i, v in enumerate(c.inputs):
        if not any(w.src == v for w in c.wires):
            sink = c.add("sink")
            c.connect(v, 0, sink, 0)
    return c


def nor_decompose(f, *, inverters: bool = True, route: str = "auto") -> CircuitGraph:
    """NOR/NOT/CPY circuit computing ``f``, verified on every input.

    ``f`` is a :class:`BooleanFunction` or an expression string.  A parsed
    expression is translated operator by operator (``route="structural"``);
    otherwise the shorter of the minterm and maxterm forms is used.  Without
    ``inverters`` a negation becomes ``a nor a`` on a copied wire.
    """
    if isinstance(f, str):
        f = BooleanFunction.from_expression(f)
    sig = _Signals(inverters)
    if route == "auto":
        route = "structural" if f.expr is not None else "two-level"
    if route == "structural":
        if f.expr is None:
            raise ValidationError("the structural route needs a parsed expression")
        root = _from_ast(sig, f.expr)
    elif route == "two-level":
        root = _two_level(sig, f)
    else:
        raise ValidationError(f"unknown route {route!r}")
    circuit = _signals_to_circuit(root, f.n_inputs)
    circuit.validate()
    if not circuit.computes(f):
        raise NotRealizableError("decomposition does not reproduce the truth table")
    circuit.planar = False
    return circuit


# -------------------------------------------------------------- planarization


def _crossover_gadget(c: CircuitGraph, a_src, b_src):
    """Gate-level crossing: three XOR sub-circuits; returns (left_out, right_out) = (b, a)."""

    def xor(x_src, y_src):
        # xnor via four NORs, then a NOT
        cx, cy = c.add("cpy"), c.add("cpy")
        c.connect(*x_src, cx, 0)
        c.connect(*y_src, cy, 0)
        n = c.add("nor")
        c.connect(cx, 1, n, 0)
        c.connect(cy, 0, n, 1)
        cn = c.add("cpy")
        c.connect(n, 0, cn, 0)
        p, q = c.add("nor"), c.add("nor")
        c.connect(cx, 0, p, 0)
        c.connect(cn, 0, p, 1)
        c.connect(cn, 1, q, 0)
        c.connect(cy, 1, q, 1)
        r = c.add("nor")
        c.connect(p, 0, r, 0)
        c.connect(q, 0, r, 1)
        t = c.add("not")
        c.connect(r, 0, t, 0)
        return (t, 0)

    ca, cb = c.add("cpy"), c.add("cpy")
    c.connect(*a_src, ca, 0)
    c.connect(*b_src, cb, 0)
    s = xor((ca, 1), (cb, 0))
    cs = c.add("cpy")
    c.connect(*s, cs, 0)
    left = xor((ca, 0), (cs, 0))  # a ^ a ^ b = b
    right = xor((cs, 1), (cb, 1))  # a ^ b ^ b = a
    return left, right


def planarize(circuit: CircuitGraph, *, crossover: str = "complex", force: bool = False) -> CircuitGraph:
    """Planar version of ``circuit`` with all terminals on the outer face.

    A circuit that is already planar (with inputs and output on one face) is
    returned unchanged apart from its drawing, unless ``force`` is set.
    Otherwise vertices are scheduled on left-to-right strands and each swap
    of adjacent strands becomes a crossing: a ``crs`` vertex
    (``crossover="complex"``) or the three-XOR gate construction
    (``crossover="gates"``).  The result is re-verified on every input.
    """
    if crossover not in ("complex", "gates"):
        raise ValidationError("crossover is 'complex' or 'gates'")
    circuit.validate()
    if not force and circuit.is_planar_with_terminals_outside():
        out = circuit.copy()
        g = nx.Graph(out.to_networkx().to_undirected())
        apex = ("apex",)
        g.add_edges_from((apex, v) for v in list(out.inputs) + [out.output])
        _, emb = nx.check_planarity(g)
        pos = nx.combinatorial_embedding_to_pos(emb)
        out.positions = {v: tuple(map(float, pos[v])) for v in out.kinds}
        out.planar = True
        out.crossings = 0
        return out

    reference = circuit.truth_table()
    out = CircuitGraph()
    new_of: dict = {}
    for v in circuit.inputs:
        new_of[v] = out.add("input")
    out.inputs = [new_of[v] for v in circuit.inputs]
    # a strand is an open wire: (new source vertex, slot, old destination vertex, old slot)
    strands = []
    for v in circuit.inputs:
        for w in circuit.out_wires(v):
            strands.append([new_of[v], w.src_slot, w.dst, w.dst_slot])
    positions = {new_of[v]: (float(k), 0.0) for k, v in enumerate(circuit.inputs)}
    step = 0
    crossings = 0
    pending = {v for v, kind in circuit.kinds.items() if kind != "input"}

    def ready(v):
        need = len(circuit.in_wires(v))
        return sum(1 for s in strands if s[2] == v) == need

    while pending:
        candidates = [v for v in pending if ready(v)]
        if not candidates:
            raise ValidationError("circuit is not a DAG")

        def cost(v):
            idx = [k for k, s in enumerate(strands) if s[2] == v]
            return (max(idx) - min(idx), min(idx), v)

        v = min(candidates, key=cost)
        pending.discard(v)
        step += 1
        idx = sorted(k for k, s in enumerate(strands) if s[2] == v)
        if len(idx) == 2:
            i, j = idx
            while j > i + 1:
                a, b = strands[j - 1], strands[j]
                if crossover == "complex":
                    x = out.add("crs")
                    out.connect(a[0], a[1], x, 0)
                    out.connect(b[0], b[1], x, 1)
                    positions[x] = (j - 0.5, float(step))
                    strands[j - 1] = [x, 0, b[2], b[3]]
                    strands[j] = [x, 1, a[2], a[3]]
                else:
                    left, right = _crossover_gadget(out, (a[0], a[1]), (b[0], b[1]))
                    strands[j - 1] = [left[0], left[1], b[2], b[3]]
                    strands[j] = [right[0], right[1], a[2], a[3]]
                crossings += 1
                j -= 1
                step += 1
            idx = [i, j]
        kind = circuit.kinds[v]
        nv = out.add(kind)
        new_of[v] = nv
        if kind == "output":
            out.output = nv
        at = idx[0]
        incoming = [strands[k] for k in idx]
        if kind != "nor":
            incoming.sort(key=lambda s: s[3])
        for slot, s in enumerate(incoming):
            out.connect(s[0], s[1], nv, slot if kind == "nor" else s[3])
        for k in reversed(idx):
            del strands[k]
        fresh = [[nv, w.src_slot, w.dst, w.dst_slot] for w in circuit.out_wires(v)]
        strands[at:at] = fresh
        positions[nv] = (float(at), float(step))
    out.crossings = crossings
    out.planar = True
    out.positions = positions if crossover == "complex" else {}
    out.validate()
    if out.truth_table() != reference:
        raise NotRealizableError("planarization changed the function")
    return out


# ------------------------------------------------------------ complex assembly


def _primitive(kind: str, nor_variant: str) -> tuple[Complex, tuple, tuple]:
    """Complex for a vertex kind with its (input labels, output labels) in slot order."""
    from .catalog import catalog

    if kind == "nor":
        return catalog(nor_variant).complex, ("A", "B"), ("Q",)
    if kind == "not":
        return catalog("NOT").complex, ("A",), ("Q",)
    if kind == "cpy":
        return catalog("CPY").complex, ("A",), ("Q", "R")
    if kind == "crs":
        # slot 0 continues the right-hand input (Q = A carries it to the right side)
        return catalog("CRS").complex, ("A", "B"), ("R", "Q")
    if kind == "sink":
        return catalog("NOT").complex, ("A",), ()
    raise ValidationError(f"no primitive for {kind!r}")


@dataclass
class CompiledComplex:
    complex: Complex
    circuit: CircuitGraph
    function: BooleanFunction
    verified: bool | None = None
    geometric: bool = False
    notes: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "atoms": self.complex.n_atoms,
            "max_detuning": str(max(self.complex.detunings)),
            "detunings": sorted({str(d) for d in self.complex.detunings}),
            "circuit": self.circuit.stats(),
            "verified": self.verified,
            "geometric": self.geometric,
            "notes": self.notes,
        }


def circuit_to_complex(circuit: CircuitGraph, *, wires: str = "direct", nor_variant: str = "NOR_triangle",
                       abstract: bool = True) -> Complex:
    """Glue primitive complexes along the circuit's wires.

    With ``wires="direct"`` the output port of one primitive is identified
    with the input port of the next; ``wires="lnk"`` puts an LNK complex on
    every wire between two gates.  A wire from an input straight to the
    output always becomes an LNK.  Ports are ``x1 .. xg`` then ``y``.
    """
    from .catalog import catalog

    if wires not in ("direct", "lnk"):
        raise ValidationError("wires is 'direct' or 'lnk'")
    if nor_variant not in ("NOR_triangle", "NOR_ring"):
        raise ValidationError("nor_variant is NOR_triangle or NOR_ring")
    circuit.validate()
    lnk = catalog("LNK").complex.abstract()
    terminal = {"input", "output"}

    def interposed(w):
        src, dst = circuit.kinds[w.src], circuit.kinds[w.dst]
        if src == "input" and dst == "output":
            return True
        return wires == "lnk" and src not in terminal and dst not in terminal

    def end_key(w, end):
        return ("wire", w, end) if interposed(w) else ("wire", w)

    parts, wiring = [], []
    for v in sorted(circuit.kinds):
        kind = circuit.kinds[v]
        if kind in terminal:
            continue
        part, in_labels, out_labels = _primitive(kind, nor_variant)
        wires_map = {in_labels[w.dst_slot]: end_key(w, "in") for w in circuit.in_wires(v)}
        wires_map.update({out_labels[w.src_slot]: end_key(w, "out") for w in circuit.out_wires(v)})
        parts.append(part.abstract() if abstract else part)
        wiring.append(wires_map)
    for w in circuit.wires:
        if interposed(w):
            parts.append(lnk)
            wiring.append({"A": end_key(w, "out"), "Q": end_key(w, "in")})
    outputs = []
    for i, v in enumerate(circuit.inputs):
        (w,) = circuit.out_wires(v)
        outputs.append((f"x{i + 1}", end_key(w, "out")))
    (w,) = circuit.in_wires(circuit.output)
    outputs.append(("y", end_key(w, "in")))
    return compose(parts, wiring, outputs, name="compiled")


def compile_function(
    f,
    *,
    inverters: bool = True,
    route: str = "auto",
    crossover: str = "complex",
    wires: str = "direct",
    nor_variant: str = "NOR_triangle",
    geometric: bool = False,
    verify: bool = True,
    optimize_config=None,
) -> CompiledComplex:
    """Full pipeline: decompose, planarize, assemble and (optionally) verify."""
    if isinstance(f, str):
        f = BooleanFunction.from_expression(f)
    circuit = planarize(nor_decompose(f, inverters=inverters, route=route), crossover=crossover)
    cplx = circuit_to_complex(circuit, wires=wires, nor_variant=nor_variant)
    result = CompiledComplex(cplx, circuit, f)
    if verify:
        result.verified = bool(realizes_language(cplx, truth_table_language(f), max_atoms=None))
    if geometric:
        try:
            result.complex = synthesize_geometry(cplx, circuit, config=optimize_config)
            result.geometric = True
        except GeometryError as exc:
            result.notes.append(f"geometry synthesis failed, output is abstract: {exc}")
    return result


def synthesize_geometry(cplx: Complex, circuit: CircuitGraph | None = None, *, config=None,
                        seed: int = 0) -> Complex:
    """Best-effort unit-disk layout: a graph drawing refined by the optimizer.

    Raises :class:`GeometryError` when no valid embedding (``xi`` above the
    spread of the detunings) was found.
    """
    from .metrics import spread
    from .optimizer import AnnealConfig, optimize_geometry

    g = cplx.graph.to_networkx()
    start = nx.kamada_kawai_layout(g) if cplx.n_atoms > 1 else {0: (0.0, 0.0)}
    xy = np.array([start[v] for v in range(cplx.n_atoms)], dtype=float)
    if cplx.graph.edges:
        lengths = [np.linalg.norm(xy[i] - xy[j]) for i, j in cplx.graph.edges]
        xy *= 0.8 / max(np.mean(lengths), 1e-9)
    config = config or AnnealConfig(max_iterations=300, restarts=2, seed=seed)
    res = optimize_geometry(cplx, "robustness", config, start=xy)
    xi = res.report.robustness
    if not xi > spread(cplx.detunings):
        raise GeometryError(f"best layout has robustness {xi:.4f}, below the detuning spread", [])
    return cplx.with_geometry(res.positions)


# ------------------------------------------------------------ output handling


def constrain_output(cplx: Complex, label: str = "y", value: int = 1) -> Complex:
    """Complex whose ground states are the inputs with output ``label`` = ``value``.

    When the output is blockaded only by ancillas, the output and its
    neighbours are deleted (fixing the port).  Otherwise the output keeps its
    atom, becomes an ancilla and its detuning grows by twice the gap, which
    favours the wanted value without letting other states reach the ground
    energy.
    """
    if value not in (0, 1):
        raise ValidationError("value must be 0 or 1")
    port = cplx.port(label)
    gsm = enumerate_gsm(cplx, max_atoms=None)
    hits = [m for m in gsm.masks if (m >> port.index & 1) == value]
    if not hits:
        raise NotRealizableError(f"no ground state has {label} = {value}; the constraint is unsatisfiable")
    if len(hits) == len(gsm.masks):
        return cplx.with_ports([p for p in cplx.ports if p.label != label])
    if value == 0:
        # read the negation through a NOT and fix that
        from .catalog import catalog

        keep = [p.label for p in cplx.ports if p.label != label]
        inverted = compose(
            [cplx, catalog("NOT").complex.abstract()],
            [{lbl: ("port", lbl) for lbl in keep} | {label: "out"}, {"A": "out", "Q": "neg"}],
            [(lbl, ("port", lbl)) for lbl in keep] + [("neg", "neg")],
            name=cplx.name,
        )
        return constrain_output(inverted, "neg", 1)
    port_neighbours = set(cplx.graph.neighbors(port.index)) & set(cplx.port_indices)
    if not port_neighbours:
        return fix_port(cplx, label)
    gap = gsm.gap if isinstance(gsm.gap, Fraction) else Fraction(1)
    det = list(cplx.detunings)
    det[port.index] += 2 * gap
    return Complex(tuple(det), cplx.graph, tuple(p for p in cplx.ports if p.label != label), cplx.positions,
                   cplx.blockade_radius, cplx.name, dict(cplx.metadata))


def equality_split(c1: Complex, c2: Complex, out1: str = "y", out2: str = "y") -> Complex:
    """Glue two compiled complexes at their outputs: ground states are inputs with f1 = f2.

    Ports are the inputs of ``c1`` followed by those of ``c2`` (clashing labels
    of the second get a prime); the merged output becomes an ancilla.
    """
    taken = {p.label for p in c1.ports if p.label != out1}
    w1 = {p.label: ("a", p.label) for p in c1.ports}
    w2 = {p.label: ("b", p.label) for p in c2.ports}
    w1[out1] = w2[out2] = "out"
    outputs = [(p.label, ("a", p.label)) for p in c1.ports if p.label != out1]
    for p in c2.ports:
        if p.label == out2:
            continue
        name = p.label
        while name in taken:
            name += "'"
        taken.add(name)
        outputs.append((name, ("b", p.label)))
    return compose([c1, c2], [w1, w2], outputs, name="equality")


def compile_constraint(f, **kwargs) -> Complex:
    """Complex whose ground-state port words are exactly the inputs with f = 1."""
    res = compile_function(f, **kwargs)
    return constrain_output(res.complex, "y", 1)


__all__ = [
    "CircuitGraph",
    "CompiledComplex",
    "Wire",
    "circuit_to_complex",
    "compile_constraint",
    "compile_function",
    "constrain_output",
    "equality_split",
    "nor_decompose",
    "planarize",
    "synthesize_geometry",
]

