import itertools

import pytest

from blockforge import (
    AnnealConfig,
    BooleanFunction,
    CircuitGraph,
    Language,
    NotRealizableError,
    ValidationError,
    compile_function,
    constrain_output,
    enumerate_gsm,
    equality_split,
    nor_decompose,
    planarize,
    realizes_language,
    truth_table_language,
)
from blockforge.compiler import _crossover_gadget, circuit_to_complex, compile_constraint
from blockforge.gsm import ground_language

PARITY4 = "!(x1 ^ x2 ^ x3 ^ x4)"


def _even(n):
    return Language(n, frozenset(w for w in itertools.product((0, 1), repeat=n) if sum(w) % 2 == 0))


def test_and_decomposition_uses_nors_on_copies():
    c = nor_decompose(BooleanFunction.from_expression("x1 & x2"), inverters=False)
    assert c.count("nor") == 3
    assert c.count("cpy") == 2
    assert c.computes(BooleanFunction.from_expression("x1 & x2"))


def test_identity_is_a_bare_wire():
    c = nor_decompose("x1")
    assert c.count("nor") == 0 and c.count("cpy") == 0
    assert len(c.wires) == 1


def test_parity_circuit_truth_table():
    f = BooleanFunction.from_expression(PARITY4)
    c = nor_decompose(f)
    for bits in itertools.product((0, 1), repeat=4):
        assert c.evaluate(bits) == (1 + sum(bits)) % 2


def test_two_level_route():
    f = BooleanFunction.from_index(3, 0b10010110)
    c = nor_decompose(f)
    assert c.computes(f)
    with pytest.raises(ValidationError):
        nor_decompose(f, route="structural")


def test_circuit_degree_invariants():
    c = nor_decompose(PARITY4)
    c.validate()
    for v, kind in c.kinds.items():
        ins, outs = len(c.in_wires(v)), len(c.out_wires(v))
        expected = {"nor": (2, 1), "cpy": (1, 2), "not": (1, 1), "input": (0, 1), "output": (1, 0), "sink": (1, 0)}
        assert (ins, outs) == expected[kind]


def test_planar_circuit_kept():
    c = nor_decompose("x1 nor x2")
    p = planarize(c)
    assert p.crossings == 0
    assert p.kinds == c.kinds
    assert p.planar


@pytest.mark.parametrize("crossover", ["complex", "gates"])
def test_forced_crossing_preserves_function(crossover):
    f = BooleanFunction.from_expression("(x1 nor x3) nor x2")
    p = planarize(nor_decompose(f), crossover=crossover, force=True)
    assert p.crossings >= 1
    assert p.computes(f)
    if crossover == "gates":
        assert p.count("crs") == 0


@pytest.mark.parametrize("side,expected", [(0, lambda a, b: b), (1, lambda a, b: a)])
def test_crossover_gadget_swaps(side, expected):
    c = CircuitGraph()
    a, b = c.add("input"), c.add("input")
    c.inputs = [a, b]
    outs = _crossover_gadget(c, (a, 0), (b, 0))
    y, sink = c.add("output"), c.add("sink")
    c.output = y
    c.connect(*outs[side], y, 0)
    c.connect(*outs[1 - side], sink, 0)
    c.validate()
    for x in itertools.product((0, 1), repeat=2):
        assert c.evaluate(x) == expected(*x)


def test_nor_compiles_to_five_atoms():
    out = compile_function("x1 nor x2")
    assert out.complex.n_atoms == 5
    assert out.verified


def test_or_compiles_to_six_atoms():
    out = compile_function("!(x1 nor x2)")
    assert out.complex.n_atoms == 6
    assert ground_language(out.complex) == truth_table_language(BooleanFunction.from_expression("x1 | x2"))


def test_identity_compiles_to_link():
    out = compile_function("x1")
    assert out.complex.n_atoms == 3
    assert out.verified


def test_parity_compiles_and_verifies():
    out = compile_function(PARITY4)
    assert out.verified
    assert set(out.complex.detunings) <= {1, 2, 3}
    gsm = enumerate_gsm(out.complex, max_atoms=None)
    assert gsm.gap >= 1


@pytest.mark.parametrize("wires", ["direct", "lnk"])
@pytest.mark.parametrize("nor_variant", ["NOR_triangle", "NOR_ring"])
def test_assembly_variants(wires, nor_variant):
    f = BooleanFunction.from_expression("(x1 nor x3) nor x2")
    circuit = planarize(nor_decompose(f), force=True)
    cplx = circuit_to_complex(circuit, wires=wires, nor_variant=nor_variant)
    assert realizes_language(cplx, truth_table_language(f), max_atoms=None).ok
    assert max(cplx.detunings) <= 3


def test_complex_crossing_is_smaller_than_gate_crossing():
    f = BooleanFunction.from_expression("(x1 nor x3) nor x2")
    lang = truth_table_language(f)
    sizes = {}
    for crossover in ("complex", "gates"):
        cplx = circuit_to_complex(planarize(nor_decompose(f), crossover=crossover, force=True))
        assert realizes_language(cplx, lang, max_atoms=None).ok
        sizes[crossover] = cplx.n_atoms
    assert sizes["complex"] < sizes["gates"]


def test_constant_function():
    out = compile_function(BooleanFunction.from_callable(lambda a, b: 1, 2))
    assert out.verified


def test_constrain_xnor_to_one():
    cplx = compile_function("x1 == x2").complex
    c1 = constrain_output(cplx, "y", 1)
    assert sorted(ground_language(c1).strings()) == ["00", "11"]
    assert enumerate_gsm(c1).gap >= 1


def test_constrain_xnor_to_zero():
    c0 = constrain_output(compile_function("x1 == x2").complex, "y", 0)
    assert sorted(ground_language(c0).strings()) == ["01", "10"]


def test_constrain_parity():
    cplx = compile_function(PARITY4).complex
    assert realizes_language(constrain_output(cplx), _even(4), max_atoms=None).ok


def test_constrain_unsatisfiable():
    cplx = compile_function(BooleanFunction.from_callable(lambda a: 0, 1)).complex
    with pytest.raises(NotRealizableError):
        constrain_output(cplx, "y", 1)


def test_compile_constraint_shortcut():
    assert realizes_language(compile_constraint("x1 ^ x2 ^ x3"), Language(3, frozenset(
        w for w in itertools.product((0, 1), repeat=3) if sum(w) % 2 == 1)), max_atoms=None).ok


def test_equality_split():
    a = compile_function("x1 & x2").complex
    b = compile_function("x1 | x2").complex
    joined = equality_split(a, b)
    words = sorted(ground_language(joined, max_atoms=None).strings())
    expected = sorted(
        f"{p}{q}{r}{s}" for p, q, r, s in itertools.product((0, 1), repeat=4) if (p & q) == (r | s)
    )
    assert words == expected
    assert len(words) == 6


def test_geometric_compilation_of_and():
    out = compile_function("x1 & x2", geometric=True, optimize_config=AnnealConfig(max_iterations=300, restarts=2))
    assert out.geometric
    assert out.complex.geometry_consistent()
    assert realizes_language(out.complex, truth_table_language(BooleanFunction.from_expression("x1 & x2"))).ok
