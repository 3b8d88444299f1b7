import math
import random
from fractions import Fraction

import pytest

from blockforge import (
    BlockadeGraph,
    Complex,
    Language,
    ResourceLimitError,
    ValidationError,
    enumerate_gsm,
    fix_port,
    realizes_language,
)
from blockforge.catalog import abstract_complex, catalog
from blockforge.gsm import brute_force_gsm, ground_language, maximal_independent_sets, vdw_energies, vdw_quality


def _not():
    return Complex([1, 1], BlockadeGraph.from_edges(2, [(0, 1)]), ports=[("A", 0), ("Q", 1)])


def _random_complex(rng, n, p=0.35, max_det=4):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    det = [Fraction(rng.randint(1, max_det * 2), 2) for _ in range(n)]
    return Complex(det, BlockadeGraph.from_edges(n, edges))


def test_not_manifold():
    gsm = enumerate_gsm(_not())
    assert [str(c) for c in gsm.configurations] == ["10", "01"]
    assert gsm.ground_energy == -1
    assert gsm.gap == 1


def test_single_atom():
    gsm = enumerate_gsm(Complex([1], BlockadeGraph.from_edges(1, [])))
    assert gsm.masks == (1,)
    assert gsm.ground_energy == -1
    assert gsm.gap == 1


def test_unblockaded_pair_is_fully_excited():
    gsm = enumerate_gsm(Complex([1, 1], BlockadeGraph.from_edges(2, [])))
    assert gsm.masks == (3,)
    assert gsm.gap == 1


def test_nor_ring_four_ground_states():
    ring = Complex([1, 2, 1, 1, 2], BlockadeGraph.from_edges(5, [(0, 2), (0, 3), (1, 2), (1, 4), (3, 4)]),
                   ports=[("A", 0), ("B", 1), ("Q", 2)])
    gsm = enumerate_gsm(ring)
    assert len(gsm) == 4
    assert sorted(ground_language(ring).strings()) == ["001", "010", "100", "110"]


def test_random_eight_atoms_match_brute_force():
    rng = random.Random(8)
    for _ in range(20):
        c = _random_complex(rng, 8)
        assert enumerate_gsm(c).masks == brute_force_gsm(c).masks


@pytest.mark.parametrize("strategy", ["mis", "elimination"])
def test_strategies_agree_with_oracle(strategy):
    rng = random.Random(strategy)
    for _ in range(30):
        c = _random_complex(rng, rng.randint(1, 12))
        got, ref = enumerate_gsm(c, strategy=strategy), brute_force_gsm(c)
        assert (got.masks, got.ground_energy, got.gap) == (ref.masks, ref.ground_energy, ref.gap)


def test_maximal_sets_of_path():
    g = BlockadeGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert sorted(maximal_independent_sets(g)) == sorted([0b0101, 0b1010, 0b1001])


def test_ground_states_are_admissible_and_degenerate():
    c = catalog("XOR").complex
    gsm = enumerate_gsm(c)
    energies = {-sum(c.detunings[i] for i in cfg.occupied) for cfg in gsm.configurations}
    assert energies == {gsm.ground_energy}
    assert all(cfg.is_admissible(c.graph) for cfg in gsm.configurations)


def test_atom_bound():
    big = Complex([1] * 41, BlockadeGraph.from_edges(41, []))
    with pytest.raises(ResourceLimitError):
        enumerate_gsm(big)
    assert enumerate_gsm(big, max_atoms=None).masks == ((1 << 41) - 1,)


def test_nor_ring_realizes_nor():
    verdict = realizes_language(abstract_complex("NOR_ring"), Language.from_strings(["001", "010", "100", "110"]))
    assert verdict.ok


def test_cpy_ancilla_function():
    verdict = realizes_language(abstract_complex("CPY"), Language.from_strings(["000", "111"]))
    assert verdict.ok
    assert verdict.ancilla_map == {(0, 0, 0): (1,), (1, 1, 1): (0,)}


def test_not_does_not_realize_equality():
    verdict = realizes_language(_not(), Language.from_strings(["00", "11"]))
    assert not verdict.ok
    assert verdict.counterexample in {(0, 1), (1, 0)}


def test_duplicate_ancilla_completion_detected():
    # a lone port next to two interchangeable ancillas
    c = Complex([1, 1, 1], BlockadeGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)]), ports=[("A", 0)])
    verdict = realizes_language(c, Language.from_strings(["0", "1"]))
    assert not verdict.ok
    assert "several ancilla completions" in verdict.reason


def test_word_length_mismatch():
    with pytest.raises(ValidationError):
        realizes_language(_not(), Language.from_strings(["000"]))


def test_fix_port_on_surface_cell():
    scu = catalog("SCU").complex
    fixed = fix_port(scu, "A")
    expected = Language(3, frozenset(w for w in Language.from_strings(
        [format(k, "03b") for k in range(8)]).words if (1 + sum(w)) % 2 == 0))
    assert fixed.port_labels == ("B", "C", "D")
    assert realizes_language(fixed, expected).ok
    assert enumerate_gsm(fixed).ground_energy == enumerate_gsm(scu).ground_energy + scu.detunings[scu.port("A").index]


@pytest.mark.parametrize("name", ["NOR_triangle", "XNOR", "CPY", "CRS"])
def test_fix_port_energy_identity(name):
    c = abstract_complex(name)
    e0 = enumerate_gsm(c).ground_energy
    lang = ground_language(c)
    for k, p in enumerate(c.ports):
        if any(p.index in c.graph.neighbors(q.index) for q in c.ports):
            continue
        sub = fix_port(c, p.label)
        restricted = lang.restrict(k, 1)
        assert realizes_language(sub, restricted).ok
        assert enumerate_gsm(sub).ground_energy == e0 + c.detunings[p.index]


def test_fix_port_refuses_to_delete_ports():
    with pytest.raises(ValidationError):
        fix_port(_not(), "A")


def test_vdw_two_atoms():
    e = vdw_energies([(0, 0), (1, 0)], [1, 1], c6=1.0)
    assert e[0b11] == pytest.approx(-1.0)
    assert e[0b01] == pytest.approx(-1.0)


def test_vdw_weak_limit_recovers_detuning_energies():
    e = vdw_energies([(0, 0), (50, 0)], [1, 2], c6=1e-9)
    assert e == pytest.approx([0, -1, -2, -3])


def test_vdw_blockade_survives_at_short_distance():
    e = vdw_energies([(0, 0), (0.8, 0)], [1, 1], c6=1.0)
    assert e[0b11] == pytest.approx(-2 + 0.8 ** -6)
    assert e[0b11] == pytest.approx(1.8147, abs=1e-4)
    assert e[0b11] > e[0b01] == -1


def test_vdw_quality_of_not():
    width, gap, ratio = vdw_quality([(0, 0), (0.8, 0)], [1, 1], 1.0, [0b01, 0b10])
    assert width == 0
    assert gap == pytest.approx(1.0)
    assert ratio == 0
    assert math.isinf(vdw_quality([(0, 0), (5, 0)], [1, 1], 1.0, [0b01, 0b10])[2])
