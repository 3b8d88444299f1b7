import itertools
import random

import pytest

from blockforge import (
    BooleanFunction,
    Language,
    LatticeSpec,
    ResourceLimitError,
    ValidationError,
    gamma_intersection,
    tessellated_language,
    truth_table_language,
)
from blockforge.languages import build_lattice, fib_check, named_language, z2_check


def _fib_torus_count(m):
    # a^m + b^m with a + b = 5 and ab = 5
    t = [2, 5]
    while len(t) <= m:
        t.append(5 * t[-1] - 5 * t[-2])
    return t[m]


def _random_language(rng, n):
    words = {tuple(rng.randint(0, 1) for _ in range(n)) for _ in range(rng.randint(1, 2 ** n))}
    return Language(n, frozenset(words))


def test_xor_truth_table():
    f = BooleanFunction.from_expression("x1 ^ x2")
    assert sorted(truth_table_language(f).strings()) == ["000", "011", "101", "110"]


def test_constant_true():
    f = BooleanFunction.from_callable(lambda x: 1, 1)
    assert sorted(truth_table_language(f).strings()) == ["01", "11"]


def test_nor_truth_table():
    f = BooleanFunction.from_expression("x1 nor x2")
    assert sorted(truth_table_language(f).strings()) == ["001", "010", "100", "110"]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_truth_table_size(n):
    rng = random.Random(n)
    for _ in range(5):
        f = BooleanFunction.from_index(n, rng.randrange(2 ** 2 ** n))
        lang = truth_table_language(f)
        assert len(lang) == 2 ** n
        assert lang.word_length == n + 1


@pytest.mark.parametrize("text,row,value", [
    ("!x1", (1,), 0),
    ("x1 & x2 | x3", (0, 0, 1), 1),
    ("x1 == x2", (1, 1), 1),
    ("x1 nand x2", (1, 1), 0),
    ("(x1 ^ x2) ^ x3", (1, 1, 1), 1),
])
def test_expression_grammar(text, row, value):
    assert BooleanFunction.from_expression(text)(*row) == value


def test_bad_expression():
    with pytest.raises(ValidationError):
        BooleanFunction.from_expression("x1 &")


def test_xor_with_fanout():
    xor = named_language("XOR")
    cpy = Language.from_strings(["000", "111"])
    full = gamma_intersection(xor, cpy, [(2, 0)])
    reduced = gamma_intersection(xor, cpy, [(2, 0)], reduced=True)
    assert sorted(full.strings()) == ["00000", "01111", "10111", "11000"]
    assert sorted(reduced.strings()) == ["0000", "0111", "1011", "1100"]
    assert len(full) == len(reduced)


def test_empty_gamma_is_product():
    a, b = Language.from_strings(["0", "1"]), Language.from_strings(["01", "10"])
    assert sorted(gamma_intersection(a, b, []).strings()) == ["001", "010", "101", "110"]


def test_disagreeing_languages_give_empty_result():
    a, b = Language.from_strings(["1"]), Language.from_strings(["00"])
    assert len(gamma_intersection(a, b, [(0, 0)])) == 0


def test_gamma_must_be_partial_bijection():
    with pytest.raises(ValidationError):
        gamma_intersection(named_language("XOR"), named_language("CPY"), [(0, 0), (0, 1)])
    with pytest.raises(ValidationError):
        gamma_intersection(named_language("XOR"), named_language("CPY"), [(5, 0)])


def test_gamma_word_lengths_on_random_instances():
    rng = random.Random(3)
    for _ in range(200):
        n1, n2 = rng.randint(1, 4), rng.randint(1, 4)
        l1, l2 = _random_language(rng, n1), _random_language(rng, n2)
        k = rng.randint(0, min(n1, n2))
        gamma = list(zip(rng.sample(range(n1), k), rng.sample(range(n2), k)))
        full = gamma_intersection(l1, l2, gamma)
        assert full.word_length == n1 + n2 - k
        if n1 + n2 - 2 * k > 0:
            assert gamma_intersection(l1, l2, gamma, reduced=True).word_length == n1 + n2 - 2 * k
        # brute-force definition
        expected = {x + tuple(y[j] for j in range(n2) if j not in {b for _, b in gamma})
                    for x in l1.words for y in l2.words if all(x[a] == y[b] for a, b in gamma)}
        assert full.words == expected


def test_z2_square_two_by_two():
    assert len(tessellated_language(LatticeSpec("square", (2, 2)), z2_check)) == 32


def test_z2_brute_force_on_two_by_two():
    spec = LatticeSpec("square", (2, 2))
    lattice = build_lattice(spec)
    count = 0
    for bits in itertools.product((0, 1), repeat=len(lattice.edges)):
        if all(sum(bits[e] for e in es) % 2 == 0 for es in lattice.site_edges.values()):
            count += 1
    assert count == 32
    assert len(lattice.edges) == 8


@pytest.mark.parametrize("dims", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_z2_cycle_space_dimension(dims):
    m = dims[0] * dims[1]
    assert len(tessellated_language(LatticeSpec("square", dims), z2_check)) == 2 ** (m + 1)


def test_square_projector_order():
    lattice = build_lattice(LatticeSpec("square", (2, 2), "open-rough"))
    north, east, south, west = lattice.site_edges[(0, 0)]
    assert lattice.edge_keys[north] == ("v", 0, 0)
    assert lattice.edge_keys[east] == ("h", 0, 0)
    assert lattice.edge_keys[south] == ("v", 0, -1)
    assert lattice.edge_keys[west] == ("h", -1, 0)


@pytest.mark.parametrize("dims", [(1, 1), (1, 3)])
def test_degenerate_periodic_square_rejected(dims):
    with pytest.raises(ValidationError):
        tessellated_language(LatticeSpec("square", dims), z2_check)


def test_fibonacci_single_vertex():
    words = [w for w in itertools.product((0, 1), repeat=3) if fib_check(w)]
    assert sorted("".join(map(str, w)) for w in words) == ["000", "011", "101", "110", "111"]
    assert len(named_language("FIB_SITE")) == 5


@pytest.mark.parametrize("dims", [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_fibonacci_torus_counts(dims):
    m = dims[0] * dims[1]
    assert len(tessellated_language(LatticeSpec("honeycomb", dims), fib_check)) == _fib_torus_count(m)


def test_fibonacci_golden_ratio_growth():
    phi = (1 + 5 ** 0.5) / 2
    counts = [_fib_torus_count(m) for m in range(1, 12)]
    slope = counts[-1] / counts[-2]
    assert slope == pytest.approx(1 + phi ** 2, rel=1e-3)


def test_bit_budget():
    with pytest.raises(ResourceLimitError):
        tessellated_language(LatticeSpec("square", (5, 5)), z2_check)


def test_lattice_spec_validation():
    with pytest.raises(ValidationError):
        LatticeSpec("triangular", (2, 2))
    with pytest.raises(ValidationError):
        LatticeSpec("square", (0, 2))
    with pytest.raises(ValidationError):
        LatticeSpec("honeycomb", (2, 2), "open-smooth")
