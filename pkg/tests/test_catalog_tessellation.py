import itertools

import pytest

from blockforge import GeometryError, LatticeSpec, ValidationError, build_fibonacci, build_surface_code
from blockforge.catalog import abstract_complex, available, catalog, language_of
from blockforge.gsm import enumerate_gsm, ground_language, realizes_language
from blockforge.languages import build_lattice
from blockforge.metrics import spread
from blockforge.tessellation import fibonacci_unit_cell, patch_robustness


def _brute_count(spec, vertex_ok):
    """Edge assignments accepted at every site, by plain enumeration."""
    lattice = build_lattice(spec)
    count = 0
    for bits in itertools.product((0, 1), repeat=len(lattice.edges)):
        if all(vertex_ok([bits[e] for e in edges if e is not None]) for edges in lattice.site_edges.values()):
            count += 1
    return count


def _even(bits):
    return sum(bits) % 2 == 0


def _no_loose_string(bits):
    return sum(bits) != 1


@pytest.mark.parametrize("name", available())
def test_catalog_entry_is_verified(name):
    entry = catalog(name)
    c = entry.complex
    assert realizes_language(c, entry.language, max_atoms=None).ok
    gsm = enumerate_gsm(c, max_atoms=None)
    assert gsm.gap >= 1
    assert c.positions is not None
    assert c.geometry_consistent()
    assert entry.verification["valid"]
    assert entry.verification["robustness"] > spread(c.detunings)
    assert c.n_atoms >= entry.minimal_atom_count or entry.minimality == "composite"


def test_catalog_shipped_graph_matches_design():
    for name in available():
        assert catalog(name).complex.graph == abstract_complex(name).graph
        assert catalog(name).complex.detunings == abstract_complex(name).detunings


def test_unknown_entry():
    with pytest.raises(ValidationError, match="unknown catalog entry"):
        catalog("MUX")


def test_xnor_words():
    assert sorted(ground_language(catalog("XNOR").complex).strings()) == ["001", "010", "100", "111"]


def test_crossing_routes_inputs():
    words = ground_language(catalog("CRS").complex).words
    assert catalog("CRS").complex.port_labels == ("A", "B", "Q", "R")
    assert words == {(a, b, a, b) for a in (0, 1) for b in (0, 1)}


def test_inverted_crossing_routes_complements():
    words = ground_language(catalog("ICRS").complex).words
    assert words == {(a, b, 1 - b, 1 - a) for a in (0, 1) for b in (0, 1)}


def test_scu_ports():
    c = catalog("SCU").complex
    assert c.port_labels == ("A", "B", "C", "D")
    assert ground_language(c).words == {w for w in itertools.product((0, 1), repeat=4) if _even(w)}


def test_fmu_language():
    fmu = fibonacci_unit_cell()
    assert fmu.n_atoms == 13
    assert fmu.port_labels == ("V", "A1", "A2", "B1", "B2")
    assert realizes_language(fmu, language_of("FMU")).ok
    assert len(language_of("FMU")) == 13


# ------------------------------------------------------------ surface code


@pytest.mark.parametrize("dims,boundary", [
    ((2, 2), "periodic"), ((3, 2), "periodic"), ((1, 1), "open-rough"), ((2, 2), "open-rough"),
    ((2, 2), "open-smooth"), ((3, 2), "open-smooth"),
])
def test_surface_code_counts(dims, boundary):
    spec = LatticeSpec("square", dims, boundary)
    tess = build_surface_code(spec, verify=True)
    assert tess.verified
    assert tess.ground_states == _brute_count(spec, _even)


def test_surface_code_torus_has_thirty_two_states():
    tess = build_surface_code(LatticeSpec("square", (2, 2)), verify=True)
    assert tess.ground_states == 32
    assert tess.atoms_per_cell() == 9
    ports = {tess.complex.detunings[i] for i in tess.complex.port_indices}
    assert ports == {2}


def test_rough_boundary_halves_dangling_ports():
    tess = build_surface_code(LatticeSpec("square", (2, 2), "open-rough"))
    port_det = sorted(tess.complex.detunings[i] for i in tess.complex.port_indices)
    assert port_det == [1] * 8 + [2] * 4


def test_width_one_torus_rejected():
    with pytest.raises(ValidationError):
        build_surface_code(LatticeSpec("square", (1, 1)))


def test_smooth_boundary_uses_xor_cell():
    tess = build_surface_code(LatticeSpec("square", (2, 2), "open-smooth"))
    assert tess.n_atoms == 4 * catalog("XOR").complex.n_atoms - 4


def test_wrong_lattice_kind():
    with pytest.raises(ValidationError):
        build_surface_code(LatticeSpec("honeycomb", (2, 2)))
    with pytest.raises(ValidationError):
        build_fibonacci(LatticeSpec("square", (2, 2)))


# --------------------------------------------------------------- Fibonacci


@pytest.mark.parametrize("dims,boundary,expected", [
    ((1, 1), "periodic", 5), ((2, 2), "periodic", 175), ((1, 1), "open-rough", 13), ((2, 2), "open-rough", 4181),
])
def test_fibonacci_counts(dims, boundary, expected):
    spec = LatticeSpec("honeycomb", dims, boundary)
    tess = build_fibonacci(spec, verify=True)
    assert tess.verified
    assert tess.ground_states == expected == _brute_count(spec, _no_loose_string)


def test_interposer_caps_detuning():
    spec = LatticeSpec("honeycomb", (2, 2), "open-rough")
    plain = build_fibonacci(spec)
    tess = build_fibonacci(spec, interposer=True, verify=True)
    assert tess.verified
    assert max(tess.complex.detunings) == 3
    assert tess.n_atoms > plain.n_atoms


# --------------------------------------------------------------- geometry


def test_geometric_surface_patch():
    tess = build_surface_code(LatticeSpec("square", (2, 2), "open-rough"), geometric=True, verify=True)
    c = tess.complex
    assert tess.verified
    assert c.geometry_consistent()
    assert patch_robustness(tess) > spread(c.detunings)


def test_geometric_fibonacci_patch():
    tess = build_fibonacci(LatticeSpec("honeycomb", (2, 2), "open-rough"), geometric=True, verify=True)
    assert tess.verified
    assert tess.complex.geometry_consistent()
    assert patch_robustness(tess) > spread(tess.complex.detunings)


def test_periodic_geometry_refused():
    with pytest.raises(ValidationError, match="planar"):
        build_surface_code(LatticeSpec("square", (2, 2)), geometric=True)
    with pytest.raises(ValidationError, match="planar"):
        build_fibonacci(LatticeSpec("honeycomb", (2, 2)), geometric=True)


def test_smooth_geometry_needs_fitting_boundary_cell():
    with pytest.raises(GeometryError):
        build_surface_code(LatticeSpec("square", (2, 2), "open-smooth"), geometric=True)


def test_patch_robustness_needs_geometry():
    with pytest.raises(ValidationError):
        patch_robustness(build_surface_code(LatticeSpec("square", (2, 2))))
