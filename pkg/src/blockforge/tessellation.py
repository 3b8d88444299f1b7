"""Tessellations: one cell complex per lattice site, glued along shared edges.

Every lattice edge carries one port atom (the qubit).  Interior edges merge
the two sites' ports, so their detunings add; dangling edges of a rough
boundary keep a single site's port and therefore half the bulk detuning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .amalgamation import Placement, _kabsch, compose
from .core import Complex, Language
from .errors import GeometryError, ValidationError
from .gsm import enumerate_gsm
from .languages import Lattice, LatticeSpec, build_lattice, fib_check, parity_check, tessellated_language
from .metrics import robustness_and_flag


@dataclass
class Tessellation:
    spec: LatticeSpec
    lattice: Lattice
    cell: Complex
    complex: Complex
    check: object
    parts: dict = field(default_factory=dict)  # site -> index into the composition
    notes: list = field(default_factory=list)
    verified: bool | None = None
    ground_states: int | None = None
    expected_words: int | None = None

    @property
    def n_atoms(self) -> int:
        return self.complex.n_atoms

    def atoms_per_cell(self) -> float:
        cells = len(self.lattice.sites)
        if self.spec.kind == "honeycomb":
            cells //= 2
        return self.complex.n_atoms / cells

    def expected_language(self, **kwargs) -> Language:
        return tessellated_language(self.spec, self.check, **kwargs)

    def verify(self, **gsm_options) -> bool:
        """Compare the port projections of the ground states with the lattice language."""
        expected = self.expected_language()
        gsm = enumerate_gsm(self.complex, **{"max_atoms": None, **gsm_options})
        words = gsm.project(self.complex.port_indices)
        self.ground_states = len(gsm.masks)
        self.expected_words = len(expected)
        self.verified = len(set(words)) == len(words) and set(words) == set(expected.words)
        return self.verified

    def summary(self) -> dict:
        return {
            "lattice": self.spec.kind,
            "dimensions": list(self.spec.dimensions),
            "boundary": self.spec.boundary,
            "atoms": self.complex.n_atoms,
            "ports": len(self.complex.ports),
            "max_detuning": str(max(self.complex.detunings)),
            "atoms_per_cell": self.atoms_per_cell(),
            "verified": self.verified,
            "ground_states": self.ground_states,
            "expected_words": self.expected_words,
            "geometric": self.complex.positions is not None,
            "notes": self.notes,
        }


def edge_label(key) -> str:
    tag, i, j = key
    return f"{tag}{i}_{j}"


def _site_ports(cell: Complex, count: int) -> list[str]:
    if len(cell.ports) != count:
        raise ValidationError(f"cell complex needs {count} ports, has {len(cell.ports)}")
    return cell.port_labels


def port_xy(cell: Complex) -> np.ndarray:
    """Coordinates of the ports, in port order."""
    if cell.positions is None:
        raise ValidationError(f"complex {cell.name or '(unnamed)'} has no geometry")
    return np.array([cell.positions[i] for i in cell.port_indices], dtype=float)


def square_translations(cell: Complex) -> tuple[np.ndarray, np.ndarray]:
    """Lattice vectors implied by a 4-port cell with ports ordered north, east, south, west."""
    p = port_xy(cell)
    return p[1] - p[3], p[0] - p[2]


def honeycomb_translations(cell: Complex) -> tuple[np.ndarray, np.ndarray]:
    """Lattice vectors for a 3-port cell on A sites and its 180-degree image on B sites."""
    pv, pr, pl = port_xy(cell)
    return 2 * (pr - pl), 2 * (pr - pv)


def _fit_placement(cell: Complex, targets: np.ndarray, tol: float) -> Placement:
    """Rigid motion taking the cell's ports onto ``targets`` (mirror allowed)."""
    src = port_xy(cell)

    for mirror in (False, True):
        pl = _kabsch(src, targets, mirror)
        if np.allclose(pl.apply(src), targets, atol=tol):
            return pl
    raise GeometryError("boundary cell ports cannot be matched to the lattice positions", [])


def _assemble(lattice: Lattice, cell_for_site, placement_for_site, outputs_key, extra_parts=()):
    parts, wiring, placements, index = [], [], [], {}
    for site in lattice.sites:
        cell = cell_for_site(site)
        edges = [e for e in lattice.site_edges[site] if e is not None]
        labels = _site_ports(cell, len(edges))
        index[site] = len(parts)
        parts.append(cell)
        wiring.append({label: outputs_key(e, site) for label, e in zip(labels, edges)})
        placements.append(placement_for_site(site) if placement_for_site else None)
    for part, wires, pl in extra_parts:
        parts.append(part)
        wiring.append(wires)
        placements.append(pl)
    return parts, wiring, placements, index


def build_surface_code(
    spec: LatticeSpec,
    cell: Complex | None = None,
    *,
    boundary_cell: Complex | None = None,
    geometric: bool = False,
    verify: bool = False,
    tol: float = 1e-6,
) -> Tessellation:
    """Surface-code (even-parity) tessellation of the square lattice.

    ``cell`` defaults to the catalog's SCU with ports in (N, E, S, W) order;
    trivalent sites of smooth sides use ``boundary_cell`` (default: the XOR
    complex, whose language is even parity on three letters).  Geometry is
    only produced for open boundaries and when ``geometric`` is set.
    """
    if spec.kind != "square":
        raise ValidationError("the surface code lives on the square lattice")
    from .catalog import catalog

    cell = cell or catalog("SCU").complex
    lattice = build_lattice(spec)
    if boundary_cell is None and spec.boundary == "open-smooth":
        boundary_cell = catalog("XOR").complex
    notes = []

    def cell_for(site):
        n_edges = sum(e is not None for e in lattice.site_edges[site])
        return cell if n_edges == 4 else boundary_cell

    placement_for = None
    if geometric:
        if spec.boundary == "periodic":
            raise ValidationError("a periodic tessellation has no planar geometry; use an open boundary")
        if cell.positions is None:
            raise ValidationError("the cell complex has no geometry")
        t1, t2 = square_translations(cell)
        ports = port_xy(cell)

        def place_site(site):
            i, j = site
            shift = i * t1 + j * t2
            if cell_for(site) is cell:
                return Placement(float(shift[0]), float(shift[1]), 0.0)
            present = [k for k, e in enumerate(lattice.site_edges[site]) if e is not None]
            return _fit_placement(boundary_cell, ports[present] + shift, tol)

        placement_for = place_site

    parts, wiring, placements, index = _assemble(lattice, cell_for, placement_for, lambda e, s: ("edge", e))
    outputs = [(edge_label(k), ("edge", e)) for e, k in enumerate(lattice.edge_keys)]
    out = compose(
        parts, wiring, outputs,
        placements=placements if geometric else None,
        tol=tol,
        name=f"surface-code {spec.dimensions[0]}x{spec.dimensions[1]} {spec.boundary}",
        metadata={"lattice": "square", "dimensions": list(spec.dimensions), "boundary": spec.boundary},
    )
    tess = Tessellation(spec, lattice, cell, out, parity_check, index, notes)
    if verify:
        tess.verify()
    return tess


def build_fibonacci(
    spec: LatticeSpec,
    site: Complex | None = None,
    *,
    interposer: bool = False,
    geometric: bool = False,
    verify: bool = False,
    tol: float = 1e-6,
) -> Tessellation:
    """Fibonacci string-net tessellation of the honeycomb lattice.

    ``site`` is a 3-port complex for the check function (default: the
    catalog's FIB_SITE) placed on A sites; B sites get its 180-degree image.
    With ``interposer`` every interior edge joins the two sites through an LNK
    complex instead of merging their ports; the edge qubit is read at the A
    end.
    """
    if spec.kind != "honeycomb":
        raise ValidationError("the Fibonacci model lives on the honeycomb lattice")
    from .catalog import catalog

    site = site or catalog("FIB_SITE").complex
    lattice = build_lattice(spec)
    lnk = catalog("LNK").complex if interposer else None
    if geometric and spec.boundary == "periodic":
        raise ValidationError("a periodic tessellation has no planar geometry; use an open boundary")
    if geometric and interposer:
        raise ValidationError("geometry for the interposer variant is not synthesized")

    a1 = a2 = None
    if geometric:
        if site.positions is None:
            raise ValidationError("the site complex has no geometry")
        a1, a2 = honeycomb_translations(site)

    def key(e, s):
        if not interposer or lattice.edges[e][1] is None:
            return ("edge", e)
        return ("end", e, 0 if s == lattice.edges[e][0] else 1)

    def placement_for(s):
        kind, i, j = s
        shift = i * a1 + j * a2
        if kind == "A":
            return Placement(float(shift[0]), float(shift[1]), 0.0)
        pv = port_xy(site)[0]
        t = shift + 2 * pv
        return Placement(float(t[0]), float(t[1]), math.pi)

    extra = []
    outputs = []
    for e, k in enumerate(lattice.edge_keys):
        a, b = lattice.edges[e]
        if interposer and b is not None:
            extra.append((lnk, {lnk.port_labels[0]: ("end", e, 0), lnk.port_labels[1]: ("end", e, 1)}, None))
            outputs.append((edge_label(k), ("end", e, 0)))
        else:
            outputs.append((edge_label(k), ("edge", e)))
    parts, wiring, placements, index = _assemble(
        lattice, lambda s: site, placement_for if geometric else None, key, extra
    )
    out = compose(
        parts, wiring, outputs,
        placements=placements if geometric else None,
        tol=tol,
        name=f"fibonacci {spec.dimensions[0]}x{spec.dimensions[1]} {spec.boundary}",
        metadata={"lattice": "honeycomb", "dimensions": list(spec.dimensions), "boundary": spec.boundary,
                  "interposer": interposer},
    )
    tess = Tessellation(spec, lattice, site, out, fib_check, index)
    if verify:
        tess.verify()
    return tess


def fibonacci_unit_cell(site: Complex | None = None) -> Complex:
    """Two sites sharing their first (vertical) edge: the two-site honeycomb unit cell."""
    from .catalog import catalog

    site = site or catalog("FIB_SITE").complex
    a_labels = site.port_labels
    b = site
    outputs = [("V", "v"), ("A1", ("a", 1)), ("A2", ("a", 2)), ("B1", ("b", 1)), ("B2", ("b", 2))]
    wiring = [
        {a_labels[0]: "v", a_labels[1]: ("a", 1), a_labels[2]: ("a", 2)},
        {a_labels[0]: "v", a_labels[1]: ("b", 1), a_labels[2]: ("b", 2)},
    ]
    placements = None
    if site.positions is not None:
        pv = port_xy(site)[0]
        placements = [Placement(), Placement(float(2 * pv[0]), float(2 * pv[1]), math.pi)]
    return compose([site, b], wiring, outputs, placements=placements, name="FMU",
                   metadata={"parts": ["FIB_SITE", "FIB_SITE rotated by 180 degrees"]})


def patch_robustness(tess: Tessellation) -> float:
    """Robustness of a geometric tessellation against its prescribed graph."""
    if tess.complex.positions is None:
        raise ValidationError("the tessellation has no geometry")
    return robustness_and_flag(tess.complex.positions, tess.complex.graph)[0]


# ------------------------------------------------------- cell geometry search


def pinned_ports(kind: str, half: float) -> list[tuple[float, float]]:
    """Port positions that tile: a cross for the square lattice, 120 degrees for the honeycomb."""
    if kind == "square":
        return [(0.0, half), (half, 0.0), (0.0, -half), (-half, 0.0)]
    if kind == "honeycomb":
        return [(0.0, -half)] + [
            (half * math.cos(math.radians(a)), half * math.sin(math.radians(a))) for a in (30.0, 150.0)
        ]
    raise ValidationError(f"unknown lattice kind {kind!r}")


class PatchObjective:
    """``-xi`` of an open patch tiled from one cell geometry (picklable).

    The patch atoms are numbered as :func:`compose` numbers them, so the graph
    of the abstract patch is the target.
    """

    def __init__(self, cell: Complex, kind: str, size: int = 3):
        from .optimizer import RobustnessObjective

        self.kind = kind
        spec = LatticeSpec(kind, (size, size), "open-rough")
        lattice = build_lattice(spec)
        owner, key_atom = [], {}
        self.site_of, self.local = [], []
        port_of = {p.index: k for k, p in enumerate(cell.ports)}
        for s_idx, site in enumerate(lattice.sites):
            edges = lattice.site_edges[site]
            for v in range(cell.n_atoms):
                key = ("edge", edges[port_of[v]]) if v in port_of else None
                if key is not None and key in key_atom:
                    continue
                if key is not None:
                    key_atom[key] = len(owner)
                owner.append((s_idx, v))
        self.site_of = np.array([s for s, _ in owner])
        self.local = np.array([v for _, v in owner])
        self.sites = lattice.sites
        abstract_cell = cell.abstract()
        if kind == "square":
            patch = build_surface_code(spec, abstract_cell)
        else:
            patch = build_fibonacci(spec, abstract_cell)
        if patch.complex.n_atoms != len(owner):
            raise ValidationError("patch numbering disagrees with the composition")
        self.graph = patch.complex.graph
        self.inner = RobustnessObjective(self.graph, len(owner))
        self.port_idx = list(cell.port_indices)

    def layout(self, flat) -> np.ndarray:
        xy = np.asarray(flat, dtype=float).reshape(-1, 2)
        ports = xy[self.port_idx]
        if self.kind == "square":
            t1, t2 = ports[1] - ports[3], ports[0] - ports[2]
            shifts = np.array([i * t1 + j * t2 for i, j in self.sites])
            return xy[self.local] + shifts[self.site_of]
        pv, pr, pl = ports
        a1, a2 = 2 * (pr - pl), 2 * (pr - pv)
        shifts = np.array([i * a1 + j * a2 for _, i, j in self.sites])
        sign = np.array([1.0 if kind == "A" else -1.0 for kind, _, _ in self.sites])
        offset = np.array([[0.0, 0.0] if kind == "A" else 2 * pv for kind, _, _ in self.sites])
        return xy[self.local] * sign[self.site_of, None] + offset[self.site_of] + shifts[self.site_of]

    def __call__(self, flat) -> float:
        return self.inner(self.layout(flat).ravel())


@dataclass
class CellDesign:
    cell: Complex
    cell_robustness: float
    patch_robustness: float
    objective: float


def optimize_cell(cell: Complex, kind: str, *, half: float = 1.0, pin_ports: bool = False, config=None,
                  start=None, jobs: int = 1, patch_size: int = 3) -> CellDesign:
    """Geometry for a tiling cell that maximizes the robustness of a tiled patch.

    Ports start at lattice-shaped positions (see :func:`pinned_ports`); with
    ``pin_ports`` they stay there, otherwise they move too and the lattice
    vectors follow from them.
    """
    from .optimizer import AnnealConfig, optimize_geometry, replace_positions

    n_ports = 4 if kind == "square" else 3
    if len(cell.ports) != n_ports:
        raise ValidationError(f"a {kind} cell needs {n_ports} ports")
    config = config or AnnealConfig()
    objective = PatchObjective(cell, kind, patch_size)
    targets = dict(zip(cell.port_indices, pinned_ports(kind, half)))
    if start is None:
        rng = np.random.default_rng(config.seed)
        start = rng.uniform(-half / 2, half / 2, size=(cell.n_atoms, 2))
        for i, pt in targets.items():
            start[i] = pt
    res = optimize_geometry(cell, objective, config, start=start, pinned=targets if pin_ports else None, jobs=jobs)
    xy = res.positions
    return CellDesign(
        replace_positions(cell, xy),
        robustness_and_flag(xy, cell.graph)[0],
        -objective(np.asarray(xy).ravel()),
        res.objective,
    )
