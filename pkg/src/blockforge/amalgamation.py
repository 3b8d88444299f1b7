"""Gluing complexes by identifying ports.

Identified atoms merge into one atom whose detuning is the sum of the two,
blockade edges are united, and the ground-state language of the result is the
gamma-intersection of the two languages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BlockadeGraph, Complex, Language, Port
from .errors import GeometryError, ValidationError
from .gsm import enumerate_gsm, ground_language, realizes_language
from .languages import gamma_intersection
from .metrics import extreme_distances


@dataclass(frozen=True)
class Placement:
    """Rigid motion applied to the second complex: optional mirror (y -> -y), rotation, shift."""

    dx: float = 0.0
    dy: float = 0.0
    theta: float = 0.0
    mirror: bool = False

    def apply(self, positions) -> np.ndarray:
        xy = np.asarray(positions, dtype=float).reshape(-1, 2).copy()
        if self.mirror:
            xy[:, 1] = -xy[:, 1]
        c, s = math.cos(self.theta), math.sin(self.theta)
        rot = np.array([[c, -s], [s, c]])
        return xy @ rot.T + np.array([self.dx, self.dy])

    @classmethod
    def parse(cls, text: str) -> "Placement":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) not in (3, 4):
            raise ValidationError("placement is 'dx,dy,theta' or 'dx,dy,theta,mirror'")
        mirror = len(parts) == 4 and parts[3].lower() in ("1", "true", "mirror", "m")
        return cls(float(parts[0]), float(parts[1]), float(parts[2]), mirror)


def parse_gamma(gamma) -> list[tuple[str, str]]:
    """Accepts ``"Q:A,R:B"``, a dict or a sequence of label pairs."""
    if isinstance(gamma, str):
        pairs = []
        for item in gamma.split(","):
            item = item.strip()
            if not item:
                continue
            if ":" not in item:
                raise ValidationError(f"gamma entry {item!r} is not of the form X:Y")
            a, b = item.split(":", 1)
            pairs.append((a.strip(), b.strip()))
        return pairs
    if isinstance(gamma, dict):
        return [(str(a), str(b)) for a, b in gamma.items()]
    return [(str(a), str(b)) for a, b in gamma]


def _positions_gamma(c1: Complex, c2: Complex, pairs) -> list[tuple[int, int]]:
    l1, l2 = c1.port_labels, c2.port_labels
    out = []
    for a, b in pairs:
        if a not in l1:
            raise ValidationError(f"first complex has no port {a!r} (ports: {', '.join(l1)})")
        if b not in l2:
            raise ValidationError(f"second complex has no port {b!r} (ports: {', '.join(l2)})")
        out.append((l1.index(a), l2.index(b)))
    if len({p for p, _ in out}) != len(out) or len({q for _, q in out}) != len(out):
        raise ValidationError("a port is identified twice")
    return out


@dataclass
class _Merge:
    index2: list  # atom of c2 -> atom of the amalgam
    detunings: list
    edges: set
    n_atoms: int


def _merge_structure(c1: Complex, c2: Complex, pos_pairs) -> _Merge:
    ident = {c2.ports[q].index: c1.ports[p].index for p, q in pos_pairs}
    index2 = []
    nxt = c1.n_atoms
    for v in range(c2.n_atoms):
        if v in ident:
            index2.append(ident[v])
        else:
            index2.append(nxt)
            nxt += 1
    det = list(c1.detunings) + [None] * (nxt - c1.n_atoms)
    for v in range(c2.n_atoms):
        t = index2[v]
        det[t] = det[t] + c2.detunings[v] if v in ident else c2.detunings[v]
    edges = set(c1.graph.edges)
    for i, j in c2.graph.edges:
        a, b = index2[i], index2[j]
        if a == b:
            raise ValidationError("identification collapses a blockade edge of the second complex")
        edges.add((min(a, b), max(a, b)))
    return _Merge(index2, det, edges, nxt)


def should_demote(l1: Language, l2: Language, pos_pairs) -> bool:
    """Identified ports become ancillas when deleting them loses no information."""
    if l1.word_length + l2.word_length == 2 * len(pos_pairs):
        return False  # nothing would be left to read out
    full = gamma_intersection(l1, l2, pos_pairs, reduced=False)
    red = gamma_intersection(l1, l2, pos_pairs, reduced=True)
    return len(full) == len(red)


def predicted_language(c1: Complex, c2: Complex, gamma, *, languages=None, demote=None) -> tuple[Language, bool]:
    """Language the amalgam should realize, and whether identified ports are demoted."""
    pos_pairs = _positions_gamma(c1, c2, parse_gamma(gamma))
    l1, l2 = languages if languages is not None else (ground_language(c1), ground_language(c2))
    if demote is None:
        demote = should_demote(l1, l2, pos_pairs)
    lang = gamma_intersection(l1, l2, pos_pairs, reduced=demote)
    return lang, demote


def amalgamate(
    c1: Complex,
    c2: Complex,
    gamma,
    *,
    placement: Placement | None = None,
    abstract: bool | None = None,
    demote: bool | None = None,
    languages: tuple | None = None,
    allow_cross_blockade: bool = False,
    check_language: bool = True,
    tol: float = 1e-9,
    name: str = "",
) -> Complex:
    """Identify ports of ``c1`` and ``c2`` pairwise.

    ``gamma`` pairs a port label of ``c1`` with one of ``c2``.  Atoms are
    numbered ``c1`` first, then the non-identified atoms of ``c2``.  Ports of
    the result: ``c1``'s unpaired ports then ``c2``'s; identified ports stay
    (under ``c1``'s label and position) unless ``demote`` is set, which by
    default is decided by comparing the reduced and full gamma-intersections.

    Geometry is kept when both inputs have positions and ``abstract`` is not
    set.  Without a ``placement`` one is found automatically
    (:func:`auto_place`).  With ``check_language`` an empty predicted
    language raises :class:`ValidationError`.
    """
    pairs = parse_gamma(gamma)
    pos_pairs = _positions_gamma(c1, c2, pairs)
    need_lang = check_language or demote is None
    lang = None
    if need_lang:
        l1, l2 = languages if languages is not None else (ground_language(c1), ground_language(c2))
        if demote is None:
            demote = should_demote(l1, l2, pos_pairs)
        lang = gamma_intersection(l1, l2, pos_pairs, reduced=demote)
        if check_language and len(lang) == 0:
            raise ValidationError("empty language: the identified ports never agree")
    m = _merge_structure(c1, c2, pos_pairs)

    paired1 = {p for p, _ in pos_pairs}
    paired2 = {q for _, q in pos_pairs}
    ports = [pt for k, pt in enumerate(c1.ports) if not (demote and k in paired1)]
    ports += [Port(pt.label, m.index2[pt.index]) for k, pt in enumerate(c2.ports) if k not in paired2]
    labels = [p.label for p in ports]
    if len(set(labels)) != len(labels):
        ports = _disambiguate(ports, len([pt for k, pt in enumerate(c1.ports) if not (demote and k in paired1)]))

    geometric = c1.positions is not None and c2.positions is not None and not abstract
    if abstract is False and not geometric:
        raise ValidationError("geometric amalgamation needs positions on both complexes")
    positions = None
    graph = BlockadeGraph(m.n_atoms, frozenset(m.edges))
    if geometric:
        if not math.isclose(c1.blockade_radius, c2.blockade_radius, rel_tol=1e-12):
            raise ValidationError("complexes use different blockade radii")
        if placement is None:
            placement = auto_place(c1, c2, pairs, allow_cross_blockade=allow_cross_blockade)
        positions = place(c1, c2, pos_pairs, m, placement, tol)
        offending = _cross_violations(positions, graph, c1.blockade_radius)
        if offending:
            if not allow_cross_blockade:
                raise GeometryError(
                    "placement creates or breaks blockades between the complexes: "
                    + ", ".join(f"({i},{j})" for i, j in offending),
                    offending,
                )
            graph = None  # take the blockade graph from the geometry
    meta = {"parts": [c1.name or "?", c2.name or "?"], "gamma": [list(p) for p in pairs], "demoted": bool(demote)}
    out = Complex(
        tuple(m.detunings),
        graph,
        tuple(ports),
        tuple(map(tuple, positions)) if positions is not None else None,
        c1.blockade_radius,
        name or f"{c1.name or 'C1'}*{c2.name or 'C2'}",
        meta,
    )
    return out


def _disambiguate(ports, n_first):
    """Suffix clashing labels of the second complex with a prime."""
    taken = {p.label for p in ports[:n_first]}
    out = list(ports[:n_first])
    for p in ports[n_first:]:
        label = p.label
        while label in taken:
            label += "'"
        taken.add(label)
        out.append(Port(label, p.index))
    return out


def place(c1: Complex, c2: Complex, pos_pairs, m: _Merge, placement: Placement, tol: float) -> np.ndarray:
    p1 = np.asarray(c1.positions, dtype=float)
    p2 = placement.apply(c2.positions)
    bad = []
    for p, q in pos_pairs:
        a, b = c1.ports[p].index, c2.ports[q].index
        if np.linalg.norm(p1[a] - p2[b]) > tol * max(1.0, c1.blockade_radius):
            bad.append((a, m.index2[b]))
    if bad:
        raise GeometryError("identified ports do not coincide after placement", bad)
    out = np.zeros((m.n_atoms, 2))
    out[: c1.n_atoms] = p1
    for v in range(c2.n_atoms):
        if m.index2[v] >= c1.n_atoms:
            out[m.index2[v]] = p2[v]
    return out


def _cross_violations(positions, graph: BlockadeGraph, radius: float) -> list:
    xy = np.asarray(positions)
    n = len(xy)
    iu, ju = np.triu_indices(n, k=1)
    d = np.hypot(*(xy[iu] - xy[ju]).T)
    want = np.zeros(len(iu), dtype=bool)
    nbr = graph.neighbor_masks
    for k, (i, j) in enumerate(zip(iu.tolist(), ju.tolist())):
        want[k] = bool(nbr[i] >> j & 1)
    have = d < radius
    return [(int(iu[k]), int(ju[k])) for k in np.nonzero(want != have)[0]]


def _kabsch(src: np.ndarray, dst: np.ndarray, mirror: bool) -> Placement:
    """Best rigid motion mapping src onto dst (both k x 2)."""
    s = src.copy()
    if mirror:
        s[:, 1] = -s[:, 1]
    cs, cd = s.mean(axis=0), dst.mean(axis=0)
    h = (s - cs).T @ (dst - cd)
    theta = math.atan2(h[0, 1] - h[1, 0], h[0, 0] + h[1, 1])
    c, sn = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -sn], [sn, c]])
    shift = cd - rot @ cs
    return Placement(float(shift[0]), float(shift[1]), theta, mirror)


def auto_place(
    c1: Complex,
    c2: Complex,
    gamma,
    *,
    allow_cross_blockade: bool = False,
    steps: int = 360,
    allow_mirror: bool = True,
) -> Placement:
    """Placement of ``c2`` that makes identified ports coincide, with the widest blockade margin.

    One identified pair leaves a free rotation, scanned in ``steps`` steps and
    refined locally; two or more pairs fix the motion up to a mirror image,
    which must match the port distances.  Ties go to the first candidate
    found, so the choice is deterministic but otherwise arbitrary.
    """
    from .optimizer import nelder_mead

    pos_pairs = _positions_gamma(c1, c2, parse_gamma(gamma))
    m = _merge_structure(c1, c2, pos_pairs)
    graph = BlockadeGraph(m.n_atoms, frozenset(m.edges))
    p1 = np.asarray(c1.positions, dtype=float)
    p2 = np.asarray(c2.positions, dtype=float)
    a_idx = [c1.ports[p].index for p, _ in pos_pairs]
    b_idx = [c2.ports[q].index for _, q in pos_pairs]

    def score(pl: Placement) -> float:
        try:
            xy = place(c1, c2, pos_pairs, m, pl, 1e-6)
        except GeometryError:
            return -math.inf
        # margin at the actual radius: positive iff the geometry reproduces the graph there
        d_edge, d_non = extreme_distances(xy, graph)
        r = c1.blockade_radius
        margins = [m for m in ((d_non - r) / (d_non + r), (r - d_edge) / (r + d_edge)) if not math.isnan(m)]
        return min(margins, default=1.0)

    mirrors = (False, True) if allow_mirror else (False,)
    candidates = []
    if len(pos_pairs) == 1:
        anchor1, anchor2 = p1[a_idx[0]], p2[b_idx[0]]
        for mirror in mirrors:
            for k in range(steps):
                theta = 2 * math.pi * k / steps
                pl = Placement(0.0, 0.0, theta, mirror)
                moved = pl.apply(anchor2[None, :])[0]
                pl = Placement(float(anchor1[0] - moved[0]), float(anchor1[1] - moved[1]), theta, mirror)
                candidates.append((score(pl), k, pl))
        candidates.sort(key=lambda t: (-t[0], t[1]))
        best_score, _, best = candidates[0]

        def refine(v, mirror=best.mirror):
            pl = Placement(0.0, 0.0, float(v[0]), mirror)
            moved = pl.apply(anchor2[None, :])[0]
            pl = Placement(float(anchor1[0] - moved[0]), float(anchor1[1] - moved[1]), float(v[0]), mirror)
            return -score(pl), pl

        res = nelder_mead(lambda v: refine(v)[0], [best.theta], initial_step=2 * math.pi / steps, max_iter=200)
        if -res.fun > best_score:
            best_score, best = -res.fun, refine(res.x)[1]
    else:
        for mirror in mirrors:
            pl = _kabsch(p2[b_idx], p1[a_idx], mirror)
            if np.allclose(pl.apply(p2[b_idx]), p1[a_idx], atol=1e-6):
                candidates.append((score(pl), len(candidates), pl))
        if not candidates:
            raise GeometryError("identified port distances differ; no rigid placement exists",
                                list(zip(a_idx, b_idx)))
        candidates.sort(key=lambda t: (-t[0], t[1]))
        best_score, _, best = candidates[0]
    if best_score <= 0 and not allow_cross_blockade:
        xy = place(c1, c2, pos_pairs, m, best, 1e-6)
        raise GeometryError("no collision-free placement found", _cross_violations(xy, graph, c1.blockade_radius))
    return best


@dataclass
class AmalgamationReport:
    ok: bool
    e0_first: object
    e0_second: object
    e0_amalgam: object
    additive: bool
    language_ok: bool
    predicted: Language | None
    demoted: bool
    diagnostics: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "e0_first": str(self.e0_first),
            "e0_second": str(self.e0_second),
            "e0_amalgam": str(self.e0_amalgam),
            "additive": self.additive,
            "language_ok": self.language_ok,
            "predicted_words": sorted(self.predicted.strings()) if self.predicted else [],
            "demoted": self.demoted,
            "diagnostics": self.diagnostics,
        }


def verify_amalgamation(c1: Complex, c2: Complex, gamma, result: Complex | None = None, *, demote: bool | None = None,
                        **gsm_options) -> AmalgamationReport:
    """Check energy additivity and the predicted language of an amalgam.

    ``demote`` must match the choice made when ``result`` was built (None: the default rule).
    """
    g1, g2 = enumerate_gsm(c1, **gsm_options), enumerate_gsm(c2, **gsm_options)
    l1 = Language(len(c1.ports), frozenset(g1.project(c1.port_indices)))
    l2 = Language(len(c2.ports), frozenset(g2.project(c2.port_indices)))
    pos_pairs = _positions_gamma(c1, c2, parse_gamma(gamma))
    if demote is None:
        demote = should_demote(l1, l2, pos_pairs)
    predicted = gamma_intersection(l1, l2, pos_pairs, reduced=demote)
    diagnostics = []
    if len(predicted) == 0:
        return AmalgamationReport(False, g1.ground_energy, g2.ground_energy, None, False, False, predicted, demote,
                                  ["empty language"])
    if result is None:
        result = amalgamate(c1, c2, gamma, abstract=True, demote=demote, languages=(l1, l2))
    ga = enumerate_gsm(result, **gsm_options)
    additive = ga.ground_energy == g1.ground_energy + g2.ground_energy
    if not additive:
        diagnostics.append(f"E0 {ga.ground_energy} != {g1.ground_energy} + {g2.ground_energy}")
    verdict = realizes_language(result, predicted, **gsm_options)
    if not verdict.ok:
        diagnostics.append(verdict.reason)
    return AmalgamationReport(additive and verdict.ok, g1.ground_energy, g2.ground_energy, ga.ground_energy,
                              additive, verdict.ok, predicted, demote, diagnostics)


def compose(
    parts,
    wiring,
    outputs,
    *,
    placements=None,
    allow_cross_blockade: bool = False,
    tol: float = 1e-6,
    name: str = "",
    metadata: dict | None = None,
) -> Complex:
    """Glue many complexes at once.

    ``wiring[k]`` maps port labels of ``parts[k]`` to shared keys; ports with
    the same key become one atom whose detuning is the sum of theirs, and
    unwired ports become private ancillas.  ``outputs`` lists ``(label, key)``
    pairs that become the ports of the result, in that order; every other
    shared atom is an ancilla.  This is repeated pairwise amalgamation without
    the intermediate language bookkeeping.

    With ``placements`` (one :class:`Placement` per part) and positions on all
    parts, the result carries geometry; atoms sharing a key must coincide and
    no blockade may appear or vanish between parts.
    """
    key_atom: dict = {}
    detunings: list = []
    edges: set = set()
    owner: list = []  # per atom: list of (part, local index)
    maps = []
    for k, part in enumerate(parts):
        wires = wiring[k] if wiring is not None else {}
        port_of = {p.index: p.label for p in part.ports}
        local = []
        for v in range(part.n_atoms):
            label = port_of.get(v)
            key = wires.get(label) if label is not None else None
            if label is not None and label in wires and key is None:
                raise ValidationError(f"part {k} port {label} is wired to None")
            if key is not None and key in key_atom:
                a = key_atom[key]
                detunings[a] = detunings[a] + part.detunings[v]
                owner[a].append((k, v))
            else:
                a = len(detunings)
                detunings.append(part.detunings[v])
                owner.append([(k, v)])
                if key is not None:
                    key_atom[key] = a
            local.append(a)
        for i, j in part.graph.edges:
            a, b = local[i], local[j]
            if a == b:
                raise ValidationError(f"wiring of part {k} merges two blockaded atoms")
            edges.add((min(a, b), max(a, b)))
        unknown = set(wires) - set(port_of.values())
        if unknown:
            raise ValidationError(f"part {k} has no ports {sorted(unknown)}")
        maps.append(local)
    ports = []
    for label, key in outputs:
        if key not in key_atom:
            raise ValidationError(f"output {label} refers to unknown key {key!r}")
        ports.append(Port(label, key_atom[key]))
    n = len(detunings)
    graph = BlockadeGraph(n, frozenset(edges))
    positions = None
    if placements is not None:
        if any(p.positions is None for p in parts):
            raise ValidationError("geometric composition needs positions on every part")
        radius = parts[0].blockade_radius
        xy = np.full((n, 2), np.nan)
        bad = []
        for k, part in enumerate(parts):
            moved = placements[k].apply(part.positions)
            for v, a in enumerate(maps[k]):
                if np.isnan(xy[a, 0]):
                    xy[a] = moved[v]
                elif np.linalg.norm(xy[a] - moved[v]) > tol * max(1.0, radius):
                    bad.append((a, a))
        if bad:
            raise GeometryError("shared atoms do not coincide after placement", bad)
        offending = _cross_violations(xy, graph, radius)
        if offending and not allow_cross_blockade:
            raise GeometryError(
                "placement creates or breaks blockades between parts: "
                + ", ".join(f"({i},{j})" for i, j in offending[:20]),
                offending,
            )
        positions = tuple(map(tuple, xy))
        if offending:
            graph = None
    return Complex(
        tuple(detunings), graph, tuple(ports), positions, parts[0].blockade_radius if parts else 1.0,
        name, dict(metadata or {}),
    )
