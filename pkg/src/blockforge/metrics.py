"""Geometric quality of a realization: robustness, detuning spread, validity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BlockadeGraph, Complex, Structure
from .errors import ValidationError


@dataclass(frozen=True)
class GeometryReport:
    robustness: float
    spread: float
    valid: bool
    max_blockade_distance: float
    min_nonblockade_distance: float
    normalization_scale: float
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "robustness": self.robustness,
            "spread": self.spread,
            "valid": self.valid,
            "max_blockade_distance": self.max_blockade_distance,
            "min_nonblockade_distance": self.min_nonblockade_distance,
            "normalization_scale": self.normalization_scale,
            "degenerate": self.degenerate,
        }


def _xy(positions) -> np.ndarray:
    if isinstance(positions, Structure):
        positions = positions.positions
    return np.asarray(positions, dtype=float).reshape(-1, 2)


def extreme_distances(positions, graph: BlockadeGraph) -> tuple[float, float]:
    """(largest blockaded distance, smallest non-blockaded distance); nan if absent."""
    xy = _xy(positions)
    if len(xy) != graph.n_vertices:
        raise ValidationError("geometry and graph differ in size")
    n = len(xy)
    iu, ju = np.triu_indices(n, k=1)
    d = np.sqrt(((xy[iu] - xy[ju]) ** 2).sum(-1))
    is_edge = np.zeros(len(iu), dtype=bool)
    if graph.edges:
        pos = {(i, j): k for k, (i, j) in enumerate(zip(iu.tolist(), ju.tolist()))}
        is_edge[[pos[e] for e in graph.edges]] = True
    d_edge = float(d[is_edge].max()) if is_edge.any() else float("nan")
    d_non = float(d[~is_edge].min()) if (~is_edge).any() else float("nan")
    return d_edge, d_non


def robustness_and_flag(positions, graph: BlockadeGraph) -> tuple[float, bool]:
    d_edge, d_non = extreme_distances(positions, graph)
    if np.isnan(d_edge) or np.isnan(d_non):
        return 1.0, True
    total = d_non + d_edge
    if total == 0:
        return 0.0, False
    return (d_non - d_edge) / total, False


def robustness(positions, graph: BlockadeGraph) -> float:
    """Relative margin between blockaded and non-blockaded distances.

    Positive exactly when some blockade radius reproduces ``graph``.  Graphs
    without edges or without non-edges give +1 (see :func:`robustness_and_flag`).
    """
    return robustness_and_flag(positions, graph)[0]


def spread(detunings) -> float:
    """Relative spread of the sixth roots of the detunings."""
    vals = [float(d) for d in detunings]
    if not vals or min(vals) <= 0:
        raise ValidationError("spread needs positive detunings")
    hi, lo = max(vals) ** (1 / 6), min(vals) ** (1 / 6)
    return (hi - lo) / (hi + lo)


def normalization_scale(positions, graph: BlockadeGraph) -> float:
    """Factor that puts the midpoint between the critical distances at 1."""
    d_edge, d_non = extreme_distances(positions, graph)
    if np.isnan(d_edge) and np.isnan(d_non):
        return 1.0
    if np.isnan(d_edge):
        mid = d_non / 2
    elif np.isnan(d_non):
        mid = d_edge * 1.5
    else:
        mid = (d_edge + d_non) / 2
    if mid <= 0:
        raise ValidationError("cannot normalize a geometry with coincident critical atoms")
    return 1.0 / mid


def normalize(positions, graph: BlockadeGraph) -> np.ndarray:
    """Rescale so that a blockade radius of 1 sits midway between the critical distances."""
    xy = _xy(positions)
    return xy * normalization_scale(xy, graph)


def geometry_report(cplx: Complex, positions=None) -> GeometryReport:
    """Metrics of a geometry against the complex's (prescribed) blockade graph."""
    pos = cplx.positions if positions is None else positions
    if pos is None:
        raise ValidationError("the complex has no geometry")
    xi, degenerate = robustness_and_flag(pos, cplx.graph)
    d_edge, d_non = extreme_distances(pos, cplx.graph)
    s = spread(cplx.detunings)
    return GeometryReport(
        robustness=xi,
        spread=s,
        valid=bool(s < xi),
        max_blockade_distance=d_edge,
        min_nonblockade_distance=d_non,
        normalization_scale=normalization_scale(pos, cplx.graph),
        degenerate=degenerate,
    )


def binding_pairs(positions, graph: BlockadeGraph, tol: float = 1e-9) -> dict:
    """Edges at the maximal and non-edges at the minimal distance."""
    xy = _xy(positions)
    d_edge, d_non = extreme_distances(xy, graph)
    out = {"edges": [], "non_edges": []}
    for i, j in graph.sorted_edges():
        if abs(np.linalg.norm(xy[i] - xy[j]) - d_edge) <= tol * max(1.0, d_edge):
            out["edges"].append((i, j))
    for i, j in graph.non_edges():
        if abs(np.linalg.norm(xy[i] - xy[j]) - d_non) <= tol * max(1.0, d_non):
            out["non_edges"].append((i, j))
    return out
