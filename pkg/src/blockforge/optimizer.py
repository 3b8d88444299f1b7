"""Geometry optimization: generalized simulated annealing with Nelder-Mead refinement.

The annealer follows the Tsallis-Stariolo visiting distribution and the
generalized acceptance rule with the customary defaults (visit 2.62,
acceptance -5, initial temperature 5230).  The objective minimized is
``-robustness`` or the van der Waals width/gap ratio of the logical manifold.
"""

from __future__ import annotations

import csv
import math
import pickle
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .core import Complex
from .errors import ValidationError
from .metrics import GeometryReport, geometry_report, normalize, robustness

# ---------------------------------------------------------------- Nelder-Mead


@dataclass
class NMResult:
    x: np.ndarray
    fun: float
    iterations: int
    evaluations: int
    converged: bool
    history: list = field(default_factory=list)


def nelder_mead(
    fun: Callable[[np.ndarray], float],
    start,
    *,
    xatol: float = 1e-8,
    fatol: float = 1e-10,
    max_iter: int | None = None,
    initial_step: float | None = None,
    adaptive: bool = True,
) -> NMResult:
    """Minimize ``fun`` from ``start`` with the downhill simplex method.

    Stops once the simplex diameter (max coordinate distance to the best
    vertex) is at most ``xatol`` and the spread of simplex values is at most
    ``fatol``; ``converged`` is False when ``max_iter`` ran out first.
    ``adaptive`` scales the coefficients with the dimension.  ``history`` holds the best value after every iteration.
    """
    x0 = np.asarray(start, dtype=float).ravel()
    n = len(x0)
    if n == 0:
        raise ValidationError("nothing to optimize")
    f0 = float(fun(x0))
    if not math.isfinite(f0):
        raise ValidationError("objective is not finite at the start point")
    if adaptive:
        alpha, gamma, rho, sigma = 1.0, 1.0 + 2.0 / n, 0.75 - 1.0 / (2 * n), 1.0 - 1.0 / n
    else:
        alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    max_iter = max_iter if max_iter is not None else 200 * n

    simplex = np.empty((n + 1, n))
    simplex[0] = x0
    for k in range(n):
        y = x0.copy()
        if initial_step is not None:
            y[k] += initial_step
        else:
            y[k] = y[k] * 1.05 if y[k] != 0 else 0.00025
        simplex[k + 1] = y
    values = np.empty(n + 1)
    values[0] = f0
    evaluations = 1
    for k in range(1, n + 1):
        values[k] = fun(simplex[k])
        evaluations += 1

    history = []
    converged = False
    it = 0
    while it < max_iter:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        history.append(float(values[0]))
        size = np.max(np.abs(simplex[1:] - simplex[0]))
        fspread = np.max(np.abs(values[1:] - values[0]))
        if size <= xatol and fspread <= fatol:
            converged = True
            break
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = fun(xr)
        evaluations += 1
        shrink = False
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = fun(xe)
            evaluations += 1
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        elif fr < values[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = fun(xc)
            evaluations += 1
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
            else:
                shrink = True
        else:
            xc = centroid - rho * (centroid - worst)
            fc = fun(xc)
            evaluations += 1
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
            else:
                shrink = True
        if shrink:
            simplex[1:] = simplex[0] + sigma * (simplex[1:] - simplex[0])
            for k in range(1, n + 1):
                values[k] = fun(simplex[k])
            evaluations += n
    order = np.argsort(values, kind="stable")
    return NMResult(simplex[order[0]].copy(), float(values[order[0]]), it, evaluations, converged, history)


# ------------------------------------------------------ generalized annealing


@dataclass(frozen=True)
class AnnealConfig:
    max_iterations: int = 2000
    initial_temperature: float = 5230.0
    visit: float = 2.62
    accept: float = -5.0
    restart_temperature_ratio: float = 2e-5
    local_search: bool = True
    local_max_iter: int | None = None
    bounds: tuple | None = None  # (low, high) arrays or scalars; default box around the start
    seed: int = 0
    restarts: int = 8

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")
        if self.restarts < 1:
            raise ValidationError("restarts must be at least 1")
        if not 1.0 < self.visit < 3.0:
            raise ValidationError("visit parameter must lie in (1, 3)")
        if self.initial_temperature <= 0:
            raise ValidationError("initial temperature must be positive")


_TAIL_LIMIT = 1e8


class _Visitor:
    """Draws steps from the distorted Cauchy-Lorentz visiting distribution."""

    def __init__(self, qv: float, rng: np.random.Generator):
        self.qv = qv
        self.rng = rng
        f2 = math.exp((4.0 - qv) * math.log(qv - 1.0))
        f3 = math.exp((2.0 - qv) * math.log(2.0) / (qv - 1.0))
        self.f4p = math.sqrt(math.pi) * f2 / (f3 * (3.0 - qv))
        f5 = 1.0 / (qv - 1.0) - 0.5
        d1 = 2.0 - f5
        self.f6 = math.pi * (1.0 - f5) / math.sin(math.pi * (1.0 - f5)) / math.exp(gammaln(d1))

    def draw(self, temperature: float, size: int) -> np.ndarray:
        qv = self.qv
        x = self.rng.normal(size=size)
        y = self.rng.normal(size=size)
        f1 = math.exp(math.log(temperature) / (qv - 1.0))
        f4 = self.f4p * f1
        x *= math.exp(-(qv - 1.0) * math.log(self.f6 / f4) / (3.0 - qv))
        den = np.exp((qv - 1.0) * np.log(np.abs(y)) / (3.0 - qv))
        step = x / den
        return np.clip(step, -_TAIL_LIMIT, _TAIL_LIMIT)


@dataclass
class AnnealResult:
    x: np.ndarray
    fun: float
    trace: list  # (iteration, best, current)
    evaluations: int


def _wrap(x, low, width):
    return low + np.mod(x - low, width)


def generalized_anneal(
    fun: Callable[[np.ndarray], float],
    start,
    low,
    high,
    config: AnnealConfig,
    seed: int | np.random.SeedSequence | None = None,
) -> AnnealResult:
    """One annealing run from ``start`` inside the box ``[low, high]``."""
    rng = np.random.default_rng(config.seed if seed is None else seed)
    x = np.asarray(start, dtype=float).ravel().copy()
    dim = len(x)
    low = np.broadcast_to(np.asarray(low, dtype=float), (dim,)).copy()
    high = np.broadcast_to(np.asarray(high, dtype=float), (dim,)).copy()
    width = high - low
    if np.any(width <= 0):
        raise ValidationError("bounds are degenerate")
    visitor = _Visitor(config.visit, rng)
    qv, qa, t0 = config.visit, config.accept, config.initial_temperature
    t1 = math.exp((qv - 1.0) * math.log(2.0)) - 1.0
    evaluations = 0

    def f(z):
        nonlocal evaluations
        evaluations += 1
        v = float(fun(z))
        return v if math.isfinite(v) else 1e300

    def local(z, fz):
        if not config.local_search:
            return z, fz
        res = nelder_mead(f, z, max_iter=config.local_max_iter or 40 * dim, initial_step=0.05 * float(width.mean()) / 4)
        x, fx = res.x, res.fun
        clipped = np.clip(x, low, high)
        if not np.array_equal(clipped, x):
            x, fx = clipped, f(clipped)
        return (x, fx) if fx < fz else (z, fz)

    current, e_cur = x, f(x)
    best, e_best = current.copy(), e_cur
    trace = []
    k = 0  # temperature step counter, reset on reannealing
    for iteration in range(config.max_iterations):
        t2 = math.exp((qv - 1.0) * math.log(k + 2.0)) - 1.0
        temperature = t0 * t1 / t2
        k += 1
        if temperature < t0 * config.restart_temperature_ratio:
            current = rng.uniform(low, high)
            e_cur = f(current)
            k = 0
            trace.append((iteration, e_best, e_cur))
            continue
        t_step = temperature / float(iteration + 1)
        improved = False
        for j in range(2 * dim):
            if j < dim:
                cand = current + visitor.draw(temperature, dim)
            else:
                cand = current.copy()
                idx = j - dim
                cand[idx] += visitor.draw(temperature, 1)[0]
            cand = _wrap(cand, low, width)
            e = f(cand)
            if e < e_cur:
                current, e_cur = cand, e
                if e < e_best:
                    best, e_best = cand.copy(), e
                    improved = True
            else:
                r = rng.random()
                pqv_temp = 1.0 - (1.0 - qa) * (e - e_cur) / t_step
                pqv = 0.0 if pqv_temp <= 0 else math.exp(math.log(pqv_temp) / (1.0 - qa))
                if r <= pqv:
                    current, e_cur = cand, e
        if improved:
            best, e_best = local(best, e_best)
            current, e_cur = best.copy(), e_best
        trace.append((iteration, e_best, e_cur))
    return AnnealResult(best, e_best, trace, evaluations)


# ------------------------------------------------------------ objectives


class RobustnessObjective:
    """Fast ``-xi`` over a flat coordinate vector, for a fixed target graph."""

    def __init__(self, graph, n_atoms: int):
        self.iu, self.ju = np.triu_indices(n_atoms, k=1)
        self.is_edge = np.zeros(len(self.iu), dtype=bool)
        lookup = {(i, j): k for k, (i, j) in enumerate(zip(self.iu.tolist(), self.ju.tolist()))}
        for e in graph.edges:
            self.is_edge[lookup[e]] = True
        self.trivial = not (self.is_edge.any() and (~self.is_edge).any())

    def __call__(self, flat) -> float:
        if self.trivial:
            return -1.0
        xy = flat.reshape(-1, 2)
        d = np.hypot(*(xy[self.iu] - xy[self.ju]).T)
        de, dn = d[self.is_edge].max(), d[~self.is_edge].min()
        total = de + dn
        return 0.0 if total == 0 else float(-(dn - de) / total)


def robustness_objective(graph, n_atoms: int) -> RobustnessObjective:
    return RobustnessObjective(graph, n_atoms)


class VdwObjective:
    """Width/gap ratio of the logical manifold under ``c6 / r^6``; +inf without a gap."""

    def __init__(self, cplx: Complex, c6: float, logical_masks):
        n = cplx.n_atoms
        if n > 20:
            raise ValidationError("the van der Waals objective needs the full spectrum; too many atoms")
        masks = np.arange(1 << n, dtype=np.int64)
        occ = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
        pairs = list(combinations(range(n), 2))
        self.pi = np.array([p[0] for p in pairs])
        self.pj = np.array([p[1] for p in pairs])
        self.both = occ[:, self.pi] * occ[:, self.pj]
        self.base = -occ @ np.array([float(d) for d in cplx.detunings])
        self.logical = np.zeros(1 << n, dtype=bool)
        self.logical[list(logical_masks)] = True
        self.c6 = float(c6)

    def __call__(self, flat) -> float:
        xy = flat.reshape(-1, 2)
        d = np.hypot(*(xy[self.pi] - xy[self.pj]).T)
        if np.any(d == 0):
            return math.inf
        e = self.base + self.both @ (self.c6 / d**6)
        le = e[self.logical]
        gap = e[~self.logical].min() - le.max()
        if gap <= 0:
            return math.inf
        return float((le.max() - le.min()) / gap)


def vdw_objective(cplx: Complex, c6: float, logical_masks) -> VdwObjective:
    return VdwObjective(cplx, c6, logical_masks)


# ---------------------------------------------------------------- driver


@dataclass
class OptimizationResult:
    positions: np.ndarray
    report: GeometryReport | None
    objective: float
    trace: list
    restart_objectives: list
    success: bool
    complex: Complex

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "best_objective", "current_objective"])
            for row in self.trace:
                w.writerow([row[0], repr(float(row[1])), repr(float(row[2]))])


def default_bounds(start: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Box of side ``4 sqrt(N)`` centred on the centroid of ``start``."""
    xy = start.reshape(-1, 2)
    half = 2.0 * math.sqrt(len(xy))
    c = xy.mean(axis=0)
    low = np.tile(c - half, len(xy))
    high = np.tile(c + half, len(xy))
    return low, high


def _run_restart(args):
    fun, start, low, high, config, seed = args
    return generalized_anneal(fun, start, low, high, config, seed)


def optimize_geometry(
    cplx: Complex,
    objective: str = "robustness",
    config: AnnealConfig | None = None,
    *,
    c6: float | None = None,
    start=None,
    pinned=None,
    jobs: int = 1,
) -> OptimizationResult:
    """Search positions for ``cplx`` that maximize robustness (or minimize the vdW ratio).

    ``objective`` may also be any picklable callable mapping the flat vector
    of all coordinates to a value to minimize.

    The blockade graph and detunings stay fixed.  Restart ``k`` uses the
    ``k``-th child of ``SeedSequence(config.seed)``; restart 0 starts from the
    given (or stored) geometry, the others from uniform random points in the
    box.  Atoms listed in ``pinned`` (index -> point, or a set of indices to
    keep at their start positions) do not move.  Robustness results are
    normalized when the embedding is valid; vdW results keep their scale
    because the interaction strength depends on it.
    """
    config = config or AnnealConfig()
    n = cplx.n_atoms
    if start is None:
        start = cplx.positions
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    if start is None:
        if pinned and not isinstance(pinned, dict):
            raise ValidationError("pinning atoms in place needs a start geometry")
        rng0 = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
        side = 2.0 * math.sqrt(n)
        full0 = rng0.uniform(-side / 2, side / 2, size=(n, 2))
    else:
        full0 = np.asarray(start, dtype=float).reshape(-1, 2).copy()
        if len(full0) != n:
            raise ValidationError("start geometry has the wrong number of atoms")
    if pinned:
        if not isinstance(pinned, dict):
            pinned = {int(i): tuple(full0[int(i)]) for i in pinned}
        for i, pt in pinned.items():
            full0[int(i)] = pt
    pinned = pinned or {}
    free = [v for v in range(n) if v not in pinned]
    if not free:
        raise ValidationError("every atom is pinned")
    free_idx = np.array([[2 * v, 2 * v + 1] for v in free]).ravel()
    x0 = full0.ravel()[free_idx]

    if config.bounds is None:
        low_full, high_full = default_bounds(full0.ravel())
        low, high = low_full[free_idx], high_full[free_idx]
    else:
        low = np.broadcast_to(np.asarray(config.bounds[0], dtype=float), (2 * n,))[free_idx]
        high = np.broadcast_to(np.asarray(config.bounds[1], dtype=float), (2 * n,))[free_idx]

    if objective == "robustness":
        base = robustness_objective(cplx.graph, n)
    elif objective in ("vdw", "vdw_ratio"):
        if c6 is None or c6 <= 0:
            raise ValidationError("the vdW objective needs a positive c6")
        from .gsm import enumerate_gsm

        base = vdw_objective(cplx, c6, enumerate_gsm(cplx).masks)
    elif callable(objective):
        base = objective
    else:
        raise ValidationError(f"unknown objective {objective!r}")
    fun = _Embedded(base, full0.ravel().copy(), free_idx) if pinned else base

    starts = []
    for k, ss in enumerate(seeds):
        if k == 0:
            starts.append(x0)
        else:
            starts.append(np.random.default_rng(ss.spawn(1)[0]).uniform(low, high))
    tasks = [(fun, starts[k], low, high, config, seeds[k]) for k in range(config.restarts)]
    if jobs > 1 and config.restarts > 1:
        from concurrent.futures import ProcessPoolExecutor

        try:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                runs = list(pool.map(_run_restart, tasks))
        except (AttributeError, TypeError, ValueError, ImportError, pickle.PicklingError):
            runs = [_run_restart(t) for t in tasks]
    else:
        runs = [_run_restart(t) for t in tasks]

    best_k = min(range(len(runs)), key=lambda k: (runs[k].fun, k))
    best = runs[best_k]
    full = full0.ravel().copy()
    full[free_idx] = best.x
    xy = full.reshape(-1, 2)
    xi = robustness(xy, cplx.graph)
    if objective == "robustness":
        success = xi > 0
        if success:
            xy = normalize(xy, cplx.graph)
    else:
        success = math.isfinite(best.fun)
    out = replace_positions(cplx, xy)
    report = geometry_report(out, xy)
    return OptimizationResult(
        positions=xy,
        report=report,
        objective=best.fun,
        trace=best.trace,
        restart_objectives=[r.fun for r in runs],
        success=bool(success),
        complex=out,
    )


class _Embedded:
    """Objective over the free coordinates only (picklable, unlike a closure)."""

    def __init__(self, base, full, free_idx):
        self.base, self.full, self.free_idx = base, full, free_idx

    def __call__(self, x):
        z = self.full.copy()
        z[self.free_idx] = x
        return self.base(z)


def replace_positions(cplx: Complex, positions) -> Complex:
    """Attach positions without re-deriving the graph (for invalid embeddings)."""
    return Complex(
        cplx.detunings,
        graph=cplx.graph,
        ports=cplx.ports,
        positions=[tuple(map(float, p)) for p in np.asarray(positions).reshape(-1, 2)],
        blockade_radius=cplx.blockade_radius,
        name=cplx.name,
        metadata=cplx.metadata,
    )


def perturb(positions, scale: float, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    xy = np.asarray(positions, dtype=float).reshape(-1, 2)
    return xy + rng.normal(scale=scale, size=xy.shape)
