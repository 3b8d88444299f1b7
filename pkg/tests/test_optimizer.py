import csv

import numpy as np
import pytest

from blockforge import AnnealConfig, BlockadeGraph, Complex, ValidationError, optimize_geometry, robustness
from blockforge.catalog import abstract_complex, catalog
from blockforge.gsm import enumerate_gsm
from blockforge.metrics import normalize
from blockforge.optimizer import default_bounds, generalized_anneal, nelder_mead, perturb, vdw_objective

SMALL = AnnealConfig(max_iterations=150, restarts=2, seed=3)


def test_nelder_mead_quadratic():
    a = np.array([1.5, -2.0, 0.25])
    res = nelder_mead(lambda x: float(((x - a) ** 2).sum()), [0, 0, 0])
    assert res.converged
    assert np.allclose(res.x, a, atol=1e-6)


def test_nelder_mead_rosenbrock():
    def rosen(x):
        return float(100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2)

    res = nelder_mead(rosen, [-1.2, 1.0], max_iter=5000)
    assert np.allclose(res.x, [1, 1], atol=1e-4)


def test_nelder_mead_history_monotone():
    res = nelder_mead(lambda x: float(np.sin(3 * x[0]) + x[0] ** 2 + x[1] ** 2), [2.0, 1.0])
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))


def test_nelder_mead_iteration_cap():
    res = nelder_mead(lambda x: float((x ** 2).sum()), [5.0, 5.0], max_iter=3)
    assert not res.converged
    assert res.iterations == 3


def test_nelder_mead_rejects_nonfinite_start():
    with pytest.raises(ValidationError):
        nelder_mead(lambda x: float("inf"), [0.0])


def test_anneal_finds_global_minimum_of_bumpy_function():
    def bumpy(x):
        return float(np.sum(x ** 2 - 2 * np.cos(4 * np.pi * x)))

    res = generalized_anneal(bumpy, [1.7, -1.3], -3, 3, AnnealConfig(max_iterations=300, seed=1))
    assert np.allclose(res.x, 0, atol=1e-3)


def test_config_validation():
    with pytest.raises(ValidationError):
        AnnealConfig(max_iterations=0)
    with pytest.raises(ValidationError):
        AnnealConfig(visit=3.5)
    with pytest.raises(ValidationError):
        generalized_anneal(lambda x: 0.0, [0.0], 1, 1, SMALL)


def test_default_bounds_box():
    low, high = default_bounds(np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 3.0], [1.0, 1.0]]))
    assert np.allclose(high - low, 4 * 2)
    assert np.allclose((low + high)[:2] / 2, [1.0, 1.0])


def test_trace_best_is_monotone():
    c = catalog("NOR_ring").complex
    res = optimize_geometry(c, config=SMALL, start=perturb(c.positions, 0.1, 0))
    best = [row[1] for row in res.trace]
    assert all(b <= a for a, b in zip(best, best[1:]))


def test_deterministic_for_fixed_seed():
    c = catalog("NOR_triangle").complex
    start = perturb(c.positions, 0.1, 4)
    a = optimize_geometry(c, config=SMALL, start=start)
    b = optimize_geometry(c, config=SMALL, start=start)
    assert np.array_equal(a.positions, b.positions)
    assert a.trace == b.trace


def test_random_start_ring_embeds():
    ring = abstract_complex("NOR_ring")
    res = optimize_geometry(ring, config=AnnealConfig(max_iterations=200, restarts=8, seed=0))
    assert res.success
    assert -res.objective > 0


def test_graph_and_detunings_untouched_and_normalized():
    c = abstract_complex("XNOR")
    res = optimize_geometry(c, config=SMALL)
    out = res.complex
    assert out.detunings == c.detunings
    assert out.graph == c.graph
    assert out.geometry_consistent()
    assert np.allclose(normalize(res.positions, c.graph), res.positions, atol=1e-12)
    assert res.report.valid


def test_pinned_atoms_stay():
    c = catalog("NOR_ring").complex
    res = optimize_geometry(c, config=SMALL, start=perturb(c.positions, 0.05, 1), pinned={0: (0.0, 0.0), 1: (1.2, 0.0)})
    xy = res.positions
    assert robustness(xy, c.graph) > 0
    # normalization rescales, so compare the pinned pair's direction
    assert xy[1][1] - xy[0][1] == pytest.approx(0.0, abs=1e-12)


def test_trace_csv(tmp_path):
    c = catalog("NOT").complex
    res = optimize_geometry(c, config=AnnealConfig(max_iterations=5, restarts=1))
    path = tmp_path / "trace.csv"
    res.write_trace(path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["iteration", "best_objective", "current_objective"]
    assert len(rows) > 1


def test_callable_objective():
    c = Complex([1, 1], BlockadeGraph.from_edges(2, []))

    def far_apart(flat):
        return -float(np.hypot(flat[0] - flat[2], flat[1] - flat[3]))

    res = optimize_geometry(c, far_apart, AnnealConfig(max_iterations=50, restarts=1, bounds=(-1.0, 1.0)),
                            start=[(0, 0), (0.1, 0)])
    assert -res.objective == pytest.approx(2 * np.sqrt(2), rel=1e-3)


def test_vdw_objective_does_not_get_worse():
    c = catalog("NOR_ring").complex
    logical = enumerate_gsm(c).masks
    start = vdw_objective(c, 1.0, logical)(np.asarray(c.positions).ravel())
    res = optimize_geometry(c, "vdw", AnnealConfig(max_iterations=30, restarts=1), c6=1.0)
    assert res.objective <= start


def test_vdw_needs_c6():
    with pytest.raises(ValidationError):
        optimize_geometry(catalog("NOT").complex, "vdw", SMALL)
