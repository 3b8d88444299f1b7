"""Exact linear feasibility with checkable witnesses and Farkas certificates.

A :class:`LinearSystem` has free variables and two kinds of rows,
``a.x >= b`` and ``a.x == b``.  Every answer is a rational object that can be
re-checked with plain arithmetic:

* feasible: a point ``x`` satisfying all rows;
* infeasible: multipliers ``y >= 0`` on the inequality rows and free ``z`` on
  the equality rows with ``sum y_r a_r + sum z_e a_e == 0`` and
  ``sum y_r b_r + sum z_e b_e > 0``.

:func:`solve_exact` is a dense two-phase simplex over ``Fraction`` with
Bland's rule.  :func:`solve` first asks HiGHS (through SciPy) for a floating
point answer, snaps it to rationals and verifies it exactly; only when the
snapped answer fails verification does it fall back to the exact simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


@dataclass
class LinearSystem:
    n_vars: int
    ge_rows: list = field(default_factory=list)  # (coeff dict, rhs)
    eq_rows: list = field(default_factory=list)

    def add_ge(self, coeffs: dict, rhs) -> None:
        self.ge_rows.append((dict(coeffs), Fraction(rhs)))

    def add_eq(self, coeffs: dict, rhs) -> None:
        self.eq_rows.append((dict(coeffs), Fraction(rhs)))


@dataclass
class LPResult:
    feasible: bool
    point: list | None = None
    ge_multipliers: list | None = None
    eq_multipliers: list | None = None
    objective: Fraction | None = None
    route: str = ""


def check_point(system: LinearSystem, x) -> bool:
    for coeffs, rhs in system.ge_rows:
        if sum(c * x[j] for j, c in coeffs.items()) < rhs:
            return False
    for coeffs, rhs in system.eq_rows:
        if sum(c * x[j] for j, c in coeffs.items()) != rhs:
            return False
    return True


def check_certificate(system: LinearSystem, y, z) -> bool:
    if len(y) != len(system.ge_rows) or len(z) != len(system.eq_rows):
        return False
    if any(v < 0 for v in y):
        return False
    total = [Fraction(0)] * system.n_vars
    value = Fraction(0)
    for (coeffs, rhs), m in zip(system.ge_rows, y):
        if m:
            for j, c in coeffs.items():
                total[j] += m * c
            value += m * rhs
    for (coeffs, rhs), m in zip(system.eq_rows, z):
        if m:
            for j, c in coeffs.items():
                total[j] += m * c
            value += m * rhs
    return value > 0 and not any(total)


# ----------------------------------------------------------------- exact simplex


def _pivot(tab, obj, row, col):
    prow = tab[row]
    pv = prow[col]
    if pv != 1:
        inv = 1 / pv
        prow[:] = [v * inv for v in prow]
    for r, other in enumerate(tab):
        if r != row:
            f = other[col]
            if f:
                other[:] = [a - f * b for a, b in zip(other, prow)]
    f = obj[col]
    if f:
        obj[:] = [a - f * b for a, b in zip(obj, prow)]


def _run(tab, obj, basis, allowed):
    """Minimize with Bland's rule; ``obj`` holds reduced costs and -value last."""
    while True:
        col = next((j for j in allowed if obj[j] < 0), None)
        if col is None:
            return True
        best, row = None, None
        for r, trow in enumerate(tab):
            a = trow[col]
            if a > 0:
                ratio = trow[-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[row]):
                    best, row = ratio, r
        if row is None:
            return False  # unbounded
        _pivot(tab, obj, row, col)
        basis[row] = col


def solve_exact(system: LinearSystem, objective: dict | None = None) -> LPResult:
    n = system.n_vars
    rows = [(c, r, True) for c, r in system.ge_rows] + [(c, r, False) for c, r in system.eq_rows]
    m = len(rows)
    n_ge = len(system.ge_rows)
    # columns: x+ (n), x- (n), surplus (n_ge), artificial (m), rhs
    n_struct = 2 * n + n_ge
    width = n_struct + m + 1
    tab = []
    signs = []
    for i, (coeffs, rhs, is_ge) in enumerate(rows):
        row = [Fraction(0)] * width
        for j, c in coeffs.items():
            row[j] = Fraction(c)
            row[n + j] = -Fraction(c)
        if is_ge:
            row[2 * n + i] = Fraction(-1)
        row[-1] = Fraction(rhs)
        sign = 1
        if row[-1] < 0:
            row = [-v for v in row]
            sign = -1
        row[n_struct + i] = Fraction(1)
        tab.append(row)
        signs.append(sign)
    basis = [n_struct + i for i in range(m)]
    obj = [Fraction(0)] * width
    for i in range(m):
        obj[n_struct + i] = Fraction(1)
    for row in tab:
        obj[:] = [a - b for a, b in zip(obj, row)]
    _run(tab, obj, basis, range(n_struct + m))
    phase1 = -obj[-1]
    if phase1 > 0:
        pi = [1 - obj[n_struct + i] for i in range(m)]
        rho = [s * p for s, p in zip(signs, pi)]
        return LPResult(False, None, rho[:n_ge], rho[n_ge:], route="exact")
    # drive artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n_struct:
            col = next((j for j in range(n_struct) if tab[r][j] != 0), None)
            if col is not None:
                _pivot(tab, obj, r, col)
                basis[r] = col
    value = None
    if objective:
        obj = [Fraction(0)] * width
        for j, c in objective.items():
            obj[j] = Fraction(c)
            obj[n + j] = -Fraction(c)
        for r, b in enumerate(basis):
            f = obj[b]
            if f:
                obj[:] = [a - f * v for a, v in zip(obj, tab[r])]
        bounded = _run(tab, obj, basis, range(n_struct))
        if bounded:
            value = -obj[-1]
    x = [Fraction(0)] * n
    for r, b in enumerate(basis):
        if b < n:
            x[b] += tab[r][-1]
        elif b < 2 * n:
            x[b - n] -= tab[r][-1]
    return LPResult(True, x, objective=value, route="exact")


# ------------------------------------------------------------------ fast route


def _snap(values, denominators=(1, 2, 6, 12, 60, 840, 27720, 10**6)):
    for d in denominators:
        yield [Fraction(round(float(v) * d), d) for v in values]
    yield [Fraction(float(v)).limit_denominator(10**9) for v in values]


def _dense(system: LinearSystem):
    n = system.n_vars
    a_ge = np.zeros((len(system.ge_rows), n))
    b_ge = np.zeros(len(system.ge_rows))
    for i, (c, r) in enumerate(system.ge_rows):
        for j, v in c.items():
            a_ge[i, j] = float(v)
        b_ge[i] = float(r)
    a_eq = np.zeros((len(system.eq_rows), n))
    b_eq = np.zeros(len(system.eq_rows))
    for i, (c, r) in enumerate(system.eq_rows):
        for j, v in c.items():
            a_eq[i, j] = float(v)
        b_eq[i] = float(r)
    return a_ge, b_ge, a_eq, b_eq


def solve(system: LinearSystem, objective: dict | None = None) -> LPResult:
    """Decide feasibility, HiGHS first, every answer verified exactly."""
    from scipy.optimize import linprog

    n = system.n_vars
    a_ge, b_ge, a_eq, b_eq = _dense(system)
    c = np.zeros(n)
    if objective:
        for j, v in objective.items():
            c[j] = float(v)
    res = linprog(
        c,
        A_ub=-a_ge if len(a_ge) else None,
        b_ub=-b_ge if len(b_ge) else None,
        A_eq=a_eq if len(a_eq) else None,
        b_eq=b_eq if len(b_eq) else None,
        bounds=[(None, None)] * n,
        method="highs",
    )
    if res.status == 0:
        for x in _snap(res.x):
            if check_point(system, x):
                value = sum(Fraction(v) * x[j] for j, v in objective.items()) if objective else None
                return LPResult(True, x, objective=value, route="highs")
        return solve_exact(system, objective)
    if res.status == 2:
        cert = _farkas_fast(system, a_ge, b_ge, a_eq, b_eq)
        if cert is not None:
            y, z = cert
            return LPResult(False, None, y, z, route="highs")
    return solve_exact(system, objective)


def _farkas_fast(system, a_ge, b_ge, a_eq, b_eq):
    """Find y >= 0, z with y.A_ge + z.A_eq = 0 and y.b_ge + z.b_eq = 1."""
    from scipy.optimize import linprog

    n_ge, n_eq = len(b_ge), len(b_eq)
    a = np.hstack([a_ge.T, a_eq.T]) if n_eq else a_ge.T
    b_row = np.concatenate([b_ge, b_eq])[None, :]
    a_full = np.vstack([a, b_row])
    rhs = np.zeros(a_full.shape[0])
    rhs[-1] = 1.0
    # prefer sparse certificates: minimise the total weight on inequality rows
    cost = np.concatenate([np.ones(n_ge), np.zeros(n_eq)])
    bounds = [(0, None)] * n_ge + [(None, None)] * n_eq
    res = linprog(cost, A_eq=a_full, b_eq=rhs, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    for v in _snap(res.x):
        y, z = v[:n_ge], v[n_ge:]
        if check_certificate(system, y, z):
            return y, z
    return None
