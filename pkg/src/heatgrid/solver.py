"""Solve front-end, solution container, and residual verification.

Two backends sit behind one interface:

* ``bundled``: the in-package revised simplex (desk scale, exact basic
  solutions, deterministic pivoting);
* ``highs``: ``scipy.optimize.linprog(method="highs")`` for the large
  scenario-matrix programs, run with tight feasibility tolerances.

``auto`` picks the bundled solver up to a size threshold and HiGHS above
it. Whatever produced a solution, :func:`verify` recomputes every row
activity and bound from scratch and reports violations by constraint
family; it never trusts solver-reported residuals.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, sparse

from .lp import LinearProgram
from .simplex import (
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    UNBOUNDED,
    solve_simplex,
)

_BUNDLED_MAX_ROWS = 600
_BUNDLED_MAX_COLS = 1500

# Row-name prefix -> constraint family used in residual reports.
FAMILY_BY_PREFIX = {
    "bal": "balance",
    "gcap": "availability",
    "sdyn": "storage",
    "scap": "storage",
    "sin": "storage",
    "sout": "storage",
    "hdyn": "heat",
    "hcop": "heat",
    "bio": "generation_bound",
}


class SolverError(RuntimeError):
    pass


@dataclass
class Solution:
    """Solved column values plus status and solve statistics."""

    status: str  # optimal | infeasible | unbounded | iteration_limit
    objective: float | None
    values: np.ndarray
    lp: LinearProgram
    iterations: int
    wall_time_s: float
    backend: str
    max_residual: float
    dual_objective: float | None = None

    def value(self, name: str) -> float:
        return float(self.values[self.lp.col(name)])

    def by_prefix(self, prefix: str) -> dict:
        """Map 'tail' -> value over all columns named `prefix[tail]`."""
        out = {}
        plen = len(prefix) + 1
        for idx, name in enumerate(self.lp.col_names):
            if name.startswith(prefix + "["):
                out[name[plen:-1]] = float(self.values[idx])
        return out


@dataclass
class FamilyResidual:
    max_violation: float
    mean_violation: float
    rows: int


@dataclass
class ResidualReport:
    """Max/mean constraint violations grouped by family."""

    families: dict = field(default_factory=dict)  # family -> FamilyResidual

    @property
    def max_violation(self) -> float:
        return max((f.max_violation for f in self.families.values()), default=0.0)

    def within(self, tol: float) -> bool:
        return self.max_violation <= tol

    def worst_family(self) -> str | None:
        if not self.families:
            return None
        return max(self.families.items(), key=lambda kv: kv[1].max_violation)[0]


def _row_violations(lp: LinearProgram, values: np.ndarray) -> np.ndarray:
    if lp.num_rows == 0:
        return np.zeros(0)
    activity = lp.matrix() @ values
    rhs = np.array(lp.rhs)
    senses = np.array(lp.senses)
    viol = np.zeros(lp.num_rows)
    is_l = senses == "L"
    is_g = senses == "G"
    is_e = senses == "E"
    viol[is_l] = np.maximum(activity[is_l] - rhs[is_l], 0.0)
    viol[is_g] = np.maximum(rhs[is_g] - activity[is_g], 0.0)
    viol[is_e] = np.abs(activity[is_e] - rhs[is_e])
    return viol


def _bound_violations(lp: LinearProgram, values: np.ndarray) -> np.ndarray:
    lo = np.array(lp.lo)
    hi = np.array(lp.hi)
    return np.maximum(np.maximum(lo - values, values - hi), 0.0)


def verify(lp: LinearProgram, solution: Solution | np.ndarray) -> ResidualReport:
    """Recompute all row activities and bounds from scratch.

    Violations are grouped by constraint family (balance, availability,
    storage, heat, generation_bound, other) plus a `bounds` family for
    variable-bound violations. An empty LP yields an empty report.
    """
    values = solution.values if isinstance(solution, Solution) else np.asarray(solution)
    report = ResidualReport()
    if lp.num_cols == 0:
        return report

    viol = _row_violations(lp, values)
    groups: dict[str, list] = {}
    for name, v in zip(lp.row_names, viol):
        prefix = name.split("[", 1)[0]
        family = FAMILY_BY_PREFIX.get(prefix, "other")
        groups.setdefault(family, []).append(v)
    for family, vs in groups.items():
        arr = np.array(vs)
        report.families[family] = FamilyResidual(
            max_violation=float(arr.max()), mean_violation=float(arr.mean()), rows=len(arr)
        )
    bviol = _bound_violations(lp, values)
    if len(bviol):
        report.families["bounds"] = FamilyResidual(
            max_violation=float(bviol.max()), mean_violation=float(bviol.mean()), rows=len(bviol)
        )
    return report


def _solve_bundled(lp: LinearProgram, tol: float) -> tuple:
    res = solve_simplex(
        lp.matrix(), np.array(lp.senses), np.array(lp.rhs),
        np.array(lp.obj), np.array(lp.lo), np.array(lp.hi),
        tol_feas=tol,
    )
    return res.status, res.x, res.iterations, res.dual_objective


def _solve_highs(lp: LinearProgram, tol: float) -> tuple:
    senses = np.array(lp.senses)
    matrix = lp.matrix().tocsr()
    rhs = np.array(lp.rhs)
    is_e = senses == "E"
    is_l = senses == "L"
    is_g = senses == "G"
    a_eq = matrix[is_e] if is_e.any() else None
    b_eq = rhs[is_e] if is_e.any() else None
    ub_blocks, ub_rhs = [], []
    if is_l.any():
        ub_blocks.append(matrix[is_l])
        ub_rhs.append(rhs[is_l])
    if is_g.any():
        ub_blocks.append(-matrix[is_g])
        ub_rhs.append(-rhs[is_g])
    a_ub = sparse.vstack(ub_blocks) if ub_blocks else None
    b_ub = np.concatenate(ub_rhs) if ub_rhs else None
    bounds = list(zip(lp.lo, lp.hi))
    feas = min(tol, 1e-9)
    res = optimize.linprog(
        c=np.array(lp.obj),
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options={
            "presolve": True,
            "primal_feasibility_tolerance": feas,
            "dual_feasibility_tolerance": feas,
        },
    )
    status_map = {0: OPTIMAL, 1: ITERATION_LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}
    status = status_map.get(res.status)
    if status is None:
        raise SolverError(f"HiGHS failed: {res.message}")
    x = res.x if res.x is not None else np.zeros(lp.num_cols)
    iters = int(getattr(res, "nit", 0) or 0)
    return status, np.asarray(x, dtype=float), iters, None


def solve(lp: LinearProgram, tol: float = 1e-7, backend: str = "auto") -> Solution:
    """Solve an LP; never raises on infeasible/unbounded (see `status`).

    `tol` is the primal feasibility tolerance (relative to RHS scale for
    the bundled backend; HiGHS runs at min(tol, 1e-9) absolute).
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if backend == "auto":
        backend = (
            "bundled"
            if lp.num_rows <= _BUNDLED_MAX_ROWS and lp.num_cols <= _BUNDLED_MAX_COLS
            else "highs"
        )
    t0 = time.perf_counter()
    if backend == "bundled":
        status, x, iterations, dual_obj = _solve_bundled(lp, tol)
    elif backend == "highs":
        status, x, iterations, dual_obj = _solve_highs(lp, tol)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    wall = time.perf_counter() - t0

    objective = None
    max_residual = float("nan")
    if status == OPTIMAL:
        objective = float(np.array(lp.obj) @ x + lp.offset)
        max_residual = max(
            float(_row_violations(lp, x).max(initial=0.0)),
            float(_bound_violations(lp, x).max(initial=0.0)),
        )
    return Solution(
        status=status,
        objective=objective,
        values=x,
        lp=lp,
        iterations=iterations,
        wall_time_s=wall,
        backend=backend,
        max_residual=max_residual,
        dual_objective=None if dual_obj is None else dual_obj + lp.offset,
    )
