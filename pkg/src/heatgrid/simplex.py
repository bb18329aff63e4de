"""Bundled bounded-variable revised simplex (two-phase, dense basis).

Targets desk-scale programs (a few thousand rows); larger models should go
through MPS export to an external solver or the HiGHS backend. The matrix
is kept sparse; the basis inverse is dense with product-form updates and
periodic refactorization.

Determinism: entering variable by most-negative reduced cost with lowest
column index on ties (Dantzig), falling back to Bland's rule (lowest
eligible index) after a run of degenerate pivots; leaving variable by
smallest ratio with a stability-then-lowest-position tie-break. Identical
inputs therefore produce identical pivot sequences and identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

INF = float("inf")

AT_LO, AT_UP, FREE, BASIC = 0, 1, 2, 3

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

_DENSE_LIMIT = 8000  # rows; dense basis beyond this is not desk scale
_REFACTOR_EVERY = 120
_DEGENERATE_RUN_FOR_BLAND = 400


class SimplexSizeError(ValueError):
    """Program too large for the bundled dense-basis simplex."""


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray  # structural columns only
    objective: float  # c'x, excluding any constant offset
    iterations: int
    duals: np.ndarray | None  # row duals y at termination
    dual_objective: float | None  # valid lower bound when optimal


def solve_simplex(
    A: sparse.spmatrix,
    senses,
    b,
    c,
    lo,
    hi,
    tol_feas: float = 1e-7,
    tol_opt: float = 1e-9,
    max_iter: int | None = None,
) -> SimplexResult:
    """Minimize c'x subject to A x {<=,=,>=} b and lo <= x <= hi."""
    m, n = A.shape
    if m > _DENSE_LIMIT:
        raise SimplexSizeError(f"{m} rows exceeds the bundled solver's desk scale")
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    senses = np.asarray(senses)

    if (lo > hi).any():
        return SimplexResult(INFEASIBLE, np.zeros(n), INF, 0, None, None)
    if m == 0:
        return _solve_boxed(c, lo, hi)

    A = A.tocsc()
    # Column layout: [structural 0..n) | slack n..n+m) | artificial n+m..n+2m).
    slack_lo = np.where(senses == "L", 0.0, np.where(senses == "E", 0.0, -INF))
    slack_hi = np.where(senses == "G", 0.0, np.where(senses == "E", 0.0, INF))
    N = n + m
    full_lo = np.concatenate([lo, slack_lo, np.zeros(m)])
    full_hi = np.concatenate([hi, slack_hi, np.full(m, INF)])

    # Start: non-artificials at their bound nearest zero (0 for free vars).
    x = np.zeros(N + m)
    status = np.full(N + m, FREE, dtype=np.int8)
    for j in range(N):
        if np.isfinite(full_lo[j]):
            x[j], status[j] = full_lo[j], AT_LO
        elif np.isfinite(full_hi[j]):
            x[j], status[j] = full_hi[j], AT_UP
        else:
            x[j], status[j] = 0.0, FREE

    resid = b - A @ x[:n] - x[n:N]
    art_sign = np.where(resid >= 0.0, 1.0, -1.0)
    basis = np.arange(N, N + m)
    status[basis] = BASIC
    x[basis] = np.abs(resid)
    binv = np.diag(art_sign).astype(float)

    scale = max(1.0, np.abs(b).max(initial=0.0))
    if max_iter is None:
        max_iter = 50 * (m + n) + 2000

    ctx = _Ctx(
        A=A, n=n, m=m, N=N, lo=full_lo, hi=full_hi, x=x, status=status,
        basis=basis, binv=binv, art_sign=art_sign, b=b,
        tol_opt=tol_opt, tol_piv=1e-9, max_iter=max_iter,
    )

    # Phase 1: drive artificial infeasibility to zero.
    cost1 = np.zeros(N + m)
    cost1[N:] = 1.0
    st = _iterate(ctx, cost1, phase=1)
    if st == ITERATION_LIMIT:
        return _result(ctx, c, ITERATION_LIMIT)
    infeas = x[N:].sum()
    if infeas > tol_feas * scale:
        return _result(ctx, c, INFEASIBLE)
    # Pin artificials to zero for phase 2.
    ctx.hi[N:] = 0.0
    ctx.x[N:][ctx.status[N:] != BASIC] = 0.0

    cost2 = np.concatenate([c, np.zeros(2 * m)])
    st = _iterate(ctx, cost2, phase=2)
    return _result(ctx, c, st)


@dataclass
class _Ctx:
    A: sparse.csc_matrix
    n: int
    m: int
    N: int
    lo: np.ndarray
    hi: np.ndarray
    x: np.ndarray
    status: np.ndarray
    basis: np.ndarray
    binv: np.ndarray
    art_sign: np.ndarray
    b: np.ndarray
    tol_opt: float
    tol_piv: float
    max_iter: int
    iterations: int = 0
    duals: np.ndarray | None = None


def _column(ctx: _Ctx, j: int) -> np.ndarray:
    if j < ctx.n:
        col = np.zeros(ctx.m)
        sl = ctx.A.indptr[j], ctx.A.indptr[j + 1]
        col[ctx.A.indices[sl[0] : sl[1]]] = ctx.A.data[sl[0] : sl[1]]
        return col
    if j < ctx.N:
        col = np.zeros(ctx.m)
        col[j - ctx.n] = 1.0
        return col
    col = np.zeros(ctx.m)
    col[j - ctx.N] = ctx.art_sign[j - ctx.N]
    return col


def _reduced_costs(ctx: _Ctx, cost: np.ndarray, y: np.ndarray) -> np.ndarray:
    d = cost.copy()
    d[: ctx.n] -= ctx.A.T @ y
    d[ctx.n : ctx.N] -= y
    d[ctx.N :] -= ctx.art_sign * y
    return d


def _refactor(ctx: _Ctx) -> None:
    cols = np.empty((ctx.m, ctx.m))
    for k, j in enumerate(ctx.basis):
        cols[:, k] = _column(ctx, j)
    ctx.binv = np.linalg.inv(cols)
    x_nb = ctx.x.copy()
    x_nb[ctx.basis] = 0.0
    rhs = ctx.b - ctx.A @ x_nb[: ctx.n] - x_nb[ctx.n : ctx.N] - ctx.art_sign * x_nb[ctx.N :]
    ctx.x[ctx.basis] = ctx.binv @ rhs


def _iterate(ctx: _Ctx, cost: np.ndarray, phase: int) -> str:
    tol = ctx.tol_opt * max(1.0, np.abs(cost).max(initial=0.0))
    degenerate_run = 0
    use_bland = False
    since_refactor = 0

    while True:
        if ctx.iterations >= ctx.max_iter:
            return ITERATION_LIMIT
        cb = cost[ctx.basis]
        y = ctx.binv.T @ cb
        d = _reduced_costs(ctx, cost, y)

        nonbasic = ctx.status != BASIC
        movable = nonbasic & (ctx.lo < ctx.hi)
        down_ok = movable & ((ctx.status == AT_LO) | (ctx.status == FREE)) & (d < -tol)
        up_ok = movable & ((ctx.status == AT_UP) | (ctx.status == FREE)) & (d > tol)
        eligible = np.flatnonzero(down_ok | up_ok)
        if eligible.size == 0:
            ctx.duals = y
            return OPTIMAL

        if use_bland:
            q = int(eligible[0])
        else:
            scores = np.abs(d[eligible])
            q = int(eligible[int(np.argmax(scores))])  # argmax takes first on ties
        sigma = 1.0 if down_ok[q] else -1.0

        w = ctx.binv @ _column(ctx, q)
        delta = sigma * w

        # Ratio test: how far can x_q move before a basic variable hits a bound?
        xb = ctx.x[ctx.basis]
        lo_b, hi_b = ctx.lo[ctx.basis], ctx.hi[ctx.basis]
        ratios = np.full(ctx.m, INF)
        dec = delta > ctx.tol_piv
        inc = delta < -ctx.tol_piv
        with np.errstate(invalid="ignore"):
            ratios[dec] = np.where(
                np.isfinite(lo_b[dec]), (xb[dec] - lo_b[dec]) / delta[dec], INF
            )
            ratios[inc] = np.where(
                np.isfinite(hi_b[inc]), (hi_b[inc] - xb[inc]) / (-delta[inc]), INF
            )
        ratios = np.maximum(ratios, 0.0)  # numerical guards on tiny negatives
        t_basic = ratios.min(initial=INF)
        t_bound = ctx.hi[q] - ctx.lo[q]  # may be inf
        t_star = min(t_basic, t_bound)

        if not np.isfinite(t_star):
            if phase == 1:
                raise ArithmeticError("phase-1 subproblem unbounded; numerical breakdown")
            ctx.duals = y
            return UNBOUNDED

        ctx.iterations += 1
        if t_star <= ctx.tol_piv:
            degenerate_run += 1
            if degenerate_run >= _DEGENERATE_RUN_FOR_BLAND:
                use_bland = True
        else:
            degenerate_run = 0
            use_bland = False

        if t_bound <= t_basic:
            # Bound flip: q jumps to its opposite bound, basis unchanged.
            ctx.x[ctx.basis] = xb - t_star * delta
            ctx.x[q] = ctx.hi[q] if sigma > 0 else ctx.lo[q]
            ctx.status[q] = AT_UP if sigma > 0 else AT_LO
        else:
            # Leaving variable: smallest ratio; among near-ties prefer
            # artificials out first, then the largest pivot, then lowest slot.
            tie = np.flatnonzero(ratios <= t_star + 1e-12)
            is_art = ctx.basis[tie] >= ctx.N
            if phase == 1 and is_art.any():
                tie = tie[is_art]
            pivots = np.abs(delta[tie])
            best = pivots.max()
            tie = tie[pivots >= 0.5 * best]
            r = int(tie[0])
            leave = int(ctx.basis[r])

            ctx.x[ctx.basis] = xb - t_star * delta
            ctx.x[q] = ctx.x[q] + sigma * t_star
            # The leaving variable rests on the bound it ran into.
            ctx.status[leave] = AT_LO if delta[r] > 0 else AT_UP
            ctx.x[leave] = ctx.lo[leave] if delta[r] > 0 else ctx.hi[leave]
            if leave >= ctx.N:
                ctx.hi[leave] = 0.0  # an artificial never returns
                ctx.status[leave] = AT_LO
                ctx.x[leave] = 0.0
            ctx.basis[r] = q
            ctx.status[q] = BASIC
            # Product-form update of the basis inverse.
            br = ctx.binv[r] / w[r]
            ctx.binv -= np.outer(w, br)
            ctx.binv[r] = br
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                _refactor(ctx)
                since_refactor = 0


def _result(ctx: _Ctx, c: np.ndarray, status: str) -> SimplexResult:
    _refactor(ctx)  # polish basic values against the exact basis
    x = ctx.x[: ctx.n].copy()
    obj = float(c @ x)
    dual_obj = None
    if status == OPTIMAL and ctx.duals is not None:
        cost2 = np.concatenate([c, np.zeros(2 * ctx.m)])
        d = _reduced_costs(ctx, cost2, ctx.duals)
        terms = 0.0
        for j in range(ctx.N):
            if ctx.status[j] == BASIC:
                continue
            if d[j] > 0 and np.isfinite(ctx.lo[j]):
                terms += d[j] * ctx.lo[j]
            elif d[j] < 0 and np.isfinite(ctx.hi[j]):
                terms += d[j] * ctx.hi[j]
        dual_obj = float(ctx.duals @ ctx.b + terms)
    return SimplexResult(
        status=status,
        x=x,
        objective=obj,
        iterations=ctx.iterations,
        duals=None if ctx.duals is None else ctx.duals.copy(),
        dual_objective=dual_obj,
    )


def _solve_boxed(c: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> SimplexResult:
    """Degenerate case without rows: minimize over the box alone."""
    x = np.zeros_like(c)
    for j, cj in enumerate(c):
        if cj > 0:
            if not np.isfinite(lo[j]):
                return SimplexResult(UNBOUNDED, x, -INF, 0, None, None)
            x[j] = lo[j]
        elif cj < 0:
            if not np.isfinite(hi[j]):
                return SimplexResult(UNBOUNDED, x, -INF, 0, None, None)
            x[j] = hi[j]
        else:
            x[j] = lo[j] if np.isfinite(lo[j]) else (hi[j] if np.isfinite(hi[j]) else 0.0)
    return SimplexResult(OPTIMAL, x, float(c @ x), 0, np.zeros(0), float(c @ x))
