"""Revised simplex for equality-form LPs with finite variable bounds.

    min c.x   s.t.  A x = b,   lower <= x <= upper

Phase I appends one artificial column per row (sign chosen so the
artificial starts non-negative) and minimises their sum; the artificials
are then fixed at zero and kept in the column set, which lets the dual
simplex reuse the final basis after bound changes.  The basis inverse is
kept explicitly, updated by elementary row operations after each pivot and
recomputed from scratch every ``refactor_every`` pivots (at least
``REFACTOR_EVERY``, growing with the row count).

Entering variables are chosen by Dantzig's rule.  Structural bounds are
widened by tiny random amounts while solving from scratch, which breaks
the heavy primal degeneracy of partitioning models; the true bounds are
restored at the end and a short dual pass repairs the resulting small
infeasibilities.  When the objective has not moved for ``stall_limit``
pivots the solver still switches to Bland's rule until it moves again, so
degenerate cycling cannot persist.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import inv
from scipy.linalg.blas import dger

REFACTOR_EVERY = 64
PIVOT_TOL = 1e-9
PERTURB = 1e-9
BOUND_PERTURB = 1e-6

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2


class LpStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    ITERATION_LIMIT = "ITERATION_LIMIT"
    # dual bound reached the caller's cutoff before optimality
    CUTOFF = "CUTOFF"


class IterationLimit(RuntimeError):
    pass


class Infeasible(RuntimeError):
    pass


@dataclass
class LpSolution:
    objective_value: float
    values: np.ndarray
    status: LpStatus
    iterations: int
    bland_engaged: bool = False

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class BoundedSimplex:
    """Stateful solver: solve once, then change bounds and re-optimise with
    :meth:`reoptimize` (dual simplex from the last basis)."""

    def __init__(self, A, b, c, lower, upper, tol_feas=1e-7, tol_opt=1e-7,
                 max_iters=None, stall_limit=None):
        A = sp.csc_matrix(A, dtype=float)
        m, n = A.shape
        if n < 1:
            raise ValueError("model has no variables")
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("all variable bounds must be finite")
        self.m, self.n = m, n
        self.b = np.asarray(b, dtype=float)
        self.c_struct = np.asarray(c, dtype=float)
        self.tol_feas, self.tol_opt = tol_feas, tol_opt
        self.max_iters = max_iters if max_iters is not None else 50 * (m + n) + 1000
        self.stall_limit = stall_limit if stall_limit is not None else max(50, m // 2)
        # a refactorisation costs about m rank-one updates
        self.refactor_every = max(REFACTOR_EVERY, m // 4)

        self.A_struct = A
        self.lower = np.concatenate([lower, np.zeros(m)])
        self.upper = np.concatenate([upper, np.full(m, np.inf)])
        self.total = n + m
        self.iterations = 0
        self.bland_engaged = False
        self._rng = np.random.default_rng(0x5EED)
        self._start()

    def _start(self):
        """All-artificial starting basis for the current structural bounds."""
        n, m = self.n, self.m
        # artificial signs make the all-lower starting point feasible for phase I
        resid = self.b - self.A_struct @ self.lower[:n]
        sign = np.where(resid < 0, -1.0, 1.0)
        self.A = sp.hstack([self.A_struct, sp.diags(sign, format="csc")], format="csc")
        self.AT = self.A.T.tocsr()
        self.upper[n:] = np.inf
        self.state = np.full(self.total, AT_LOWER, dtype=np.int8)
        self.basis = np.arange(n, n + m)
        self.state[self.basis] = BASIC
        self.x = self.lower.copy()
        self.x[n:] = np.abs(resid)
        self.Binv = np.ascontiguousarray(np.diag(sign))
        self._since_refactor = 0
        self.phase = 1
        self.cost = np.concatenate([np.zeros(n), np.ones(m)])

    # -- linear algebra --------------------------------------------------
    def _column(self, j):
        lo, hi = self.A.indptr[j], self.A.indptr[j + 1]
        rows = self.A.indices[lo:hi]
        return self.Binv[:, rows] @ self.A.data[lo:hi]

    def _refactor(self):
        B = self.A[:, self.basis].toarray()
        self.Binv = np.ascontiguousarray(inv(B, overwrite_a=True, check_finite=False))
        self._since_refactor = 0
        self._update_basic_values()

    def _update_basic_values(self):
        nonbasic = self.state != BASIC
        rhs = self.b - self.A[:, nonbasic] @ self.x[nonbasic]
        self.x[self.basis] = self.Binv @ rhs

    def _pivot(self, r, q, alpha):
        piv = alpha[r]
        row = self.Binv[r] / piv
        # in-place rank-one update through the Fortran view of a C-ordered array
        self.Binv = dger(-1.0, row, alpha, a=self.Binv.T, overwrite_a=1).T
        self.Binv[r] = row
        self.basis[r] = q
        self._since_refactor += 1
        self.iterations += 1
        if self._since_refactor >= self.refactor_every:
            self._refactor()

    def _reduced_costs(self):
        y = self.cost[self.basis] @ self.Binv
        return self.cost - self.AT @ y

    def objective(self):
        return float(self.cost @ self.x)

    # -- primal simplex --------------------------------------------------
    def _primal(self):
        """Primal simplex with the current cost vector; returns a status."""
        movable = self.upper > self.lower
        best_obj = self.objective()
        stalled = 0
        bland = False
        while True:
            if self.iterations >= self.max_iters:
                return LpStatus.ITERATION_LIMIT
            d = self._reduced_costs()
            st = self.state
            score = np.where((st == AT_LOWER) & movable, -d, 0.0)
            score = np.where((st == AT_UPPER) & movable, d, score)
            candidates = np.flatnonzero(score > self.tol_opt)
            if candidates.size == 0:
                return LpStatus.OPTIMAL
            q = candidates[0] if bland else candidates[np.argmax(score[candidates])]
            direction = 1.0 if st[q] == AT_LOWER else -1.0
            alpha = self._column(q)
            delta = direction * alpha
            xb = self.x[self.basis]
            lob, upb = self.lower[self.basis], self.upper[self.basis]
            limits = np.full(self.m, np.inf)
            dec = delta > PIVOT_TOL
            inc = delta < -PIVOT_TOL
            limits[dec] = np.maximum(xb[dec] - lob[dec], 0.0) / delta[dec]
            limits[inc] = np.maximum(upb[inc] - xb[inc], 0.0) / -delta[inc]
            theta_rows = limits.min() if self.m else np.inf
            flip = self.upper[q] - self.lower[q]
            if flip <= theta_rows:
                theta = flip
                self.x[self.basis] = xb - theta * delta
                self.x[q] += direction * theta
                st[q] = AT_UPPER if st[q] == AT_LOWER else AT_LOWER
                self.iterations += 1
            else:
                if not np.isfinite(theta_rows):
                    raise RuntimeError("unbounded direction in a bounded LP")
                theta = theta_rows
                ties = np.flatnonzero(limits <= theta + 1e-12)
                if bland:
                    r = ties[np.argmin(self.basis[ties])]
                else:
                    r = ties[np.argmax(np.abs(alpha[ties]))]
                leaving = self.basis[r]
                self.x[self.basis] = xb - theta * delta
                self.x[q] += direction * theta
                if delta[r] > 0:
                    self.x[leaving] = self.lower[leaving]
                    st[leaving] = AT_LOWER
                else:
                    self.x[leaving] = self.upper[leaving]
                    st[leaving] = AT_UPPER
                st[q] = BASIC
                self._pivot(r, q, alpha)
            obj = self.objective()
            if obj < best_obj - 1e-12:
                best_obj = obj
                stalled = 0
                bland = False
            else:
                stalled += 1
                if stalled >= self.stall_limit and not bland:
                    bland = True
                    self.bland_engaged = True

    def solve(self, perturb=True) -> LpStatus:
        """Two-phase primal simplex from the all-artificial basis."""
        n = self.n
        true_lo, true_up = self.lower[:n].copy(), self.upper[:n].copy()
        if perturb:
            self.lower[:n] -= BOUND_PERTURB * (1.0 + self._rng.random(n))
            self.upper[:n] += BOUND_PERTURB * (1.0 + self._rng.random(n))
            self._start()
        status = self._primal()
        if status is LpStatus.OPTIMAL:
            if self.objective() > self.tol_feas * max(1.0, float(np.abs(self.b).sum())):
                status = LpStatus.INFEASIBLE
            else:
                self._enter_phase2()
                status = self._primal()
        if perturb:
            self.lower[:n], self.upper[:n] = true_lo, true_up
            if status is LpStatus.OPTIMAL:
                self._move_nonbasic_to_bounds()
                status = self._repair()
        return status

    def _enter_phase2(self):
        self.phase = 2
        art = slice(self.n, self.total)
        self.upper[art] = 0.0
        self.x[art] = np.where(self.state[art] == BASIC, self.x[art], 0.0)
        self.state[art] = np.where(self.state[art] == BASIC, BASIC, AT_LOWER)
        self.cost = np.concatenate([self.c_struct, np.zeros(self.m)])

    # -- dual simplex ------------------------------------------------------
    def set_bounds(self, lower, upper):
        """Replace structural bounds; nonbasic variables move to their new bound."""
        self.lower[:self.n] = lower
        self.upper[:self.n] = upper
        self._move_nonbasic_to_bounds()

    def _move_nonbasic_to_bounds(self):
        st = self.state[:self.n]
        x = self.x[:self.n]
        x[st == AT_LOWER] = self.lower[:self.n][st == AT_LOWER]
        x[st == AT_UPPER] = self.upper[:self.n][st == AT_UPPER]
        self._update_basic_values()

    def _dual_feasible(self, d):
        movable = self.upper > self.lower
        bad_lo = (self.state == AT_LOWER) & movable & (d < -self.tol_opt)
        bad_up = (self.state == AT_UPPER) & movable & (d > self.tol_opt)
        return not (bad_lo.any() or bad_up.any())

    def _dual(self, cutoff=None):
        movable = self.upper > self.lower
        best_obj = self.objective()
        stalled = 0
        bland = False
        while True:
            if self.iterations >= self.max_iters:
                return LpStatus.ITERATION_LIMIT
            xb = self.x[self.basis]
            lob, upb = self.lower[self.basis], self.upper[self.basis]
            infeas = np.maximum(lob - xb, xb - upb)
            rows = np.flatnonzero(infeas > self.tol_feas)
            if rows.size == 0:
                return LpStatus.OPTIMAL
            if bland:
                r = rows[np.argmin(self.basis[rows])]
            else:
                r = rows[np.argmax(infeas[rows])]
            below = xb[r] < lob[r]
            alpha_r = self.AT @ self.Binv[r]
            d = self._reduced_costs()
            st = self.state
            if below:
                ok = ((st == AT_LOWER) & (alpha_r < -PIVOT_TOL)) | ((st == AT_UPPER) & (alpha_r > PIVOT_TOL))
            else:
                ok = ((st == AT_LOWER) & (alpha_r > PIVOT_TOL)) | ((st == AT_UPPER) & (alpha_r < -PIVOT_TOL))
            ok &= movable
            cand = np.flatnonzero(ok)
            if cand.size == 0:
                return LpStatus.INFEASIBLE
            ratios = np.abs(d[cand]) / np.abs(alpha_r[cand])
            best = ratios.min()
            ties = cand[ratios <= best + 1e-12]
            if bland:
                q = ties.min()
            else:
                q = ties[np.argmax(np.abs(alpha_r[ties]))]
            alpha = self._column(q)
            leaving = self.basis[r]
            target = lob[r] if below else upb[r]
            step = (xb[r] - target) / alpha[r]
            self.x[self.basis] = xb - step * alpha
            self.x[q] += step
            self.x[leaving] = target
            st[leaving] = AT_LOWER if below else AT_UPPER
            st[q] = BASIC
            self._pivot(r, q, alpha)
            obj = self.objective()
            if cutoff is not None and obj >= cutoff:
                return LpStatus.CUTOFF
            if obj > best_obj + 1e-12:
                best_obj = obj
                stalled = 0
                bland = False
            else:
                stalled += 1
                if stalled >= self.stall_limit and not bland:
                    bland = True
                    self.bland_engaged = True

    def reoptimize(self, cutoff=None) -> LpStatus:
        """Dual simplex after :meth:`set_bounds`.

        Nonbasic costs are nudged by tiny positive amounts (in the direction
        that keeps the basis dual feasible) for the dual phase, which
        removes dual degeneracy; a primal pass with the true costs finishes.
        With ``cutoff`` the solve stops early (returning CUTOFF) once the
        dual objective, less the largest possible perturbation effect,
        reaches the cutoff; that quantity bounds the true LP value from below.
        """
        if self.phase != 2:
            raise RuntimeError("reoptimize needs a finished phase-2 basis")
        self.iterations = 0
        return self._repair(cutoff)

    def _repair(self, cutoff=None):
        if not self._dual_feasible(self._reduced_costs()):
            return self._primal_restart()
        true_cost = self.cost
        delta = PERTURB * (1.0 + self._rng.random(self.total))
        movable = self.upper > self.lower
        delta[(self.state == BASIC) | ~movable] = 0.0
        self.cost = true_cost + np.where(self.state == AT_UPPER, -delta, delta)
        slack = float(delta.sum())
        try:
            status = self._dual(None if cutoff is None else cutoff + slack)
        finally:
            self.cost = true_cost
        if status is LpStatus.OPTIMAL:
            status = self._primal()
        return status

    def _primal_restart(self):
        lower, upper = self.lower[:self.n].copy(), self.upper[:self.n].copy()
        fresh = BoundedSimplex(self.A_struct, self.b, self.c_struct, lower, upper,
                               self.tol_feas, self.tol_opt, self.max_iters, self.stall_limit)
        status = fresh.solve(perturb=False)
        self.__dict__.update(fresh.__dict__)
        return status

    # -- warm-start bookkeeping -------------------------------------------
    def snapshot(self):
        return (self.basis.copy(), self.state.copy(), self.x.copy(),
                self.lower.copy(), self.upper.copy(), self.Binv.copy(), self._since_refactor)

    def restore(self, snap):
        basis, state, x, lower, upper, binv, since = snap
        self.basis = basis.copy()
        self.state = state.copy()
        self.x = x.copy()
        self.lower = lower.copy()
        self.upper = upper.copy()
        self.Binv = binv.copy()
        self._since_refactor = since

    def structural_values(self):
        return self.x[:self.n].copy()

    def result(self, status) -> LpSolution:
        x = self.structural_values()
        return LpSolution(float(self.c_struct @ x), x, status, self.iterations, self.bland_engaged)


def solve_lp(model, tol_feas: float = 1e-7, tol_opt: float = 1e-7, max_iters: int | None = None,
             stall_limit: int | None = None) -> LpSolution:
    """LP relaxation of ``model``: integrality dropped, bounds kept."""
    if model.num_vars < 1:
        raise ValueError("model has no variables")
    solver = BoundedSimplex(model.A, model.rhs, model.obj, model.lower, model.upper,
                            tol_feas=tol_feas, tol_opt=tol_opt, max_iters=max_iters,
                            stall_limit=stall_limit)
    status = solver.solve()
    return solver.result(status)
