"""Slow, independent reference implementations used only by the tests."""

import numpy as np


def naive_catalog(s1, s2):
    """``{t: (q1, q2)}`` by comparing every substring of s1 with every substring of s2."""
    n = len(s1)
    found = {}
    for i in range(n):
        for j in range(i + 1, n + 1):
            t = s1[i:j]
            for k in range(n - len(t) + 1):
                if s2[k:k + len(t)] == t:
                    found.setdefault(t, (set(), set()))
                    found[t][0].add(i + 1)
                    found[t][1].add(k + 1)
    return {t: (sorted(a), sorted(b)) for t, (a, b) in found.items()}


def tableau_lp(A, b, c, tol=1e-9):
    """min c.x s.t. A x = b, 0 <= x <= 1 by a dense two-phase tableau simplex (Bland's rule).

    Upper bounds become explicit rows ``x + s = 1``.  Returns the optimal value.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    # [A 0; I I] [x; s] = [b; 1]
    M = np.zeros((m + n, 2 * n))
    M[:m, :n] = A
    M[m:, :n] = np.eye(n)
    M[m:, n:] = np.eye(n)
    rhs = np.concatenate([np.asarray(b, dtype=float), np.ones(n)])
    neg = rhs < 0
    M[neg] *= -1
    rhs[neg] *= -1
    rows, cols = M.shape
    T = np.zeros((rows + 1, cols + rows + 1))
    T[:rows, :cols] = M
    T[:rows, cols:cols + rows] = np.eye(rows)
    T[:rows, -1] = rhs
    basis = list(range(cols, cols + rows))

    def run(cost, allowed):
        T[-1, :] = 0
        T[-1, :len(cost)] = cost
        for i, bv in enumerate(basis):
            T[-1] -= T[-1, bv] * T[i]
        while True:
            entering = next((j for j in allowed if T[-1, j] < -tol), None)
            if entering is None:
                return
            best, leave = None, None
            for i in range(rows):
                if T[i, entering] > tol:
                    ratio = T[i, -1] / T[i, entering]
                    if best is None or ratio < best - 1e-12 or (abs(ratio - best) <= 1e-12 and basis[i] < basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                raise RuntimeError("unbounded")
            T[leave] /= T[leave, entering]
            for i in range(rows + 1):
                if i != leave and T[i, entering] != 0:
                    T[i] -= T[i, entering] * T[leave]
            basis[leave] = entering

    phase1 = np.concatenate([np.zeros(cols), np.ones(rows)])
    run(phase1, list(range(cols + rows)))
    if -T[-1, -1] > 1e-7:
        raise RuntimeError("infeasible")
    # drive artificials out where possible
    for i, bv in enumerate(basis):
        if bv >= cols:
            j = next((j for j in range(cols) if abs(T[i, j]) > tol), None)
            if j is not None:
                T[i] /= T[i, j]
                for r in range(rows + 1):
                    if r != i and T[r, j] != 0:
                        T[r] -= T[r, j] * T[i]
                basis[i] = j
    cost = np.concatenate([np.asarray(c, dtype=float), np.zeros(n)])
    run(cost, list(range(cols)))
    return -T[-1, -1]
