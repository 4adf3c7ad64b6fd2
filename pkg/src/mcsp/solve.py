"""Heuristics, exact search and a brute-force oracle for MCSP.

``branch_and_bound`` has two search engines behind one report format:

* with ``use_lp_bound`` it is an LP-based branch-and-bound on the chosen
  integer program (blocks or substrings), binary branching on a
  fractional variable, node relaxations re-optimised by the dual simplex
  from the parent's basis;
* without it, a depth-first search over prefix tilings: every node covers
  a prefix of ``s1`` and branches on the blocks starting at the leftmost
  uncovered position, pruned by combinatorial lower bounds.

Both start from the greedy incumbent, whose completion time is reported
as the time to the first solution.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .catalog import BlockSet, CommonBlock, SubstringCatalog, build_blocks, build_catalog
from .instance import Instance
from .model import CbModel, CsModel, IpModel, build_cb, build_cs
from .polyhedral import cs_variable_index, lift_cs_to_cb, project_cb_to_cs
from .simplex import BoundedSimplex, LpStatus, solve_lp

INT_TOL = 1e-6
BOUND_EPS = 1e-6
BRUTE_FORCE_MAX_N = 14


class TooLarge(ValueError):
    pass


class SolveStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    FEASIBLE = "FEASIBLE"
    TIMEOUT_NO_INCUMBENT = "TIMEOUT_NO_INCUMBENT"


@dataclass(frozen=True)
class Solution:
    blocks: tuple[CommonBlock, ...]

    @property
    def value(self) -> int:
        return len(self.blocks)

    def strings(self) -> list[str]:
        return sorted(b.t for b in self.blocks)


class Verdict:
    """Truthy iff the solution is valid; ``reasons`` lists every violation."""

    def __init__(self, reasons):
        self.reasons = list(reasons)

    def __bool__(self):
        return not self.reasons

    def __repr__(self):
        return f"Verdict({'ok' if self else self.reasons})"


def verify(inst: Instance, sol: Solution) -> Verdict:
    reasons = []
    n = inst.n
    for side, s in ((1, inst.s1), (2, inst.s2)):
        cover = [0] * n
        for b in sol.blocks:
            k = b.k1 if side == 1 else b.k2
            if not b.t or k < 1 or k + len(b.t) - 1 > n:
                reasons.append(f"block {tuple(b)} out of range in s{side}")
                continue
            if s[k - 1:k - 1 + len(b.t)] != b.t:
                reasons.append(f"block {tuple(b)} does not match s{side} at {k}")
            for j in range(k - 1, k - 1 + len(b.t)):
                cover[j] += 1
        for j, c in enumerate(cover, start=1):
            if c == 0:
                reasons.append(f"s{side} position {j} uncovered")
            elif c > 1:
                reasons.append(f"s{side} overlap at position {j}")
    total = sum(len(b.t) for b in sol.blocks)
    if total != n:
        reasons.append(f"block lengths sum to {total}, not n = {n}")
    return Verdict(reasons)


# -- heuristics ------------------------------------------------------------

def trivial_solution(inst: Instance) -> Solution:
    """Single letters, each matched to the first unused occurrence in ``s2``."""
    free = {}
    for k, c in enumerate(inst.s2, start=1):
        free.setdefault(c, []).append(k)
    for c in free:
        free[c].reverse()
    blocks = [CommonBlock(c, j, free[c].pop()) for j, c in enumerate(inst.s1, start=1)]
    return Solution(tuple(blocks))


def greedy_solution(inst: Instance, catalog: SubstringCatalog | None = None) -> Solution:
    """Repeatedly place a longest common string that fits in both uncovered regions.

    Ties go to the lexicographically smallest string, then the smallest
    ``k1``, then the smallest ``k2``; catalog order already encodes this.
    Availability only shrinks, so one pass over the catalog suffices.
    """
    if catalog is None:
        catalog = build_catalog(inst)
    n = inst.n
    used1 = [False] * (n + 2)
    used2 = [False] * (n + 2)

    def first_free(positions, used, length):
        for k in positions:
            if not any(used[k:k + length]):
                return k
        return None

    blocks = []
    remaining = n
    for e in catalog:
        if remaining == 0:
            break
        length = len(e.t)
        if length > remaining:
            continue
        while True:
            k1 = first_free(e.q1, used1, length)
            if k1 is None:
                break
            k2 = first_free(e.q2, used2, length)
            if k2 is None:
                break
            for d in range(length):
                used1[k1 + d] = used2[k2 + d] = True
            blocks.append(CommonBlock(e.t, k1, k2))
            remaining -= length
    return Solution(tuple(sorted(blocks, key=lambda b: b.k1)))


# -- brute force oracle ----------------------------------------------------

def brute_force(inst: Instance, max_n: int = BRUTE_FORCE_MAX_N) -> Solution:
    """Exhaustive search over all tilings of ``s1`` with matching ``s2`` placements.

    Uses plain string comparison (no catalog) so it stays independent of
    the enumeration code it is used to check.
    """
    n = inst.n
    if n > max_n:
        raise TooLarge(f"brute force is limited to n <= {max_n}, got n = {n}")
    s1, s2 = inst.s1, inst.s2
    best = [n + 1, None]
    used = [False] * n
    chosen = []

    def rec(p):
        if len(chosen) >= best[0]:
            return
        if p == n:
            best[0], best[1] = len(chosen), list(chosen)
            return
        for length in range(n - p, 0, -1):
            t = s1[p:p + length]
            for k in range(n - length + 1):
                if s2[k:k + length] == t and not any(used[k:k + length]):
                    used[k:k + length] = [True] * length
                    chosen.append(CommonBlock(t, p + 1, k + 1))
                    rec(p + length)
                    chosen.pop()
                    used[k:k + length] = [False] * length

    rec(0)
    return Solution(tuple(best[1]))


# -- reports ---------------------------------------------------------------

@dataclass
class SolveReport:
    best: Solution | None
    lower_bound: float
    status: SolveStatus
    time_to_first_s: float
    time_to_best_s: float
    total_time_s: float
    nodes: int
    opt_gap_pct: float
    lp_gap_pct: float
    lp_value: float | None = None
    model_kind: str = "cs"
    num_vars: int = 0
    engine: str = "lp"
    extra: dict = field(default_factory=dict)

    @property
    def value(self) -> int | None:
        return self.best.value if self.best is not None else None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status.value
        d["value"] = self.value
        d["best"] = ([list(b) for b in self.best.blocks] if self.best is not None else None)
        return d


def gap_pct(value, bound) -> float:
    """Relative gap ``100 (value - bound) / value``, clamped at zero."""
    if value is None or bound is None or value <= 0:
        return math.nan
    return max(0.0, 100.0 * (value - bound) / value)


# -- conversions -----------------------------------------------------------

def solution_vector(sol: Solution, model: IpModel) -> np.ndarray:
    """0/1 point of ``model`` representing ``sol``."""
    if isinstance(model, CbModel):
        index = {b: i for i, b in enumerate(model.blocks)}
        x = np.zeros(model.num_vars)
        for b in sol.blocks:
            x[index[b]] = 1.0
        return x
    if isinstance(model, CsModel):
        index = cs_variable_index(model.catalog)
        y = np.zeros(model.num_vars)
        for b in sol.blocks:
            y[index[(b.t, b.k1, 1)]] = 1.0
            y[index[(b.t, b.k2, 2)]] = 1.0
        return y
    raise TypeError(f"unsupported model type {type(model).__name__}")


def vector_solution(v, model: IpModel, blocks: BlockSet | None = None) -> Solution:
    """Read a 0/1 point of either model back as a partition."""
    v = np.round(np.asarray(v, dtype=float))
    if isinstance(model, CbModel):
        chosen = [model.blocks[i] for i in np.flatnonzero(v > 0.5)]
    else:
        if blocks is None:
            blocks = build_blocks(model.catalog)
        x = np.round(lift_cs_to_cb(v, model.catalog, blocks, check=False))
        chosen = [blocks[i] for i in np.flatnonzero(x > 0.5)]
    return Solution(tuple(sorted(chosen, key=lambda b: b.k1)))


# -- exact search ----------------------------------------------------------

class _Clock:
    def __init__(self, limit):
        self.start = time.monotonic()
        self.limit = limit

    def elapsed(self):
        return time.monotonic() - self.start

    def expired(self):
        return self.elapsed() >= self.limit


def _lp_search(model, inst, greedy, clock, node_limit):
    """LP-based branch-and-bound; returns (best, lower_bound, nodes, t_best, root_lp)."""
    solver = BoundedSimplex(model.A, model.rhs, model.obj, model.lower, model.upper)
    status = solver.solve()
    if status is not LpStatus.OPTIMAL:
        raise RuntimeError(f"root relaxation ended with status {status.value}")
    root_lp = float(model.obj @ solver.structural_values())
    root_bound = math.ceil(root_lp - BOUND_EPS)

    best = greedy
    t_best = clock.elapsed()
    nodes = 1
    blocks = model.blocks if isinstance(model, CbModel) else build_blocks(model.catalog)

    def integral(x):
        return bool(np.all(np.abs(x - np.round(x)) <= INT_TOL))

    def consider(x):
        nonlocal best, t_best
        if not integral(x):
            return False
        cand = vector_solution(x, model, blocks)
        if cand.value < best.value and verify(inst, cand):
            best = cand
            t_best = clock.elapsed()
        return True

    def pick_branch_var(x):
        # most fractional, ties to the lowest column
        frac = np.abs(x - np.round(x))
        cand = np.flatnonzero(frac > INT_TOL)
        return int(cand[np.argmax(frac[cand] - 1e-9 * cand)])

    x_root = solver.structural_values()
    if best.value <= root_bound or consider(x_root):
        return best, float(min(best.value, root_bound)), nodes, t_best, root_lp

    # stack entries: (snapshot or None, lower, upper, parent_bound)
    stack = []
    snap = solver.snapshot()
    v = pick_branch_var(x_root)
    lo, up = solver.lower[:solver.n].copy(), solver.upper[:solver.n].copy()
    down_up = up.copy()
    down_up[v] = 0.0
    up_lo = lo.copy()
    up_lo[v] = 1.0
    stack.append((snap, lo, down_up, root_lp))
    stack.append((None, up_lo, up, root_lp))
    timed_out = False
    while stack:
        if clock.expired() or (node_limit is not None and nodes >= node_limit):
            timed_out = True
            break
        snap, lo, up, parent_lp = stack.pop()
        if math.ceil(parent_lp - BOUND_EPS) >= best.value:
            continue
        if snap is not None:
            solver.restore(snap)
        solver.set_bounds(lo, up)
        nodes += 1
        status = solver.reoptimize(cutoff=best.value - 1 + BOUND_EPS)
        if status in (LpStatus.INFEASIBLE, LpStatus.CUTOFF):
            continue
        if status is not LpStatus.OPTIMAL:
            raise RuntimeError(f"node relaxation ended with status {status.value}")
        x = solver.structural_values()
        node_lp = float(model.obj @ x)
        if math.ceil(node_lp - BOUND_EPS) >= best.value:
            continue
        if consider(x):
            continue
        v = pick_branch_var(x)
        snap = solver.snapshot()
        down_up = up.copy()
        down_up[v] = 0.0
        up_lo = lo.copy()
        up_lo[v] = 1.0
        stack.append((snap, lo, down_up, node_lp))
        stack.append((None, up_lo, up, node_lp))

    if timed_out:
        open_bounds = [math.ceil(e[3] - BOUND_EPS) for e in stack]
        lower = min([best.value, *open_bounds])
        # the node being processed when time ran out is also still open
        lower = max(min(lower, best.value), root_bound)
    else:
        lower = best.value
    return best, float(lower), nodes, t_best, root_lp


def _tiling_search(inst, catalog, greedy, clock, node_limit):
    """Depth-first search over prefix tilings of ``s1``; returns (best, lower_bound, nodes, t_best)."""
    s1, s2, n = inst.s1, inst.s2, inst.n
    by_string = catalog.index()
    q2 = {t: [k - 1 for k in e.q2] for t, e in by_string.items()}
    last_q1 = {t: e.q1[-1] - 1 for t, e in by_string.items()}
    span_mask = [[0] * (n + 1) for _ in range(n + 1)]
    for k in range(n):
        for length in range(1, n - k + 1):
            span_mask[k][length] = ((1 << length) - 1) << k

    def free_in_s2(t, used):
        length = len(t)
        for k in q2.get(t, ()):
            if not used & span_mask[k][length]:
                return True
        return False

    def lower_bound(p, used):
        # greedy longest-match factorisation is optimal for factor-closed sets
        lb1 = 0
        i = p
        while i < n:
            length = 1
            while i + length < n and free_in_s2(s1[i:i + length + 1], used):
                length += 1
            i += length
            lb1 += 1
        lb2 = 0
        j = 0
        while j < n:
            if used >> j & 1:
                j += 1
                continue
            length = 1
            while (j + length < n and not used >> (j + length) & 1
                   and last_q1.get(s2[j:j + length + 1], -1) >= p):
                length += 1
            j += length
            lb2 += 1
        return max(lb1, lb2)

    best = [greedy.value, greedy, clock.elapsed()]
    nodes = 0
    seen = {}
    chosen = []
    timed_out = False

    def rec(p, used):
        nonlocal nodes, timed_out
        if p == n:
            if len(chosen) < best[0]:
                sol = Solution(tuple(chosen))
                best[:] = [sol.value, sol, clock.elapsed()]
            return
        if timed_out:
            return
        nodes += 1
        if (nodes & 255) == 0 and (clock.expired() or (node_limit is not None and nodes >= node_limit)):
            timed_out = True
            return
        key = (p, used)
        count = len(chosen)
        if seen.get(key, n + 1) <= count:
            return
        seen[key] = count
        if count + lower_bound(p, used) >= best[0]:
            return
        for length in range(n - p, 0, -1):
            t = s1[p:p + length]
            positions = q2.get(t)
            if positions is None:
                continue
            for k in positions:
                mask = span_mask[k][length]
                if used & mask:
                    continue
                chosen.append(CommonBlock(t, p + 1, k + 1))
                rec(p + length, used | mask)
                chosen.pop()
                if timed_out:
                    return

    root_lb = lower_bound(0, 0)
    if root_lb < greedy.value:
        rec(0, 0)
    lower = best[0] if not timed_out else min(best[0], root_lb)
    return best[1], float(lower), nodes, best[2]


def branch_and_bound(model_kind: str, inst: Instance, time_limit_s: float = 60.0,
                     use_lp_bound: bool = True, node_limit: int | None = None,
                     catalog: SubstringCatalog | None = None) -> SolveReport:
    if time_limit_s <= 0:
        raise ValueError("time_limit_s must be positive")
    kind = model_kind.lower()
    if kind not in ("cb", "cs"):
        raise ValueError(f"unknown model kind {model_kind!r}")
    clock = _Clock(time_limit_s)
    if catalog is None:
        catalog = build_catalog(inst)
    greedy = greedy_solution(inst, catalog)
    t_first = clock.elapsed()
    model = build_cb(build_blocks(catalog), inst.n) if kind == "cb" else build_cs(catalog, inst.n)

    if use_lp_bound:
        best, lower, nodes, t_best, lp_value = _lp_search(model, inst, greedy, clock, node_limit)
        engine = "lp"
    else:
        best, lower, nodes, t_best = _tiling_search(inst, catalog, greedy, clock, node_limit)
        engine = "tiling"
        lp_value = None
    total = clock.elapsed()
    if lp_value is None:
        lp = solve_lp(model)
        lp_value = lp.objective_value if lp.optimal else None
        if lp_value is not None:
            lower = max(lower, float(math.ceil(lp_value - BOUND_EPS)))
    lower = min(lower, float(best.value))
    status = SolveStatus.OPTIMAL if lower >= best.value else SolveStatus.FEASIBLE
    if status is SolveStatus.OPTIMAL:
        lower = float(best.value)
    return SolveReport(
        best=best,
        lower_bound=lower,
        status=status,
        time_to_first_s=round(t_first, 3),
        time_to_best_s=round(min(t_best, total), 3),
        total_time_s=round(total, 3),
        nodes=nodes,
        opt_gap_pct=gap_pct(best.value, lower) if status is not SolveStatus.OPTIMAL else 0.0,
        lp_gap_pct=gap_pct(best.value, lp_value),
        lp_value=lp_value,
        model_kind=kind,
        num_vars=model.num_vars,
        engine=engine,
    )
