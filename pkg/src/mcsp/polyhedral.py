"""Maps between points of the blocks model and the substrings model.

``project_cb_to_cs`` sums block values by (string, position) on each side.
``lift_cs_to_cb`` goes back: for every string it spreads the side-1 mass
over the side-2 mass on the |Q1| x |Q2| grid of blocks in northwest-corner
order, which always succeeds when both sides carry the same total.
"""

from __future__ import annotations

import numpy as np

from .catalog import BlockSet, SubstringCatalog
from .model import build_cb, build_cs


class InfeasibleInput(ValueError):
    pass


class MassImbalance(InfeasibleInput):
    pass


def cs_variable_index(catalog: SubstringCatalog) -> dict[tuple[str, int, int], int]:
    """``(t, k, side) -> column`` in the substrings model built from ``catalog``."""
    index = {}
    for e in catalog:
        for k in e.q1:
            index[(e.t, k, 1)] = len(index)
    for e in catalog:
        for k in e.q2:
            index[(e.t, k, 2)] = len(index)
    return index


def _check(model, v, tol, what):
    v = np.asarray(v, dtype=float)
    if v.shape != (model.num_vars,):
        raise InfeasibleInput(f"{what} vector has shape {v.shape}, expected ({model.num_vars},)")
    viol = max(float(np.abs(model.residuals(v)).max(initial=0.0)),
               float((model.lower - v).max(initial=0.0)),
               float((v - model.upper).max(initial=0.0)))
    if viol > tol:
        raise InfeasibleInput(f"{what} vector violates its model by {viol:.3g}")
    return v


def project_cb_to_cs(x, blocks: BlockSet, catalog: SubstringCatalog, tol: float = 1e-7,
                     check: bool = True) -> np.ndarray:
    if check:
        x = _check(build_cb(blocks, catalog.n), x, tol, "blocks")
    index = cs_variable_index(catalog)
    y = np.zeros(len(index))
    for xi, b in zip(np.asarray(x, dtype=float), blocks):
        if xi:
            y[index[(b.t, b.k1, 1)]] += xi
            y[index[(b.t, b.k2, 2)]] += xi
    return y


def lift_cs_to_cb(y, catalog: SubstringCatalog, blocks: BlockSet, tol: float = 1e-7,
                  check: bool = True) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    index = cs_variable_index(catalog)
    if len(y) != len(index):
        raise InfeasibleInput(f"substrings vector has length {len(y)}, expected {len(index)}")
    for e in catalog:
        s1 = sum(y[index[(e.t, k, 1)]] for k in e.q1)
        s2 = sum(y[index[(e.t, k, 2)]] for k in e.q2)
        if abs(s1 - s2) > tol:
            raise MassImbalance(f"string {e.t!r}: side-1 mass {s1} != side-2 mass {s2}")
    if check:
        _check(build_cs(catalog, catalog.n), y, tol, "substrings")

    block_index = {b: i for i, b in enumerate(blocks)}
    x = np.zeros(blocks.m)
    for e in catalog:
        supply = [y[index[(e.t, k, 1)]] for k in e.q1]
        demand = [y[index[(e.t, k, 2)]] for k in e.q2]
        i = j = 0
        while i < len(supply) and j < len(demand):
            amount = min(supply[i], demand[j])
            if amount > 0:
                x[block_index[(e.t, e.q1[i], e.q2[j])]] += amount
            if supply[i] <= demand[j]:
                demand[j] -= amount
                supply[i] = 0.0
                i += 1
            else:
                supply[i] -= amount
                demand[j] = 0.0
                j += 1
    return x
