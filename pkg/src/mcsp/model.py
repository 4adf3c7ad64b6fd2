"""Integer programs for MCSP: the common-blocks and common-substrings models."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .catalog import BlockSet, SubstringCatalog


class NameCollision(RuntimeError):
    """Two variables or rows received the same name (an internal bug)."""


@dataclass
class IpModel:
    """A minimisation problem ``min c.x  s.t.  A x = rhs,  lower <= x <= upper``.

    ``var_meta`` records where each variable came from: a block index for
    the blocks model, ``(t, k, side)`` for the substrings model.
    """

    var_names: list[str]
    obj: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    is_integer: np.ndarray
    row_names: list[str]
    A: sp.csr_matrix
    rhs: np.ndarray
    var_meta: list = field(default_factory=list)
    sense: str = "min"
    name: str = "mcsp"

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    @property
    def num_rows(self) -> int:
        return len(self.row_names)

    def row_terms(self, r: int) -> list[tuple[int, float]]:
        lo, hi = self.A.indptr[r], self.A.indptr[r + 1]
        return list(zip(self.A.indices[lo:hi].tolist(), self.A.data[lo:hi].tolist()))

    def residuals(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float) - self.rhs

    def is_feasible(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return (np.all(np.abs(self.residuals(x)) <= tol)
                and np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def objective(self, x) -> float:
        return float(self.obj @ np.asarray(x, dtype=float))

    def check_names(self):
        for kind, names in (("variable", self.var_names), ("row", self.row_names)):
            if len(set(names)) != len(names):
                seen = set()
                dup = next(nm for nm in names if nm in seen or seen.add(nm))
                raise NameCollision(f"duplicate {kind} name {dup!r}")


@dataclass
class CbModel(IpModel):
    blocks: BlockSet | None = None


@dataclass
class CsModel(IpModel):
    catalog: SubstringCatalog | None = None
    # y1 variables occupy [0, n_side1), y2 variables the rest
    n_side1: int = 0


_PLAIN = re.compile(r"[A-Z0-9]+\Z")


def name_token(t: str) -> str:
    """Uppercase/digit strings are used verbatim, anything else is hex-escaped."""
    if _PLAIN.match(t):
        return t
    return "h" + t.encode("utf-8").hex()


def _assemble(rows, cols, vals, shape) -> sp.csr_matrix:
    A = sp.csr_matrix((np.asarray(vals, dtype=float), (rows, cols)), shape=shape)
    A.sum_duplicates()
    A.sort_indices()
    return A


def build_cb(blocks: BlockSet, n: int) -> CbModel:
    m = blocks.m
    rows, cols = [], []
    for i, b in enumerate(blocks):
        span = range(len(b.t))
        rows.extend(b.k1 - 1 + d for d in span)
        rows.extend(n + b.k2 - 1 + d for d in span)
        cols.extend([i] * (2 * len(b.t)))
    A = _assemble(rows, cols, np.ones(len(rows)), (2 * n, m))
    model = CbModel(
        var_names=[f"x_{i + 1}" for i in range(m)],
        obj=np.ones(m),
        lower=np.zeros(m),
        upper=np.ones(m),
        is_integer=np.ones(m, dtype=bool),
        row_names=[f"c1_{j}" for j in range(1, n + 1)] + [f"c2_{j}" for j in range(1, n + 1)],
        A=A,
        rhs=np.ones(2 * n),
        var_meta=list(range(m)),
        name="mcsp_cb",
        blocks=blocks,
    )
    model.check_names()
    return model


def build_cs(catalog: SubstringCatalog, n: int) -> CsModel:
    meta = []
    for e in catalog:
        meta.extend((e.t, k, 1) for k in e.q1)
    n_side1 = len(meta)
    for e in catalog:
        meta.extend((e.t, k, 2) for k in e.q2)
    link_row = {e.t: 2 * n + r for r, e in enumerate(catalog)}

    rows, cols, vals = [], [], []
    for v, (t, k, side) in enumerate(meta):
        base = 0 if side == 1 else n
        for d in range(len(t)):
            rows.append(base + k - 1 + d)
            cols.append(v)
            vals.append(1.0)
        rows.append(link_row[t])
        cols.append(v)
        vals.append(1.0 if side == 1 else -1.0)
    num_vars = len(meta)
    num_rows = 2 * n + len(catalog)
    A = _assemble(rows, cols, vals, (num_rows, num_vars))
    obj = np.zeros(num_vars)
    obj[:n_side1] = 1.0
    model = CsModel(
        var_names=[f"y{side}_{name_token(t)}_{k}" for t, k, side in meta],
        obj=obj,
        lower=np.zeros(num_vars),
        upper=np.ones(num_vars),
        is_integer=np.ones(num_vars, dtype=bool),
        row_names=([f"c1_{j}" for j in range(1, n + 1)] + [f"c2_{j}" for j in range(1, n + 1)]
                   + [f"link_{name_token(e.t)}" for e in catalog]),
        A=A,
        rhs=np.concatenate([np.ones(2 * n), np.zeros(len(catalog))]),
        var_meta=meta,
        name="mcsp_cs",
        catalog=catalog,
        n_side1=n_side1,
    )
    model.check_names()
    return model


def build_model(kind: str, inst, catalog: SubstringCatalog | None = None,
                blocks: BlockSet | None = None) -> IpModel:
    from .catalog import build_blocks, build_catalog

    kind = kind.lower()
    if catalog is None:
        catalog = build_catalog(inst)
    if kind == "cb":
        return build_cb(blocks if blocks is not None else build_blocks(catalog), inst.n)
    if kind == "cs":
        return build_cs(catalog, inst.n)
    raise ValueError(f"unknown model kind {kind!r}")
