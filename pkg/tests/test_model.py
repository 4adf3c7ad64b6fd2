import numpy as np
import pytest

from mcsp.catalog import build_blocks, build_catalog
from mcsp.instance import Instance, generate_instance
from mcsp.model import CbModel, CsModel, build_cb, build_cs, name_token
from mcsp.solve import brute_force, solution_vector


def models(inst):
    cat = build_catalog(inst)
    return build_cb(build_blocks(cat), inst.n), build_cs(cat, inst.n)


def test_worked_sizes(worked):
    cb, cs = models(worked)
    assert (cb.num_vars, cb.num_rows) == (14, 12)
    assert (cs.num_vars, cs.num_rows) == (20, 20)


def test_single(single):
    cb, cs = models(single)
    assert (cb.num_vars, cb.num_rows) == (1, 2)
    assert cb.A.toarray().tolist() == [[1.0], [1.0]]
    assert cb.rhs.tolist() == [1.0, 1.0]
    assert (cs.num_vars, cs.num_rows) == (2, 3)


def test_aa_cover_row(aa):
    cb, cs = models(aa)
    assert (cb.num_vars, cb.num_rows) == (5, 4)
    row = {cb.blocks[j] for j, _ in cb.row_terms(cb.row_names.index("c1_1"))}
    assert row == {("A", 1, 1), ("A", 1, 2), ("AA", 1, 1)}
    assert (cs.num_vars, cs.num_rows) == (6, 6)


def test_cs_link_row(aa):
    _, cs = models(aa)
    r = cs.row_names.index("link_A")
    terms = {cs.var_names[j]: c for j, c in cs.row_terms(r)}
    assert terms == {"y1_A_1": 1.0, "y1_A_2": 1.0, "y2_A_1": -1.0, "y2_A_2": -1.0}
    assert cs.rhs[r] == 0


@pytest.mark.parametrize("seed", range(5))
def test_structure(seed):
    inst = generate_instance(30, 3, seed)
    cat = build_catalog(inst)
    cb, cs = models(inst)
    n = inst.n
    assert cb.num_rows == 2 * n and cs.num_rows == 2 * n + len(cat)
    for model in (cb, cs):
        assert set(np.unique(model.rhs)) <= {0.0, 1.0}
        # every column appears in some row, no duplicate entries
        assert np.all(np.diff(model.A.tocsc().indptr) > 0)
        coo = model.A.tocoo()
        assert len(set(zip(coo.row, coo.col))) == coo.nnz
        assert np.all(model.lower == 0) and np.all(model.upper == 1) and model.is_integer.all()
    assert set(np.unique(cb.A.data)) == {1.0}
    cover = cs.A[:2 * n]
    assert set(np.unique(cover.data)) == {1.0}
    assert set(np.unique(cs.A[2 * n:].data)) <= {1.0, -1.0}


def test_canonical_variable_order(worked):
    cb, cs = models(worked)
    keys = [(-len(b.t), b.t, b.k1, b.k2) for b in cb.blocks]
    assert keys == sorted(keys)
    side1 = cs.var_meta[:cs.n_side1]
    side2 = cs.var_meta[cs.n_side1:]
    assert all(s == 1 for _, _, s in side1) and all(s == 2 for _, _, s in side2)
    for part in (side1, side2):
        keys = [(-len(t), t, k) for t, k, _ in part]
        assert keys == sorted(keys)


@pytest.mark.parametrize("seed", range(12))
def test_length_identity_on_feasible_points(seed):
    inst = generate_instance(8 + seed % 5, 2 + seed % 3, seed)
    cb, cs = models(inst)
    sol = brute_force(inst)
    x = solution_vector(sol, cb)
    y = solution_vector(sol, cs)
    assert cb.is_feasible(x) and cs.is_feasible(y)
    lengths = np.array([len(b.t) for b in cb.blocks])
    assert lengths @ x == inst.n
    n = inst.n
    assert (cb.A[:n] @ x).sum() == n and (cb.A[n:] @ x).sum() == n
    assert y[:cs.n_side1].sum() == y[cs.n_side1:].sum()


def test_name_token():
    assert name_token("ACGT") == "ACGT"
    assert name_token("a-b") == "h" + "a-b".encode().hex()
    assert name_token("ab") != "ab"


def test_hex_names_are_unique():
    inst = Instance("a-b#", "#a-b")
    cs = build_cs(build_catalog(inst), inst.n)
    assert len(set(cs.var_names)) == cs.num_vars
    assert all(ch.isalnum() or ch == "_" for nm in cs.var_names for ch in nm)


def test_model_types(worked):
    cb, cs = models(worked)
    assert isinstance(cb, CbModel) and isinstance(cs, CsModel)
