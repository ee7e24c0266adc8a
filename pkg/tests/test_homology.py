from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from hfsign import diagram as dg
from hfsign import homology as hm
from hfsign import signs
from hfsign.errors import DifferentialNotSquareZero, PowerMismatch


def _m(rows):
    return hm.SparseIntMatrix.from_dense(rows)


@pytest.mark.parametrize("rows,factors,rank", [
    ([[2, 0], [0, 0]], [2], 1),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 1, 1], 3),
    ([[2, 4], [4, 8]], [2], 1),
    ([[2, 0], [0, 3]], [1, 6], 2),
    ([[0, 0], [0, 0]], [], 0),
])
def test_smith_examples(rows, factors, rank):
    assert hm.smith_normal_form(_m(rows)) == (factors, rank)


def _det(a):
    # Bareiss determinant, an independent check on the product of factors
    a = [row[:] for row in a]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2 ** 32))
def test_smith_invariants(rows, cols, seed):
    rng = random.Random(seed)
    a = [[rng.choice([0, 0, 1, -1, 2, 3, -4]) for _ in range(cols)] for _ in range(rows)]
    factors, rank = hm.smith_normal_form(_m(a))
    assert rank == hm.rational_rank(_m(a))
    assert all(b % a_ == 0 for a_, b in zip(factors, factors[1:]))
    if rows == cols:
        prod = 1
        for f in factors:
            prod *= f
        assert abs(_det(a)) == (prod if rank == rows else 0)


def test_zero_differentials():
    ev = signs.build_evaluator(2)
    assert hm.differential(dg.s3_grid(2), ev).is_zero()
    assert hm.differential(dg.s3_grid(1), signs.build_evaluator(1)).is_zero()
    assert hm.d_squared_is_zero(dg.s3_grid(2), ev) == (True, None)


def test_stabilized_unknot_block_structure():
    d = dg.b_stabilize(dg.s3_grid(2))
    ev = signs.build_evaluator(3, table_power=2)
    cx = hm.chain_complex(d, ev)
    # each u generator has two bigons to its d copy, with opposite signs
    for x, col in zip(cx.basis, cx.terms):
        bigon_signs = [s for _, s, f in col if isinstance(f, dg.StabBigon)]
        assert sorted(bigon_signs) == ([-1, 1] if x.stab == ("u",) else [])
    assert cx.d.is_zero()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_s3_homology(n):
    r = hm.homology(dg.s3_grid(n), signs.build_evaluator(n))
    assert (r.betti, r.torsion) == (2 ** (n - 1), [])
    assert r.f2_dim == r.q_rank == r.betti


def test_stabilized_s3():
    d = dg.b_stabilize(dg.s3_grid(2))
    r = hm.homology(d, signs.build_evaluator(3, table_power=2))
    assert (r.betti, r.torsion) == (4, [])


def test_unknot_and_trefoil():
    assert hm.homology(dg.unknot_grid(), signs.build_evaluator(2)).betti == 2
    r = hm.homology(dg.trefoil_grid(), signs.build_evaluator(5))
    assert (r.betti, r.torsion, r.f2_dim) == (48, [], 48)


def test_power_mismatch():
    with pytest.raises(PowerMismatch):
        hm.differential(dg.s3_grid(3), signs.build_evaluator(2))


def test_perturbed_table_breaks_d_squared():
    ev = signs.build_evaluator(4)
    table = ev.table
    entries = dict(table.entries)
    r = next(f for f in entries if f.start.sigma == (1, 2, 3, 4))
    entries[r] = -entries[r]
    bad = signs.SignEvaluator(4, signs.SignTable(4, table.scope, entries))
    rng = random.Random(0)
    failures = 0
    for _ in range(10):
        O = list(range(1, 5))
        rng.shuffle(O)
        ok, witness = hm.d_squared_is_zero(dg.s3_grid(4, tuple(O)), bad)
        if not ok:
            failures += 1
            assert witness["coefficient"] != 0 and witness["paths"]
    assert failures
    d = next(dg.s3_grid(4, O) for O in [(1, 2, 3, 4), (2, 1, 4, 3), (4, 3, 2, 1)]
             if not hm.d_squared_is_zero(dg.s3_grid(4, O), bad)[0])
    with pytest.raises(DifferentialNotSquareZero):
        hm.homology(d, bad)


def test_rank_coherence():
    d = dg.trefoil_grid()
    mat = hm.differential(d, signs.build_evaluator(5))
    r = hm.homology(d, signs.build_evaluator(5))
    even = sum(1 for t in r.torsion if t % 2 == 0)
    assert r.f2_dim == r.betti + 2 * even
    assert mat.rows - 2 * hm.rational_rank(mat) == r.betti


def test_triplet_export():
    m = _m([[0, 1], [-1, 0]])
    assert m.to_triplets() == "2 2 2\n0 1 1\n1 0 -1\n"
    assert m.matmul(m).to_dense() == [[-1, 0], [0, -1]]


def test_result_json():
    r = hm.homology(dg.s3_grid(2), signs.build_evaluator(2))
    assert r.to_json() == {"betti": 2, "torsion": [], "f2_dim": 2, "q_rank": 2}
