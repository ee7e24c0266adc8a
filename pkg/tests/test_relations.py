from __future__ import annotations

import itertools
import random

import pytest

from hfsign import gf2, relations, torus
from hfsign.errors import MovingCoordinate, NotComposable, SharedCoordinates
from hfsign.formal import (
    EDGES,
    FormalBigon,
    FormalGenerator,
    FormalRectangle,
    end_generator,
    enumerate_flows,
    enumerate_generators,
    flows_from,
    validate_flow,
)
from hfsign.relations_sampling import sample_instances
from hfsign.signs import scope_flows


def _all(n, family):
    flows = scope_flows(n, "all_flows") if family == "degenerations" else None
    return list(relations.instances(n, family, flows))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bookkeeping_exhaustive(n):
    for family in relations.FAMILIES:
        for rel in _all(n, family):
            assert all(validate_flow(f) for f in rel.flows)
            assert relations.bookkeeping_ok(rel)


def test_n1_rows():
    s = relations.enumerate_relation_rows(1)
    assert s.n_vars == 4
    assert sum(s.instance_counts.values()) == 8
    assert gf2.rank(idx for idx, _ in s.rows) == 3


def test_n2_profile1_degenerations():
    s = relations.enumerate_relation_rows(2, ("degenerations",), scope="profile1")
    assert (s.n_vars, len(s.rows)) == (4, 4)
    assert gf2.rank(idx for idx, _ in s.rows) == 3


@pytest.mark.parametrize("n", [2, 3])
def test_row_arity(n):
    s = relations.enumerate_relation_rows(n)
    assert all(len(idx) in (2, 4) for idx, _ in s.rows)


def test_disjoint_partner_example():
    x = FormalGenerator((1, 2), (1, 1))
    b1, b2 = FormalBigon(x, 1, 1, 1), FormalBigon(end_generator(FormalBigon(x, 1, 1, 1)), 2, 1, 1)
    p3, p4 = relations.disjoint_partner(b1, b2)
    assert p3.start == x and p3.i == 2
    assert end_generator(p3) == FormalGenerator((1, 2), (1, -1))
    assert end_generator(p4) == end_generator(b2)


@pytest.mark.parametrize("n", [2, 3])
def test_disjoint_partner_involution(n):
    for x in enumerate_generators(n):
        for f1 in flows_from(x):
            for f2 in flows_from(end_generator(f1)):
                if set(f1.coords) & set(f2.coords):
                    continue
                p3, p4 = relations.disjoint_partner(f1, f2)
                assert relations.disjoint_partner(p3, p4) == (f1, f2)


def test_disjoint_partner_bigon_then_rectangle():
    x = FormalGenerator((1, 2, 3), (1, 1, 1))
    b = FormalBigon(x, 1, 1, 1)
    r = FormalRectangle(end_generator(b), 2, 3, 1, 1, 1, 1)
    p3, p4 = relations.disjoint_partner(b, r)
    assert validate_flow(p3) and validate_flow(p4)
    assert end_generator(p4) == end_generator(r)


def test_disjoint_partner_errors():
    x = FormalGenerator((1, 2), (1, 1))
    b = FormalBigon(x, 1, 1, 1)
    with pytest.raises(NotComposable):
        relations.disjoint_partner(b, b)
    with pytest.raises(SharedCoordinates):
        relations.disjoint_partner(b, FormalBigon(end_generator(b), 1, 1, -1))


def test_n2_has_no_grid_squares():
    for x in itertools.permutations((1, 2)):
        assert relations.grid_composites(x) == []


def test_n3_composites_have_two_decompositions_when_empty():
    for x in itertools.permutations(range(3)):
        for r1 in torus.rects_from(x):
            y = torus.end_state(x, r1)
            for r2 in torus.rects_from(y):
                if torus.end_state(y, r2) == tuple(x):
                    continue
                decs = torus.decompositions(x, r1, r2)
                if torus.is_empty(x, r1) and torus.is_empty(y, r2):
                    assert len(decs) == 2
                else:
                    assert len(decs) in (1, 2)


def test_flip_square():
    x = FormalGenerator((1, 2, 3), (1, 1, -1))
    for r in flows_from(x):
        if isinstance(r, FormalRectangle) and r.coords == (1, 2):
            rel = relations.flip_square(r, 3)
            assert all(validate_flow(f) for f in rel.flows)
            assert relations.bookkeeping_ok(rel)
            with pytest.raises(MovingCoordinate):
                relations.flip_square(r, 1)


@pytest.mark.parametrize("n", [2, 3])
def test_basic_relation_valid(n):
    for r in enumerate_flows(n)[1]:
        for e in EDGES:
            for rel in relations.basic_relation_variants(r, e):
                assert all(validate_flow(f) for f in rel.flows)
                assert relations.bookkeeping_ok(rel)


def _reduce(basis: dict[int, int], row: int) -> int:
    while row:
        top = row.bit_length() - 1
        if top not in basis:
            return row
        row ^= basis[top]
    return 0


def test_basic_variants_equivalent_n2():
    s = relations.enumerate_relation_rows(2)
    basis: dict[int, int] = {}
    m = s.n_vars
    for idx, rhs in s.rows:
        row = _reduce(basis, sum(1 << k for k in idx) | (rhs << m))
        if row:
            basis[row.bit_length() - 1] = row
    for r in enumerate_flows(2)[1]:
        for e in EDGES:
            for rel in relations.basic_relation_variants(r, e):
                row = 0
                for f in rel.flows:
                    row ^= 1 << s.index[f]
                assert _reduce(basis, row | (1 << m)) == 0


@pytest.mark.parametrize("family", relations.FAMILIES + relations.EXTRA_FAMILIES)
def test_sampled_instances_are_valid(family):
    for rel in sample_instances(4, family, 50, random.Random(3)):
        assert relations.bookkeeping_ok(rel)
        assert all(validate_flow(f) for f in rel.flows)


def test_sampling_below_minimum_power_is_empty():
    rng = random.Random(0)
    assert list(sample_instances(2, "grid", 5, rng)) == []
    assert list(sample_instances(2, "flip", 5, rng)) == []
    assert list(sample_instances(1, "disjoint", 5, rng)) == []
