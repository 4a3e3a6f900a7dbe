import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from daestruct import (
    Assignment,
    IllPosedWitness,
    IncidenceGraph,
    SignatureMatrix,
    StructurallyIllPosed,
    TooLarge,
    brute_force_mvt,
    from_triplets,
    max_value_transversal,
    maximum_matching,
)
from daestruct.lap import hall_violator, solve_assignment
from oracles import random_matrix
from test_sigma import matrices


def check_assignment(m, a):
    assert sorted(a.row_to_col) == list(range(1, m.n + 1))
    for i, j in a.pairs():
        assert a.col_to_row[j - 1] == i
        assert m.get(i, j) is not None
    assert a.value == sum(m.get(i, j) for i, j in a.pairs())


def check_witness(m, w):
    adj = m.adjacency()
    gamma = {j + 1 for i in w.rows for j in adj[i - 1]}
    assert gamma <= set(w.columns)
    assert len(w.columns) < len(w.rows)


def test_singleton():
    a = max_value_transversal(from_triplets(1, [(1, 1, 3)]))
    assert a.pairs() == [(1, 1)] and a.value == 3


def test_two_by_two_prefers_diagonal():
    m = from_triplets(2, [(1, 1, 1), (1, 2, 0), (2, 1, 0), (2, 2, 1)])
    a = max_value_transversal(m)
    assert a.pairs() == [(1, 1), (2, 2)] and a.value == 2


def test_crane_value_zero(crane):
    a = max_value_transversal(crane)
    check_assignment(crane, a)
    assert a.value == 0
    assert brute_force_mvt(crane).value == 0


def test_crane_listed_transversal_is_optimal(crane):
    names = [("f1", "tau"), ("f2", "theta"), ("f3", "u1"), ("f4", "u2"),
             ("f5", "d"), ("f6", "r"), ("f7", "x"), ("f8", "z")]
    r2c = [crane.col_labels.index(c) + 1 for _, c in names]
    assert Assignment.from_row_to_col(crane, r2c).value == 0


def test_single_column_is_ill_posed():
    m = from_triplets(2, [(1, 1, 0), (2, 1, 0)])
    with pytest.raises(StructurallyIllPosed) as ei:
        max_value_transversal(m)
    assert ei.value.witness.rows == {1, 2} and ei.value.witness.columns == {1}


def test_empty_row_witness():
    m = from_triplets(3, [(1, 1, 0), (2, 2, 0), (2, 3, 1)])
    with pytest.raises(StructurallyIllPosed) as ei:
        max_value_transversal(m)
    check_witness(m, ei.value.witness)


def test_witness_rejects_non_violator():
    with pytest.raises(ValueError):
        IllPosedWitness(frozenset({1}), frozenset({1}))


def test_brute_force_limit():
    with pytest.raises(TooLarge):
        brute_force_mvt(SignatureMatrix(11, {(i, i): 0 for i in range(1, 12)}))


def test_brute_force_ill_posed_carries_witness():
    m = from_triplets(3, [(1, 1, 0), (2, 1, 0), (3, 3, 0)])
    with pytest.raises(StructurallyIllPosed) as ei:
        brute_force_mvt(m)
    check_witness(m, ei.value.witness)


def test_from_row_to_col_validation(crane):
    with pytest.raises(ValueError):
        Assignment.from_row_to_col(crane, [1] * 8)
    with pytest.raises(ValueError):
        # the identity uses (6, 6), which is absent
        Assignment.from_row_to_col(crane, list(range(1, 9)))


def test_random_dense_six_by_six_self_consistency():
    rng = np.random.default_rng(1000)
    for _ in range(200):
        m = random_matrix(rng, 6, 1.0, max_order=5)
        assert max_value_transversal(m).value == brute_force_mvt(m).value


@settings(max_examples=300, deadline=None)
@given(matrices(max_n=7, labels=False))
def test_oracle_equivalence(m):
    size = maximum_matching(IncidenceGraph.from_matrix(m)).size
    try:
        ref = brute_force_mvt(m)
    except StructurallyIllPosed:
        assert size < m.n
        with pytest.raises(StructurallyIllPosed) as ei:
            max_value_transversal(m)
        check_witness(m, ei.value.witness)
        return
    assert size == m.n
    a = max_value_transversal(m)
    check_assignment(m, a)
    assert a.value == ref.value


@settings(max_examples=200, deadline=None)
@given(matrices(max_n=7, labels=False))
def test_duals_certify_optimality(m):
    try:
        a = max_value_transversal(m)
    except StructurallyIllPosed:
        return
    u, v, shift = a.row_dual, a.col_dual, a.shift
    for (i, j), s in m.entries.items():
        reduced = (shift - s) - u[i - 1] - v[j - 1]
        assert reduced >= 0
        if a.row_to_col[i - 1] == j:
            assert reduced == 0


@settings(max_examples=100, deadline=None)
@given(matrices(max_n=6, labels=False), st.integers(0, 5))
def test_constant_shift(m, k):
    try:
        a = max_value_transversal(m)
    except StructurallyIllPosed:
        return
    shifted = SignatureMatrix(m.n, {key: s + k for key, s in m.entries.items()})
    b = max_value_transversal(shifted)
    assert b.value == a.value + m.n * k
    # the optimal set is unchanged: each solver's pick is optimal for the other matrix
    assert Assignment.from_row_to_col(m, b.row_to_col).value == a.value
    assert Assignment.from_row_to_col(shifted, a.row_to_col).value == b.value


def test_hall_violator_finds_smallest():
    m = from_triplets(3, [(1, 1, 0), (2, 1, 0), (3, 1, 0), (3, 2, 0), (3, 3, 0)])
    w = hall_violator(m)
    assert w.rows == {1, 2} and w.columns == {1}
    assert hall_violator(from_triplets(1, [(1, 1, 0)])) is None


def test_solve_assignment_costs():
    rows = [[(0, 4), (1, 1)], [(0, 2), (1, 3)]]
    x, y, u, v = solve_assignment(rows, 2)
    assert x == [1, 0] and y == [1, 0]
    for i, r in enumerate(rows):
        for j, c in r:
            assert c - u[i] - v[j] >= 0


def test_large_sparse_chain():
    n = 400
    ents = {(i, i): 0 for i in range(1, n + 1)}
    ents.update({(i, i + 1): 1 for i in range(1, n)})
    ents[(n, 1)] = 1
    a = max_value_transversal(SignatureMatrix(n, ents))
    assert a.value == n
