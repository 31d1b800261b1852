import random
from itertools import combinations

import pytest

from conftest import random_ideal
from tvbkit.core import exact
from tvbkit.core.matroid import (
    FlagOfFlats,
    LinearIdealMatrix,
    Matroid,
    flag_indicator_matrix,
    initial_form,
)
from tvbkit.errors import MatroidError


def _independent_by_restriction(ideal: LinearIdealMatrix, S) -> bool:
    # S is independent iff no nonzero vector of L is supported inside S
    k = ideal.generator_count
    if k == 0:
        return True
    outside = [j for j in range(ideal.m) if j not in S]
    if not outside:
        return False
    restricted = [[row[j] for j in outside] for row in ideal.coeffs]
    return exact.rank(restricted, len(outside)) == k


def _brute_circuits(ideal: LinearIdealMatrix):
    m = ideal.m
    dependent = [
        frozenset(S)
        for size in range(1, m + 1)
        for S in combinations(range(m), size)
        if not _independent_by_restriction(ideal, S)
    ]
    return [C for C in dependent if not any(D < C for D in dependent)]


def _tropical_by_brute_force(ideal, w) -> bool:
    for C in _brute_circuits(ideal):
        values = [w[j] for j in C]
        if values.count(min(values)) < 2:
            return False
    return True


def test_uniform_rank_two(u23):
    assert u23.rank == 2
    assert all(u23.is_independent(S) for S in combinations(range(3), 2))
    assert not u23.is_independent((0, 1, 2))
    assert u23.is_uniform
    assert u23.rank_of((0, 1, 2)) == 2
    assert u23.rank_of((1,)) == 1


def test_identity_ideal_has_only_loops():
    M = Matroid(LinearIdealMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert M.rank == 0
    assert M.loops == frozenset({0, 1, 2})
    assert M.closure(()) == frozenset({0, 1, 2})


def test_sym2_ideal_rank():
    M = Matroid(LinearIdealMatrix.from_rows([[1, 1, 0, 1, 0, 0], [1, 0, 1, 0, 1, 0], [0, 1, 1, 0, 0, 1]]))
    assert M.rank == 3
    assert all(
        M.is_independent(S) == _independent_by_restriction(M.backing, S)
        for size in range(7)
        for S in combinations(range(6), size)
    )


def test_circuits():
    (c,) = Matroid(LinearIdealMatrix.from_rows([[1, 1, 1]])).circuits
    assert c.support == frozenset({0, 1, 2})
    assert c.coefficients == (1, 1, 1)
    split = Matroid(LinearIdealMatrix.from_rows([[1, 0, 1, 0], [0, 1, 0, 1]]))
    assert sorted(sorted(c.support) for c in split.circuits) == [[0, 2], [1, 3]]


def test_closure_and_flats():
    M = Matroid(LinearIdealMatrix.from_rows([[0, 1, 1]]))
    assert M.closure({1}) == frozenset({1, 2})
    assert M.maximal_proper_flats == [frozenset({0}), frozenset({1, 2})]
    assert M.is_flat({0})
    assert not M.is_flat({1})


def test_maximal_proper_flats_of_uniform(u23):
    assert u23.maximal_proper_flats == [frozenset({0}), frozenset({1}), frozenset({2})]


def test_coloops_and_unique_basis():
    M = Matroid(LinearIdealMatrix.from_rows([[0, 1, 1]]))
    assert M.coloops == frozenset({0})
    assert not M.has_unique_basis
    monomial = Matroid(LinearIdealMatrix.from_rows([[0, 0, 1]]))
    assert monomial.loops == frozenset({2})
    assert monomial.has_unique_basis


def test_ideal_validation():
    with pytest.raises(MatroidError):
        LinearIdealMatrix.from_rows([[1, 1, 0], [2, 2, 0]])
    with pytest.raises(MatroidError):
        LinearIdealMatrix.from_rows([[0, 0, 0]])
    with pytest.raises(MatroidError):
        LinearIdealMatrix.from_rows([])


def test_trop_membership(u23):
    assert u23.trop_membership((3, 0, 0))
    assert not u23.trop_membership((0, 1, 2))
    assert all(u23.trop_membership((t, t, t)) for t in range(-3, 4))


def test_apartment_membership(u23):
    assert u23.apartment_membership((0, 1), (1, 0, 0))
    assert not u23.apartment_membership((0, 1), (0, 0, 1))
    assert u23.apartment_membership((0, 2), (0, 0, 1))
    assert all(u23.apartment_membership(B, (0, 0, 0)) for B in u23.bases)
    with pytest.raises(MatroidError):
        u23.apartment_membership((0,), (0, 0, 0))


def test_fundamental_circuit(u23):
    c = u23.fundamental_circuit((0, 1), 2)
    assert c.support == frozenset({0, 1, 2})
    with pytest.raises(MatroidError):
        u23.fundamental_circuit((0, 1), 1)


def test_initial_matroid(u23):
    assert u23.initial_matroid((0, 0, 0)).backing.coeffs == u23.backing.coeffs
    inner = u23.initial_matroid((9, 0, 0))
    assert inner.backing.coeffs == ((0, 1, 1),)
    assert inner.rank == 2


def test_initial_form(u23):
    (c,) = u23.circuits
    assert initial_form(c, (1, 0, 0)) == (0, 1, 1)


def test_flags(u23):
    flag = u23.flag_from_order((0, 1))
    assert flag.chain == (frozenset({0, 1, 2}), frozenset({0}))
    assert u23.is_maximal_flag(flag)
    assert not u23.is_maximal_flag(FlagOfFlats((frozenset({0, 1, 2}),)))
    with pytest.raises(MatroidError):
        u23.flag_from_order((0, 0))


def test_flag_indicator_matrix():
    free = Matroid(LinearIdealMatrix.from_rows([], 3))
    flag = free.flag_from_order((0, 1, 2))
    assert flag_indicator_matrix(flag, 3) == [(1, 1, 1), (1, 1, 0), (1, 0, 0)]
    assert flag_indicator_matrix(FlagOfFlats((frozenset({0, 1}),)), 2) == [(1, 1)]


def test_row_in_open_maximal_face(u23):
    assert u23.row_in_open_maximal_face((2, 2, 0)) is None
    assert u23.row_in_open_maximal_face((0, 0, 0)) is None
    assert u23.row_in_open_maximal_face((1, 0, 0)) == u23.flag_from_order((0, 1))


def test_independence_matches_brute_force():
    rng = random.Random(20240601)
    for _ in range(200):
        m = rng.randint(2, 7)
        k = rng.randint(1, m - 1)
        ideal = random_ideal(rng, m, k)
        M = Matroid(ideal)
        S = [j for j in range(m) if rng.random() < 0.5]
        assert M.is_independent(S) == _independent_by_restriction(ideal, S)
        assert M.rank == m - k


def test_trop_membership_matches_circuit_oracle():
    rng = random.Random(7)
    for _ in range(200):
        m = rng.randint(3, 6)
        ideal = random_ideal(rng, m, rng.randint(1, m - 2))
        M = Matroid(ideal)
        w = [rng.randint(0, 2) for _ in range(m)]
        assert M.trop_membership(w) == _tropical_by_brute_force(ideal, w)


def test_apartments_cover_tropical_points():
    rng = random.Random(11)
    checked = 0
    while checked < 200:
        m = rng.randint(3, 5)
        M = Matroid(random_ideal(rng, m, rng.randint(1, m - 2)))
        w = [rng.randint(0, 3) for _ in range(m)]
        if not M.trop_membership(w):
            continue
        assert any(M.apartment_membership(B, w) for B in M.bases)
        checked += 1


def test_initial_matroids_preserve_rank():
    rng = random.Random(3)
    for _ in range(200):
        m = rng.randint(2, 6)
        M = Matroid(random_ideal(rng, m, rng.randint(1, m - 1)))
        w = [rng.randint(-3, 3) for _ in range(m)]
        assert M.initial_matroid(w).rank == M.rank
